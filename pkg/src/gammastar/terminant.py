"""Terminant evaluation and the error-function model of Stokes smoothing.

The scaled terminant

    That_p(w) = e^{i pi p} w^{1-p} e^{-w} / (2 pi i) * I(p, w),
    I(p, w)   = int_0^inf t^{p-1} e^{-t} / (w + t) dt,

defined for p > 0 and |arg w| < pi, collapses through the Cauchy integral
for the upper incomplete gamma function to

    That_p(w) = e^{i pi p} Gamma(p) Gamma(1-p, w) / (2 pi i),

and that is how we evaluate it.  All multivaluedness of Gamma(1-p, w) in w
enters through its logarithm, so handing a continued argument of w to the
incomplete-gamma routine *is* the analytic continuation; when arg w crosses
pi the defining integral's pole at t = -w slides through the contour and
deposits a residue worth exactly +1 after the prefactor, and the
continued-logarithm route reproduces that jump on its own.  The supported
continuation strip stops at |arg w| = pi + 0.7.

A direct adaptive quadrature of the defining integral (`terminant_quadrature`)
gives an independent cross-route on the principal sector, and
`terminant_family` harvests a run of consecutive integer orders off a single
downward recurrence chain, which is what an optimally truncated re-expansion
actually consumes.

The smooth transition across a Stokes line is modelled by error functions
driven by c(phi), the root of c^2/2 = 1 + i(phi - pi) - e^{i(phi - pi)} on
the branch that behaves like (phi - pi) near phi = pi.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction

import mpmath as mp

from .precision import (
    BigComplex,
    BigReal,
    Precision,
    ball_pi,
    erf_cx,
    gamma_int,
    gamma_real,
    mpf_from_fraction,
    upper_gamma_cx,
)
from .quadrature import half_line_split

# Width of the continuation strip past the cut.  Beyond it the next pole
# crossing would come into play and the single-residue picture stops being
# the whole story, so we refuse rather than extrapolate.
STRIP_WIDTH = "0.7"


class BranchNote(enum.Enum):
    """Which representation produced the value."""

    PRINCIPAL = "principal"
    RESIDUE_CONTINUED = "residue_continued"


@dataclass(frozen=True)
class TerminantValue:
    value: BigComplex
    est_error: BigReal
    branch_note: BranchNote

    def __post_init__(self) -> None:
        if not mp.isfinite(self.est_error.value):
            raise ValueError("est_error must be finite")


def _order_fraction(p) -> Fraction:
    """Coerce the order to an exact rational; orders are structural data."""
    if isinstance(p, BigReal):
        if p.err != 0:
            raise ValueError("order p must be exact, got a ball of nonzero radius")
        p = p.value
    if isinstance(p, Fraction):
        return p
    if isinstance(p, int):
        return Fraction(p)
    if isinstance(p, (float, mp.mpf)):
        num, den = mp.libmp.to_rational(mp.mpf(p)._mpf_)
        return Fraction(int(num), int(den))
    raise TypeError("order p must be int, Fraction, float, mpf or an exact BigReal")


def _coerce_point(w) -> BigComplex:
    if isinstance(w, BigComplex):
        return w
    if isinstance(w, BigReal):
        return BigComplex(w.value, w.err)
    return BigComplex(mp.mpc(w), 0)


def _resolve_arg(wv: mp.mpc, arg_w) -> mp.mpf:
    """Continued argument of w: the caller's branch choice, sanity-checked.

    ``arg_w`` must point along w up to a whole number of turns; anything else
    is a caller error, not a branch selection.
    """
    principal = mp.arg(wv)
    if arg_w is None:
        return principal
    theta = mp.mpf(arg_w)
    turns = mp.nint((theta - principal) / (2 * mp.pi))
    if abs(theta - principal - 2 * mp.pi * turns) > mp.mpf(2) ** -16:
        raise ValueError("arg_w does not point along w")
    return theta


def _sector_note(theta: mp.mpf) -> BranchNote:
    cap = mp.pi + mp.mpf(STRIP_WIDTH)
    if abs(theta) >= cap:
        raise ValueError("arg w outside the supported sector |arg w| < pi + 0.7")
    if abs(theta) >= mp.pi:
        return BranchNote.RESIDUE_CONTINUED
    return BranchNote.PRINCIPAL


def _ball_err_through_gamma(wb: BigComplex, pq: Fraction, wp: int) -> mp.mpf:
    # |d/dw Gamma(1-p, w)| = |w^{-p} e^{-w}|, maximised over the input ball.
    if wb.err == 0:
        return mp.mpf(0)
    low = abs(wb.value) - wb.err
    if low <= 0:
        raise ValueError("w ball touches the origin")
    pf = mpf_from_fraction(pq)
    sup = mp.power(low, -pf) * mp.exp(wb.err - wb.value.real)
    return sup * wb.err * (1 + mp.mpf(2) ** (8 - wp))


def _two_pi_i() -> BigComplex:
    return BigComplex(mp.mpc(0, 2), 0) * ball_pi()


def _order_phase(pq: Fraction) -> BigComplex:
    """e^{i pi p} as a ball; exact +-1 when p is an integer."""
    if pq.denominator == 1:
        return BigComplex.exact(Fraction((-1) ** int(pq)))
    return (BigComplex(mp.mpc(0, 1), 0) * ball_pi() * BigReal.exact(pq)).exp()


def _gamma_order(pq: Fraction) -> BigComplex:
    if pq.denominator == 1:
        g = gamma_int(int(pq))
    else:
        g = gamma_real(mpf_from_fraction(pq))
    return BigComplex(g.value, g.err)


def terminant(p, w, prec: Precision = Precision(), arg_w=None) -> TerminantValue:
    """Certified That_p(w) for p > 0 on |arg w| < pi + 0.7.

    ``arg_w`` picks the branch when the point should be read off the
    principal sheet; omitted, the principal argument of ``w`` is used.  The
    returned ball satisfies err <= eps * |value|; ``est_error`` repeats the
    certified radius, and ``branch_note`` records whether the value lives on
    the principal sector or on the residue-continued strip pi <= |arg w|.
    """
    pq = _order_fraction(p)
    if pq <= 0:
        raise ValueError("terminant order must satisfy p > 0")
    wb = _coerce_point(w)
    if wb.value == 0:
        raise ValueError("terminant is undefined at w = 0")
    with mp.workprec(prec.working + 32):
        theta = _resolve_arg(wb.value, arg_w)
        note = _sector_note(theta)

    wp = prec.working + 96
    boost_bits = prec.bits + 48
    for _ in range(4):
        with mp.workprec(wp):
            inner = Precision(bits=boost_bits, guard=prec.guard)
            g = upper_gamma_cx(Fraction(1) - pq, wb.value, inner, arg_w=theta)
            spill = _ball_err_through_gamma(wb, pq, wp)
            if spill > 0:
                g = BigComplex(g.value, g.err + spill)
            out = _order_phase(pq) * _gamma_order(pq) * g / _two_pi_i()
            if out.err <= prec.eps() * abs(out.value):
                return TerminantValue(
                    value=out, est_error=BigReal(out.err), branch_note=note
                )
        wp *= 2
        boost_bits *= 2
    raise RuntimeError("terminant failed to meet its error target")


def terminant_family(
    p_top: int, count: int, w, prec: Precision = Precision(), arg_w=None
) -> tuple[TerminantValue, ...]:
    """That_{p_top - m}(w) for m = 0 .. count-1 off one recurrence chain.

    A re-expansion needs a run of consecutive integer orders at the same w,
    and each one is a single extra step of the downward recurrence
    Gamma(a-1, w) = (Gamma(a, w) - w^{a-1} e^{-w}) / (a - 1) from the shared
    base Gamma(0, w).  Entry m holds the order p_top - m.

    The descent cancels like the series it replaces, so the working
    precision carries a provision of about 1.5 bits per unit of
    min(p_top, |w|); the escalation loop catches any shortfall because the
    balls carry their own error.
    """
    if not isinstance(p_top, int) or p_top < 1:
        raise ValueError("p_top must be an integer >= 1")
    if not 1 <= count <= p_top:
        raise ValueError("count must satisfy 1 <= count <= p_top")
    wb = _coerce_point(w)
    if wb.value == 0:
        raise ValueError("terminant is undefined at w = 0")
    with mp.workprec(prec.working + 32):
        theta = _resolve_arg(wb.value, arg_w)
        note = _sector_note(theta)
        cancel = int(1.5 * float(min(p_top, abs(wb.value)))) + 64

    wp = prec.working + cancel
    boost_bits = prec.bits + cancel
    eps = prec.eps()
    for _ in range(4):
        with mp.workprec(wp):
            inner = Precision(bits=boost_bits, guard=prec.guard)
            out = _family_chain(p_top, count, wb, theta, inner, wp)
            if all(t.err <= eps * abs(t.value) for t in out):
                return tuple(
                    TerminantValue(value=t, est_error=BigReal(t.err), branch_note=note)
                    for t in out
                )
        wp *= 2
        boost_bits *= 2
    raise RuntimeError("terminant_family failed to meet its error target")


def _family_chain(
    p_top: int, count: int, wb: BigComplex, theta, prec: Precision, wp: int
) -> list[BigComplex]:
    base = upper_gamma_cx(0, wb.value, prec, arg_w=theta)
    spill = _ball_err_through_gamma(wb, Fraction(1), wp)  # d/dw Gamma(0,w) = -e^{-w}/w
    if spill > 0:
        base = BigComplex(base.value, base.err + spill)
    winv = 1 / wb
    emw = (-wb).exp()
    two_pi_i = _two_pi_i()
    power = winv * emw  # w^{-k} e^{-w}, starting at k = 1
    fact = 1  # (q - 1)! carried exactly
    harvest: dict[int, BigComplex] = {}
    g = base  # Gamma(-k, w), starting at k = 0
    q_low = p_top - count + 1
    for k in range(p_top):
        q = k + 1
        if q >= q_low:
            # That_q(w) = (-1)^q (q-1)! Gamma(1-q, w) / (2 pi i), q integer
            harvest[q] = g * Fraction((-1) ** q * fact) / two_pi_i
        if q == p_top:
            break
        g = (g - power) / (-q)
        power = power * winv
        fact *= q
    return [harvest[p_top - m] for m in range(count)]


def terminant_quadrature(p, w, prec: Precision = Precision()) -> TerminantValue:
    """That_p(w) straight from the defining integral; principal sector only.

    The half line splits at t = |w|: the integrand's peak sits at t = p - 1,
    which the regime of interest keeps at or below |w|, while the pole at
    t = -w stays a fixed angle off the contour.  tanh-sinh handles the
    possibly singular left piece, exp-sinh the decaying right piece.  The
    error field is the quadrature's own estimate, not a certified radius:
    this route exists to cross-check the incomplete-gamma chain.
    """
    pq = _order_fraction(p)
    if pq <= 0:
        raise ValueError("terminant order must satisfy p > 0")
    wb = _coerce_point(w)
    if wb.value == 0:
        raise ValueError("terminant is undefined at w = 0")
    if wb.err != 0:
        raise ValueError("quadrature route takes an exact point")
    wp = prec.working + 48
    with mp.workprec(wp):
        wv = wb.value
        if abs(mp.arg(wv)) >= mp.pi - mp.mpf(2) ** -16:
            raise ValueError("quadrature route needs |arg w| < pi")
        pm = mpf_from_fraction(pq)

        def integrand(t):
            return mp.power(t, pm - 1) * mp.exp(-t) / (wv + t)

        total, est = half_line_split(integrand, abs(wv), prec_bits=wp)
        pref = (
            mp.exp(mp.mpc(0, mp.pi * pm))
            * mp.power(wv, 1 - pm)
            * mp.exp(-wv)
            / mp.mpc(0, 2 * mp.pi)
        )
        value = pref * total
        slop = abs(value) * mp.mpf(2) ** (8 - wp)
        err = abs(pref) * est + slop
    return TerminantValue(
        value=BigComplex(value, err),
        est_error=BigReal(err),
        branch_note=BranchNote.PRINCIPAL,
    )


# ---------------------------------------------------------------------------
# the Stokes smoothing function c(phi) and the erf models


def c_of_phi(phi, prec: Precision = Precision()) -> BigComplex:
    """Root of c^2/2 = 1 + i(phi - pi) - e^{i(phi - pi)} behaving like phi - pi.

    Seeded by the quartic truncation of that branch's expansion at phi = pi
    and polished by Newton steps c <- c/2 + rhs/c; valid for |phi - pi| < pi.
    The returned radius comes from the final residual (|delta| <= r/|c| once
    r is far below |c|^2), not from counting iterations, plus the input
    ball's spread carried through |dc/dphi| <= 2.  A refined root that lands
    nearer the mirror seed -c0 than c0 is reported as a branch failure.
    """
    if isinstance(phi, BigReal):
        phi_v, phi_e = phi.value, phi.err
    else:
        phi_v, phi_e = mp.mpf(phi), mp.mpf(0)

    with mp.workprec(prec.working + 48):
        u0 = phi_v - mp.pi
        if abs(u0) >= mp.pi:
            raise ValueError("c_of_phi needs |phi - pi| < pi")
        if u0 == 0:
            return BigComplex(0, 2 * phi_e)
        # 1 + iu - e^{iu} loses ~2 log2(1/|u|) leading bits to cancellation
        extra = 2 * max(0, int(-mp.log(abs(u0), 2)) + 1)

    wp = prec.working + 48 + extra
    with mp.workprec(wp):
        u = phi_v - mp.pi
        rhs = 1 + mp.mpc(0, 1) * u - mp.exp(mp.mpc(0, u))
        seed = u * (1 + u * (mp.mpc(0, 1) / 6 + u * (mp.mpf(-1) / 36 + u * mp.mpc(0, -1) / 270)))
        c = seed
        settle = abs(seed) * mp.mpf(2) ** (8 - wp)
        for _ in range(40):
            step = c / 2 + rhs / c
            if abs(step - c) <= settle:
                c = step
                break
            c = step
        else:
            raise RuntimeError("Newton refinement of c(phi) failed to settle")
        if abs(c - seed) > abs(c + seed):
            raise ValueError("branch failure: c(phi) refined onto the mirror root")

        ac = abs(c)
        res = abs(c * c - 2 * rhs) + 6 * mp.mpf(2) ** -wp  # residual + rhs rounding
        if res > ac * ac / 8:
            raise RuntimeError("c(phi) residual too large for a certified radius")
        err = 2 * res / ac + 2 * phi_e + ac * mp.mpf(2) ** (8 - wp)
        return BigComplex(c, err)


class ModelSide(enum.Enum):
    """Which Stokes line the erf model straddles."""

    UPPER = "upper"
    LOWER = "lower"


def terminant_erf_model(
    p, w, side, prec: Precision = Precision(), arg_w=None
) -> BigComplex:
    """Error-function model of the smooth Stokes transition at phi = arg w.

    upper, phi in (0, 2 pi):   1/2 + erf(c(phi) sqrt(|w|/2)) / 2, a model
    for That_p(w) itself; lower, phi in (-2 pi, 0):
    -1/2 + erf(-conj(c(-phi)) sqrt(|w|/2)) / 2, a model for
    e^{-2 pi i p} That_p(w).  This is the model value, not the terminant:
    the order p never enters the formulas and is accepted only so callers
    can keep the pairing explicit; it still has to be positive.
    """
    if _order_fraction(p) <= 0:
        raise ValueError("terminant order must satisfy p > 0")
    if isinstance(side, str):
        side = ModelSide(side)
    wb = _coerce_point(w)
    if wb.value == 0:
        raise ValueError("the model is undefined at w = 0")
    with mp.workprec(prec.working + 48):
        theta = _resolve_arg(wb.value, arg_w)
        if side is ModelSide.UPPER:
            if not 0 < theta < 2 * mp.pi:
                raise ValueError("upper model needs 0 < arg w < 2 pi")
            c = c_of_phi(theta, prec)
        else:
            if not -2 * mp.pi < theta < 0:
                raise ValueError("lower model needs -2 pi < arg w < 0")
            c = -c_of_phi(-theta, prec).conjugate()
        root = (BigReal(abs(wb.value), wb.err) / 2).sqrt()
        zeta = c * BigComplex(root.value, root.err)
        ball = erf_cx(zeta.value, prec)
        # Re c^2(phi) = 2(1 - cos(phi - pi)) >= 0, so |erf'| <= 2/sqrt(pi)
        ball = BigComplex(ball.value, ball.err + mp.mpf("1.2") * zeta.err)
        if side is ModelSide.UPPER:
            return (1 + ball) / 2
        return (ball - 1) / 2
