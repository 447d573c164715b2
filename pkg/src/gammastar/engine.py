"""Certified evaluation of the scaled gamma function.

The scaled gamma function is

    Gamma*(z) = Gamma(z) / (sqrt(2 pi) z^{z-1/2} e^{-z}),

principal branch of z^{z-1/2}, analytic for |arg z| < pi, tending to 1 as
z -> infinity in any sector |arg z| <= pi - delta.

Two independent certified evaluators live here.  ``gamma_star`` shifts the
argument right until the divergent Stirling series truncated near its
least term is provably accurate (the truncation bound is the explicit
(1 + zeta(N)) Gamma(N) (2 sqrt(N) + 1) / (2 (2 pi)^{N+1} |z|^N) estimate,
valid in |arg z| <= pi/2 for N >= 2), then divides the shift back out
through exact factor balls.  ``gamma_star_stieltjes`` instead integrates
the Stieltjes kernel Q(t)/(z+t)^2, Q(t) = frac(t)(1 - frac(t))/2, in
closed form over unit intervals, finishing with the Bernoulli log-series
under the classical Lindelof remainder bound.  The two routes share no
series, so their cross-agreement is the package's non-circular accuracy
check.

Beyond |arg z| = pi/2 both evaluators route through the reflection
identity Gamma*(z) = (1 - e^{+-2 pi i z})^{-1} / Gamma*(z e^{-+ i pi});
within 0.1 radians of the negative real axis evaluation is refused (the
reflection factor degenerates and the shift chain passes arbitrarily
close to the poles of Gamma).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath as mp

from .coeffs import shared_bernoulli, shared_gammas
from .precision import (
    BigComplex,
    BigReal,
    Precision,
    _slop,
    ball_pi,
    mpf_from_fraction,
)

AXIS_MARGIN = 0.1  # refusal zone half-width around arg z = +-pi, radians


@dataclass(frozen=True)
class SectorPoint:
    """An evaluation point with its polar data.

    Either the cartesian ``z`` or the pair (modulus, theta) is
    authoritative, depending on the constructor used; the other form is a
    convenience filled in at construction precision.  Build points under
    the mpmath working precision you intend to evaluate at.
    """

    z: mp.mpc
    modulus: mp.mpf
    theta: mp.mpf
    polar_authoritative: bool = field(default=False, repr=False)

    def __post_init__(self) -> None:
        if not self.modulus > 0:
            raise ValueError("modulus must be positive (z = 0 excluded)")
        if not abs(self.theta) < mp.pi:
            raise ValueError("|arg z| must be < pi (negative real axis excluded)")

    @classmethod
    def from_complex(cls, value) -> "SectorPoint":
        z = mp.mpc(value)
        if z.imag == 0 and z.real <= 0:
            raise ValueError("|arg z| must be < pi (negative real axis excluded)")
        return cls(z=z, modulus=abs(z), theta=mp.atan2(z.imag, z.real))

    @classmethod
    def from_polar(cls, modulus, theta) -> "SectorPoint":
        modulus = mp.mpf(modulus)
        theta = mp.mpf(theta)
        return cls(
            z=modulus * mp.exp(1j * theta),
            modulus=modulus,
            theta=theta,
            polar_authoritative=True,
        )

    def conjugate(self) -> "SectorPoint":
        return SectorPoint(
            z=mp.conj(self.z),
            modulus=self.modulus,
            theta=-self.theta,
            polar_authoritative=self.polar_authoritative,
        )


def _z_ball(point: SectorPoint) -> BigComplex:
    if point.polar_authoritative:
        phase = BigComplex(mp.mpc(0, point.theta)).exp()
        return phase * BigReal(point.modulus)
    return BigComplex(point.z, 0)


def _check_sector(point: SectorPoint) -> None:
    if mp.pi - abs(point.theta) < AXIS_MARGIN:
        raise ValueError(
            "evaluation refused: arg z within 0.1 of the negative real axis"
        )


def _boosted(prec: Precision, extra: int = 64) -> Precision:
    return Precision(bits=prec.bits + extra, guard=prec.guard)


def _zeta_upper(n: int) -> mp.mpf:
    # zeta(n) <= 1 + 2^-n + integral_2^inf x^-n dx <= 1 + 2^(2-n), n >= 3
    return 1 + mp.mpf(2) ** (2 - n)


def _truncation_bound(absz_low: mp.mpf, n_terms: int) -> mp.mpf:
    """Upper bound for |R_N| and |R~_N| at |arg z| <= pi/2, N >= 2."""
    n = n_terms
    num = (1 + _zeta_upper(max(n, 3))) * mp.factorial(n - 1) * (2 * mp.sqrt(n) + 1)
    den = 2 * (2 * mp.pi) ** (n + 1) * absz_low**n
    return (num / den) * (1 + mp.mpf(2) ** -30)


def _shift_radius(prec: Precision) -> mp.mpf:
    # optimal truncation at modulus R leaves roughly e^{-2 pi R}; 48 spare
    # bits absorb the polynomial factors of the bound
    return max(mp.mpf(10), (prec.bits - prec.guard + 48) * mp.log(2) / (2 * mp.pi))


def _pick_n_terms(absz_low: mp.mpf, prec: Precision) -> int:
    # smallest N whose truncation bound clears the target, never past the
    # least-term index 2 pi |z| (floats suffice here: the rigorous bound
    # is re-evaluated exactly afterwards)
    target = -(prec.bits - prec.guard + 16)
    log2z = float(mp.log(absz_low, 2))
    log2_2pi = math.log2(2 * math.pi)
    cap = max(2, int(mp.nint(2 * mp.pi * absz_low)))
    for n in range(2, cap + 1):
        l2 = (
            math.lgamma(n) / math.log(2)
            + math.log2(2 * math.sqrt(n) + 2)
            + 1
            - (n + 1) * log2_2pi
            - n * log2z
        )
        if l2 <= target:
            return n
    return cap


def _series_at(zb: BigComplex, n_terms: int) -> BigComplex:
    # sum_{n<N} (-1)^n gamma_n z^{-n}, Horner in 1/z
    gammas = shared_gammas(n_terms - 1)
    inv = BigComplex(1) / zb
    acc = BigComplex.exact(Fraction((-1) ** (n_terms - 1)) * gammas[n_terms - 1])
    for n in range(n_terms - 2, -1, -1):
        acc = acc * inv + BigComplex.exact(Fraction((-1) ** n) * gammas[n])
    return acc


def _direct_gamma_star(point: SectorPoint, prec: Precision) -> BigComplex:
    # certified path, |arg z| <= pi/2
    wp = prec.working + 64
    for _ in range(4):
        with mp.workprec(wp):
            zb = _z_ball(point)
            radius = _shift_radius(prec)
            shift = max(0, int(mp.ceil(radius - zb.value.real)))
            zeta_b = zb + shift
            absz_low = zeta_b.abs_lower()
            n_terms = _pick_n_terms(absz_low, prec)
            series = _series_at(zeta_b, n_terms)
            out = BigComplex(
                series.value, series.err + _truncation_bound(absz_low, n_terms)
            )
            if shift:
                # Gamma*(z) = Gamma*(z+m) (z+m)^{z+m-1/2} e^{-m}
                #             / (z^{z-1/2} prod_{j<m} (z+j))
                half = Fraction(1, 2)
                expo = (zeta_b - half) * zeta_b.log() - (zb - half) * zb.log() - shift
                for j in range(shift):
                    expo = expo - (zb + j).log()
                out = out * expo.exp()
            if out.err <= prec.eps() * abs(out.value):
                return out
        wp *= 2
    raise RuntimeError("gamma_star failed to meet its error target")


def _reflection(point: SectorPoint, prec: Precision, upper: bool, evaluator) -> BigComplex:
    # Gamma*(z) = (1 - e^{+2 pi i z})^{-1} / Gamma*(z e^{-i pi}) for the
    # upper half, mirrored below; the rotated point lands in |arg| < pi/2
    # whenever the original respects the axis margin
    wp = prec.working + 64
    for _ in range(4):
        with mp.workprec(wp):
            # rotation by -+pi is exact negation, so the rotated point
            # keeps whichever representation was authoritative
            rotated = SectorPoint(
                z=-point.z,
                modulus=point.modulus,
                theta=point.theta - mp.pi if upper else point.theta + mp.pi,
                polar_authoritative=point.polar_authoritative,
            )
            inner = evaluator(rotated, _boosted(prec))
            zb = _z_ball(point)
            phase = (zb * ball_pi() * mp.mpc(0, 2 if upper else -2)).exp()
            out = BigComplex(1) / ((BigComplex(1) - phase) * inner)
            if out.err <= prec.eps() * abs(out.value):
                return out
        wp *= 2
    raise RuntimeError("gamma_star reflection failed to meet its error target")


def gamma_star(point: SectorPoint, prec: Precision = Precision()) -> BigComplex:
    """Certified Gamma*(z); err <= eps * |value|.

    Direct series path for |arg z| <= pi/2, automatic reflection for
    pi/2 < |arg z| < pi - 0.1, refusal inside the axis margin.
    """
    _check_sector(point)
    if abs(point.theta) <= mp.pi / 2:
        return _direct_gamma_star(point, prec)
    return _reflection(point, prec, point.theta > 0, _direct_gamma_star)


def continue_gamma_star(
    point: SectorPoint, rule: str, prec: Precision = Precision()
) -> BigComplex:
    """Gamma* continued by one of four explicit rules.

    ``reflect_up``/``reflect_down`` evaluate Gamma*(z) itself from the
    point rotated by -+pi (the same identity :func:`gamma_star` applies
    automatically past pi/2); they require Im z > 0 / Im z < 0.
    ``wrap_up``/``wrap_down`` step one full turn off the principal sheet:
    Gamma*(z e^{+-2 pi i}) = -e^{-+2 pi i z} Gamma*(z).
    """
    if rule == "reflect_up":
        if not point.theta > 0:
            raise ValueError("reflect_up requires Im z > 0")
        return _reflection(point, prec, True, _direct_gamma_star)
    if rule == "reflect_down":
        if not point.theta < 0:
            raise ValueError("reflect_down requires Im z < 0")
        return _reflection(point, prec, False, _direct_gamma_star)
    if rule not in ("wrap_up", "wrap_down"):
        raise ValueError(f"unknown continuation rule {rule!r}")
    wp = prec.working + 64
    for _ in range(4):
        with mp.workprec(wp):
            inner = gamma_star(point, _boosted(prec))
            zb = _z_ball(point)
            sign = -2 if rule == "wrap_up" else 2
            out = -(zb * ball_pi() * mp.mpc(0, sign)).exp() * inner
            if out.err <= prec.eps() * abs(out.value):
                return out
        wp *= 2
    raise RuntimeError("continuation failed to meet its error target")


# ---------------------------------------------------------------------------
# Stieltjes route


def _unit_interval_term(a: BigComplex) -> BigComplex:
    # J(a) = integral_0^1 Q(u)/(a+u)^2 du = ((1+2a) log(1+1/a) - 2)/2;
    # Re a >= 0 keeps Re(1+1/a) >= 1, clear of the log cut
    one = BigComplex(1)
    return ((one + a * 2) * (one + one / a).log() - 2) * Fraction(1, 2)


def _log_gamma_partial(wb: BigComplex, n_stop: int) -> BigComplex:
    # sum_{n=1}^{n_stop-1} B_{2n}/(2n(2n-1) w^{2n-1})
    bern = shared_bernoulli(2 * max(n_stop - 1, 1))
    inv2 = (BigComplex(1) / wb).powi(2)
    power = BigComplex(1) / wb
    total = BigComplex(0)
    for n in range(1, n_stop):
        coeff = Fraction(bern[2 * n], 2 * n * (2 * n - 1))
        total = total + BigComplex.exact(coeff) * power
        power = power * inv2
    return total


def _log_tail_bernoulli(wb: BigComplex, prec: Precision) -> BigComplex:
    """log Gamma* at a point with |arg| <= pi/4 via the Bernoulli series.

    Picks the shortest truncation whose Lindelof remainder clears the
    precision target, then adds that remainder to the ball error.
    """
    aw = float(abs(wb.value))
    target_l2 = -(prec.bits - prec.guard + 8)
    k_pick = int(math.pi * aw) + 2
    for k in range(1, k_pick):
        # float log2 of |B_2k| / (2k(2k-1) |w|^{2k-1}), estimating |B_2k|
        # by 4 (2k)! / (2 pi)^{2k}
        l2 = (
            2.0
            + (math.lgamma(2 * k + 1) - 2 * k * math.log(2 * math.pi)) / math.log(2)
            - math.log2(2 * k * (2 * k - 1))
            - (2 * k - 1) * math.log2(aw)
        )
        if l2 <= target_l2:
            k_pick = k
            break
    total = _log_gamma_partial(wb, k_pick)
    bern = shared_bernoulli(2 * k_pick)
    b2k = abs(mpf_from_fraction(bern[2 * k_pick]))
    rem = b2k / (2 * k_pick * (2 * k_pick - 1)) / wb.abs_lower() ** (2 * k_pick - 1)
    return BigComplex(total.value, total.err + rem * (1 + mp.mpf(2) ** -30))


def gamma_star_stieltjes(point: SectorPoint, prec: Precision = Precision()) -> BigComplex:
    """Certified Gamma*(z) by the Stieltjes kernel route; err <= eps * |value|.

    Independent of :func:`gamma_star`: no Stirling coefficients enter.
    log Gamma*(z) is the sum of closed-form unit-interval kernel integrals
    J(z+n) plus the Bernoulli log-series at the shifted endpoint, whose
    modulus is pushed high enough (and argument under pi/4) for the
    Lindelof remainder to clear the precision target.
    """
    _check_sector(point)
    if abs(point.theta) > mp.pi / 2:
        return _reflection(point, prec, point.theta > 0, gamma_star_stieltjes)
    wp = prec.working + 64
    for _ in range(4):
        with mp.workprec(wp):
            zb = _z_ball(point)
            radius = _shift_radius(prec)
            # the series endpoint needs |arg| <= pi/4 as well, so its real
            # part must also dominate the (shift-invariant) imaginary part
            shift = max(
                0,
                int(mp.ceil(radius - zb.value.real)),
                int(mp.ceil(abs(zb.value.imag) - zb.value.real)),
            )
            log_total = _log_tail_bernoulli(zb + shift, prec)
            for n in range(shift):
                log_total = log_total + _unit_interval_term(zb + n)
            out = log_total.exp()
            if out.err <= prec.eps() * abs(out.value):
                return out
        wp *= 2
    raise RuntimeError("gamma_star_stieltjes failed to meet its error target")


# ---------------------------------------------------------------------------
# Bernoulli log-series with the Lindelof sector factor, exposed


@dataclass(frozen=True)
class LogGammaTail:
    """Truncated log Gamma* series plus a safe remainder bound.

    ``partial`` is sum_{n=1}^{N-1} B_{2n}/(2n(2n-1) z^{2n-1}); the true
    log Gamma*(z) lies within ``lindelof_bound.value`` of its center (the
    bound value already carries its own rounding slack).
    """

    partial: BigComplex
    lindelof_bound: BigReal


def log_gamma_tail(point: SectorPoint, N: int, prec: Precision = Precision()) -> LogGammaTail:
    """Lindelof-bounded truncation of the log Gamma* series.

    The bound is |B_{2N}|/(2N(2N-1)|z|^{2N-1}), times |csc(2 arg z)| when
    pi/4 < |arg z| < pi/2.
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    if not abs(point.theta) < mp.pi / 2:
        raise ValueError("log_gamma_tail requires |arg z| < pi/2")
    with mp.workprec(prec.working + 32):
        zb = _z_ball(point)
        total = _log_gamma_partial(zb, N)
        if abs(point.theta) <= mp.pi / 4:
            factor = mp.mpf(1)
        else:
            factor = 1 / abs(mp.sin(2 * point.theta)) * (1 + mp.mpf(2) ** -30)
        bern = shared_bernoulli(2 * N)
        b2n = abs(mpf_from_fraction(bern[2 * N]))
        bound = b2n / (2 * N * (2 * N - 1)) / zb.abs_lower() ** (2 * N - 1) * factor
        bound = bound * (1 + mp.mpf(2) ** -30) + _slop(bound)
        return LogGammaTail(partial=total, lindelof_bound=BigReal(bound, 0))
