"""Exponentially improved expansions and the Stokes transition.

Truncating the scaled-gamma series at its least term, N near 2 pi |z|,
leaves a remainder of order e^{-2 pi |z|}.  That remainder is not noise:
it re-expands into two terminant sums carrying the subdominant
exponentials e^{+-2 pi i z},

    R_N(z)  =  e^{2 pi i z}  sum_{m<M} (-1)^m gamma_m z^-m That_{N-m}(+2 pi i z)
             - e^{-2 pi i z} sum_{m<M} (-1)^m gamma_m z^-m That_{N-m}(-2 pi i z)
             + residual,

and the reciprocal series does the same with the signs flipped and the
(-1)^m factors absent.  Each extra term shrinks the residual by ~1/|z|,
and the explicit bound of residual_bound certifies it.  The minus sign
on the e^{-2 pi i z} sum matters: published work has gotten it wrong,
and the reconstruction identity is asserted in the tests as a guard.

Crossing arg z = pi/2 the terminants sweep from 0 to 1 in an erf profile
of width ~|z|^{-1/2}: the smooth form of the Stokes jump whose
discontinuous limits stokes_multiplier tabulates.  stokes_profile
measures the sweep by extracting the coefficient of the emerging
exponential from certified remainders and comparing it with the erf
prediction; the grid is confined to |arg z| within 0.6 of +-pi/2, the
strip where the continued-branch terminants are certified.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import mpmath as mp

from .coeffs import StirlingTable, shared_gammas
from .engine import SectorPoint, _z_ball, gamma_star
from .precision import (
    BigComplex,
    BigReal,
    Precision,
    ball_pi,
    erf_cx,
    gamma_int,
    zeta_int,
)
from .series import SeriesKind, partial_sum
from .terminant import terminant, terminant_family

STRIP_HALF_WIDTH = mp.mpf("0.6")  # certified continuation width past pi/2
ESCALATION_CAP_BITS = 8192
SLACK_RATIO = mp.mpf("1e-6")


@dataclass(frozen=True)
class HyperExpansion:
    """Re-expansion of the order-N remainder through M terminant terms.

    ``terminant_sum_up``/``terminant_sum_down`` are the full terms
    e^{+-2 pi i z} sum_{m<M} ... including the exponential prefactor but
    not the outer sign, which belongs to the kind's composition rule;
    ``residual`` is what is left of the true remainder after both sums
    are taken out, certified as a ball.
    """

    z: SectorPoint
    N: int
    M: int
    kind: SeriesKind
    terminant_sum_up: BigComplex
    terminant_sum_down: BigComplex
    residual: BigComplex

    def reconstructed_remainder(self) -> BigComplex:
        """The remainder reassembled from the right-hand side."""
        if self.kind.signed:
            return self.terminant_sum_up - self.terminant_sum_down + self.residual
        return -self.terminant_sum_up + self.terminant_sum_down + self.residual


@dataclass(frozen=True)
class StokesProfileRow:
    theta: mp.mpf
    effective_multiplier: BigComplex
    erf_prediction: BigReal
    residual: BigReal  # |effective_multiplier - erf_prediction|


def least_term_index(modulus) -> int:
    """N = round(2 pi |z|), the least-term truncation order."""
    modulus = mp.mpf(modulus)
    if not modulus > 0:
        raise ValueError("modulus must be positive")
    return int(mp.nint(2 * mp.pi * modulus))


def _check_strip(point: SectorPoint) -> None:
    if abs(point.theta) > mp.pi / 2 + STRIP_HALF_WIDTH:
        raise ValueError(
            "arg z outside the verified strip |arg z| <= pi/2 + 0.6"
        )


def _shared_table(n_top: int) -> StirlingTable:
    return StirlingTable(method="wrench", gammas=shared_gammas(n_top))


def _start_bits(modulus, M: int, prec: Precision) -> int:
    # the residual sits ~2 pi |z| log2(e) + M log2|z| bits below the
    # leading terms; starting there skips doomed escalation rounds
    depth = 2 * mp.pi * modulus / mp.log(2) + M * mp.log(max(modulus, 2), 2)
    return max(prec.bits, int(mp.ceil(depth)) + 96)


def _subdominant_arg(point: SectorPoint, prec: Precision) -> BigComplex:
    """The ball w = 2 pi i z, tight enough for the terminant chain.

    The chain's harvest targets sit ~2 pi |z| (1 + |sin theta|) log2(e)
    bits below the ball's own scale (the terminants are exponentially
    small), and no interior escalation can shrink a caller's input ball;
    so w is built with that exponential depth in extra working bits.
    """
    extra = int(6 * mp.pi * point.modulus) + 96
    with mp.workprec(prec.working + extra):
        zb = _z_ball(point)
        return zb * ball_pi() * mp.mpc(0, 2)


def _terminant_sums(
    point: SectorPoint, N: int, M: int, kind: SeriesKind, prec: Precision
):
    """The two emerging-exponential terms and their bare prefactors.

    Returns (up_term, down_term, e_up, e_down) with
    up_term = e^{2 pi i z} sum_{m<M} s_m gamma_m z^-m That_{N-m}(2 pi i z),
    s_m = (-1)^m for the gamma kind and 1 for the reciprocal, and
    down_term its image under 2 pi i z -> -2 pi i z.
    """
    zb = _z_ball(point)
    w_up = _subdominant_arg(point, prec)
    e_up = w_up.exp()
    e_down = (-w_up).exp()
    if M == 0:
        zero = BigComplex(mp.mpc(0), 0)
        return zero, zero, e_up, e_down
    fam_up = terminant_family(N, M, w_up, prec, arg_w=point.theta + mp.pi / 2)
    fam_down = terminant_family(N, M, -w_up, prec, arg_w=point.theta - mp.pi / 2)
    gammas = shared_gammas(M - 1)
    inv = BigComplex(1) / zb
    zpow = BigComplex(1)
    sum_up = BigComplex(mp.mpc(0), 0)
    sum_down = BigComplex(mp.mpc(0), 0)
    for m in range(M):
        sign = (-1) ** m if kind.signed else 1
        coeff = BigComplex.exact(Fraction(sign) * gammas[m]) * zpow
        sum_up = sum_up + coeff * fam_up[m].value
        sum_down = sum_down + coeff * fam_down[m].value
        zpow = zpow * inv
    return e_up * sum_up, e_down * sum_down, e_up, e_down


def improved_expansion(
    z: SectorPoint, N: int, M: int, kind: SeriesKind, prec: Precision = Precision()
) -> HyperExpansion:
    """Split the order-N remainder into M terminant terms plus a residual.

    The residual ball is resolved to a millionth of its own magnitude,
    which costs ~2 pi |z| log2(e) working bits: the remainder and the
    terminant sums agree to that many digits before they differ.
    """
    if not 0 <= M < N:
        raise ValueError("orders must satisfy 0 <= M < N")
    _check_strip(z)
    table = _shared_table(N - 1)
    bits = _start_bits(z.modulus, M, prec)
    while True:
        p = Precision(bits=bits, guard=prec.guard)
        with mp.workprec(p.working + 32):
            g = gamma_star(z, p)
            if not kind.signed:
                g = BigComplex(1) / g
            rem = g - partial_sum(z, N, kind, table)
            up, down, _, _ = _terminant_sums(z, N, M, kind, p)
            if kind.signed:
                res = rem - up + down
            else:
                res = rem + up - down
            if res.err <= SLACK_RATIO * abs(res.value):
                return HyperExpansion(
                    z=z,
                    N=N,
                    M=M,
                    kind=kind,
                    terminant_sum_up=up,
                    terminant_sum_down=down,
                    residual=res,
                )
        if bits >= ESCALATION_CAP_BITS:
            raise RuntimeError(
                f"residual at z={z.z}, N={N}, M={M} not resolved within "
                f"{ESCALATION_CAP_BITS} bits"
            )
        bits *= 2


def residual_bound(
    z: SectorPoint, N: int, M: int, prec: Precision = Precision()
) -> BigReal:
    """Explicit upper bound for the M-term re-expansion residual.

        (6M+2) zeta(M) Gamma(M) Gamma(N-M) / ((2 pi)^{N+2} |z|^N)
      + (2 sqrt(M)+1) zeta(M) Gamma(M) / ((2 pi)^{M+1} |z|^M)
          * (|e^{2 pi i z} That_{N-M}(2 pi i z)| + |e^{-2 pi i z} That_{N-M}(-2 pi i z)|)

    Valid for both series kinds on the closed right half-plane; the
    hypothesis 2 <= M < N is the theorem's, not an implementation limit.
    """
    if not 2 <= M < N:
        raise ValueError("the explicit bound needs 2 <= M < N")
    with mp.workprec(prec.working + 32):
        # the closed sector boundary, with one ulp of grace for angles
        # that were themselves rounded to pi/2
        if abs(z.theta) > mp.pi / 2 * (1 + mp.mpf(2) ** -30):
            raise ValueError("the explicit bound holds for |arg z| <= pi/2")
        zb = _z_ball(z)
        absz = BigReal(abs(zb.value), zb.err)
        two_pi = 2 * ball_pi()
        zeta_m = zeta_int(M, prec)
        first = (
            BigReal.exact(Fraction(6 * M + 2))
            * zeta_m
            * gamma_int(M)
            * gamma_int(N - M)
            / two_pi.powi(N + 2)
            / absz.powi(N)
        )
        w_up = _subdominant_arg(z, prec)
        t_up = terminant(N - M, w_up, prec, arg_w=z.theta + mp.pi / 2)
        t_down = terminant(N - M, -w_up, prec, arg_w=z.theta - mp.pi / 2)
        up_mag = w_up.exp() * t_up.value
        down_mag = (-w_up).exp() * t_down.value
        pair = BigReal(abs(up_mag.value), up_mag.err) + BigReal(
            abs(down_mag.value), down_mag.err
        )
        second = (
            (2 * BigReal(mp.mpf(M)).sqrt() + 1)
            * zeta_m
            * gamma_int(M)
            / two_pi.powi(M + 1)
            / absz.powi(M)
            * pair
        )
        return first + second


# ---------------------------------------------------------------------------
# Stokes multipliers and the transition profile

_LOG_KIND = "log"


def _normalize_kind(kind):
    if isinstance(kind, SeriesKind):
        return kind
    if kind == _LOG_KIND:
        return _LOG_KIND
    return SeriesKind(kind)


def _pochhammer_over_factorial(x: Fraction, k: int) -> Fraction:
    out = Fraction(1)
    for j in range(k):
        out *= (x + j) / (j + 1)
    return out


def _angle_region(theta) -> str:
    """Which side of |theta| = pi/2 an angle is on: inner, line, or outer.

    The line is irrational, so exact hits are impossible for dyadic
    input; an angle that equals pi/2 at its own storage granularity (one
    unit in its last place) counts as on the line, and a ball straddling
    pi/2 does too.
    """
    if isinstance(theta, BigReal):
        value, err = theta.value, theta.err
    else:
        value, err = mp.mpf(theta), mp.mpf(0)
    if value == 0 and err == 0:
        return "inner"
    with mp.workprec(mp.mp.prec + 64):
        # mantissas are stored odd, so short ones mean an exact dyadic
        # (granularity is meaningless there), long ones a rounded real;
        # floor the effective precision at 48 bits
        _, man, _, bc = mp.mpf(abs(value))._mpf_
        ulp = abs(value) * mp.mpf(2) ** (1 - max(bc, 48)) if man else mp.mpf(0)
        slack = max(err, ulp)
        half = ball_pi() / 2
        a = abs(value)
        if a + slack >= ball_pi().lower():
            raise ValueError("multiplier table covers |theta| < pi only")
        if a + slack < half.lower():
            return "inner"
        if a - slack > half.upper():
            return "outer"
        return "line"


def stokes_multiplier(kind, k: int, theta) -> Fraction:
    """Exact coefficient of e^{+-2 pi i k z} in the compound expansion.

    kind is a SeriesKind or the string "log" for the log-gamma series.
    The table is a step function of arg z: zero before the Stokes line
    |theta| = pi/2, the full multiplier beyond it, and an intermediate
    value exactly on it.  Only the first reciprocal multiplier survives
    past the line; the higher ones flash on and off again, which is the
    striking feature of the reciprocal series.
    """
    if k < 1:
        raise ValueError("multiplier index k must be >= 1")
    kind = _normalize_kind(kind)
    region = _angle_region(theta)
    if kind == _LOG_KIND:
        if region == "outer":
            return Fraction(1, k)
        if region == "line":
            return Fraction(1, 2 * k)
        return Fraction(0)
    if kind is SeriesKind.gamma:
        if region == "outer":
            return Fraction(1)
        if region == "line":
            return _pochhammer_over_factorial(Fraction(1, 2), k)
        return Fraction(0)
    if region == "line":
        return _pochhammer_over_factorial(Fraction(-1, 2), k)
    if region == "outer" and k == 1:
        return Fraction(-1)
    return Fraction(0)


def _erf_prediction(theta: mp.mpf, modulus: mp.mpf, prec: Precision) -> BigReal:
    # the model is symmetric between the two Stokes lines: the lower
    # sweep reads the angle mirrored through the real axis
    x = (abs(theta) - mp.pi / 2) * mp.sqrt(mp.pi * modulus)
    ball = erf_cx(x, prec)
    return (BigReal(1) + ball.real_ball()) / 2


def stokes_profile(
    kind: SeriesKind,
    modulus,
    theta_grid,
    M: int,
    prec: Precision = Precision(),
) -> list[StokesProfileRow]:
    """Measured emergence of the subdominant exponential across a grid.

    For each angle the certified remainder is stripped of the receding
    exponential's terminant sum and normalized by the emerging one's
    prefactor times the M-term coefficient prefix, yielding an effective
    multiplier that sweeps 0 -> 1 through ~1/2 on the line; the row
    records it against the erf prediction 1/2 + erf((theta -+ pi/2)
    sqrt(pi |z|))/2.  Grid angles must stay within 0.6 of +-pi/2.
    """
    kind = SeriesKind(kind)
    modulus = mp.mpf(modulus)
    N = least_term_index(modulus)
    if not 1 <= M < N:
        raise ValueError(f"need 1 <= M < N = round(2 pi |z|) = {N}")
    thetas = [mp.mpf(t) for t in theta_grid]
    for t in thetas:
        if abs(abs(t) - mp.pi / 2) > STRIP_HALF_WIDTH * (1 + mp.mpf(2) ** -30):
            raise ValueError(
                "theta grid leaves the transition strip around |arg z| = pi/2"
            )
    table = _shared_table(N - 1)
    rows = []
    bits = _start_bits(modulus, 0, prec)
    for theta in thetas:
        point = SectorPoint.from_polar(modulus, theta)
        rows.append(
            _profile_row(point, N, M, kind, table, bits, prec)
        )
    return rows


def _profile_row(
    point: SectorPoint,
    N: int,
    M: int,
    kind: SeriesKind,
    table: StirlingTable,
    start_bits: int,
    prec: Precision,
) -> StokesProfileRow:
    bits = start_bits
    while True:
        p = Precision(bits=bits, guard=prec.guard)
        with mp.workprec(p.working + 32):
            g = gamma_star(point, p)
            if not kind.signed:
                g = BigComplex(1) / g
            rem = g - partial_sum(point, N, kind, table)
            if rem.err <= SLACK_RATIO * abs(rem.value):
                break
        if bits >= ESCALATION_CAP_BITS:
            raise RuntimeError(f"remainder not resolved at theta={point.theta}")
        bits *= 2
    p = Precision(bits=bits, guard=prec.guard)
    with mp.workprec(p.working + 32):
        up, down, e_up, e_down = _terminant_sums(point, N, M, kind, p)
        prefix = partial_sum(point, M, kind, table)
        upper_half = point.theta > 0
        if kind.signed:
            if upper_half:
                eff = (rem + down) / (e_up * prefix)
            else:
                eff = (rem - up) / (e_down * prefix)
        else:
            if upper_half:
                eff = (rem - down) / (-e_up * prefix)
            else:
                eff = (rem + up) / (-e_down * prefix)
        pred = _erf_prediction(point.theta, point.modulus, p)
        diff = eff - BigComplex(pred.value, pred.err)
        residual = BigReal(abs(diff.value), diff.err)
        return StokesProfileRow(
            theta=point.theta,
            effective_multiplier=eff,
            erf_prediction=pred,
            residual=residual,
        )
