"""Truncated Stirling expansions and their computable error bounds.

The two divergent expansions handled here are

    Gamma*(z)   ~ sum_n (-1)^n gamma_n z^{-n}        (kind: gamma)
    1/Gamma*(z) ~ sum_n        gamma_n z^{-n}        (kind: reciprocal)

with remainders R_N, R~_N after N terms.  ``true_remainder`` measures the
actual remainder against the certified engine, escalating precision until
the certification slack is negligible next to the remainder itself, so
every bound in this module can be validated numerically rather than taken
on faith.

Four bounds are implemented:

* ``remainder_enclosure``: on the positive real axis the remainder is
  trapped between explicit partial-sum tails with known sign; this is the
  sharpest statement and returns a signed interval.
* ``bound_coeff_pair``: |gamma_N/z^N| + |gamma_{N+1}/z^{N+1}| times a
  csc(2 theta) sector factor, for |arg z| < pi/2.
* ``bound_halfplane``: (1+zeta(N)) Gamma(N) (2 sqrt(N)+1) /
  (2 (2 pi)^{N+1} |z|^N), valid up to |arg z| = pi/2 inclusive but only
  for N >= 2 (the N = 1 case has no published proof and is refused).
* ``bound_boyd``: the classical (min(sec theta, 2 sqrt(N)) + 1)/2 variant
  with the N = 1 convention zeta(1) -> 3, kept for comparison.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import mpmath as mp

from .coeffs import StirlingTable, shared_gammas
from .engine import SectorPoint, _z_ball, gamma_star
from .precision import (
    BigComplex,
    BigReal,
    Precision,
    ball_pi,
    zeta_int,
)

ESCALATION_CAP_BITS = 8192
SLACK_RATIO = mp.mpf("1e-6")


class SeriesKind(enum.Enum):
    gamma = "gamma"
    reciprocal = "reciprocal"

    @property
    def signed(self) -> bool:
        # the gamma-function series alternates; the reciprocal one does not
        return self is SeriesKind.gamma


def _term_sign(kind: SeriesKind, n: int) -> int:
    return (-1) ** n if kind.signed else 1


def partial_sum(
    z: SectorPoint, N: int, kind: SeriesKind, table: StirlingTable
) -> BigComplex:
    """S_N(z) = sum_{n=0}^{N-1} (+-1)^n gamma_n z^{-n} as a ball."""
    if N < 1:
        raise ValueError("N must be >= 1")
    if len(table) < N:
        raise ValueError(f"table holds {len(table)} coefficients, need {N}")
    zb = _z_ball(z)
    inv = BigComplex(1) / zb
    acc = BigComplex.exact(Fraction(_term_sign(kind, N - 1)) * table[N - 1])
    for n in range(N - 2, -1, -1):
        acc = acc * inv + BigComplex.exact(Fraction(_term_sign(kind, n)) * table[n])
    return acc


def _shared_table(n_top: int) -> StirlingTable:
    return StirlingTable(method="wrench", gammas=shared_gammas(n_top))


def true_remainder(z: SectorPoint, N: int, kind: SeriesKind) -> BigComplex:
    """The actual remainder after N terms, certified.

    Computes Gamma*(z) - S_N(z) (or 1/Gamma* - S~_N) with the engine,
    doubling precision until the ball radius is under 1e-6 of the
    remainder's magnitude, so comparisons against the bounds here are
    meaningful at their own scale.
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    table = _shared_table(N - 1)
    bits = 128
    while True:
        prec = Precision(bits=bits)
        with mp.workprec(prec.working + 32):
            g = gamma_star(z, prec)
            if not kind.signed:
                g = BigComplex(1) / g
            rem = g - partial_sum(z, N, kind, table)
            if rem.err <= SLACK_RATIO * abs(rem.value):
                return rem
        if bits >= ESCALATION_CAP_BITS:
            raise RuntimeError(
                f"remainder at z={z.z}, N={N} not resolved within "
                f"{ESCALATION_CAP_BITS} bits"
            )
        bits *= 2


def _require_positive_real(z: SectorPoint) -> mp.mpf:
    if z.theta != 0 or not z.z.real > 0 or z.z.imag != 0:
        raise ValueError("this enclosure requires z real and positive")
    return z.z.real


def _tail_term(gammas, n: int, sign: int, x: mp.mpf, prec: Precision) -> BigReal:
    # sign * gamma_n / x^n as a ball; sign chosen to make the value >= 0
    with mp.workprec(prec.working + 32):
        num = BigReal.exact(Fraction(sign) * gammas[n])
        return num / BigReal(x).powi(n)


def remainder_enclosure(
    z: SectorPoint, N: int, kind: SeriesKind, prec: Precision = Precision()
) -> tuple[BigReal, BigReal]:
    """Signed enclosure (low, high) of the remainder for real z > 0.

    The remainder after an odd number of gamma-kind terms, and after an
    even number of reciprocal-kind terms, has a known sign and is smaller
    in magnitude than an explicit two-term tail; the two mixed cases trap
    the remainder between one negative and one positive tail term.  All
    four enclosures are strict.
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    x = _require_positive_real(z)
    gammas = shared_gammas(N + 1)
    half = (N + 1) // 2  # the paper-side index: N = 2*half-1 or 2*half
    with mp.workprec(prec.working + 32):
        zero = BigReal(0)
        if N % 2 == 1:
            s_lead = (-1) ** half  # sign making gamma_{2half-1}/x^{...} >= 0
            a = _tail_term(gammas, N, s_lead, x, prec)
            b = _tail_term(gammas, N + 1, -s_lead, x, prec)
            if kind.signed:
                # remainder has the sign of -s_lead; magnitude < a + b
                outer = a + b
                return (zero - outer, zero) if s_lead > 0 else (zero, outer)
            # reciprocal: trapped between the two tail terms
            lo, hi = -a, b
            if s_lead > 0:
                lo, hi = -b, a
            return lo, hi
        s_lead = (-1) ** (half + 1)
        a = _tail_term(gammas, N, s_lead, x, prec)
        b = _tail_term(gammas, N + 1, s_lead, x, prec)
        if kind.signed:
            lo, hi = -b, a
            if s_lead < 0:
                lo, hi = -a, b
            return lo, hi
        outer = a + b
        return (zero, outer) if s_lead > 0 else (zero - outer, zero)


def _abs_z_ball(z: SectorPoint) -> BigReal:
    zb = _z_ball(z)
    return BigReal(abs(zb.value), zb.err)


def _sector_factor(theta: mp.mpf) -> BigReal:
    # 1 inside |theta| <= pi/4, |csc(2 theta)| beyond
    if abs(theta) <= mp.pi / 4:
        return BigReal(1)
    v = 1 / abs(mp.sin(2 * theta))
    return BigReal(v, v * mp.mpf(2) ** (8 - mp.mp.prec))


def bound_coeff_pair(z: SectorPoint, N: int, prec: Precision = Precision()) -> BigReal:
    """(|gamma_N|/|z|^N + |gamma_{N+1}|/|z|^{N+1}) x sector factor.

    Valid for |R_N| and |R~_N| alike when |arg z| < pi/2; beyond pi/4 the
    factor is |csc(2 arg z)|, which blows up toward the imaginary axis
    (use ``bound_halfplane`` there).
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    if not abs(z.theta) < mp.pi / 2:
        raise ValueError("bound requires |arg z| < pi/2")
    gammas = shared_gammas(N + 1)
    with mp.workprec(prec.working + 32):
        az = _abs_z_ball(z)
        lead = BigReal.exact(abs(Fraction(gammas[N]))) / az.powi(N)
        nxt = BigReal.exact(abs(Fraction(gammas[N + 1]))) / az.powi(N + 1)
        return (lead + nxt) * _sector_factor(z.theta)


def _halfplane_core(z: SectorPoint, N: int, zeta_val: BigReal, prec: Precision) -> BigReal:
    az = _abs_z_ball(z)
    num = (BigReal(1) + zeta_val) * BigReal.exact(Fraction(math.factorial(N - 1)))
    den = (ball_pi() * 2).powi(N + 1) * az.powi(N)
    return num / den


def bound_halfplane(z: SectorPoint, N: int, prec: Precision = Precision()) -> BigReal:
    """(1+zeta(N)) Gamma(N) (2 sqrt(N)+1) / (2 (2 pi)^{N+1} |z|^N).

    Covers |R_N| and |R~_N| on the closed half-plane |arg z| <= pi/2,
    including the imaginary axis where the coefficient-pair bound fails.
    N = 1 is refused: no proof is on record for that single case.
    """
    if N < 2:
        raise ValueError("N must be >= 2 (the N = 1 case is unproven)")
    if not abs(z.theta) <= mp.pi / 2:
        raise ValueError("bound requires |arg z| <= pi/2")
    with mp.workprec(prec.working + 32):
        core = _halfplane_core(z, N, zeta_int(N, prec), prec)
        return core * (BigReal(N).sqrt() * 2 + 1) / 2


def bound_boyd(z: SectorPoint, N: int, prec: Precision = Precision()) -> BigReal:
    """(1+zeta(N)) Gamma(N) (min(sec theta, 2 sqrt(N))+1) / (2 (2 pi)^{N+1} |z|^N).

    The older secant-form bound, kept for comparison; at N = 1 the zeta
    factor is replaced by 3 by convention.  Valid for |arg z| <= pi/2 (the
    min saturates to 2 sqrt(N) at the imaginary axis).
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    if not abs(z.theta) <= mp.pi / 2:
        raise ValueError("bound requires |arg z| <= pi/2")
    with mp.workprec(prec.working + 32):
        zeta_val = BigReal(3) if N == 1 else zeta_int(N, prec)
        core = _halfplane_core(z, N, zeta_val, prec)
        sqrt_branch = BigReal(N).sqrt() * 2
        cos_theta = mp.cos(z.theta)
        if cos_theta <= 0:
            factor = sqrt_branch
        else:
            sec = BigReal(1) / BigReal(cos_theta, abs(cos_theta) * mp.mpf(2) ** (8 - mp.mp.prec))
            # interval min of the two candidate factors
            lo = min(sec.lower(), sqrt_branch.lower())
            hi = min(sec.upper(), sqrt_branch.upper())
            factor = BigReal((lo + hi) / 2, (hi - lo) / 2)
        return core * (factor + 1) / 2


# ---------------------------------------------------------------------------
# Reporting


@dataclass(frozen=True)
class RemainderReport:
    """Everything measurable about one truncation: sums, truth, bounds."""

    z: SectorPoint
    N: int
    kind: SeriesKind
    partial: BigComplex
    true_remainder: BigComplex
    bounds: dict[str, BigReal]
    enclosure: Optional[tuple[BigReal, BigReal]]
    theta_factors: dict[str, str]

    def to_json(self) -> str:
        def num(x) -> str:
            return mp.nstr(x, 25)

        payload = {
            "z": {
                "re": num(self.z.z.real),
                "im": num(self.z.z.imag),
                "modulus": num(self.z.modulus),
                "theta": num(self.z.theta),
            },
            "N": self.N,
            "kind": self.kind.value,
            "partial": {
                "re": num(self.partial.value.real),
                "im": num(self.partial.value.imag),
                "err": num(self.partial.err),
            },
            "true_remainder": {
                "re": num(self.true_remainder.value.real),
                "im": num(self.true_remainder.value.imag),
                "err": num(self.true_remainder.err),
            },
            "bounds": {
                name: {"value": num(b.value), "err": num(b.err)}
                for name, b in sorted(self.bounds.items())
            },
            "enclosure": (
                [num(self.enclosure[0].lower()), num(self.enclosure[1].upper())]
                if self.enclosure is not None
                else None
            ),
            "theta_factors": dict(sorted(self.theta_factors.items())),
        }
        return json.dumps(payload, indent=2)

    def to_csv(self) -> str:
        def num(x) -> str:
            return mp.nstr(x, 25)

        lines = ["quantity,value"]
        lines.append(f"true_remainder_re,{num(self.true_remainder.value.real)}")
        lines.append(f"true_remainder_im,{num(self.true_remainder.value.imag)}")
        lines.append(f"true_remainder_abs,{num(abs(self.true_remainder.value))}")
        for name, b in sorted(self.bounds.items()):
            lines.append(f"bound_{name},{num(b.upper())}")
        if self.enclosure is not None:
            lines.append(f"enclosure_low,{num(self.enclosure[0].lower())}")
            lines.append(f"enclosure_high,{num(self.enclosure[1].upper())}")
        return "\n".join(lines) + "\n"


def remainder_report(
    z: SectorPoint, N: int, kind: SeriesKind, prec: Precision = Precision()
) -> RemainderReport:
    """Assemble the full comparison for one (z, N, kind) triple.

    Bounds inapplicable at this point (sector or index restrictions) are
    simply absent from the map.
    """
    with mp.workprec(prec.working + 32):
        table = _shared_table(max(N - 1, 0))
        partial = partial_sum(z, N, kind, table)
        rem = true_remainder(z, N, kind)
        bounds: dict[str, BigReal] = {}
        factors: dict[str, str] = {}
        if abs(z.theta) < mp.pi / 2:
            bounds["coeff_pair"] = bound_coeff_pair(z, N, prec)
            factors["coeff_pair"] = (
                "1" if abs(z.theta) <= mp.pi / 4 else "abs(csc(2 theta))"
            )
        if N >= 2 and abs(z.theta) <= mp.pi / 2:
            bounds["halfplane"] = bound_halfplane(z, N, prec)
        if abs(z.theta) <= mp.pi / 2:
            bounds["boyd"] = bound_boyd(z, N, prec)
            sq = 2 * math.sqrt(N)
            sec = (
                1 / float(mp.cos(z.theta))
                if mp.cos(z.theta) > 0
                else float("inf")
            )
            factors["boyd"] = "sec(theta)" if sec <= sq else "2 sqrt(N)"
        enclosure = None
        if z.theta == 0 and z.z.imag == 0 and z.z.real > 0:
            enclosure = remainder_enclosure(z, N, kind, prec)
        return RemainderReport(
            z=z,
            N=N,
            kind=kind,
            partial=partial,
            true_remainder=rem,
            bounds=bounds,
            enclosure=enclosure,
            theta_factors=factors,
        )
