"""Late Stirling coefficients: moment integrals, resummed tails, tables.

The coefficients gamma_n eventually grow like (2n)! / (2 pi)^(2n), and the
growth is controlled by the function the series expands.  Two exact moment
identities over the positive imaginary axis make this quantitative: for
N >= 1,

    (-1)^N     gamma_(2N-1) =  (1/pi) int_0^inf s^(2N-2) e^(-2 pi s) Re Gamma*(is) ds,
    (-1)^(N+1) gamma_(2N)   = -(1/pi) int_0^inf s^(2N-1) e^(-2 pi s) Im Gamma*(is) ds,

so the certified Gamma* engine doubles as a generator of its own expansion
coefficients (resurgence_quadrature).  Since Re Gamma*(is) >= 0 and
Im Gamma*(is) <= 0 on the ray, the identities also fix the sign pattern
gamma_(2N-1) = (-1)^N |.|, gamma_(2N) = (-1)^(N+1) |.|.

Expanding the boundary values under the integral instead of integrating
them numerically yields closed approximation families for a late
coefficient gamma_t with t = 2n-1 (odd targets, built from gamma_0,
gamma_2, ...) or t = 2n (even targets, built from gamma_1, gamma_3, ...).
All methods share the frame

    gamma_t ~ (-1)^n 2 / (2 pi)^(2n)
              * sum_(k=0)^(K-1) (-1)^k gamma_idx(k) (2 pi)^(2k) (2n-2k-2)! w(n, k)

and differ only in the weight w attached to the k-th term:

    dingle         zeta(2n - 2k)      every image of the singularity
    boyd_gamma     1                  nearest image only
    boyd_zeta      zeta(2n - 2k - 1)  images weighted once per distance
    xi_new         xi(2n - 2k - 1)    the boundary square root kept exact
    boyd_improved  1 + 4^(-n) at k=0  cheapest correction to boyd_gamma

Here xi(r) = sum_(m>=0) binom(2m, m) 4^(-m) (m+1)^(-r) for r > 1/2; the
same function is the Laplace-type integral (2 pi)^r / Gamma(r) *
int_0^inf s^(r-1) e^(-2 pi s) (1 - e^(-2 pi s))^(-1/2) ds, which
xi_integral evaluates by quadrature as an independent route.  With the xi
weight the error of the resummation drops to the level of Dingle's rule
while each term stays elementary.

Truncating at K = ceil(n/2) is optimal: it makes the first discarded term
asymptotically the smallest.  reproduce_table evaluates gamma_101 and
gamma_100 this way and renders them digit for digit next to the exact
rational values.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction

import mpmath as mp

from .coeffs import StirlingTable, shared_bernoulli, shared_gammas
from .engine import SectorPoint, gamma_star
from .precision import (
    BigReal,
    Precision,
    ball_pi,
    gamma_int,
    gamma_real,
    mpf_from_fraction,
    upper_gamma_cx,
    zeta_int,
)
from .quadrature import half_line_split

__all__ = [
    "ApproxMethod",
    "LateCoeffApproximation",
    "Parity",
    "TableLayout",
    "TABLE_LAYOUTS",
    "late_coeff_approx",
    "optimal_K",
    "render_sci",
    "render_table_text",
    "reproduce_table",
    "resurgence_quadrature",
    "table_records",
    "xi",
    "xi_integral",
    "xi_series_coefficient",
]


class Parity(enum.Enum):
    """Which interleaved family a target index belongs to."""

    ODD = "odd"    # gamma_(2n-1), resummed from even-indexed inputs
    EVEN = "even"  # gamma_(2n),   resummed from odd-indexed inputs


class ApproxMethod(enum.Enum):
    DINGLE = "dingle"
    BOYD_GAMMA = "boyd_gamma"
    BOYD_ZETA = "boyd_zeta"
    BOYD_IMPROVED = "boyd_improved"
    XI_NEW = "xi_new"


@dataclass(frozen=True)
class LateCoeffApproximation:
    """One resummed estimate of a late coefficient next to its exact value.

    ``error`` is exact - value, as a ball; its sign therefore says which
    side of the truth the method lands on.
    """

    n: int
    parity: Parity
    method: ApproxMethod
    K: int
    value: BigReal
    exact: Fraction
    error: BigReal

    @property
    def target_index(self) -> int:
        return 2 * self.n - 1 if self.parity is Parity.ODD else 2 * self.n


def _exact_fraction(r) -> Fraction:
    if isinstance(r, bool):
        raise TypeError("xi argument must be a real number")
    if isinstance(r, (int, Fraction)):
        return Fraction(r)
    if isinstance(r, BigReal):
        if r.err != 0:
            raise TypeError("xi needs an exact argument, not a ball")
        r = r.value
    if isinstance(r, (float, mp.mpf)):
        num, den = mp.libmp.to_rational(mp.mpf(r)._mpf_)
        return Fraction(int(num), int(den))
    raise TypeError("xi argument must be int, Fraction, float, mpf or exact BigReal")


def xi_series_coefficient(m: int) -> Fraction:
    """Exact m-th coefficient binom(2m, m) / 4^m of the xi series."""
    if m < 0:
        raise ValueError("coefficient index must be >= 0")
    c = Fraction(1)
    for j in range(1, m + 1):
        c *= Fraction(2 * j - 1, 2 * j)
    return c


def _xi_tail_upper(rb: BigReal, start: int) -> mp.mpf:
    # coefficients are bounded by 1/sqrt(pi m), so the tail from m = start is
    # at most (start^-(r+1/2) + start^(1/2-r)/(r-1/2)) / sqrt(pi)
    half = Fraction(1, 2)
    ln_start = BigReal(start).log()
    t1 = (-((rb + half) * ln_start)).exp()
    t2 = (-((rb - half) * ln_start)).exp() / (rb - half)
    return ((t1 + t2) / ball_pi().sqrt()).upper()


def _xi_plain(rq: Fraction, prec: Precision) -> BigReal:
    # direct summation; the dispatcher only sends us here when the tail
    # bound clears the target within a few thousand terms
    rb = BigReal.exact(rq)
    exact_exp = int(rq) if rq.denominator == 1 else None
    rel_target = mp.mpf(2) ** (-(prec.bits + prec.guard))
    total = BigReal.exact(Fraction(1))
    c = Fraction(1)
    m = 0
    while True:
        m += 1
        c *= Fraction(2 * m - 1, 2 * m)
        if exact_exp is not None:
            term = BigReal.exact(c / Fraction((m + 1) ** exact_exp))
        else:
            term = BigReal.exact(c) * (-(rb * BigReal(m + 1).log())).exp()
        total = total + term
        if term.value <= rel_target * total.value / 8:
            tail = _xi_tail_upper(rb, m + 1)
            if tail <= rel_target * total.value:
                return BigReal(total.value, total.err + tail)
        if m > 100_000:  # dispatcher estimate failed; do not spin forever
            raise RuntimeError("xi plain summation missed its tail target")


# sqrt(u / (1 - e^-u)) is analytic for |u| < 2 pi; on |u| = 4 the product
# formula 1 - e^-u = u e^(-u/2) prod (1 + u^2/(2 pi k)^2) gives
# |1 - e^-u| >= 4 e^-2 exp(-zeta(2) q/(1-q)) with q = (4/2pi)^2, so the
# square root is bounded by 4.8 there and its Taylor coefficients by
# 4.8 / 4^j.  _XI_SPLIT_AT = 2 keeps the finite piece inside that disk.
_XI_COEFF_BOUND = mp.mpf("4.8")
_XI_COEFF_RADIUS = 4
_XI_SPLIT_AT = 2

_H_CACHE: dict = {}


def _sqrt_kernel_coeffs(count: int, wp: int) -> list:
    """Ball Taylor coefficients of sqrt(u / (1 - e^-u)) at u = 0."""
    for (have, bits), coeffs in _H_CACHE.items():
        if have >= count and bits >= wp:
            return coeffs[:count]
    bern = shared_bernoulli(count)
    with mp.workprec(wp):
        square = [BigReal.exact(b / Fraction(math.factorial(n)))
                  for n, b in enumerate(bern[:count])]
        square[1] = BigReal.exact(Fraction(1, 2))  # u/(1-e^-u) flips B_1
        coeffs = [BigReal(1)]
        for j in range(1, count):
            acc = square[j]
            for i in range(1, j):
                acc = acc - coeffs[i] * coeffs[j - i]
            coeffs.append(acc / 2)
    if len(_H_CACHE) > 8:
        _H_CACHE.clear()
    _H_CACHE[(count, wp)] = coeffs
    return coeffs


def _lower_gamma_series(aq: Fraction, tail_bits: int) -> BigReal:
    """gamma(a, T) at T = _XI_SPLIT_AT by the all-positive rising series."""
    big_t = _XI_SPLIT_AT
    term = Fraction(1) / aq
    total = term
    k = 0
    while True:
        k += 1
        term *= Fraction(big_t) / (aq + k)
        total += term
        ratio = Fraction(big_t) / (aq + k + 1)
        if ratio < Fraction(1, 2):
            tail = term * ratio / (1 - ratio)
            if tail < total * Fraction(1, 2**tail_bits):
                break
    prefactor = (BigReal.exact(aq) * BigReal(big_t).log()).exp() * BigReal(-big_t).exp()
    return prefactor * (BigReal.exact(total) + BigReal(0, mpf_from_fraction(tail) * 2))


def _xi_split(rq: Fraction, prec: Precision) -> BigReal:
    # reorganise the double sum sum_m c_m (m+1)^-r = sum_m c_m / Gamma(r) *
    # int_0^inf u^(r-1) e^-(m+1)u du by splitting the integral at T: the
    # finite piece becomes a Taylor series in lower incomplete gammas, the
    # far piece a sum over m with upper incomplete gamma weights, and both
    # converge geometrically for every r > 1/2
    big_t = _XI_SPLIT_AT
    rb = BigReal.exact(rq)
    wp = mp.mp.prec
    if rq.denominator == 1:
        gamma_r = gamma_int(int(rq))
    else:
        gamma_r = gamma_real(mpf_from_fraction(rq))
    target = mp.mpf(2) ** (-(prec.bits + prec.guard + 4)) * gamma_r.lower()

    # finite piece: count terms until the coefficient-bound remainder clears
    ratio = mp.mpf(big_t) / _XI_COEFF_RADIUS
    t_pow = (rb - Fraction(1, 2)) * BigReal(big_t).log()
    scale = _XI_COEFF_BOUND / (1 - ratio) * t_pow.exp().upper()
    count = 8
    while scale * ratio ** (count + 1) > target / 4:
        count += 8
    coeffs = _sqrt_kernel_coeffs(count + 1, wp)
    near = BigReal(0)
    for j in range(count + 1):
        near = near + coeffs[j] * _lower_gamma_series(rq + Fraction(2 * j - 1, 2), wp)
    a_top = rq + Fraction(2 * count + 1, 2)
    rem_near = scale * ratio ** (count + 1) * mpf_from_fraction(Fraction(1) / a_top)
    near = near + BigReal(0, rem_near)

    # far piece: Gamma(r, x) <= 2 x^(r-1) e^-x once x >= 2(r-1), so the
    # m-tail is geometric with ratio e^-T
    far = BigReal(0)
    c = Fraction(1)
    m = 0
    r_up = rb.upper()
    while True:
        x = big_t * (m + 1)
        weight = upper_gamma_cx(rq, mp.mpc(x, 0), prec).real_ball()
        if rq.denominator == 1:
            inv_pow = BigReal.exact(c / Fraction((m + 1) ** int(rq)))
        else:
            inv_pow = BigReal.exact(c) * (-(rb * BigReal(m + 1).log())).exp()
        far = far + inv_pow * weight
        m += 1
        c *= Fraction(2 * m - 1, 2 * m)
        x_next = big_t * (m + 1)
        if x_next >= 2 * (r_up - 1) and x_next >= 2:
            # T^(r-1) = T^(r-1/2) / sqrt(T)
            tail = (
                2
                * t_pow.exp().upper()
                / mp.sqrt(big_t)
                * mp.exp(-x_next)
                / (1 - mp.exp(-big_t))
            )
            if tail <= target / 4:
                far = far + BigReal(0, tail)
                break
    return (near + far) / gamma_r


def xi(r, prec: Precision = Precision()) -> BigReal:
    """Certified xi(r) = sum_(m>=0) binom(2m, m) 4^(-m) (m+1)^(-r), r > 1/2.

    Large r is summed directly (the terms decay like m^(-r-1/2)).  Small r
    would need ~2^(bits/(r-1/2)) direct terms, so the sum is reorganised
    through its Laplace integral with incomplete-gamma weights; both
    regimes return rigorous balls.
    """
    rq = _exact_fraction(r)
    if not rq > Fraction(1, 2):
        raise ValueError("xi(r) requires r > 1/2")
    with mp.workprec(prec.working + 48):
        plain_bits = (prec.bits + prec.guard + 4) / float(rq - Fraction(1, 2))
        if plain_bits <= 12:  # at most ~4096 direct terms
            return _xi_plain(rq, prec)
        return _xi_split(rq, prec)


def xi_integral(r, prec: Precision = Precision()) -> BigReal:
    """xi(r) by its half-line integral; heuristic error bar from quadrature.

    Independent of the series route, so the two referee each other.
    """
    if isinstance(r, BigReal):
        rm = r.value
    elif isinstance(r, Fraction):
        rm = mpf_from_fraction(r)
    else:
        rm = mp.mpf(r)
    if not rm > mp.mpf("0.5"):
        raise ValueError("xi(r) requires r > 1/2")
    wp = prec.working + 48
    with mp.workprec(wp):
        rm = +rm
        two_pi = 2 * mp.pi

        def integrand(s):
            if s <= 0:
                return mp.mpf(0)
            x = two_pi * s
            # 1 - e^(-x) via expm1: the direct difference rounds to zero at
            # the double-exponentially small nodes
            return s ** (rm - 1) * mp.exp(-x) / mp.sqrt(-mp.expm1(-x))

        split = max(mp.mpf(1), (rm - 1) / mp.pi)
        total, est = half_line_split(integrand, split, prec_bits=wp)
        raw = BigReal(total, est + abs(total) * mp.mpf(2) ** (-wp + 10))
        prefactor = (BigReal(rm) * (ball_pi() * 2).log()).exp()
        return raw * prefactor / gamma_real(rm)


def optimal_K(n: int) -> int:
    """Truncation that makes the first discarded term asymptotically smallest."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return (n + 1) // 2


def _method(method) -> ApproxMethod:
    if isinstance(method, ApproxMethod):
        return method
    try:
        return ApproxMethod(str(method))
    except ValueError:
        names = ", ".join(m.value for m in ApproxMethod)
        raise ValueError(f"unknown method {method!r}; expected one of {names}") from None


def late_coeff_approx(
    target_index: int,
    method,
    K: int,
    table: StirlingTable | None = None,
    prec: Precision = Precision(),
) -> LateCoeffApproximation:
    """Resum the first K low-order coefficients into an estimate of gamma_t.

    Odd targets t = 2n-1 consume gamma_0, gamma_2, ..., gamma_(2K-2); even
    targets t = 2n consume gamma_1, ..., gamma_(2K-1).  The table must also
    hold gamma_t itself, which anchors the returned error = exact - value.
    """
    t = int(target_index)
    if t < 3:
        raise ValueError("late-coefficient approximations need target index >= 3")
    meth = _method(method)
    parity = Parity.ODD if t % 2 else Parity.EVEN
    n = (t + 1) // 2 if parity is Parity.ODD else t // 2
    K = int(K)
    if not 1 <= K < n:
        raise ValueError("truncation order must satisfy 1 <= K < n")
    if table is None:
        table = StirlingTable(method="wrench", gammas=shared_gammas(t))
    if len(table) <= t:
        raise ValueError(f"coefficient table too short: need gamma_0..gamma_{t}")

    with mp.workprec(prec.working + 64):
        two_pi = ball_pi() * 2
        acc = BigReal(0)
        for k in range(K):
            idx = 2 * k if parity is Parity.ODD else 2 * k + 1
            base = table[idx] * Fraction(math.factorial(2 * n - 2 * k - 2))
            if k % 2:
                base = -base
            if meth is ApproxMethod.BOYD_IMPROVED and k == 0:
                base *= 1 + Fraction(1, 4**n)
            term = BigReal.exact(base) * two_pi.powi(2 * k)
            if meth is ApproxMethod.DINGLE:
                term = term * zeta_int(2 * n - 2 * k, prec)
            elif meth is ApproxMethod.BOYD_ZETA:
                term = term * zeta_int(2 * n - 2 * k - 1, prec)
            elif meth is ApproxMethod.XI_NEW:
                term = term * xi(2 * n - 2 * k - 1, prec)
            acc = acc + term
        value = acc * 2 / two_pi.powi(2 * n)
        if n % 2:
            value = -value
        exact = table[t]
        error = BigReal.exact(exact) - value

    return LateCoeffApproximation(
        n=n, parity=parity, method=meth, K=K, value=value, exact=exact, error=error
    )


# Gamma*(is) is the expensive factor of every moment integrand and the
# quadrature nodes recur across moments at a fixed precision, so cache the
# boundary values for the life of the process.
_BOUNDARY_CACHE: dict[tuple[mp.mpf, int], mp.mpc] = {}
_BOUNDARY_CACHE_CAP = 300_000


def _boundary_value(s: mp.mpf, bits: int) -> mp.mpc:
    key = (s, bits)
    hit = _BOUNDARY_CACHE.get(key)
    if hit is None:
        if len(_BOUNDARY_CACHE) >= _BOUNDARY_CACHE_CAP:
            _BOUNDARY_CACHE.clear()
        point = SectorPoint.from_complex(mp.mpc(0, s))
        hit = gamma_star(point, Precision(bits=max(bits, 64))).value
        _BOUNDARY_CACHE[key] = hit
    return hit


def resurgence_quadrature(target_index: int, prec: Precision = Precision()) -> BigReal:
    """gamma_t from the boundary-moment integral of Gamma* on the imaginary axis.

    Touches none of the recurrences, so it cross-checks the exact generators
    (and, at late t, the growth laws) from the analytic side.  The error bar
    is heuristic, inherited from the quadrature estimate.
    """
    t = int(target_index)
    if t < 1:
        raise ValueError("target index must be >= 1")
    if t % 2:
        big_n = (t + 1) // 2
        power = 2 * big_n - 2
    else:
        big_n = t // 2
        power = 2 * big_n - 1
    wp = prec.working + 32
    bits = wp + 16
    with mp.workprec(wp):
        two_pi = 2 * mp.pi

        def integrand(s):
            if s <= 0:
                return mp.mpf(0)
            g = _boundary_value(s, bits)
            component = g.real if t % 2 else g.imag
            return s**power * mp.exp(-two_pi * s) * component

        # fixed split so every moment shares the same node set; the low-order
        # integrand peaks all sit below s = 2
        total, est = half_line_split(integrand, mp.mpf(2), prec_bits=wp)
        sign = 1 if big_n % 2 == 0 else -1
        value = sign * total / mp.pi
        err = (est + abs(total) * mp.mpf(2) ** (-wp + 8)) / mp.pi
        return BigReal(value, err)


@dataclass(frozen=True)
class TableLayout:
    """Digit layout of one published comparison table."""

    which: str
    target_index: int
    n: int
    K: int
    value_digits: int
    error_digits: dict
    methods: tuple


TABLE_LAYOUTS = {
    "1": TableLayout(
        which="1",
        target_index=101,
        n=51,
        K=26,
        value_digits=39,
        error_digits={
            ApproxMethod.DINGLE: 3,
            ApproxMethod.BOYD_GAMMA: 9,
            ApproxMethod.BOYD_ZETA: 9,
            ApproxMethod.XI_NEW: 3,
        },
        methods=(
            ApproxMethod.DINGLE,
            ApproxMethod.BOYD_GAMMA,
            ApproxMethod.BOYD_ZETA,
            ApproxMethod.XI_NEW,
        ),
    ),
    "2": TableLayout(
        which="2",
        target_index=100,
        n=50,
        K=25,
        value_digits=36,
        error_digits={
            ApproxMethod.DINGLE: 3,
            ApproxMethod.BOYD_GAMMA: 6,
            ApproxMethod.BOYD_ZETA: 6,
            ApproxMethod.XI_NEW: 3,
        },
        methods=(
            ApproxMethod.DINGLE,
            ApproxMethod.BOYD_GAMMA,
            ApproxMethod.BOYD_ZETA,
            ApproxMethod.XI_NEW,
        ),
    ),
}


def _layout(which) -> TableLayout:
    key = str(which).lower().removeprefix("table")
    if key not in TABLE_LAYOUTS:
        raise ValueError("which must be 1 or 2")
    return TABLE_LAYOUTS[key]


def reproduce_table(which, prec: Precision = Precision(bits=512)) -> list[LateCoeffApproximation]:
    """Rows of comparison table 1 (gamma_101) or 2 (gamma_100), method order fixed."""
    layout = _layout(which)
    assert layout.K == optimal_K(layout.n)
    table = StirlingTable(method="wrench", gammas=shared_gammas(layout.target_index))
    return [
        late_coeff_approx(layout.target_index, m, layout.K, table, prec)
        for m in layout.methods
    ]


def _fraction_from_mpf(x: mp.mpf) -> Fraction:
    num, den = mp.libmp.to_rational(x._mpf_)
    return Fraction(int(num), int(den))


def render_sci(x, sig_digits: int) -> str:
    """Exact decimal scientific string -0.ddd...e<k> with sig_digits mantissa digits.

    Fractions round exactly (ties to even).  A ball is refused unless its
    error plus the rounding slack stays under half an ulp of the last digit,
    so a rendered string is itself a certified statement.
    """
    sig = int(sig_digits)
    if sig < 1:
        raise ValueError("need at least one digit")
    if isinstance(x, BigReal):
        if not mp.isfinite(x.value):
            raise ValueError("cannot render a non-finite value")
        q = _fraction_from_mpf(x.value)
        err = _fraction_from_mpf(x.err)
    elif isinstance(x, (Fraction, int)):
        q = Fraction(x)
        err = Fraction(0)
    else:
        q = _fraction_from_mpf(mp.mpf(x))
        err = Fraction(0)
    if q == 0:
        return "0." + "0" * sig + "e0"
    a = -q if q < 0 else q
    # decimal exponent: 10^(e-1) <= a < 10^e
    e = len(str(a.numerator)) - len(str(a.denominator)) + 1
    while a >= Fraction(10) ** e:
        e += 1
    while a < Fraction(10) ** (e - 1):
        e -= 1
    scaled = a * Fraction(10) ** (sig - e)
    digits = round(scaled)
    slack = abs(scaled - digits) + err * Fraction(10) ** (sig - e)
    if slack >= Fraction(1, 2):
        raise ValueError(f"ball too wide to certify {sig} digits")
    if digits == 10**sig:
        digits //= 10
        e += 1
    sign = "-" if q < 0 else ""
    return f"{sign}0.{str(digits).zfill(sig)}e{e}"


_LABEL_WIDTH = 28


def _aligned(label: str, number: str) -> str:
    pad = number if number.startswith("-") else " " + number
    return f"{label:<{_LABEL_WIDTH}}{pad}"


def render_table_text(which, rows) -> str:
    """Aligned text table: exact value first, then each method and its error."""
    layout = _layout(which)
    lines = [f"{'values of n and K':<{_LABEL_WIDTH}} n = {layout.n}, K = {layout.K}"]
    lines.append(
        _aligned(
            f"exact value of gamma_{layout.target_index}",
            render_sci(rows[0].exact, layout.value_digits),
        )
    )
    for row in rows:
        lines.append(
            _aligned(
                f"{row.method.value} approximation",
                render_sci(row.value, layout.value_digits),
            )
        )
        lines.append(
            _aligned("error", render_sci(row.error, layout.error_digits[row.method]))
        )
    return "\n".join(lines) + "\n"


def table_records(which, rows) -> list[dict]:
    """Rows flattened to string-valued records for CSV or JSON output."""
    layout = _layout(which)
    records = [
        {
            "table": layout.which,
            "row": "exact",
            "n": layout.n,
            "K": layout.K,
            "value": render_sci(rows[0].exact, layout.value_digits),
            "error": "",
        }
    ]
    for row in rows:
        records.append(
            {
                "table": layout.which,
                "row": row.method.value,
                "n": layout.n,
                "K": layout.K,
                "value": render_sci(row.value, layout.value_digits),
                "error": render_sci(row.error, layout.error_digits[row.method]),
            }
        )
    return records
