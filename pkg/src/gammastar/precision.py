"""Certified arbitrary-precision arithmetic: balls, zeta, erf, incomplete gamma.

The package computes *certified* quantities as (value, error_bound) pairs:
``BigReal`` / ``BigComplex`` carry an mpmath value together with an absolute
error bound that is propagated conservatively through every operation
(ball arithmetic).  Cancellation never invalidates a bound -- absolute
errors only add under subtraction -- it merely makes the bound loose
relative to the value, which callers counter by raising the working
precision and re-running (every certified entry point does this
automatically until its target is met).

Trust base: mpmath's correctly-rounded mpf/mpc ring operations and its
elementary functions (exp, log, sqrt, trig, real-argument gamma) are
budgeted at 8 ulp per call, folded into the ``_slop`` term below.  The
test suite validates this budget by re-running certified ops at +128 bits
and checking agreement within the reported bound.

Working-precision convention: a :class:`Precision` with ``bits`` and
``guard`` computes at ``bits + guard`` (or more) and certifies a final
error of at most 2**-(bits - guard), absolute or relative to the result
magnitude depending on the op (each op documents which).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import mpmath as mp

from .coeffs import shared_bernoulli


@dataclass(frozen=True)
class Precision:
    """Target precision: certify to 2**-(bits-guard), computing with ``guard`` spare bits."""

    bits: int = 256
    guard: int = 32

    def __post_init__(self) -> None:
        if self.bits < 64:
            raise ValueError("bits must be >= 64")
        if self.guard < 32:
            raise ValueError("guard must be >= 32")
        if self.guard >= self.bits:
            raise ValueError("guard must be smaller than bits")

    @property
    def working(self) -> int:
        return self.bits + self.guard

    def eps(self) -> mp.mpf:
        """Certification target 2**-(bits-guard), under the current context."""
        return mp.mpf(2) ** (self.guard - self.bits)


def _slop(mag) -> mp.mpf:
    # 8-ulp rounding budget per operation at the current working precision
    return mp.mpf(2) ** (4 - mp.mp.prec) * mag


def _mag(v) -> mp.mpf:
    # cheap upper bound for |v| (avoids a sqrt for complex values)
    if isinstance(v, mp.mpc):
        return abs(v.real) + abs(v.imag)
    return abs(v)


def mpf_from_fraction(q: Fraction) -> mp.mpf:
    """Round an exact rational to the current working precision."""
    return mp.mpf(q.numerator) / q.denominator


class BigReal:
    """A real ball: ``value`` (mpf) with ``|value - true| <= err``."""

    __slots__ = ("value", "err")

    def __init__(self, value, err=0) -> None:
        self.value = mp.mpf(value)
        self.err = mp.mpf(err)
        if self.err < 0:
            raise ValueError("error bound must be nonnegative")

    @classmethod
    def exact(cls, q) -> "BigReal":
        if isinstance(q, Fraction):
            v = mpf_from_fraction(q)
            return cls(v, _slop(_mag(v)))
        return cls(mp.mpf(q), 0)

    def __repr__(self) -> str:
        return f"BigReal({mp.nstr(self.value, 12)}, err<={mp.nstr(self.err, 3)})"

    # -- ring ops ----------------------------------------------------------
    def __add__(self, other) -> "BigReal":
        o = _coerce_real(other)
        v = self.value + o.value
        return BigReal(v, self.err + o.err + _slop(_mag(v)))

    __radd__ = __add__

    def __neg__(self) -> "BigReal":
        return BigReal(-self.value, self.err)

    def __sub__(self, other) -> "BigReal":
        return self + (-_coerce_real(other))

    def __rsub__(self, other) -> "BigReal":
        return _coerce_real(other) + (-self)

    def __mul__(self, other) -> "BigReal":
        o = _coerce_real(other)
        v = self.value * o.value
        err = self.err * _mag(o.value) + o.err * _mag(self.value) + self.err * o.err
        return BigReal(v, err + _slop(_mag(v)))

    __rmul__ = __mul__

    def __truediv__(self, other) -> "BigReal":
        o = _coerce_real(other)
        denom_low = abs(o.value) - o.err
        if denom_low <= 0:
            raise ZeroDivisionError("divisor ball contains zero")
        v = self.value / o.value
        err = (self.err + _mag(v) * o.err) / denom_low
        return BigReal(v, err + _slop(_mag(v)))

    def __rtruediv__(self, other) -> "BigReal":
        return _coerce_real(other) / self

    # -- bounds ------------------------------------------------------------
    def upper(self) -> mp.mpf:
        return self.value + self.err + _slop(_mag(self.value))

    def lower(self) -> mp.mpf:
        return self.value - self.err - _slop(_mag(self.value))

    def abs_upper(self) -> mp.mpf:
        return abs(self.value) + self.err + _slop(_mag(self.value))

    def abs_lower(self) -> mp.mpf:
        low = abs(self.value) - self.err - _slop(_mag(self.value))
        return low if low > 0 else mp.mpf(0)

    # -- elementary functions ------------------------------------------------
    def exp(self) -> "BigReal":
        v = mp.exp(self.value)
        # |e^(a+d) - e^a| <= e^a (e^|d| - 1)
        growth = mp.expm1(self.err) if self.err < 1 else mp.exp(self.err) - 1
        return BigReal(v, abs(v) * growth + _slop(_mag(v)))

    def log(self) -> "BigReal":
        if self.value - self.err <= 0:
            raise ValueError("log requires a ball strictly inside the positive axis")
        v = mp.log(self.value)
        return BigReal(v, self.err / (self.value - self.err) + _slop(_mag(v)))

    def sqrt(self) -> "BigReal":
        low = self.value - self.err
        if low < 0:
            raise ValueError("sqrt requires a nonnegative ball")
        v = mp.sqrt(self.value)
        if low == 0:
            # ball reaches zero; sqrt is not Lipschitz there
            wide = v + mp.sqrt(self.err)
            return BigReal(v, wide + _slop(_mag(v)))
        return BigReal(v, self.err / (2 * mp.sqrt(low)) + _slop(_mag(v)))

    def powi(self, n: int) -> "BigReal":
        return _powi(self, n, BigReal(1))


class BigComplex:
    """A complex ball: ``value`` (mpc) with ``|value - true| <= err`` (modulus)."""

    __slots__ = ("value", "err")

    def __init__(self, value, err=0) -> None:
        self.value = mp.mpc(value)
        self.err = mp.mpf(err)
        if self.err < 0:
            raise ValueError("error bound must be nonnegative")

    @classmethod
    def exact(cls, q) -> "BigComplex":
        if isinstance(q, Fraction):
            v = mpf_from_fraction(q)
            return cls(v, _slop(_mag(v)))
        return cls(mp.mpc(q), 0)

    def __repr__(self) -> str:
        return f"BigComplex({mp.nstr(self.value, 12)}, err<={mp.nstr(self.err, 3)})"

    # -- ring ops ----------------------------------------------------------
    def __add__(self, other) -> "BigComplex":
        o = _coerce_complex(other)
        v = self.value + o.value
        return BigComplex(v, self.err + o.err + _slop(_mag(v)))

    __radd__ = __add__

    def __neg__(self) -> "BigComplex":
        return BigComplex(-self.value, self.err)

    def __sub__(self, other) -> "BigComplex":
        return self + (-_coerce_complex(other))

    def __rsub__(self, other) -> "BigComplex":
        return _coerce_complex(other) + (-self)

    def __mul__(self, other) -> "BigComplex":
        o = _coerce_complex(other)
        v = self.value * o.value
        err = self.err * _mag(o.value) + o.err * _mag(self.value) + self.err * o.err
        return BigComplex(v, err + _slop(_mag(v)))

    __rmul__ = __mul__

    def __truediv__(self, other) -> "BigComplex":
        o = _coerce_complex(other)
        denom_low = o.abs_lower()
        if denom_low <= 0:
            raise ZeroDivisionError("divisor ball contains zero")
        v = self.value / o.value
        err = (self.err + _mag(v) * o.err) / denom_low
        return BigComplex(v, err + _slop(_mag(v)))

    def __rtruediv__(self, other) -> "BigComplex":
        return _coerce_complex(other) / self

    def conjugate(self) -> "BigComplex":
        return BigComplex(mp.conj(self.value), self.err)

    # -- bounds ------------------------------------------------------------
    def abs_upper(self) -> mp.mpf:
        return abs(self.value) + self.err + _slop(_mag(self.value))

    def abs_lower(self) -> mp.mpf:
        low = abs(self.value) - self.err - _slop(_mag(self.value))
        return low if low > 0 else mp.mpf(0)

    def real_ball(self) -> BigReal:
        return BigReal(self.value.real, self.err)

    def imag_ball(self) -> BigReal:
        return BigReal(self.value.imag, self.err)

    # -- elementary functions ------------------------------------------------
    def exp(self) -> "BigComplex":
        v = mp.exp(self.value)
        growth = mp.expm1(self.err) if self.err < 1 else mp.exp(self.err) - 1
        return BigComplex(v, abs(v) * growth + _slop(_mag(v)))

    def log(self) -> "BigComplex":
        # principal branch; the ball must stay clear of the cut (-inf, 0]
        r = self.value.real
        i = self.value.imag
        if abs(self.value) <= self.err:
            raise ValueError("log ball contains zero")
        if r <= 0 and abs(i) <= self.err:
            raise ValueError("log ball touches the branch cut")
        v = mp.log(self.value)
        return BigComplex(v, self.err / (abs(self.value) - self.err) + _slop(_mag(v)))

    def sqrt(self) -> "BigComplex":
        r = self.value.real
        i = self.value.imag
        low = abs(self.value) - self.err
        if low <= 0:
            raise ValueError("sqrt ball contains zero")
        if r <= 0 and abs(i) <= self.err:
            raise ValueError("sqrt ball touches the branch cut")
        v = mp.sqrt(self.value)
        return BigComplex(v, self.err / (2 * mp.sqrt(low)) + _slop(_mag(v)))

    def powi(self, n: int) -> "BigComplex":
        return _powi(self, n, BigComplex(1))

    def pow(self, exponent) -> "BigComplex":
        """Principal power self**exponent via exp(exponent * log self)."""
        return (_coerce_complex(exponent) * self.log()).exp()


def _coerce_real(x) -> BigReal:
    if isinstance(x, BigReal):
        return x
    if isinstance(x, Fraction):
        return BigReal.exact(x)
    return BigReal(x)


def _coerce_complex(x) -> BigComplex:
    if isinstance(x, BigComplex):
        return x
    if isinstance(x, BigReal):
        return BigComplex(x.value, x.err)
    if isinstance(x, Fraction):
        return BigComplex.exact(x)
    return BigComplex(x)


def _powi(base, n: int, one):
    if n == 0:
        return one
    if n < 0:
        return one / _powi(base, -n, one)
    acc = None
    sq = base
    while n:
        if n & 1:
            acc = sq if acc is None else acc * sq
        n >>= 1
        if n:
            sq = sq * sq
    return acc


def ball_pi() -> BigReal:
    v = mp.pi  # lazy constant, rounded at the current precision
    return BigReal(v, _slop(v))


def ball_euler() -> BigReal:
    v = mp.euler
    return BigReal(v, _slop(v))


def gamma_int(n: int) -> BigReal:
    """Gamma(n) = (n-1)! for integer n >= 1, exact up to one rounding."""
    if n < 1:
        raise ValueError("gamma_int requires n >= 1")
    v = mp.factorial(n - 1)
    return BigReal(v, _slop(v))


def gamma_real(x) -> BigReal:
    """Gamma at a real, non-pole point (library call under the 8-ulp budget)."""
    x = mp.mpf(x)
    if x <= 0 and x == mp.floor(x):
        raise ValueError("gamma_real called at a pole")
    v = mp.gamma(x)
    return BigReal(v, _slop(_mag(v)))


# ---------------------------------------------------------------------------
# zeta at integer arguments


def zeta_int(m: int, prec: Precision = Precision()) -> BigReal:
    """Certified zeta(m) for integer m >= 2; error <= eps * zeta(m).

    Even m uses the exact Bernoulli closed form.  Odd m uses Euler-Maclaurin
    summation whose remainder after J correction terms is bounded through the
    periodized-Bernoulli estimate |B~_n(x)| <= 2 zeta(n) n!/(2 pi)^n, giving

        |R_J| <= 4 (m)_{2J+1} Q^{-m-2J} / ((2 pi)^{2J+1} (m+2J)).

    Very large odd m short-circuits to a direct partial sum with an integral
    tail bound.
    """
    if not isinstance(m, int) or m < 2:
        raise ValueError("zeta_int requires an integer argument m >= 2")
    with mp.workprec(prec.working + 16):
        eps = prec.eps()
        if m % 2 == 0:
            k = m // 2
            bval = BigReal.exact(shared_bernoulli(m)[m])
            two_pi = ball_pi() * 2
            num = two_pi.powi(m) * bval * ((-1) ** (k + 1))
            den = BigReal.exact(Fraction(2 * math.factorial(m)))
            return num / den
        # direct summation wins once 2^-m alone is below target
        if m >= prec.working // 2 + 8:
            return _zeta_direct(m, eps)
        return _zeta_euler_maclaurin(m, eps)


def _zeta_direct(m: int, eps) -> BigReal:
    # sum j^-m until the integral tail bound J^(1-m)/(m-1) is negligible
    total = BigReal(1)
    j = 2
    while True:
        tv = mp.mpf(j) ** (-m)
        total = total + BigReal(tv, _slop(tv))
        tail = mp.mpf(j) ** (1 - m) / (m - 1)
        if tail < eps / 4:
            return BigReal(total.value, total.err + tail)
        j += 1


def _zeta_euler_maclaurin(m: int, eps) -> BigReal:
    target_l2 = float(mp.log(eps / 4) / mp.log(2))
    q = max(16, m + 2)
    while True:
        picked = None
        for j in range(1, 800):
            # log2 of the remainder bound, in doubles (only steers Q and J)
            l2 = (
                2.0
                + (math.lgamma(m + 2 * j + 1) - math.lgamma(m))
                / math.log(2)
                - (2 * j + 1) * math.log2(2 * math.pi)
                - (m + 2 * j) * math.log2(q)
                - math.log2(m + 2 * j)
            )
            if l2 <= target_l2:
                picked = j
                break
        if picked is not None:
            break
        q *= 2
    j_terms = picked
    total = BigReal(0)
    for j in range(1, q):
        tv = mp.mpf(j) ** (-m)
        total = total + BigReal(tv, _slop(tv))
    qb = BigReal(mp.mpf(q))
    total = total + qb.powi(1 - m) / (m - 1)
    total = total + qb.powi(-m) / 2
    bern = shared_bernoulli(2 * j_terms)
    for k in range(1, j_terms + 1):
        coeff = Fraction(bern[2 * k], math.factorial(2 * k)) * _int_poch(m, 2 * k - 1)
        total = total + BigReal.exact(coeff) * qb.powi(-m - 2 * k + 1)
    rem = (
        4
        * mp.mpf(_int_poch(m, 2 * j_terms + 1))
        * mp.mpf(q) ** (-m - 2 * j_terms)
        / ((2 * mp.pi) ** (2 * j_terms + 1) * (m + 2 * j_terms))
    )
    return BigReal(total.value, total.err + rem)


def _int_poch(s: int, k: int) -> int:
    # rising factorial (s)_k for integers
    out = 1
    for i in range(k):
        out *= s + i
    return out


# ---------------------------------------------------------------------------
# complex error function


def erf_cx(w, prec: Precision = Precision()) -> BigComplex:
    """Certified erf(w) for complex w; error <= eps * max(|erf w|, 1).

    Maclaurin series with a rigorous tail bound; the working precision is
    raised by ~1.45 |w|^2 bits to absorb the cancellation between terms of
    size up to e^{|w|^2}.
    """
    w = mp.mpc(w)
    aw = abs(w)
    if aw == 0:
        return BigComplex(0, 0)
    cancel = int(1.45 * float(aw) ** 2) + 16
    wp = prec.working + cancel
    for _ in range(4):
        with mp.workprec(wp):
            eps = prec.eps()
            out = _erf_series(w)
            scale = max(abs(out.value), mp.mpf(1))
            if out.err <= eps * scale:
                return out
        wp *= 2
    raise RuntimeError("erf_cx failed to meet its error target")


def _erf_series(w) -> BigComplex:
    wc = mp.mpc(w)
    w2 = wc * wc
    term = wc  # w^{2k+1}/k!
    total = mp.mpc(0)
    maxmag = mp.mpf(0)
    k = 0
    aw2 = abs(w2)
    eps_stop = mp.mpf(2) ** (-mp.mp.prec - 8)
    while True:
        contrib = term / (2 * k + 1)
        total += contrib
        maxmag = max(maxmag, _mag(total), _mag(contrib))
        # once the term ratio |w|^2/(k+1) drops under 1/2, the remaining
        # sum of |terms| is below twice the next term
        nxt = _mag(term) * aw2 / (k + 1)
        if k >= 2 * aw2 and 2 * nxt < eps_stop * max(maxmag, mp.mpf(1)):
            tail = 2 * nxt
            break
        term = -term * w2 / (k + 1)
        k += 1
        if k > 10_000_000:
            raise RuntimeError("erf series failed to converge")
    pref = 2 / mp.sqrt(mp.pi)
    value = pref * total
    rounding = (k + 8) * mp.mpf(2) ** (2 - mp.mp.prec) * max(maxmag, mp.mpf(1))
    return BigComplex(value, pref * (tail + rounding) + _slop(_mag(value)))


# ---------------------------------------------------------------------------
# upper incomplete gamma, real order, complex argument


def upper_gamma_cx(p, w, prec: Precision = Precision(), arg_w=None) -> BigComplex:
    """Certified Gamma(p, w) for real p and complex w != 0 (or w = 0, p > 0).

    The order is reduced to a base case by the exact recurrence
    Gamma(a+1, w) = a Gamma(a, w) + w^a e^{-w}; the base case is either the
    entire lower-incomplete series (fractional p), the exponential integral
    log-series (integer p, reached through Gamma(0, w)), or e^{-w} itself
    (integer p >= 1).  Passing ``arg_w`` selects a continued branch of the
    underlying log w; the default is the principal argument.  The returned
    ball satisfies err <= eps * |value|.
    """
    pq = _as_fraction(p)
    w = mp.mpc(w)
    if w == 0:
        if pq <= 0:
            raise ValueError("upper_gamma_cx at w = 0 requires p > 0")
        with mp.workprec(prec.working + 16):
            if pq.denominator == 1:
                return _coerce_complex(gamma_int(int(pq)))
            return _coerce_complex(gamma_real(mpf_from_fraction(pq)))
    aw = abs(w)
    cancel = int(1.45 * float(aw)) + 32
    steps = abs(int(pq)) + 2
    wp = prec.working + cancel + 4 * max(8, steps.bit_length())
    for _ in range(6):
        with mp.workprec(wp):
            eps = prec.eps()
            out = _upper_gamma_core(pq, w, arg_w)
            if out.err <= eps * abs(out.value):
                return out
        wp *= 2
    raise RuntimeError("upper_gamma_cx failed to meet its error target")


def _as_fraction(p) -> Fraction:
    if isinstance(p, Fraction):
        return p
    if isinstance(p, int):
        return Fraction(p)
    if isinstance(p, (float, mp.mpf)):
        num, den = _dyadic(mp.mpf(p))
        return Fraction(num, den)
    raise TypeError("order p must be int, Fraction, float or mpf")


def _dyadic(x: mp.mpf) -> tuple[int, int]:
    num, den = mp.libmp.to_rational(x._mpf_)
    return int(num), int(den)


def _log_w(w, arg_w) -> BigComplex:
    # arg_w only picks the sheet: the principal log plus a whole number of
    # turns.  Substituting arg_w itself for the angle would desynchronise
    # log w from the point by the caller's rounding, and the downward
    # recurrence amplifies such an offset by ~|w|^p / p!.
    v = mp.log(w)
    if arg_w is not None:
        turns = mp.nint((mp.mpf(arg_w) - v.imag) / (2 * mp.pi))
        if turns:
            v += mp.mpc(0, 2 * mp.pi * turns)
    return BigComplex(v, _slop(_mag(v)))


def _upper_gamma_core(pq: Fraction, w, arg_w) -> BigComplex:
    frac = pq - math.floor(pq)
    logw = _log_w(w, arg_w)
    if frac == 0:
        if pq >= 1:
            base_order = 1
            base = (-BigComplex(w, 0)).exp()  # Gamma(1, w) = e^{-w}
        else:
            base_order = 0
            base = _e1_series(w, logw)
    else:
        base_order = frac
        base = _lower_incomplete_complement(frac, w, logw)
    return _order_recurrence(base, base_order, pq, w, logw)


def _order_recurrence(base: BigComplex, a0, target: Fraction, w, logw: BigComplex) -> BigComplex:
    wball = BigComplex(w, 0)
    a = Fraction(a0)
    g = base
    if target > a:
        # Gamma(a+1, w) = a Gamma(a, w) + w^a e^{-w}
        power = (logw * a).exp() * (-wball).exp()  # w^a e^{-w}
        while a < target:
            g = g * a + power
            power = power * wball
            a += 1
    elif target < a:
        # Gamma(a-1, w) = (Gamma(a, w) - w^{a-1} e^{-w}) / (a - 1)
        power = (logw * (a - 1)).exp() * (-wball).exp()  # w^{a-1} e^{-w}
        while a > target:
            g = (g - power) / (a - 1)
            power = power / wball
            a -= 1
    return g


def _lower_incomplete_complement(a0: Fraction, w, logw: BigComplex) -> BigComplex:
    # Gamma(a0, w) = Gamma(a0) - w^{a0} sum_k (-w)^k / (k! (a0 + k)),  0 < a0 < 1
    series, maxmag, nterms, tail = _entire_sum(w, lambda k: mp.mpf(a0.numerator) / a0.denominator + k)
    rounding = (nterms + 8) * mp.mpf(2) ** (2 - mp.mp.prec) * max(maxmag, mp.mpf(1))
    ball = BigComplex(series, tail + rounding)
    pref = (logw * a0).exp()
    return _coerce_complex(gamma_real(mpf_from_fraction(a0))) - pref * ball


def _e1_series(w, logw: BigComplex) -> BigComplex:
    # Gamma(0, w) = E_1(w) = -euler - log w + sum_{k>=1} (-1)^{k+1} w^k / (k k!)
    series, maxmag, nterms, tail = _entire_sum(w, lambda k: mp.mpf(k), start=1)
    rounding = (nterms + 8) * mp.mpf(2) ** (2 - mp.mp.prec) * max(maxmag, mp.mpf(1))
    ball = BigComplex(series, tail + rounding)
    return -_coerce_complex(ball_euler()) - logw - ball


def _entire_sum(w, weight, start: int = 0):
    """Sum_{k>=start} (-w)^k / (k! weight(k)) with max-magnitude tracking.

    Returns (sum, max partial magnitude, number of terms, tail bound).  The
    term ratio is |w|/(k+1) * weight(k)/weight(k+1) <= |w|/(k+1) for the
    nondecreasing weights used here, so beyond k >= 2|w| the tail is under
    twice the next term.
    """
    wc = mp.mpc(w)
    aw = abs(wc)
    eps_stop = mp.mpf(2) ** (-mp.mp.prec - 8)
    term = mp.mpc(1)  # (-w)^k / k!
    if start == 1:
        term = -wc
    total = mp.mpc(0)
    maxmag = mp.mpf(0)
    k = start
    while True:
        contrib = term / weight(k)
        total += contrib
        maxmag = max(maxmag, _mag(total), _mag(contrib))
        tmag = _mag(term)
        nxt = tmag * aw / (k + 1)
        if k >= 2 * aw and nxt * 2 < eps_stop * max(maxmag, mp.mpf(1)):
            tail = 2 * nxt / max(float(weight(k)), 1e-30)
            return total, maxmag, k - start + 1, mp.mpf(tail)
        term = -term * wc / (k + 1)
        k += 1
        if k > 50_000_000:
            raise RuntimeError("entire series failed to converge")
