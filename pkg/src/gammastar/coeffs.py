"""Exact rational Stirling coefficients and Bernoulli numbers.

The divergent series attached to the scaled gamma function,

    Gamma*(z) ~ sum_n (-1)^n gamma_n / z^n,
    1/Gamma*(z) ~ sum_n gamma_n / z^n,

has rational coefficients gamma_0 = 1, gamma_1 = -1/12, gamma_2 = 1/288,
gamma_3 = 139/51840, ...  This module computes them exactly, by four
independent routes, so that every route can serve as an oracle for the
others:

* ``stirling_brassesco`` -- quadratic recurrence in an auxiliary sequence
  b_n coming from Lagrange inversion (with its symmetrized "copson"
  rewriting as the default production form),
* ``stirling_wrench``    -- linear recurrences driven by Bernoulli numbers,
* ``stirling_logderiv``  -- quadratic recurrences from differentiating the
  generating function,
* ``stirling_bessel_poly`` -- gamma_n = U_n(1) for the polynomial sequence
  U_n used in uniform Bessel-function asymptotics.

Everything here is ``fractions.Fraction`` arithmetic; no rounding occurs
anywhere.  The on-disk cache format is a small line-oriented text file with
a trailing SHA-256 line so that mangled caches are rejected loudly.
"""

from __future__ import annotations

import hashlib
import os
import threading
import warnings
from dataclasses import dataclass
from fractions import Fraction

METHODS = ("brassesco", "wrench", "logderiv", "bessel_poly")

_CACHE_MAGIC = "gamma-coeffs v1"


def bernoulli_numbers(kmax: int) -> list[Fraction]:
    """Return [B_0, B_1, ..., B_kmax] with the convention B_1 = -1/2.

    Uses the defining recurrence sum_{k=0}^{n} C(n+1, k) B_k = 0, which
    determines B_n from its predecessors.  All odd-index entries beyond
    B_1 are zero.
    """
    if kmax < 0:
        raise ValueError("kmax must be >= 0")
    bern = [Fraction(1)]
    for n in range(1, kmax + 1):
        if n > 2 and n % 2 == 1:
            # odd Bernoulli numbers vanish; skip the O(n) sum
            bern.append(Fraction(0))
            continue
        acc = Fraction(0)
        binom = 1  # C(n+1, k), updated incrementally
        for k in range(n):
            acc += binom * bern[k]
            binom = binom * (n + 1 - k) // (k + 1)
        bern.append(-acc / (n + 1))
    return bern


def stirling_wrench(nmax: int, bernoulli: list[Fraction] | None = None) -> list[Fraction]:
    """Stirling coefficients gamma_0..gamma_nmax from Bernoulli numbers.

    The recurrences, for n >= 1,

        gamma_{2n-1} = -(1/(2n-1)) sum_{k=1}^{n} (B_{2k}/(2k)) gamma_{2n-2k},
        gamma_{2n}   = -(1/(2n))   sum_{k=1}^{n} (B_{2k}/(2k)) gamma_{2n-2k+1},

    combine into one statement: gamma_i is -1/i times a sum over the entries
    i+1-2k for k = 1..ceil(i/2).
    """
    if nmax < 0:
        raise ValueError("nmax must be >= 0")
    bern = bernoulli if bernoulli is not None else bernoulli_numbers(nmax + 1)
    if len(bern) < nmax + 1:
        raise ValueError("bernoulli table too short: need entries up to index nmax")
    gam = [Fraction(1)]
    for i in range(1, nmax + 1):
        acc = Fraction(0)
        for k in range(1, (i + 1) // 2 + 1):
            acc += bern[2 * k] / (2 * k) * gam[i + 1 - 2 * k]
        gam.append(-acc / i)
    return gam


def stirling_brassesco(nmax: int, variant: str = "copson") -> list[Fraction]:
    """Stirling coefficients via the Lagrange-inversion sequence b_n.

    The sequence starts b_1 = 1, b_3 = 1/36 and continues, for n >= 4,

        b_n = ((2-n)/(3n+3)) b_{n-1} - (1/(n+1)) sum_{k=2}^{n-3} (k+1) b_{k+1} b_{n-k}

    (variant "direct"), or equivalently, symmetrizing the sum,

        b_n = ((2-n)/(3n+3)) b_{n-1} - (1/2) sum_{k=2}^{n-3} b_{k+1} b_{n-k}

    (variant "copson", the default: one fewer multiplication per term).
    Even-index b_n are generally nonzero (b_4 = -1/270); b_2 never enters
    either variant, since the sums only touch b_3..b_{n-2} and the b_{n-1}
    reference starts at n = 4.  Finally

        gamma_n = (-1)^n (2n+1)!/(2^n n!) b_{2n+1}.
    """
    if nmax < 0:
        raise ValueError("nmax must be >= 0")
    if variant not in ("copson", "direct"):
        raise ValueError("variant must be 'copson' or 'direct'")
    top = 2 * nmax + 1
    b = {1: Fraction(1), 3: Fraction(1, 36)}
    if top >= 2:
        b[2] = Fraction(0)  # placeholder only; provably unused
    for n in range(4, top + 1):
        acc = Fraction(0)
        for k in range(2, n - 2):
            if variant == "copson":
                acc += b[k + 1] * b[n - k]
            else:
                acc += (k + 1) * b[k + 1] * b[n - k]
        head = Fraction(2 - n, 3 * n + 3) * b[n - 1]
        if variant == "copson":
            b[n] = head - acc / 2
        else:
            b[n] = head - acc / (n + 1)
    gam = []
    pref = Fraction(1)  # (2n+1)!/(2^n n!), grown by (2n)(2n+1)/(2n) = 2n+1 each step
    for n in range(nmax + 1):
        if n > 0:
            pref *= 2 * n + 1
        gam.append((-1) ** n * pref * b[2 * n + 1])
    return gam


def stirling_logderiv(nmax: int, bernoulli: list[Fraction] | None = None) -> list[Fraction]:
    """Stirling coefficients from the log-derivative of the generating function.

    For n >= 1,

        gamma_{2n-1} = -B_{2n}/(2n(2n-1)) + (1/(2n-1)) sum_{k=1}^{2n-2} (-1)^k k gamma_k gamma_{2n-k-1},
        gamma_{2n}   = -(1/(2n)) sum_{k=1}^{2n-1} (-1)^k k gamma_k gamma_{2n-k}.

    Only Bernoulli numbers up to index nmax+1 are consumed.
    """
    if nmax < 0:
        raise ValueError("nmax must be >= 0")
    bern = bernoulli if bernoulli is not None else bernoulli_numbers(nmax + 1)
    if len(bern) < nmax + 1:
        raise ValueError("bernoulli table too short: need entries up to index nmax")
    gam = [Fraction(1)]
    for i in range(1, nmax + 1):
        acc = Fraction(0)
        for k in range(1, i):
            acc += (-1) ** k * k * gam[k] * gam[i - k]
        if i % 2 == 1:
            gam.append(-bern[i + 1] / (i * (i + 1)) + acc / i)
        else:
            gam.append(-acc / i)
    return gam


def bessel_polynomials(nmax: int) -> list[list[Fraction]]:
    """Return the polynomials U_0..U_nmax as ascending coefficient lists.

    U_0 = 1 and

        U_n(x) = (1/2) x^2 (1 - x^2) U'_{n-1}(x) + (1/8) int_0^x (1 - 5 t^2) U_{n-1}(t) dt.

    U_n has degree 3n and only every other coefficient is nonzero; the
    dense list representation keeps the code straightforward.
    """
    if nmax < 0:
        raise ValueError("nmax must be >= 0")
    polys = [[Fraction(1)]]
    for _ in range(nmax):
        u = polys[-1]
        deriv = [j * u[j] for j in range(1, len(u))]
        out = [Fraction(0)] * (len(u) + 3)
        # (1/2) x^2 (1-x^2) U' contributes at shifts +2 and +4
        for j, c in enumerate(deriv):
            out[j + 2] += c / 2
            if j + 4 >= len(out):
                out.extend([Fraction(0)] * (j + 5 - len(out)))
            out[j + 4] -= c / 2
        # (1/8) int_0^x (1 - 5 t^2) U dt
        for j, c in enumerate(u):
            out[j + 1] += c / Fraction(8 * (j + 1))
            out[j + 3] -= 5 * c / Fraction(8 * (j + 3))
        while out and out[-1] == 0:
            out.pop()
        polys.append(out)
    return polys


def stirling_bessel_poly(nmax: int) -> list[Fraction]:
    """Stirling coefficients as gamma_n = U_n(1)."""
    return [sum(p, Fraction(0)) for p in bessel_polynomials(nmax)]


_GENERATORS = {
    "brassesco": stirling_brassesco,
    "wrench": stirling_wrench,
    "logderiv": stirling_logderiv,
    "bessel_poly": stirling_bessel_poly,
}


@dataclass(frozen=True)
class StirlingTable:
    """Immutable table gamma_0..gamma_{len-1} tagged with its generator."""

    method: str
    gammas: tuple[Fraction, ...]

    def __len__(self) -> int:
        return len(self.gammas)

    def __getitem__(self, n: int) -> Fraction:
        return self.gammas[n]


def stirling_coefficients(nmax: int, method: str = "wrench") -> StirlingTable:
    """Compute gamma_0..gamma_nmax exactly with the named generator."""
    if method not in _GENERATORS:
        raise ValueError(f"unknown method {method!r}; expected one of {METHODS}")
    return StirlingTable(method=method, gammas=tuple(_GENERATORS[method](nmax)))


def convolution_residual(gammas: list[Fraction] | tuple[Fraction, ...], n: int) -> Fraction:
    """Exact value of sum_{k=0}^{n} (-1)^k gamma_k gamma_{n-k}.

    The series for Gamma* and 1/Gamma* multiply to 1, so this vanishes for
    every n >= 1; returning the residual (instead of a bool) lets tests
    assert exact zero.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if len(gammas) < n + 1:
        raise ValueError("table too short for requested convolution index")
    return sum(((-1) ** k * gammas[k] * gammas[n - k] for k in range(n + 1)), Fraction(0))


# ---------------------------------------------------------------------------
# Shared in-process table.  The expensive consumers (certified evaluation at
# high precision) repeatedly ask for prefixes of the same table, so keep one
# append-only wrench table per process.  Recomputation under a race would be
# harmless (the values are exact), the lock just avoids wasted work.

_shared_lock = threading.Lock()
_shared_bernoulli: list[Fraction] = []
_shared_gammas: list[Fraction] = []


def shared_gammas(nmax: int) -> tuple[Fraction, ...]:
    """Prefix gamma_0..gamma_nmax of the shared exact table (wrench route)."""
    if nmax < 0:
        raise ValueError("nmax must be >= 0")
    with _shared_lock:
        if len(_shared_gammas) <= nmax:
            grow = max(nmax, 2 * len(_shared_gammas), 64)
            _shared_bernoulli[:] = bernoulli_numbers(grow + 1)
            _shared_gammas[:] = stirling_wrench(grow, _shared_bernoulli)
        return tuple(_shared_gammas[: nmax + 1])


def shared_bernoulli(kmax: int) -> tuple[Fraction, ...]:
    """Prefix B_0..B_kmax of the shared exact Bernoulli table."""
    if kmax < 0:
        raise ValueError("kmax must be >= 0")
    with _shared_lock:
        if len(_shared_bernoulli) <= kmax:
            _shared_bernoulli[:] = bernoulli_numbers(max(kmax, 2 * len(_shared_bernoulli), 64))
        return tuple(_shared_bernoulli[: kmax + 1])


# ---------------------------------------------------------------------------
# On-disk cache


def cache_save(path: str | os.PathLike[str], table: StirlingTable) -> None:
    """Write a coefficient table as a checksummed UTF-8 text file.

    Layout: a magic/version/method line, a count line, one ``n<TAB>num/den``
    row per coefficient, and a final ``sha256 <hex>`` line over all prior
    bytes.  The write goes through a temp file and an atomic rename.
    """
    lines = [f"{_CACHE_MAGIC} {table.method}", f"count {len(table.gammas)}"]
    for n, q in enumerate(table.gammas):
        lines.append(f"{n}\t{q.numerator}/{q.denominator}")
    body = "".join(line + "\n" for line in lines)
    digest = hashlib.sha256(body.encode("utf-8")).hexdigest()
    data = body + f"sha256 {digest}\n"
    path = os.fspath(path)
    tmp = path + ".tmp"
    with open(tmp, "w", encoding="utf-8") as handle:
        handle.write(data)
    os.replace(tmp, path)


def cache_load(path: str | os.PathLike[str]) -> StirlingTable:
    """Read a table written by :func:`cache_save`, validating everything.

    Raises ValueError with a 1-based line number on any structural problem;
    a checksum mismatch is reported as such.  Rows whose fraction is not in
    lowest terms (or has a negative denominator) are normalized with a
    warning rather than rejected.
    """
    with open(path, "r", encoding="utf-8") as handle:
        raw = handle.read()
    lines = raw.splitlines()
    if not lines:
        raise ValueError("line 1: empty cache file")
    head = lines[0].split()
    if len(head) != 3 or " ".join(head[:2]) != _CACHE_MAGIC:
        raise ValueError("line 1: expected header 'gamma-coeffs v1 <method>'")
    method = head[2]
    if method not in METHODS:
        raise ValueError(f"line 1: unknown method {method!r}")
    if len(lines) < 2 or not lines[1].startswith("count "):
        raise ValueError("line 2: expected 'count <n>'")
    try:
        count = int(lines[1].split()[1])
    except (IndexError, ValueError):
        raise ValueError("line 2: malformed count") from None
    if count < 0 or len(lines) != count + 3:
        raise ValueError(f"line 2: count {count} does not match file length")
    # verify the checksum before trusting any row
    last = lines[-1].split()
    if len(last) != 2 or last[0] != "sha256":
        raise ValueError(f"line {len(lines)}: expected 'sha256 <hex>'")
    body = "".join(line + "\n" for line in lines[:-1])
    digest = hashlib.sha256(body.encode("utf-8")).hexdigest()
    if last[1] != digest:
        raise ValueError(f"line {len(lines)}: sha256 mismatch (file is corrupt or was edited)")
    gammas: list[Fraction] = []
    for i, line in enumerate(lines[2:-1]):
        lineno = i + 3
        parts = line.split("\t")
        if len(parts) != 2:
            raise ValueError(f"line {lineno}: expected '<n>\\t<num>/<den>'")
        try:
            idx = int(parts[0])
            num_str, den_str = parts[1].split("/")
            num, den = int(num_str), int(den_str)
        except ValueError:
            raise ValueError(f"line {lineno}: malformed row") from None
        if idx != i:
            raise ValueError(f"line {lineno}: index {idx} out of order (expected {i})")
        if den == 0:
            raise ValueError(f"line {lineno}: zero denominator")
        q = Fraction(num, den)
        if q.numerator != num or q.denominator != den:
            warnings.warn(
                f"cache row {idx}: {num}/{den} not in lowest terms; reduced on load",
                stacklevel=2,
            )
        gammas.append(q)
    return StirlingTable(method=method, gammas=tuple(gammas))
