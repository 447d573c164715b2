"""Hyperasymptotics in action: re-expanding the optimally truncated tail.

Stopping the divergent series at its least term leaves a remainder of
size ~e^{-2 pi |z|}.  Re-expanding that remainder through M terminant
terms multiplies the accuracy by roughly (2 pi |z|)^{-M}: each extra term
buys another power of 1/|z| beyond the exponential floor.  The explicit
residual bound certifies every stage.

Run:  python3 demos/hyper_error_decay.py
"""

import mpmath as mp

from gammastar.engine import SectorPoint
from gammastar.hyper import improved_expansion, least_term_index, residual_bound
from gammastar.precision import Precision
from gammastar.series import SeriesKind


def main() -> None:
    prec = Precision(bits=256)
    modulus = 8
    point = SectorPoint.from_complex(modulus)
    n = least_term_index(modulus)
    print(f"z = {modulus}, least-term truncation N = {n}")
    print(f"exponential floor e^(-2 pi |z|) = {mp.nstr(mp.exp(-2 * mp.pi * modulus), 3)}")
    print()
    print("  M   |residual after M terminant terms|   certified bound")
    for m in range(5):
        hx = improved_expansion(point, n, m, SeriesKind.gamma, prec)
        size = mp.nstr(abs(hx.residual.value), 4)
        if m >= 2:
            cap = mp.nstr(residual_bound(point, n, m, prec).upper(), 4)
        else:
            cap = "(bound needs M >= 2)"
        print(f"  {m}   {size:<34s}  {cap}")
    print()
    print("M = 0 is plain optimal truncation; every further terminant term")
    print("divides the residual by roughly 2 pi |z| =", mp.nstr(2 * mp.pi * modulus, 4))


if __name__ == "__main__":
    main()
