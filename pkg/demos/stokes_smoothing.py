"""Watch the subdominant exponential switch on across the Stokes line.

On the positive imaginary axis the scaled-gamma series hides a second
exponential e^{-2 pi i z}.  Sweeping arg z through pi/2 at fixed |z|, the
effective multiplier in front of that exponential climbs from 0 to 1, and
the classical error-function profile 1/2 + erf((theta - pi/2) sqrt(pi
|z|))/2 predicts the climb to a few percent.  The residual shrinks as |z|
grows: the transition is smooth but ever sharper.

Run:  python3 demos/stokes_smoothing.py
"""

import mpmath as mp

from gammastar.hyper import stokes_profile
from gammastar.precision import Precision
from gammastar.series import SeriesKind


def bar(x: float, width: int = 40) -> str:
    filled = max(0, min(width, round(x * width)))
    return "#" * filled + "." * (width - filled)


def main() -> None:
    prec = Precision(bits=192)
    for modulus in (6, 12):
        offsets = [mp.mpf(i - 8) / 16 for i in range(17)]
        grid = [mp.pi / 2 + d for d in offsets]
        rows = stokes_profile(SeriesKind.gamma, modulus, grid, 3, prec)
        print(f"--- |z| = {modulus}, multiplier vs erf prediction")
        print("  theta-pi/2  multiplier  predicted  |residual|")
        for off, row in zip(offsets, rows):
            mult = float(row.effective_multiplier.value.real)
            pred = float(row.erf_prediction.value)
            res = float(row.residual.value)
            print(
                f"  {float(off):+.4f}      {mult:8.5f}   {pred:8.5f}"
                f"   {res:.2e}  {bar(mult)}"
            )
        peak = max(float(r.residual.value) for r in rows)
        print(f"max |multiplier - prediction| = {peak:.3g}")
        print()


if __name__ == "__main__":
    main()
