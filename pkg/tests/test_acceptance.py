"""End-to-end acceptance suite: every shipped guarantee, one test each.

Each test checks one headline claim at its stated tolerance and prints a
single PASS/FAIL verdict line (visible with ``pytest -s``, and in the
captured output of any failure; the ``-v`` test line carries the same
information).  Tolerances and sample counts here are contractual: loosen
none of them without revisiting the claims in the README.
"""

import random
from time import perf_counter

import mpmath as mp

from gammastar.coeffs import (
    METHODS,
    convolution_residual,
    shared_gammas,
    stirling_coefficients,
)
from gammastar.engine import SectorPoint, gamma_star
from gammastar.hyper import (
    improved_expansion,
    least_term_index,
    residual_bound,
    stokes_profile,
)
from gammastar.late_coeffs import (
    render_sci,
    reproduce_table,
    resurgence_quadrature,
)
from gammastar.precision import BigReal, Precision
from gammastar.series import (
    SeriesKind,
    bound_boyd,
    bound_coeff_pair,
    bound_halfplane,
    remainder_enclosure,
    true_remainder,
)
from gammastar.terminant import terminant, terminant_quadrature

P256 = Precision(bits=256, guard=32)
BOTH_KINDS = (SeriesKind.gamma, SeriesKind.reciprocal)


def setup_module():
    mp.mp.prec = 320


def verdict(label: str, failures: list) -> None:
    status = "PASS" if not failures else "FAIL"
    print(f"{status}: {label}")
    assert not failures, (label, failures[:10])


# ---------------------------------------------------------------------------
# 1. Published tables, digit for digit


TABLE1_VALUES = {
    "exact": "-0.718920823005286472090671337669485196245e77",
    "dingle": "-0.718920823005286472090671337669485196372e77",
    "boyd_gamma": "-0.718920823005286472090671337669343420137e77",
    "boyd_zeta": "-0.718920823005286472090671337669626972607e77",
    "xi_new": "-0.718920823005286472090671337669485196372e77",
}
TABLE1_ERRORS3 = {
    "dingle": "0.127e41",
    "boyd_gamma": "-0.142e47",
    "boyd_zeta": "0.142e47",
    "xi_new": "0.127e41",
}
TABLE2_VALUES = {
    "exact": "-0.238939789661593595677447537129753012e74",
    "dingle": "-0.238939789661593595677447537129753175e74",
    "boyd_gamma": "-0.238939789661593595677447537129564608e74",
    "boyd_zeta": "-0.238939789661593595677447537129941741e74",
    "xi_new": "-0.238939789661593595677447537129753175e74",
}
TABLE2_ERRORS3 = {
    "dingle": "0.163e41",
    "boyd_gamma": "-0.188e44",
    "boyd_zeta": "0.189e44",
    "xi_new": "0.163e41",
}


def test_criterion_01_comparison_tables_reproduce_digit_for_digit():
    failures = []
    start = perf_counter()
    prec = Precision(bits=512)
    for which, values, errors3, digits in (
        ("1", TABLE1_VALUES, TABLE1_ERRORS3, 39),
        ("2", TABLE2_VALUES, TABLE2_ERRORS3, 36),
    ):
        rows = reproduce_table(which, prec)
        if render_sci(rows[0].exact, digits) != values["exact"]:
            failures.append((which, "exact"))
        for row in rows:
            name = row.method.value
            if render_sci(row.value, digits) != values[name]:
                failures.append((which, name, "value"))
            if render_sci(row.error, 3) != errors3[name]:
                failures.append((which, name, "error"))
    elapsed = perf_counter() - start
    if elapsed > 60:
        failures.append(("runtime", elapsed))
    verdict("criterion 1: both comparison tables reproduce within 60 s", failures)


# ---------------------------------------------------------------------------
# 2. Exact-coefficient cross-validation through n = 200


def test_criterion_02_four_generators_agree_exactly_to_n_200():
    failures = []
    start = perf_counter()
    tables = [stirling_coefficients(200, m) for m in METHODS]
    for t in tables[1:]:
        if t.gammas != tables[0].gammas:
            failures.append(("disagreement", t.method))
    g = tables[0].gammas
    for big_n in range(1, 101):
        if (-1) ** big_n * g[2 * big_n - 1] <= 0:
            failures.append(("odd sign", big_n))
        if (-1) ** (big_n + 1) * g[2 * big_n] <= 0:
            failures.append(("even sign", big_n))
    for n in range(1, 201):
        if convolution_residual(g, n) != 0:
            failures.append(("convolution", n))
    elapsed = perf_counter() - start
    if elapsed > 20:
        failures.append(("runtime", elapsed))
    verdict("criterion 2: generators agree exactly for n <= 200 within 20 s", failures)


# ---------------------------------------------------------------------------
# 3. Real-axis enclosures are strict


def test_criterion_03_real_axis_enclosures_contain_remainders_strictly():
    failures = []
    for x in (1, 2, 5, 10, 50):
        point = SectorPoint.from_complex(x)
        for kind in BOTH_KINDS:
            for n in range(1, 31):
                rem = true_remainder(point, n, kind)
                lo, hi = remainder_enclosure(point, n, kind)
                inside = (
                    lo.upper() < rem.value.real - rem.err
                    and rem.value.real + rem.err < hi.lower()
                )
                if not inside:
                    failures.append((x, kind.value, n))
    verdict("criterion 3: enclosures strict at z in {1,2,5,10,50}, N <= 30", failures)


# ---------------------------------------------------------------------------
# 4. Remainder-bound sweeps


def test_criterion_04_bound_sweep_500_samples_and_spot_comparison():
    failures = []
    rng = random.Random(20260815)
    for i in range(500):
        modulus = 2 * mp.mpf(50) ** mp.mpf(rng.random())  # log-spaced in [2, 100]
        if i % 25 == 0:
            theta = mp.pi / 2 * (1 if i % 50 == 0 else -1)
        else:
            theta = mp.mpf(rng.uniform(-float(mp.pi / 2), float(mp.pi / 2)))
        n = rng.randint(2, 40)
        kind = BOTH_KINDS[i % 2]
        point = SectorPoint.from_polar(modulus, theta)
        rem_hi = true_remainder(point, n, kind).abs_upper()
        if abs(theta) < mp.pi / 2:
            if rem_hi > bound_coeff_pair(point, n, P256).upper():
                failures.append((i, "coeff_pair"))
        if rem_hi > bound_halfplane(point, n, P256).upper():
            failures.append((i, "halfplane"))
    # the sharper bound beats the older one in its favourable sector
    spot = SectorPoint.from_polar(20, mp.pi / 8)
    if not bound_coeff_pair(spot, 10, P256).upper() < bound_boyd(spot, 10, P256).lower():
        failures.append("spot comparison")
    verdict("criterion 4: 500-sample bound sweep plus spot comparison", failures)


# ---------------------------------------------------------------------------
# 5. Positive-axis two-sided inequality


def test_criterion_05_positive_axis_inequality_certified():
    failures = []
    for i in range(100):
        x = mp.mpf("0.5") * mp.mpf(20000) ** (mp.mpf(i) / 99)
        ball = gamma_star(SectorPoint.from_complex(x), P256)
        xb = BigReal(x)
        upper = BigReal(1) + BigReal(1) / (xb * 12) + BigReal(1) / (xb * xb * 288)
        if not ball.value.real - ball.err > 1:
            failures.append((float(x), "lower"))
        if not ball.value.real + ball.err < upper.lower():
            failures.append((float(x), "upper"))
    verdict("criterion 5: 1 < Gamma*(x) < 1 + 1/(12x) + 1/(288x^2) certified", failures)


# ---------------------------------------------------------------------------
# 6. Boundary lemmas on and past the imaginary axis


def test_criterion_06_boundary_lemma_suite():
    failures = []
    # sign conditions on the axis: Re >= 0, Im <= 0, at 100 points
    for j in range(1, 101):
        s = mp.mpf(j) / 5  # (0, 20]
        g = gamma_star(SectorPoint.from_complex(mp.mpc(0, s)), P256)
        if not (g.value.real >= -g.err and g.value.imag <= g.err):
            failures.append(("sign", float(s)))
    # modulus bound along rays into the second quadrant, 100 pairs
    rng = random.Random(65537)
    for _ in range(100):
        s = mp.mpf(10) ** rng.uniform(-1, 1)
        phi = mp.mpf(rng.uniform(0.01, float(mp.pi / 2 - 0.11)))
        point = SectorPoint.from_polar(s / mp.cos(phi), mp.pi / 2 + phi)
        g = gamma_star(point, P256)
        cap = 1 / (1 - mp.exp(-2 * mp.pi * s))
        if not g.abs_lower() <= cap * (1 + mp.mpf(2) ** -50):
            failures.append(("ray", float(s), float(phi)))
    # exact reciprocal modulus on the axis to 25 digits
    for y in (1, 2, 5):
        g = gamma_star(SectorPoint.from_complex(mp.mpc(0, y)), P256)
        lhs = 1 / abs(g.value)
        rhs = mp.sqrt(1 - mp.exp(-2 * mp.pi * y))
        if not abs(lhs - rhs) < rhs * mp.mpf(10) ** -25:
            failures.append(("modulus identity", y))
    verdict("criterion 6: axis sign/modulus lemmas at stated sample counts", failures)


# ---------------------------------------------------------------------------
# 7. Terminant correctness


def test_criterion_07_terminant_oracle_routes_and_continuation():
    failures = []
    # closed form at order 1: That_1(1) = -E_1(1) e^{...}/(2 pi i) oracle
    got = terminant(1, 1, P256)
    with mp.workprec(400):
        want = -mp.e1(1) / mp.mpc(0, 2 * mp.pi)
    if not abs(got.value.value - want) < mp.mpf(10) ** -30:
        failures.append("E_1 oracle")
    # the two independent routes agree to 1e-25 over 50 samples
    rng = random.Random(2718)
    worst = mp.mpf(0)
    from fractions import Fraction

    for i in range(50):
        if i % 2 == 0:
            p = rng.randrange(1, 81)
        else:
            p = Fraction(rng.randrange(4, 320), 4)
        r = mp.mpf(5) + 95 * mp.mpf(rng.random())
        th = (mp.pi - mp.mpf("0.1")) * (2 * mp.mpf(rng.random()) - 1)
        w = r * mp.exp(mp.mpc(0, th))
        chain = terminant(p, w, P256)
        quad = terminant_quadrature(p, w, P256)
        worst = max(worst, abs(chain.value.value - quad.value.value) / abs(chain.value.value))
    if not worst < mp.mpf("1e-25"):
        failures.append(("route gap", float(worst)))
    # analytic continuation across arg w = pi: a tight straddle agrees
    # to relative 1e-10 (the jump belongs to the principal branch only)
    for p, r in ((6, mp.mpf(11)), (3, mp.mpf(7))):
        eps = mp.mpf("1e-12")
        above = terminant(p, r * mp.exp(mp.mpc(0, mp.pi + eps)), P256, arg_w=mp.pi + eps)
        below = terminant(p, r * mp.exp(mp.mpc(0, mp.pi - eps)), P256)
        rel = abs(above.value.value - below.value.value) / abs(below.value.value)
        if not rel < mp.mpf("1e-10"):
            failures.append(("continuation", p, float(rel)))
    verdict("criterion 7: terminant oracle, route agreement, continuation", failures)


# ---------------------------------------------------------------------------
# 8. Hyperasymptotic residuals: dominance and scaling


def test_criterion_08_residual_bound_and_scaling_across_moduli():
    failures = []
    normalized = {2: [], 3: [], 4: []}
    for r in (8, 16, 32):
        point = SectorPoint.from_complex(r)
        n = least_term_index(r)
        for m in (2, 3, 4):
            bound = residual_bound(point, n, m, P256)
            for kind in BOTH_KINDS:
                hx = improved_expansion(point, n, m, kind, P256)
                if hx.residual.abs_upper() > bound.upper():
                    failures.append((r, m, kind.value))
                if kind is SeriesKind.gamma:
                    normalized[m].append(
                        abs(hx.residual.value) * mp.exp(2 * mp.pi * r) * mp.mpf(r) ** m
                    )
    for m, qs in normalized.items():
        if not (qs[1] <= 2 * qs[0] and qs[2] <= 2 * qs[1]):
            failures.append(("scaling", m))
    verdict("criterion 8: residuals bounded and scale across |z| = 8, 16, 32", failures)


# ---------------------------------------------------------------------------
# 9. Stokes smoothing profile


def test_criterion_09_smoothing_profile_shape_and_refinement():
    failures = []
    offsets = ("-0.5", "-0.25", "0", "0.25", "0.5")
    grid10 = [mp.pi / 2 + mp.mpf(d) for d in offsets]
    rows10 = stokes_profile(SeriesKind.gamma, 10, grid10, 3, P256)
    if not abs(rows10[2].effective_multiplier.value.real - mp.mpf("0.5")) < mp.mpf("0.02"):
        failures.append("half at the line")
    if not abs(rows10[0].effective_multiplier.value) < mp.mpf("0.02"):
        failures.append("zero at strip start")
    if not abs(rows10[-1].effective_multiplier.value - 1) < mp.mpf("0.02"):
        failures.append("one at strip end")
    grid20 = [mp.pi / 2 + mp.mpf(d) for d in offsets[1:4]]
    rows20 = stokes_profile(SeriesKind.gamma, 20, grid20, 3, P256)
    peak10 = max(r.residual.value for r in rows10[1:4])
    peak20 = max(r.residual.value for r in rows20)
    if not peak20 <= mp.mpf("0.7") * peak10:
        failures.append(("refinement", float(peak10), float(peak20)))
    verdict("criterion 9: profile sweeps 0 -> 1/2 -> 1 and sharpens with |z|", failures)


# ---------------------------------------------------------------------------
# 10. Resurgence quadrature recovers early coefficients


def test_criterion_10_resurgence_quadrature_to_twenty_digits():
    failures = []
    prec = Precision(bits=96)
    truth = shared_gammas(6)
    for t in range(1, 7):
        got = resurgence_quadrature(t, prec)
        want = mp.mpf(truth[t].numerator) / truth[t].denominator
        rel = abs(got.value - want) / abs(want)
        if not rel < mp.mpf(10) ** -20:
            failures.append((t, float(rel)))
        if not abs(got.value - want) <= got.err:
            failures.append((t, "ball"))
    verdict("criterion 10: moment quadrature recovers gamma_1..gamma_6", failures)
