"""Late-coefficient machinery: xi, resummations, tables, resurgence moments.

The published comparison tables double as the oracle here: every printed
digit of the gamma_101 and gamma_100 rows is asserted, values and errors
alike.  The xi function gets refereed by its integral form, and the
resurgence quadrature recovers low-order coefficients whose exact
rationals we generate independently.
"""

from fractions import Fraction

import mpmath as mp
import pytest

from gammastar.coeffs import StirlingTable, shared_gammas
from gammastar.late_coeffs import (
    TABLE_LAYOUTS,
    ApproxMethod,
    Parity,
    _sqrt_kernel_coeffs,
    late_coeff_approx,
    optimal_K,
    render_sci,
    render_table_text,
    reproduce_table,
    resurgence_quadrature,
    table_records,
    xi,
    xi_integral,
    xi_series_coefficient,
)
from gammastar.precision import BigReal, Precision

P = Precision(bits=256, guard=32)
P512 = Precision(bits=512)


def setup_module():
    mp.mp.prec = 320


# Every printed digit of both published tables, values and errors.
TABLE_STRINGS = {
    "1": {
        "exact": "-0.718920823005286472090671337669485196245e77",
        ApproxMethod.DINGLE: (
            "-0.718920823005286472090671337669485196372e77",
            "0.127e41",
        ),
        ApproxMethod.BOYD_GAMMA: (
            "-0.718920823005286472090671337669343420137e77",
            "-0.141776108e47",
        ),
        ApproxMethod.BOYD_ZETA: (
            "-0.718920823005286472090671337669626972607e77",
            "0.141776362e47",
        ),
        ApproxMethod.XI_NEW: (
            "-0.718920823005286472090671337669485196372e77",
            "0.127e41",
        ),
    },
    "2": {
        "exact": "-0.238939789661593595677447537129753012e74",
        ApproxMethod.DINGLE: (
            "-0.238939789661593595677447537129753175e74",
            "0.163e41",
        ),
        ApproxMethod.BOYD_GAMMA: (
            "-0.238939789661593595677447537129564608e74",
            "-0.188403e44",
        ),
        ApproxMethod.BOYD_ZETA: (
            "-0.238939789661593595677447537129941741e74",
            "0.188729e44",
        ),
        ApproxMethod.XI_NEW: (
            "-0.238939789661593595677447537129753175e74",
            "0.163e41",
        ),
    },
}


@pytest.fixture(scope="module")
def table_rows():
    return {which: reproduce_table(which, P512) for which in ("1", "2")}


class TestXi:
    def test_series_coefficients(self):
        want = [
            Fraction(1),
            Fraction(1, 2),
            Fraction(3, 8),
            Fraction(5, 16),
            Fraction(35, 128),
        ]
        assert [xi_series_coefficient(m) for m in range(5)] == want

    def test_limit_at_large_argument(self):
        # first correction is (1/2) 2^-200
        val = xi(200, P)
        assert 0 < val.value - 1 < mp.mpf(2) ** -199
        assert val.err < mp.mpf(2) ** -250

    def test_two_routes_meet_at_small_order(self):
        # the reorganised series against the quadrature of the Laplace
        # integral; independent machinery on both sides
        for r in (5, Fraction(3, 2)):
            series = xi(r, P)
            integral = xi_integral(r, P)
            rel = abs(series.value - integral.value) / series.value
            assert rel < mp.mpf(10) ** -30, f"r={r}: rel={rel}"

    def test_plain_route_value(self):
        # r = 51 is summed directly; leading correction (1/2) 2^-51
        val = xi(51, P)
        core = val.value - 1 - mp.mpf(2) ** -52
        assert abs(core) < mp.mpf(3) ** -51

    def test_kernel_coefficient_bound(self):
        # the analytic constant used by the split remainder: |h_j| <= 4.8/4^j
        coeffs = _sqrt_kernel_coeffs(120, 320)
        for j, h in enumerate(coeffs):
            assert abs(h.value) <= mp.mpf("4.8") / mp.mpf(4) ** j

    def test_domain(self):
        for f in (xi, xi_integral):
            with pytest.raises(ValueError, match="r > 1/2"):
                f(Fraction(1, 2), P)
        with pytest.raises(TypeError, match="exact"):
            xi(BigReal(mp.mpf(3), mp.mpf("1e-10")), P)


class TestRenderSci:
    def test_fixed_cases(self):
        assert render_sci(Fraction(9999, 10000), 3) == "0.100e1"
        assert render_sci(Fraction(-127, 1000), 3) == "-0.127e0"
        assert render_sci(Fraction(127 * 10**38), 3) == "0.127e41"
        assert render_sci(0, 4) == "0.0000e0"

    def test_refuses_uncertified_digits(self):
        wide = BigReal(mp.mpf(1) / 3, mp.mpf("1e-5"))
        with pytest.raises(ValueError, match="certify"):
            render_sci(wide, 10)
        assert render_sci(wide, 3) == "0.333e0"


class TestLateCoeffApprox:
    def test_published_single_rows(self):
        row = late_coeff_approx(101, "dingle", 26, prec=P512)
        assert render_sci(row.value, 39) == TABLE_STRINGS["1"][ApproxMethod.DINGLE][0]
        assert render_sci(row.error, 3) == "0.127e41"
        assert row.n == 51 and row.parity is Parity.ODD and row.target_index == 101
        row = late_coeff_approx(100, ApproxMethod.XI_NEW, 25, prec=P512)
        assert render_sci(row.value, 36) == TABLE_STRINGS["2"][ApproxMethod.XI_NEW][0]
        assert render_sci(row.error, 3) == "0.163e41"
        assert row.parity is Parity.EVEN and row.target_index == 100

    def test_error_is_exact_minus_value(self):
        row = late_coeff_approx(101, "boyd_gamma", 26, prec=P512)
        recomputed = BigReal.exact(row.exact) - row.value
        assert abs(recomputed.value - row.error.value) <= recomputed.err + row.error.err

    def test_leading_terms_agree_across_methods(self):
        # zeta and xi weights tend to 1, so all K=1 sums coincide to the
        # size of the first neglected weight correction
        vals = [
            late_coeff_approx(100, m, 1, prec=P).value for m in ApproxMethod
        ]
        worst = max(
            abs(a.value - b.value) / abs(a.value) for a in vals for b in vals
        )
        assert worst < mp.mpf(2) ** -(2 * 50 - 2)

    def test_improved_variant_beats_bare_weight(self):
        better = late_coeff_approx(101, "boyd_improved", 26, prec=P512)
        bare = late_coeff_approx(101, "boyd_gamma", 26, prec=P512)
        assert abs(better.error.value) < abs(bare.error.value) / 1000

    def test_validation(self):
        with pytest.raises(ValueError, match="1 <= K < n"):
            late_coeff_approx(101, "dingle", 51)
        with pytest.raises(ValueError, match="1 <= K < n"):
            late_coeff_approx(101, "dingle", 0)
        with pytest.raises(ValueError, match="expected one of"):
            late_coeff_approx(101, "newton", 5)
        with pytest.raises(ValueError, match="too short"):
            table = StirlingTable(method="wrench", gammas=shared_gammas(50))
            late_coeff_approx(101, "dingle", 5, table)
        with pytest.raises(ValueError, match=">= 3"):
            late_coeff_approx(2, "dingle", 1)


class TestOptimalK:
    def test_published_pairs(self):
        assert optimal_K(51) == 26
        assert optimal_K(50) == 25
        assert optimal_K(1) == 1

    def test_domain(self):
        with pytest.raises(ValueError):
            optimal_K(0)


class TestTables:
    def test_every_printed_digit(self, table_rows):
        for which, rows in table_rows.items():
            layout = TABLE_LAYOUTS[which]
            assert (
                render_sci(rows[0].exact, layout.value_digits)
                == TABLE_STRINGS[which]["exact"]
            )
            for row in rows:
                want_value, want_error = TABLE_STRINGS[which][row.method]
                assert render_sci(row.value, layout.value_digits) == want_value
                assert (
                    render_sci(row.error, layout.error_digits[row.method])
                    == want_error
                )

    def test_error_ordering_at_optimal_truncation(self, table_rows):
        for rows in table_rows.values():
            err = {r.method: abs(r.error.value) for r in rows}
            assert err[ApproxMethod.DINGLE] < err[ApproxMethod.BOYD_ZETA] / 1e3
            assert err[ApproxMethod.XI_NEW] < err[ApproxMethod.BOYD_GAMMA] / 1e3
            ratio = err[ApproxMethod.BOYD_GAMMA] / err[ApproxMethod.BOYD_ZETA]
            assert 0.99 < ratio < 1.01

    def test_exact_rows_come_from_shared_table(self, table_rows):
        assert table_rows["1"][0].exact == shared_gammas(101)[101]
        assert table_rows["2"][0].exact == shared_gammas(100)[100]

    def test_text_rendering(self, table_rows):
        text = render_table_text("1", table_rows["1"])
        lines = text.splitlines()
        assert lines[0].startswith("values of n and K")
        assert "n = 51, K = 26" in lines[0]
        assert len(lines) == 10
        assert lines[1].endswith(TABLE_STRINGS["1"]["exact"])
        # label column aligns the sign: positive entries get a leading space
        assert lines[2].endswith(TABLE_STRINGS["1"][ApproxMethod.DINGLE][0])
        assert lines[3].endswith(" 0.127e41")

    def test_records(self, table_rows):
        records = table_records("2", table_rows["2"])
        assert [r["row"] for r in records] == [
            "exact",
            "dingle",
            "boyd_gamma",
            "boyd_zeta",
            "xi_new",
        ]
        assert records[0]["error"] == ""
        assert records[1]["error"] == "0.163e41"
        assert all(r["n"] == 50 and r["K"] == 25 for r in records)

    def test_which_spellings(self, table_rows):
        assert [r.method for r in reproduce_table("table2", P512)] == [
            r.method for r in table_rows["2"]
        ]
        with pytest.raises(ValueError, match="1 or 2"):
            reproduce_table("3", P512)


class TestResurgence:
    PREC = Precision(bits=96)

    def test_low_order_coefficients_to_twenty_digits(self):
        exact = shared_gammas(6)
        for target in range(1, 7):
            got = resurgence_quadrature(target, self.PREC)
            truth = mp.mpf(exact[target].numerator) / exact[target].denominator
            rel = abs(got.value - truth) / abs(truth)
            assert rel < mp.mpf(10) ** -20, f"gamma_{target}: rel={rel}"
            assert abs(got.value - truth) <= got.err

    def test_sign_structure(self):
        # gamma_2 > 0 comes out of the moment identity with no table input
        assert resurgence_quadrature(2, self.PREC).value > 0
        assert resurgence_quadrature(1, self.PREC).value < 0

    def test_domain(self):
        with pytest.raises(ValueError):
            resurgence_quadrature(0, self.PREC)
