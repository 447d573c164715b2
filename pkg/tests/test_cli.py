"""Command-line surface: grammar, exit codes, formats, determinism.

Everything runs in-process through ``run`` so we can assert on exact
bytes; one test exercises the installed console entry point indirectly
by calling ``main`` semantics through ``run`` with empty argv.
"""

import json
import pathlib

import mpmath as mp
import pytest

from gammastar.cli import CliConfig, parse_complex, run
from gammastar.coeffs import cache_load

GOLDEN = pathlib.Path(__file__).parent / "golden"


def invoke(capsys, argv):
    code = run(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestParseComplex:
    def test_accepted_forms(self):
        with mp.workprec(120):
            cases = {
                "3": (3, 0),
                "-2.5": (-2.5, 0),
                ".5": (0.5, 0),
                "0.8i": (0, 0.8),
                "-i": (0, -1),
                "+i": (0, 1),
                "3+0.8i": (3, 0.8),
                "3-0.8i": (3, -0.8),
                "-1.5-2i": (-1.5, -2),
                "3+i": (3, 1),
                " 3 + 0.8i ": (3, 0.8),
            }
            for text, (re_part, im_part) in cases.items():
                z = parse_complex(text)
                assert abs(z.real - mp.mpf(str(re_part))) < mp.mpf("1e-30")
                assert abs(z.imag - mp.mpf(str(im_part))) < mp.mpf("1e-30")

    @pytest.mark.parametrize("bad", ["", "abc", "3+2j", "1+2", "i3", "--5", "2 3"])
    def test_rejected_forms(self, bad):
        with pytest.raises(ValueError, match="a\\+bi"):
            parse_complex(bad)


class TestCliConfig:
    def test_defaults(self):
        cfg = CliConfig()
        assert cfg.precision_bits == 256
        assert cfg.output_format == "text"
        assert cfg.precision().bits == 256

    def test_precision_floor(self):
        with pytest.raises(ValueError, match="at least 64"):
            CliConfig(precision_bits=32)

    def test_format_whitelist(self):
        with pytest.raises(ValueError, match="text, json, csv"):
            CliConfig(output_format="xml")


class TestExitCodes:
    def test_usage_errors_are_two(self, capsys):
        assert invoke(capsys, ["nonsense"])[0] == 2
        assert invoke(capsys, [])[0] == 2
        assert invoke(capsys, ["tables", "--which", "3"])[0] == 2
        assert invoke(capsys, ["eval", "--z", "2", "--precision", "32"])[0] == 2

    def test_help_and_version_are_zero(self, capsys):
        assert invoke(capsys, ["--help"])[0] == 0
        assert invoke(capsys, ["--version"])[0] == 0

    def test_domain_error_names_the_precondition(self, capsys):
        code, _, err = invoke(capsys, ["eval", "--z", "-5"])
        assert code == 1
        assert "negative real axis" in err

    def test_late_target_too_small(self, capsys):
        code, _, err = invoke(capsys, ["late", "--target", "2"])
        assert code == 1
        assert "target index >= 3" in err


class TestCoeffs:
    def test_text_summary_reports_agreement(self, capsys):
        code, out, _ = invoke(capsys, ["coeffs", "--nmax", "8"])
        assert code == 0
        assert "exact agreement: yes" in out
        assert "gamma_1 = -1/12" in out
        assert "gamma_3 = 139/51840" in out

    def test_out_writes_a_loadable_cache(self, capsys, tmp_path):
        target = tmp_path / "cache.txt"
        code, out, _ = invoke(
            capsys, ["coeffs", "--nmax", "12", "--out", str(target)]
        )
        assert code == 0
        assert f"cache written to {target}" in out
        table = cache_load(target)
        assert len(table) == 13
        assert table[2] == cache_load(target)[2]

    def test_env_var_supplies_cache_path(self, capsys, tmp_path, monkeypatch):
        target = tmp_path / "env_cache.txt"
        monkeypatch.setenv("GAMMA_HYPER_CACHE", str(target))
        code, out, _ = invoke(capsys, ["coeffs", "--nmax", "5"])
        assert code == 0
        assert target.exists()

    def test_json_lists_exact_fractions(self, capsys):
        code, out, _ = invoke(
            capsys, ["coeffs", "--nmax", "6", "--format", "json"]
        )
        payload = json.loads(out)
        assert payload["agree"] is True
        assert payload["coefficients"][0]["value"] == "1"
        assert payload["coefficients"][1]["value"] == "-1/12"
        assert len(payload["coefficients"]) == 7

    def test_csv_rows_are_numerator_denominator(self, capsys):
        code, out, _ = invoke(capsys, ["coeffs", "--nmax", "3", "--format", "csv"])
        lines = out.splitlines()
        assert lines[0] == "n,numerator,denominator"
        assert lines[1] == "0,1,1"
        assert lines[2] == "1,-1,12"

    def test_negative_nmax_is_a_domain_error(self, capsys):
        code, _, err = invoke(capsys, ["coeffs", "--nmax", "-1"])
        assert code == 1
        assert "nmax" in err


class TestEval:
    def test_gamma_text(self, capsys):
        code, out, _ = invoke(capsys, ["eval", "--z", "3+0.8i"])
        assert code == 0
        assert out.startswith("Gamma* at z = 3.0 + 0.8")
        assert "radius" in out

    def test_reciprocal_json_schema(self, capsys):
        code, out, _ = invoke(
            capsys, ["eval", "--z", "3+0.8i", "--kind", "reciprocal", "--format", "json"]
        )
        payload = json.loads(out)
        assert payload["kind"] == "reciprocal"
        assert set(payload) == {
            "z", "kind", "n_terms", "value", "radius", "tail_bound", "precision_bits",
        }
        assert payload["tail_bound"] is None
        # Gamma*(3+0.8i) is near 1, so the reciprocal is too
        assert abs(float(payload["value"]["re"]) - 1.0) < 0.1

    def test_log_tail_reports_bound(self, capsys):
        code, out, _ = invoke(
            capsys, ["eval", "--z", "5", "--kind", "log", "--format", "csv"]
        )
        lines = dict(line.split(",", 1) for line in out.splitlines()[1:])
        assert lines["kind"] == "log"
        # log Gamma*(5) ~ 1/(12*5)
        assert abs(float(lines["value_re"]) - 1 / 60) < 1e-4
        assert float(lines["tail_bound"]) < 1e-9


class TestBounds:
    def test_text_grid_on_the_positive_axis(self, capsys):
        code, out, _ = invoke(capsys, ["bounds", "--z", "5", "--nmax", "4"])
        assert code == 0
        lines = out.splitlines()
        assert lines[0].startswith("remainder report at z = 5.0")
        assert len(lines) == 2 + 4

    def test_csv_has_stable_columns(self, capsys):
        code, out, _ = invoke(
            capsys,
            ["bounds", "--z", "3+2i", "--kind", "reciprocal",
             "--nmax", "3", "--format", "csv"],
        )
        lines = out.splitlines()
        assert lines[0] == (
            "N,remainder_abs,coeff_pair,halfplane,boyd,enclosure_low,enclosure_high"
        )
        assert len(lines) == 4
        # off the positive axis there is no enclosure
        assert lines[1].endswith(",,")

    def test_json_rows_carry_enclosure_on_the_axis(self, capsys):
        code, out, _ = invoke(
            capsys, ["bounds", "--z", "5", "--nmax", "2", "--format", "json"]
        )
        payload = json.loads(out)
        assert payload["kind"] == "gamma"
        assert payload["rows"][1]["enclosure"] is not None
        bounds = payload["rows"][1]["bounds"]
        assert set(bounds) == {"coeff_pair", "halfplane", "boyd"}
        # every reported bound dominates the true remainder
        for value in bounds.values():
            assert float(value) >= float(payload["rows"][1]["remainder_abs"])

    def test_nmax_floor(self, capsys):
        code, _, err = invoke(capsys, ["bounds", "--z", "5", "--nmax", "0"])
        assert code == 1
        assert "nmax" in err


class TestHyper:
    def test_bound_holds_at_a_real_point(self, capsys):
        code, out, _ = invoke(capsys, ["hyper", "--z", "6"])
        assert code == 0
        assert "bound holds: yes" in out

    def test_json_schema_and_verdict(self, capsys):
        code, out, _ = invoke(capsys, ["hyper", "--z", "5+2i", "--format", "json"])
        payload = json.loads(out)
        assert payload["bound_holds"] is True
        assert payload["M"] == 3
        for key in ("terminant_up", "terminant_down", "residual"):
            assert set(payload[key]) == {"re", "im", "err"}

    def test_bound_skipped_below_theorem_range(self, capsys):
        code, out, _ = invoke(capsys, ["hyper", "--z", "6", "--m-terms", "1"])
        assert code == 0
        assert "residual bound skipped" in out

    def test_sweep_is_seed_deterministic(self, capsys):
        argv = ["hyper", "--z", "5", "--sweep", "2", "--seed", "7", "--format", "json"]
        code_a, out_a, _ = invoke(capsys, argv)
        code_b, out_b, _ = invoke(capsys, argv)
        assert (code_a, out_a) == (code_b, out_b)
        payload = json.loads(out_a)
        assert len(payload["sweep"]) == 2
        assert all(row["holds"] for row in payload["sweep"])
        _, out_c, _ = invoke(capsys, argv[:-3] + ["8", "--format", "json"])
        assert out_c != out_a


class TestStokes:
    def test_profile_csv_81_rows_small_residual(self, capsys, tmp_path):
        target = tmp_path / "profile.csv"
        code, out, _ = invoke(
            capsys,
            ["stokes", "--modulus", "10", "--kind", "gamma",
             "--grid", "81", "--format", "csv", "--out", str(target)],
        )
        assert code == 0
        assert out == ""  # routed to the file
        lines = target.read_text().splitlines()
        assert lines[0] == "theta,re_mult,im_mult,erf_pred,residual"
        assert len(lines) == 82
        residuals = [abs(float(line.split(",")[4])) for line in lines[1:]]
        assert max(residuals) < 0.05
        # multiplier sweeps 0 -> 1 through ~1/2 at the line
        mid = float(lines[41].split(",")[1])
        assert abs(mid - 0.5) < 0.03
        assert float(lines[1].split(",")[1]) < 0.01
        assert float(lines[81].split(",")[1]) > 0.99

    def test_text_summary_reports_peak(self, capsys):
        code, out, _ = invoke(capsys, ["stokes", "--modulus", "8", "--grid", "3"])
        assert code == 0
        assert out.splitlines()[0].startswith("stokes profile, kind gamma")
        assert "max residual" in out

    def test_json_schema(self, capsys):
        code, out, _ = invoke(
            capsys, ["stokes", "--modulus", "8", "--grid", "3", "--format", "json"]
        )
        payload = json.loads(out)
        assert payload["M"] == 3
        assert len(payload["rows"]) == 3
        assert set(payload["rows"][0]) == {
            "theta", "re_mult", "im_mult", "erf_pred", "residual",
        }

    def test_grid_floor(self, capsys):
        code, _, err = invoke(capsys, ["stokes", "--modulus", "8", "--grid", "1"])
        assert code == 1
        assert "grid" in err


class TestLate:
    def test_default_truncation_is_optimal(self, capsys):
        code, out, _ = invoke(capsys, ["late", "--target", "101"])
        assert code == 0
        assert "K = 26" in out
        assert "error = 0.127e41" in out

    def test_published_row_in_json(self, capsys):
        code, out, _ = invoke(
            capsys,
            ["late", "--target", "100", "--method", "xi_new",
             "--digits", "36", "--format", "json"],
        )
        payload = json.loads(out)
        assert payload["K"] == 25
        assert payload["value"] == "-0.238939789661593595677447537129753175e74"
        assert payload["error"] == "0.163e41"

    def test_uncertifiable_digits_fail_loudly(self, capsys):
        code, _, err = invoke(
            capsys, ["late", "--target", "101", "--digits", "200"]
        )
        assert code == 1
        assert "certify" in err


class TestTables:
    def test_table1_matches_golden(self, capsys):
        code, out, _ = invoke(capsys, ["tables", "--which", "1"])
        assert code == 0
        assert out == (GOLDEN / "table1.txt").read_text()

    def test_table2_matches_golden(self, capsys):
        code, out, _ = invoke(capsys, ["tables", "--which", "2"])
        assert code == 0
        assert out == (GOLDEN / "table2.txt").read_text()

    def test_csv_rows(self, capsys):
        code, out, _ = invoke(capsys, ["tables", "--which", "2", "--format", "csv"])
        lines = out.splitlines()
        assert lines[0] == "table,row,n,K,value,error"
        assert lines[1] == (
            "2,exact,50,25,-0.238939789661593595677447537129753012e74,"
        )
        assert len(lines) == 6

    def test_repeated_runs_are_byte_identical(self, capsys):
        _, first, _ = invoke(capsys, ["tables", "--which", "1", "--format", "json"])
        _, second, _ = invoke(capsys, ["tables", "--which", "1", "--format", "json"])
        assert first == second
        payload = json.loads(first)
        assert payload[0]["row"] == "exact"
