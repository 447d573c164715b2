"""Command-line surface for the gammastar toolkit.

Seven verbs map one-to-one onto the library layers:

* ``coeffs``  generate the exact Stirling coefficients, cross-check the
  independent generators against each other, and optionally write a cache;
* ``eval``    certified values of Gamma*, 1/Gamma*, or the log-Gamma* tail
  at a complex point;
* ``bounds``  truncation-remainder report (true remainder against every
  applicable bound) over a range of orders;
* ``hyper``   terminant re-expansion of a remainder with the explicit
  residual bound, plus an optional seeded random sweep;
* ``stokes``  smoothing profile of the Stokes multiplier across the
  transition strip, as a CSV-friendly grid;
* ``late``    a single late-coefficient approximation with its exact value
  and signed error;
* ``tables``  the two published comparison tables, digit for digit.

Every subcommand is deterministic for a fixed (argv, seed) pair: the
output bytes depend only on the requested precision and the inputs, never
on wall time or completion order.  Exit status is 0 on success, 1 when a
precondition is violated (the message names it), and 2 for usage errors
(argparse's convention).
"""

from __future__ import annotations

import argparse
import json
import os
import random
import re
import sys
from dataclasses import dataclass
from typing import Optional, Sequence

import mpmath as mp

from . import __version__
from .coeffs import METHODS, cache_save, stirling_coefficients
from .engine import SectorPoint, gamma_star, log_gamma_tail
from .hyper import (
    improved_expansion,
    least_term_index,
    residual_bound,
    stokes_profile,
)
from .late_coeffs import (
    ApproxMethod,
    late_coeff_approx,
    optimal_K,
    render_sci,
    render_table_text,
    reproduce_table,
    table_records,
)
from .precision import BigComplex, Precision
from .series import SeriesKind, remainder_report

__all__ = ["CliConfig", "main", "parse_complex", "run"]

# Bound names in the order the bounds subcommand reports them.
_BOUND_COLUMNS = ("coeff_pair", "halfplane", "boyd")

# Half-width of the default stokes sweep around arg z = pi/2; kept inside
# the verified continuation strip (0.6) with margin.
_STOKES_HALF_WIDTH = mp.mpf("0.5")


@dataclass(frozen=True)
class CliConfig:
    """Settings shared by every subcommand."""

    precision_bits: int = 256
    cache_path: Optional[str] = None
    output_format: str = "text"
    seed: int = 0

    def __post_init__(self) -> None:
        if self.precision_bits < 64:
            raise ValueError("precision_bits must be at least 64")
        if self.output_format not in ("text", "json", "csv"):
            raise ValueError("output_format must be one of text, json, csv")

    def precision(self) -> Precision:
        return Precision(bits=self.precision_bits)


# ---------------------------------------------------------------------------
# Parsing and rendering helpers

_DECIMAL = r"(?:\d+(?:\.\d*)?|\.\d+)"


def parse_complex(text: str) -> mp.mpc:
    """Parse ``a+bi`` with decimal components at the working precision.

    Accepts pure reals (``3``, ``-2.5``), pure imaginaries (``0.8i``,
    ``-i``), and the mixed forms ``a+bi`` / ``a-bi``.  Whitespace is
    ignored; the only imaginary unit spelling is a trailing ``i``.
    """
    # spaces may pad the ends or the sign separator, never split a number
    s = re.sub(r"\s*([+-])\s*", r"\1", text.strip())
    m = re.fullmatch(rf"[+-]?{_DECIMAL}", s)
    if m:
        return mp.mpc(mp.mpf(s), 0)
    m = re.fullmatch(rf"([+-]?(?:{_DECIMAL})?)i", s)
    if m:
        b = m.group(1)
        if b in ("", "+"):
            b = "1"
        elif b == "-":
            b = "-1"
        return mp.mpc(0, mp.mpf(b))
    m = re.fullmatch(rf"([+-]?{_DECIMAL})([+-](?:{_DECIMAL})?)i", s)
    if m:
        b = m.group(2)
        if b == "+":
            b = "1"
        elif b == "-":
            b = "-1"
        return mp.mpc(mp.mpf(m.group(1)), mp.mpf(b))
    raise ValueError(f"cannot parse {text!r} as a complex number a+bi")


def _num(x, digits: int = 25) -> str:
    return mp.nstr(mp.mpf(x), digits)


def _cnum(value, digits: int = 25) -> str:
    sign = "-" if value.imag < 0 else "+"
    return f"{_num(value.real, digits)} {sign} {_num(abs(value.imag), digits)}i"


def _dump_json(payload) -> str:
    return json.dumps(payload, indent=2) + "\n"


def _csv(lines: Sequence[str]) -> str:
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# coeffs


def _cmd_coeffs(args: argparse.Namespace, cfg: CliConfig) -> str:
    if args.nmax < 0:
        raise ValueError("nmax must be >= 0")
    methods = METHODS if args.method == "all" else (args.method,)
    tables = [stirling_coefficients(args.nmax, m) for m in methods]
    if any(t.gammas != tables[0].gammas for t in tables[1:]):
        # the generators are independent routes to the same rationals; a
        # mismatch means a corrupted build, not a degraded answer
        raise RuntimeError("coefficient generators disagree; refusing to cache")
    table = tables[0]
    cache_to = args.out or cfg.cache_path
    if cache_to:
        cache_save(cache_to, table)

    if cfg.output_format == "json":
        return _dump_json(
            {
                "nmax": args.nmax,
                "methods": list(methods),
                "agree": True,
                "cache": cache_to,
                "coefficients": [
                    {"n": n, "value": str(g)} for n, g in enumerate(table.gammas)
                ],
            }
        )
    if cfg.output_format == "csv":
        lines = ["n,numerator,denominator"]
        lines += [
            f"{n},{g.numerator},{g.denominator}"
            for n, g in enumerate(table.gammas)
        ]
        return _csv(lines)

    lines = [f"stirling coefficients gamma_0..gamma_{args.nmax}"]
    lines.append(f"generators checked: {', '.join(methods)}")
    lines.append("exact agreement: yes")
    for n in range(min(4, args.nmax + 1)):
        lines.append(f"gamma_{n} = {table.gammas[n]}")
    if args.nmax >= 4:
        lines.append(f"... ({args.nmax + 1} coefficients total)")
    if cache_to:
        lines.append(f"cache written to {cache_to}")
    else:
        lines.append("no cache path given; nothing written")
    return _csv(lines)


# ---------------------------------------------------------------------------
# eval


def _cmd_eval(args: argparse.Namespace, cfg: CliConfig) -> str:
    prec = cfg.precision()
    with mp.workprec(prec.working + 32):
        z = parse_complex(args.z)
        point = SectorPoint.from_complex(z)
        tail_bound = None
        if args.kind == "log":
            tail = log_gamma_tail(point, args.n_terms, prec)
            value, radius = tail.partial.value, tail.partial.err
            tail_bound = tail.lindelof_bound.upper()
        else:
            ball = gamma_star(point, prec)
            if args.kind == "reciprocal":
                ball = BigComplex(1) / ball
            value, radius = ball.value, ball.err

        if cfg.output_format == "json":
            return _dump_json(
                {
                    "z": {"re": _num(z.real), "im": _num(z.imag)},
                    "kind": args.kind,
                    "n_terms": args.n_terms if args.kind == "log" else None,
                    "value": {"re": _num(value.real), "im": _num(value.imag)},
                    "radius": _num(radius, 6),
                    "tail_bound": None if tail_bound is None else _num(tail_bound, 6),
                    "precision_bits": cfg.precision_bits,
                }
            )
        if cfg.output_format == "csv":
            lines = ["quantity,value"]
            lines.append(f"z_re,{_num(z.real)}")
            lines.append(f"z_im,{_num(z.imag)}")
            lines.append(f"kind,{args.kind}")
            lines.append(f"value_re,{_num(value.real)}")
            lines.append(f"value_im,{_num(value.imag)}")
            lines.append(f"radius,{_num(radius, 6)}")
            if tail_bound is not None:
                lines.append(f"tail_bound,{_num(tail_bound, 6)}")
            return _csv(lines)

        label = {"gamma": "Gamma*", "reciprocal": "1/Gamma*", "log": "log Gamma* tail"}
        lines = [f"{label[args.kind]} at z = {_cnum(z)}"]
        lines.append(f"  modulus = {_num(point.modulus)}")
        lines.append(f"  arg     = {_num(point.theta)}")
        if args.kind == "log":
            lines.append(f"  partial sum through order {args.n_terms - 1}")
        lines.append(f"  value   = {_cnum(value)}")
        lines.append(f"  radius  <= {_num(radius, 6)}")
        if tail_bound is not None:
            lines.append(f"  tail bound <= {_num(tail_bound, 6)}")
        return _csv(lines)


# ---------------------------------------------------------------------------
# bounds


def _cmd_bounds(args: argparse.Namespace, cfg: CliConfig) -> str:
    if args.nmax < 1:
        raise ValueError("nmax must be >= 1")
    prec = cfg.precision()
    kind = SeriesKind(args.kind)
    with mp.workprec(prec.working + 32):
        z = parse_complex(args.z)
        point = SectorPoint.from_complex(z)
        reports = [
            remainder_report(point, n, kind, prec)
            for n in range(1, args.nmax + 1)
        ]

        if cfg.output_format == "json":
            rows = []
            for r in reports:
                rows.append(
                    {
                        "N": r.N,
                        "remainder_abs": _num(abs(r.true_remainder.value)),
                        "remainder_err": _num(r.true_remainder.err, 6),
                        "bounds": {
                            name: _num(b.upper())
                            for name, b in sorted(r.bounds.items())
                        },
                        "enclosure": (
                            None
                            if r.enclosure is None
                            else [
                                _num(r.enclosure[0].lower()),
                                _num(r.enclosure[1].upper()),
                            ]
                        ),
                    }
                )
            return _dump_json(
                {
                    "z": {"re": _num(z.real), "im": _num(z.imag)},
                    "kind": kind.value,
                    "rows": rows,
                }
            )
        if cfg.output_format == "csv":
            lines = [
                "N,remainder_abs,"
                + ",".join(_BOUND_COLUMNS)
                + ",enclosure_low,enclosure_high"
            ]
            for r in reports:
                cells = [str(r.N), _num(abs(r.true_remainder.value))]
                for name in _BOUND_COLUMNS:
                    b = r.bounds.get(name)
                    cells.append("" if b is None else _num(b.upper()))
                if r.enclosure is None:
                    cells += ["", ""]
                else:
                    cells += [
                        _num(r.enclosure[0].lower()),
                        _num(r.enclosure[1].upper()),
                    ]
                lines.append(",".join(cells))
            return _csv(lines)

        width = 14
        header = ["   N", "|remainder|".rjust(width)]
        header += [name.rjust(width) for name in _BOUND_COLUMNS]
        header += ["encl_low".rjust(width), "encl_high".rjust(width)]
        lines = [
            f"remainder report at z = {_cnum(z, 6)}, kind {kind.value}",
            "".join(header),
        ]
        for r in reports:
            cells = [f"{r.N:4d}", _num(abs(r.true_remainder.value), 6).rjust(width)]
            for name in _BOUND_COLUMNS:
                b = r.bounds.get(name)
                cells.append(("-" if b is None else _num(b.upper(), 6)).rjust(width))
            if r.enclosure is None:
                cells += ["-".rjust(width)] * 2
            else:
                cells += [
                    _num(r.enclosure[0].lower(), 6).rjust(width),
                    _num(r.enclosure[1].upper(), 6).rjust(width),
                ]
            lines.append("".join(cells))
        return _csv(lines)


# ---------------------------------------------------------------------------
# hyper


def _check_residual(point, N: int, M: int, kind: SeriesKind, prec: Precision):
    """One re-expansion plus, where the theorem applies, its bound."""
    exp = improved_expansion(point, N, M, kind, prec)
    bound = None
    holds = None
    if 2 <= M < N and abs(point.theta) <= mp.pi / 2:
        bound = residual_bound(point, N, M, prec)
        holds = bool(abs(exp.residual.value) + exp.residual.err <= bound.upper())
    return exp, bound, holds


def _cmd_hyper(args: argparse.Namespace, cfg: CliConfig) -> str:
    prec = cfg.precision()
    kind = SeriesKind(args.kind)
    with mp.workprec(prec.working + 32):
        z = parse_complex(args.z)
        point = SectorPoint.from_complex(z)
        N = args.n_terms if args.n_terms is not None else least_term_index(point.modulus)
        M = args.m_terms
        exp, bound, holds = _check_residual(point, N, M, kind, prec)

        sweep_rows = []
        if args.sweep:
            rng = random.Random(cfg.seed)
            for i in range(args.sweep):
                modulus = mp.mpf(rng.uniform(5.0, 9.0))
                theta = mp.mpf(rng.uniform(-1.5, 1.5))
                m_i = rng.choice((2, 3, 4))
                pt = SectorPoint.from_polar(modulus, theta)
                n_i = least_term_index(modulus)
                e_i, b_i, h_i = _check_residual(pt, n_i, m_i, kind, prec)
                sweep_rows.append(
                    {
                        "sample": i,
                        "modulus": _num(modulus, 12),
                        "theta": _num(theta, 12),
                        "N": n_i,
                        "M": m_i,
                        "residual_abs": _num(abs(e_i.residual.value), 6),
                        "bound": _num(b_i.upper(), 6),
                        "holds": h_i,
                    }
                )

        if cfg.output_format == "json":
            def cball(b):
                return {
                    "re": _num(b.value.real),
                    "im": _num(b.value.imag),
                    "err": _num(b.err, 6),
                }

            return _dump_json(
                {
                    "z": {"re": _num(z.real), "im": _num(z.imag)},
                    "kind": kind.value,
                    "N": N,
                    "M": M,
                    "terminant_up": cball(exp.terminant_sum_up),
                    "terminant_down": cball(exp.terminant_sum_down),
                    "residual": cball(exp.residual),
                    "residual_bound": None if bound is None else _num(bound.upper()),
                    "bound_holds": holds,
                    "sweep": sweep_rows,
                }
            )
        if cfg.output_format == "csv":
            lines = ["quantity,value"]
            lines.append(f"N,{N}")
            lines.append(f"M,{M}")
            lines.append(f"residual_abs,{_num(abs(exp.residual.value))}")
            lines.append(f"residual_err,{_num(exp.residual.err, 6)}")
            if bound is not None:
                lines.append(f"residual_bound,{_num(bound.upper())}")
                lines.append(f"bound_holds,{str(holds).lower()}")
            for row in sweep_rows:
                lines.append(
                    "sweep_{sample},modulus={modulus};theta={theta};N={N};"
                    "M={M};residual={residual_abs};bound={bound};"
                    "holds={holds}".format_map(
                        {**row, "holds": str(row["holds"]).lower()}
                    )
                )
            return _csv(lines)

        lines = [
            f"terminant re-expansion at z = {_cnum(z, 6)}, kind {kind.value}",
            f"  N = {N}, M = {M}",
            f"  terminant sum (+) = {_cnum(exp.terminant_sum_up.value)}",
            f"  terminant sum (-) = {_cnum(exp.terminant_sum_down.value)}",
            f"  |residual| = {_num(abs(exp.residual.value), 12)}"
            f"  (ball radius {_num(exp.residual.err, 3)})",
        ]
        if bound is None:
            lines.append(
                "  residual bound skipped: needs 2 <= M < N and |arg z| <= pi/2"
            )
        else:
            lines.append(f"  residual bound = {_num(bound.upper(), 12)}")
            lines.append(f"  bound holds: {'yes' if holds else 'NO'}")
        for row in sweep_rows:
            lines.append(
                "  sweep {sample}: |z|={modulus} theta={theta} N={N} M={M}"
                " residual={residual_abs} bound={bound} holds={holds}".format_map(
                    {**row, "holds": "yes" if row["holds"] else "NO"}
                )
            )
        return _csv(lines)


# ---------------------------------------------------------------------------
# stokes


def _cmd_stokes(args: argparse.Namespace, cfg: CliConfig) -> str:
    if args.grid < 2:
        raise ValueError("grid must have at least 2 points")
    prec = cfg.precision()
    kind = SeriesKind(args.kind)
    with mp.workprec(prec.working + 32):
        modulus = mp.mpf(args.modulus)
        center = mp.pi / 2
        step = 2 * _STOKES_HALF_WIDTH / (args.grid - 1)
        thetas = [center - _STOKES_HALF_WIDTH + i * step for i in range(args.grid)]
        rows = stokes_profile(kind, modulus, thetas, args.m_terms, prec)

        records = [
            {
                "theta": _num(r.theta),
                "re_mult": _num(r.effective_multiplier.value.real),
                "im_mult": _num(r.effective_multiplier.value.imag),
                "erf_pred": _num(r.erf_prediction.value),
                "residual": _num(r.residual.value),
            }
            for r in rows
        ]

        if cfg.output_format == "json":
            return _dump_json(
                {
                    "kind": kind.value,
                    "modulus": _num(modulus),
                    "M": args.m_terms,
                    "rows": records,
                }
            )
        if cfg.output_format == "text":
            width = 12
            lines = [
                f"stokes profile, kind {kind.value}, |z| = {_num(modulus, 6)},"
                f" M = {args.m_terms}",
                "       theta      re_mult      im_mult     erf_pred     residual",
            ]
            for r in rows:
                lines.append(
                    _num(r.theta, 8).rjust(width)
                    + _num(r.effective_multiplier.value.real, 6).rjust(width + 1)
                    + _num(r.effective_multiplier.value.imag, 6).rjust(width + 1)
                    + _num(r.erf_prediction.value, 6).rjust(width + 1)
                    + _num(r.residual.value, 6).rjust(width + 1)
                )
            peak = max(r.residual.value for r in rows)
            lines.append(f"max residual = {_num(peak, 6)}")
            return _csv(lines)

        lines = ["theta,re_mult,im_mult,erf_pred,residual"]
        lines += [
            "{theta},{re_mult},{im_mult},{erf_pred},{residual}".format_map(rec)
            for rec in records
        ]
        return _csv(lines)


# ---------------------------------------------------------------------------
# late


def _cmd_late(args: argparse.Namespace, cfg: CliConfig) -> str:
    if args.target < 3:
        raise ValueError("late-coefficient approximations need target index >= 3")
    n = (args.target + 1) // 2 if args.target % 2 else args.target // 2
    K = args.k_terms if args.k_terms is not None else optimal_K(n)
    prec = cfg.precision()
    with mp.workprec(prec.working + 32):
        approx = late_coeff_approx(args.target, args.method, K, prec=prec)
        exact_str = render_sci(approx.exact, args.digits)
        value_str = render_sci(approx.value, args.digits)
        error_str = render_sci(approx.error, args.error_digits)

    if cfg.output_format == "json":
        return _dump_json(
            {
                "target": approx.target_index,
                "parity": approx.parity.value,
                "n": approx.n,
                "method": approx.method.value,
                "K": approx.K,
                "exact": exact_str,
                "value": value_str,
                "error": error_str,
                "precision_bits": cfg.precision_bits,
            }
        )
    if cfg.output_format == "csv":
        lines = ["quantity,value"]
        lines.append(f"target,{approx.target_index}")
        lines.append(f"parity,{approx.parity.value}")
        lines.append(f"n,{approx.n}")
        lines.append(f"method,{approx.method.value}")
        lines.append(f"K,{approx.K}")
        lines.append(f"exact,{exact_str}")
        lines.append(f"value,{value_str}")
        lines.append(f"error,{error_str}")
        return _csv(lines)

    lines = [
        f"late coefficient gamma_{approx.target_index}"
        f" (parity {approx.parity.value}, n = {approx.n})",
        f"  method = {approx.method.value}, K = {approx.K},"
        f" precision = {cfg.precision_bits} bits",
        f"  exact = {exact_str}",
        f"  value = {value_str}",
        f"  error = {error_str}  (error = exact - value)",
    ]
    return _csv(lines)


# ---------------------------------------------------------------------------
# tables


def _cmd_tables(args: argparse.Namespace, cfg: CliConfig) -> str:
    # 39-digit comparisons need headroom beyond the default 256 bits
    bits = max(cfg.precision_bits, 512)
    rows = reproduce_table(args.which, Precision(bits=bits))
    if cfg.output_format == "json":
        return _dump_json(table_records(args.which, rows))
    if cfg.output_format == "csv":
        lines = ["table,row,n,K,value,error"]
        lines += [
            "{table},{row},{n},{K},{value},{error}".format_map(rec)
            for rec in table_records(args.which, rows)
        ]
        return _csv(lines)
    return render_table_text(args.which, rows)


# ---------------------------------------------------------------------------
# Wiring


def _bits_flag(text: str) -> int:
    value = int(text)
    if value < 64:
        raise argparse.ArgumentTypeError("precision must be at least 64 bits")
    return value


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--precision",
        type=_bits_flag,
        default=256,
        metavar="BITS",
        help="certified precision in bits, >= 64 (default 256)",
    )
    common.add_argument(
        "--cache",
        default=None,
        metavar="PATH",
        help="coefficient cache file (default: $GAMMA_HYPER_CACHE when set)",
    )
    common.add_argument(
        "--format",
        choices=("text", "json", "csv"),
        default="text",
        help="output format (default text)",
    )
    common.add_argument(
        "--out",
        default=None,
        metavar="PATH",
        help="write output here instead of stdout"
        " (for coeffs: destination of the written cache)",
    )
    common.add_argument(
        "--seed",
        type=int,
        default=0,
        help="seed for sampled sweeps (default 0)",
    )

    parser = argparse.ArgumentParser(
        prog="gammastar",
        description="rigorous asymptotics of the scaled gamma function",
    )
    parser.add_argument(
        "--version", action="version", version=f"gammastar {__version__}"
    )
    sub = parser.add_subparsers(dest="command", required=True, metavar="subcommand")

    p = sub.add_parser(
        "coeffs",
        parents=[common],
        help="generate, cross-check, and cache exact Stirling coefficients",
    )
    p.add_argument("--nmax", type=int, required=True, help="highest index to generate")
    p.add_argument(
        "--method",
        choices=METHODS + ("all",),
        default="all",
        help="generator to run, or all of them with an equality check",
    )
    p.set_defaults(handler=_cmd_coeffs)

    p = sub.add_parser(
        "eval",
        parents=[common],
        help="certified value of Gamma*, its reciprocal, or the log tail",
    )
    p.add_argument("--z", required=True, help="evaluation point, a+bi")
    p.add_argument(
        "--kind",
        choices=("gamma", "reciprocal", "log"),
        default="gamma",
        help="which function to evaluate (default gamma)",
    )
    p.add_argument(
        "--n-terms",
        type=int,
        default=8,
        help="truncation order for kind=log (default 8)",
    )
    p.set_defaults(handler=_cmd_eval)

    p = sub.add_parser(
        "bounds",
        parents=[common],
        help="true truncation remainders against every applicable bound",
    )
    p.add_argument("--z", required=True, help="evaluation point, a+bi")
    p.add_argument(
        "--kind",
        choices=("gamma", "reciprocal"),
        default="gamma",
        help="series kind (default gamma)",
    )
    p.add_argument(
        "--nmax",
        type=int,
        default=10,
        help="report truncation orders 1..nmax (default 10)",
    )
    p.set_defaults(handler=_cmd_bounds)

    p = sub.add_parser(
        "hyper",
        parents=[common],
        help="terminant re-expansion with the explicit residual bound",
    )
    p.add_argument("--z", required=True, help="evaluation point, a+bi")
    p.add_argument(
        "--kind",
        choices=("gamma", "reciprocal"),
        default="gamma",
        help="series kind (default gamma)",
    )
    p.add_argument(
        "--n-terms",
        type=int,
        default=None,
        help="outer truncation order (default: least-term order round(2 pi |z|))",
    )
    p.add_argument(
        "--m-terms",
        type=int,
        default=3,
        help="terminant terms in the re-expansion (default 3)",
    )
    p.add_argument(
        "--sweep",
        type=int,
        default=0,
        metavar="COUNT",
        help="additionally check COUNT seeded random (z, M) samples",
    )
    p.set_defaults(handler=_cmd_hyper)

    p = sub.add_parser(
        "stokes",
        parents=[common],
        help="smoothed Stokes-multiplier profile across the transition strip",
    )
    p.add_argument("--modulus", required=True, help="|z| for the sweep")
    p.add_argument(
        "--kind",
        choices=("gamma", "reciprocal"),
        default="gamma",
        help="series kind (default gamma)",
    )
    p.add_argument(
        "--grid",
        type=int,
        default=81,
        help="number of grid angles across the strip (default 81)",
    )
    p.add_argument(
        "--m-terms",
        type=int,
        default=3,
        help="terminant terms per angle (default 3)",
    )
    p.set_defaults(handler=_cmd_stokes)

    p = sub.add_parser(
        "late",
        parents=[common],
        help="single late-coefficient approximation with exact value and error",
    )
    p.add_argument(
        "--target", type=int, required=True, help="coefficient index to approximate"
    )
    p.add_argument(
        "--method",
        choices=tuple(m.value for m in ApproxMethod),
        default="dingle",
        help="resummation weight (default dingle)",
    )
    p.add_argument(
        "--k-terms",
        type=int,
        default=None,
        help="truncation order K (default: optimal ceil(n/2))",
    )
    p.add_argument(
        "--digits",
        type=int,
        default=30,
        help="significant digits for the value rows (default 30)",
    )
    p.add_argument(
        "--error-digits",
        type=int,
        default=3,
        help="significant digits for the error row (default 3)",
    )
    p.set_defaults(handler=_cmd_late)

    p = sub.add_parser(
        "tables",
        parents=[common],
        help="reproduce a published comparison table digit for digit",
    )
    p.add_argument(
        "--which", choices=("1", "2"), required=True, help="which table to reproduce"
    )
    p.set_defaults(handler=_cmd_tables)

    return parser


def _config_from(args: argparse.Namespace) -> CliConfig:
    cache = args.cache or os.environ.get("GAMMA_HYPER_CACHE") or None
    return CliConfig(
        precision_bits=args.precision,
        cache_path=cache,
        output_format=args.format,
        seed=args.seed,
    )


def run(argv: Optional[Sequence[str]] = None) -> int:
    """Execute one subcommand; returns the process exit code."""
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors and 0 on --help/--version
        return exc.code if isinstance(exc.code, int) else 2
    try:
        cfg = _config_from(args)
        text = args.handler(args, cfg)
    except (ValueError, ZeroDivisionError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    # for coeffs, --out names the cache file and the summary stays on stdout
    destination = None if args.command == "coeffs" else args.out
    if destination:
        with open(destination, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
