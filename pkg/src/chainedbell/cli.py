"""Command-line front end.

Subcommands::

    chainedbell quantum-sweep --d 2 3 --n 2 10 100 [--visibility V] [--format csv|json] [--out PATH]
    chainedbell lhv-min --d 3 --n 2
    chainedbell monogamy --d 2 --n 2 --i-star 0 0.1 1 [--k 1 --a 0]
    chainedbell verify BOX.json

``--emit-box DIR`` writes every constructed box to DIR in the box file format.
Exit status: 0 success, 1 a check failed, 2 usage or input error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass
from pathlib import Path

from .boxes import (
    EPS_NS,
    BoxFormatError,
    ScenarioSpec,
    load_box,
    no_signalling_violation,
    save_box,
    validate_box,
)
from .functionals import chained_value
from .lhv import EnumerationLimitError, local_fraction_bound, lhv_minimum, strategy_box
from .monogamy import lp_max_marginal, theorem_bound, verify_theorem
from .quantum import ResourceLimitError, gamma_coefficient, noisy_quantum_box

SWEEP_FIELDS = ("d", "N", "I_N", "asymptotic", "ratio", "p_bound", "gamma")
MONOGAMY_FIELDS = ("i_star", "lp_max", "bound", "gap")

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def fmt(x) -> str:
    """12 significant digits; %g switches to scientific notation below 1e-4."""
    if isinstance(x, int):
        return str(x)
    return format(float(x), ".12g")


def _rounded(x):
    return x if isinstance(x, int) else float(fmt(x))


@dataclass(frozen=True)
class SweepConfig:
    d_values: tuple[int, ...]
    n_values: tuple[int, ...]
    visibility: float = 1.0
    output_format: str = "csv"
    out: Path | None = None
    emit_box: Path | None = None

    def __post_init__(self):
        if not self.d_values or not self.n_values:
            raise UsageError("need at least one d and one N")
        if any(d < 2 for d in self.d_values) or any(n < 2 for n in self.n_values):
            raise UsageError("all d and N must be >= 2")
        if not 0.0 <= self.visibility <= 1.0:
            raise UsageError(f"visibility must lie in [0, 1], got {self.visibility}")
        if self.output_format not in ("csv", "json"):
            raise UsageError(f"unknown format {self.output_format!r}")


def _emit(box, directory: Path | None, name: str) -> None:
    if directory is None:
        return
    directory.mkdir(parents=True, exist_ok=True)
    save_box(box, directory / name)


def cmd_quantum_sweep(config: SweepConfig) -> list[dict]:
    rows = []
    for d in config.d_values:
        gamma = gamma_coefficient(d).value
        for n in config.n_values:
            box = noisy_quantum_box(d, n, config.visibility)
            _emit(box, config.emit_box, f"quantum_d{d}_N{n}_v{fmt(config.visibility)}.json")
            i_n = chained_value(box).total
            asym = 2.0 * gamma / n
            rows.append(
                {
                    "d": d,
                    "N": n,
                    "I_N": i_n,
                    "asymptotic": asym,
                    "ratio": i_n / asym,
                    "p_bound": local_fraction_bound(i_n, d).bound,
                    "gamma": gamma,
                }
            )
    return rows


def cmd_lhv_min(d: int, n: int, emit_box: Path | None = None) -> dict:
    scenario = ScenarioSpec(d, n)
    result = lhv_minimum(scenario)
    _emit(strategy_box(result.strategy, scenario), emit_box, f"lhv_min_d{d}_N{n}.json")
    return {
        "d": d,
        "N": n,
        "min": result.value,
        "count": result.count,
        "alice": list(result.strategy.alice_outcomes),
        "bob": list(result.strategy.bob_outcomes),
    }


def cmd_monogamy(d: int, n: int, i_stars, k: int = 1, a: int = 0, emit_box: Path | None = None) -> list[dict]:
    scenario = ScenarioSpec(d, n)
    rows = []
    for i_star in i_stars:
        if i_star < 0:
            raise UsageError(f"i_star must be >= 0, got {i_star}")
        sol = lp_max_marginal(scenario, k, a, i_star)
        bound = theorem_bound(d, i_star)
        if sol.argmax_box is not None:
            _emit(sol.argmax_box, emit_box, f"lp_d{d}_N{n}_k{k}_a{a}_istar{fmt(i_star)}.json")
        rows.append({"i_star": float(i_star), "lp_max": sol.value, "bound": bound, "gap": bound - sol.value})
    return rows


def cmd_verify(path, stream=None) -> int:
    """Run every check on a stored box; returns the process exit status."""
    out = stream or sys.stdout
    box = load_box(path)
    print(f"box: d={box.d} N={box.n_settings}", file=out)

    validation = validate_box(box)
    print(f"validation: {'PASS' if validation.ok else 'FAIL'}", file=out)
    for v in validation.violations[:20]:
        print(f"  {v.kind} violation at {v.index}: value {fmt(v.value)}", file=out)

    ns = no_signalling_violation(box)
    ns_ok = ns.is_non_signalling(EPS_NS)
    print(
        f"no-signalling: {'PASS' if ns_ok else 'FAIL'} "
        f"(alice {fmt(ns.max_alice_deviation)}, bob {fmt(ns.max_bob_deviation)})",
        file=out,
    )
    if not ns_ok:
        side, idx = ns.worst_indices
        print(f"  worst: {side} {idx}: {ns.describe()}", file=out)

    report = chained_value(box)
    print(f"I_N: {fmt(report.total)}", file=out)
    if validation.ok:
        print(f"p_bound: {fmt(local_fraction_bound(max(report.total, 0.0), box.d).bound)}", file=out)

    theorem_ok = False
    if ns_ok:
        th = verify_theorem(box)
        theorem_ok = th.passed
        print(
            f"theorem: {'PASS' if th.passed else 'FAIL'} (worst {th.worst_side} marginal "
            f"{fmt(th.worst_marginal)} at {th.worst_index}, bound {fmt(th.bound)}, slack {fmt(th.slack)})",
            file=out,
        )
    else:
        print("theorem: FAIL (marginals undefined for a signalling box)", file=out)

    return EXIT_OK if (validation.ok and ns_ok and theorem_ok) else EXIT_FAIL


def render(rows: list[dict], fields, output_format: str) -> str:
    if output_format == "json":
        return json.dumps([{f: _rounded(r[f]) for f in fields} for r in rows], indent=2) + "\n"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(fields)
    for r in rows:
        writer.writerow([fmt(r[f]) for f in fields])
    return buf.getvalue()


def _write(text: str, out: Path | None) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    try:
        Path(out).write_text(text)
    except OSError as exc:
        raise UsageError(f"cannot write {out}: {exc}") from exc


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="chainedbell", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("quantum-sweep", help="chained value of quantum boxes over a (d, N) grid")
    p.add_argument("--d", type=int, nargs="+", required=True)
    p.add_argument("--n", type=int, nargs="+", required=True)
    p.add_argument("--visibility", type=float, default=1.0)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out", type=Path)
    p.add_argument("--emit-box", type=Path, metavar="DIR")

    p = sub.add_parser("lhv-min", help="exhaustive minimum over deterministic strategies")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--emit-box", type=Path, metavar="DIR")

    p = sub.add_parser("monogamy", help="LP maximum of a marginal against the theorem bound")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--i-star", type=float, nargs="+", required=True)
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--a", type=int, default=0)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out", type=Path)
    p.add_argument("--emit-box", type=Path, metavar="DIR")

    p = sub.add_parser("verify", help="check a box file")
    p.add_argument("path", type=Path)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "quantum-sweep":
            config = SweepConfig(
                tuple(args.d), tuple(args.n), args.visibility, args.format, args.out, args.emit_box
            )
            _write(render(cmd_quantum_sweep(config), SWEEP_FIELDS, config.output_format), config.out)
        elif args.command == "lhv-min":
            r = cmd_lhv_min(args.d, args.n, args.emit_box)
            if args.format == "json":
                print(json.dumps(r))
            else:
                print(f"d={r['d']} N={r['N']} min={fmt(r['min'])} count={r['count']}")
                print(f"strategy: alice={tuple(r['alice'])} bob={tuple(r['bob'])}")
        elif args.command == "monogamy":
            rows = cmd_monogamy(args.d, args.n, args.i_star, args.k, args.a, args.emit_box)
            _write(render(rows, MONOGAMY_FIELDS, args.format), args.out)
        elif args.command == "verify":
            return cmd_verify(args.path)
    except (UsageError, BoxFormatError, ValueError, IndexError, OSError,
            ResourceLimitError, EnumerationLimitError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
