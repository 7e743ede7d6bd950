"""Command-line entry point: ``ecquery <command> [options]``."""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction
from pathlib import Path

from . import serialize
from .boolfn import BooleanFunction, bits_to_input, family, from_truth_table
from .distmeasures import (
    corruption_bound,
    parse_distribution,
    partition_bound,
    subcube_masses,
    uniform,
    ProductDistribution,
)
from .ec import dump_scheme, ec_bounds, load_scheme
from .harness import CHECKS, VerifyOptions, build_corpus, verify_inequalities
from .measures import measure_report
from .simulators import (
    estimate_las_vegas,
    estimate_one_sided_error,
    exact_distributional_error,
    run_corruption_algorithm,
    run_ec_algorithm,
    run_las_vegas,
    trial_rng,
)


class UsageError(Exception):
    pass


def parse_function(spec: str) -> BooleanFunction:
    """``name:params`` such as ``tribes:2x2``, ``and:3`` or ``maj:5``."""
    name, sep, params = spec.partition(":")
    if not sep or not params:
        raise UsageError(f"--fn expects family:params, got {spec!r}")
    try:
        nums = [int(p) for p in params.replace(",", "x").split("x")]
        return family(name, *nums)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _eps(text: str) -> Fraction:
    try:
        return serialize.parse_fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _eps_list(text: str) -> list[Fraction]:
    return [_eps(t) for t in text.split(",") if t.strip()]


def _function(args) -> BooleanFunction:
    if bool(args.fn) == bool(args.table):
        raise UsageError("give exactly one of --fn or --table")
    if args.fn:
        return parse_function(args.fn)
    try:
        return from_truth_table(args.table)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _input(args, f: BooleanFunction) -> int | None:
    if args.input is None:
        return None
    if len(args.input) != f.n or set(args.input) - {"0", "1"}:
        raise UsageError(f"--input must be {f.n} bits, x1 first")
    return bits_to_input(args.input)


def _distribution(args, f: BooleanFunction):
    if not args.dist:
        return uniform(f.n)
    try:
        return parse_distribution(Path(args.dist).read_text(), f.n)
    except (OSError, ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"bad distribution file: {exc}") from exc


def _emit(args, payload: dict, text: str) -> None:
    if args.out:
        Path(args.out).write_text(serialize.dumps(payload) + "\n")
    if args.json:
        print(serialize.dumps(payload))
    else:
        print(text)


def _require_eps(args) -> Fraction:
    if args.eps is None:
        raise UsageError("--eps is required")
    return args.eps


# ---------------------------------------------------------------- commands


def cmd_measures(args) -> int:
    f = _function(args)
    if f.n > 10:
        raise UsageError("measures supports n <= 10")
    r = measure_report(f)
    payload = serialize.to_jsonable(r)
    text = (
        f"n={r.n} table={r.table}\n"
        f"C={r.C} C0={r.C0} C1={r.C1} s={r.s} bs={r.bs} FC={r.FC} fbs={r.fbs} D={r.D}"
    )
    _emit(args, payload, text)
    return 0


def cmd_ec(args) -> int:
    f = _function(args)
    if f.n > 8:
        raise UsageError("ec supports n <= 8")
    b = ec_bounds(f, args.rounds)
    scheme_text = dump_scheme(b.witness)
    if args.scheme_out:
        Path(args.scheme_out).write_text(scheme_text)
    payload = {
        "table": f.to_string(),
        "lower": b.lower,
        "upper": b.upper if b.exact else float(b.upper),
        "exact": b.exact,
        "lower_method": b.lower_method,
        "upper_method": b.upper_method,
        "candidates": {k: (v if isinstance(v, Fraction) else float(v)) for k, v in b.candidates.items()},
        "rounds": args.rounds,
        "seed": args.seed,
        "scheme": scheme_text,
    }
    text = f"EC in [{b.lower}, {b.upper}] via {b.upper_method}"
    if args.scheme_out:
        text += f"\nwitness scheme written to {args.scheme_out}"
    _emit(args, payload, text)
    return 0


def cmd_prt(args) -> int:
    f = _function(args)
    eps = _require_eps(args)
    if f.n > 5:
        raise UsageError("prt supports n <= 5")
    if not 0 <= eps < 1:
        raise UsageError("--eps must lie in [0, 1)")
    r = partition_bound(f, eps)
    payload = {
        "table": f.to_string(),
        "eps": eps,
        "value": r.value,
        "prt": r.prt,
        "weights": [{"z": z, "subcube": A, "weight": w} for (z, A), w in sorted(r.weights.items())],
    }
    _emit(args, payload, f"prt_{eps}: value={r.value} log2={r.prt:.12g}")
    return 0


def cmd_corr(args) -> int:
    f = _function(args)
    eps = _require_eps(args)
    if not 0 <= eps < 1:
        raise UsageError("--eps must lie in [0, 1)")
    mu = _distribution(args, f)
    table = subcube_masses(f, mu)
    sides = (args.b,) if args.b is not None else (0, 1)
    rows = {}
    for b in sides:
        r = corruption_bound(f, b, mu, eps, table)
        rows[str(b)] = None if r is None else {"size": r.size, "witness": r.witness}
    payload = {"table": f.to_string(), "eps": eps, "corr": rows}
    sizes = [v["size"] for v in rows.values() if v]
    if len(sides) == 2:
        payload["min"] = min(sizes) if sizes else None
    text = "  ".join(
        f"corr^{b}={'none' if v is None else v['size']} ({'-' if v is None else v['witness'].pattern()})"
        for b, v in rows.items()
    )
    _emit(args, payload, text)
    return 0


def _scheme_for(args, f: BooleanFunction):
    if args.scheme:
        try:
            return load_scheme(Path(args.scheme).read_text())
        except (OSError, ValueError) as exc:
            raise UsageError(f"bad scheme file: {exc}") from exc
    return ec_bounds(f, args.rounds).witness


def cmd_sim_ec(args) -> int:
    f = _function(args)
    W = _scheme_for(args, f)
    x = _input(args, f)
    las_vegas = args.mode == "las-vegas"
    if not las_vegas:
        eps = _require_eps(args)
        if not 0 < eps < 1:
            raise UsageError("--eps must lie in (0, 1)")
    if x is not None:
        rng = trial_rng(args.seed, x, 0)
        if las_vegas:
            out, tr = run_las_vegas(f, W, None, x, rng)
        else:
            out, tr = run_ec_algorithm(f, W, args.b, eps, x, rng)
        if args.trace:
            Path(args.trace).write_text(tr.dump())
        payload = {"input": args.input, "output": out, "queries": tr.num_queries, "exit": tr.exit}
        _emit(args, payload, f"output={out} queries={tr.num_queries} exit={tr.exit}")
        return 0
    if las_vegas:
        st = estimate_las_vegas(f, W, args.trials, args.seed)
    else:
        st = estimate_one_sided_error(f, W, args.b, eps, args.trials, args.seed)
    payload = serialize.to_jsonable(st)
    text = (
        f"trials/input={st.trials} error={st.error_rate:.6g} +/- {st.error_half_width:.3g} "
        f"mean_queries={st.mean_queries:.4g} max_queries={st.max_queries}"
    )
    if st.budget is not None:
        text += f" budget={st.budget}"
    _emit(args, payload, text)
    return 0


def cmd_sim_corr(args) -> int:
    f = _function(args)
    eps = _require_eps(args)
    if not 0 <= eps < Fraction(1, 2):
        raise UsageError("--eps must lie in [0, 1/2)")
    mu = _distribution(args, f)
    if not isinstance(mu, ProductDistribution):
        raise UsageError("sim-corr needs a product distribution")
    x = _input(args, f)
    if x is not None:
        out, tr = run_corruption_algorithm(f, mu, eps, x)
        if args.trace:
            Path(args.trace).write_text(tr.dump())
        payload = {"input": args.input, "output": out, "queries": tr.num_queries, "exit": tr.exit}
        _emit(args, payload, tr.dump().rstrip("\n") + f"\noutput={out}")
        return 0
    r = exact_distributional_error(f, mu, eps)
    payload = {
        "table": f.to_string(),
        "eps": eps,
        "error": r.error,
        "max_queries": r.max_queries,
        "max_iterations": r.max_iterations,
        "iteration_histogram": r.iteration_histogram,
    }
    _emit(args, payload, f"error={r.error} max_queries={r.max_queries} max_iterations={r.max_iterations}")
    return 0


def cmd_verify(args) -> int:
    try:
        corpus = build_corpus(args.corpus)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    eps_grid = args.eps_list or [Fraction(1, 8)]
    if any(not 0 < e < 1 for e in eps_grid):
        raise UsageError("--eps values must lie in (0, 1)")
    opts = VerifyOptions(one_sided_trials=args.trials, las_vegas_trials=max(1, args.trials // 2))
    report = verify_inequalities(corpus, eps_grid, args.seed, opts, jobs=args.jobs)
    payload = report.to_dict(timing=args.timing)
    lines = [
        f"{check:16s} pass={c['pass']:5d} fail={c['fail']:3d} skipped={c['skipped']:4d}  [{CHECKS[check].anchor}]"
        for check, c in report.summary().items()
    ]
    lines += [f"FAIL {r.check} {r.label}: {r.values}" for r in report.failed]
    lines.append("OK" if report.ok else f"{len(report.failed)} check(s) failed")
    _emit(args, payload, "\n".join(lines))
    return 0 if report.ok else 1


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ecquery", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, eps=True):
        sp.add_argument("--fn", help="family:params, e.g. tribes:2x2, and:3, maj:5")
        sp.add_argument("--table", help="truth table bits, index 0 first")
        if eps:
            sp.add_argument("--eps", type=_eps, help="error parameter as a fraction, e.g. 1/8")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--out", help="write the JSON report here")
        sp.add_argument("--json", action="store_true", help="print JSON instead of text")

    sp = sub.add_parser("measures", help="C, s, bs, FC, fbs, D")
    common(sp, eps=False)
    sp.set_defaults(func=cmd_measures)

    sp = sub.add_parser("ec", help="certified EC interval and witness scheme")
    common(sp, eps=False)
    sp.add_argument("--rounds", type=int, default=4)
    sp.add_argument("--scheme-out", help="write the witness scheme here")
    sp.set_defaults(func=cmd_ec)

    sp = sub.add_parser("prt", help="partition bound LP")
    common(sp)
    sp.set_defaults(func=cmd_prt)

    sp = sub.add_parser("corr", help="corruption bound under a distribution")
    common(sp)
    sp.add_argument("--dist", help="distribution file (default uniform)")
    sp.add_argument("--b", type=int, choices=(0, 1))
    sp.set_defaults(func=cmd_corr)

    sp = sub.add_parser("sim-ec", help="simulate the EC-based query algorithm")
    common(sp)
    sp.add_argument("--mode", choices=("one-sided", "las-vegas"), default="one-sided")
    sp.add_argument("--b", type=int, choices=(0, 1), default=0)
    sp.add_argument("--scheme", help="weight scheme file (default: ec witness)")
    sp.add_argument("--rounds", type=int, default=4)
    sp.add_argument("--trials", type=int, default=1000)
    sp.add_argument("--input", help="single input as bits, x1 first")
    sp.add_argument("--trace", help="write the trace of a single run here")
    sp.set_defaults(func=cmd_sim_ec)

    sp = sub.add_parser("sim-corr", help="simulate the corruption-walk algorithm")
    common(sp)
    sp.add_argument("--dist", help="product distribution file (default uniform)")
    sp.add_argument("--input", help="single input as bits, x1 first")
    sp.add_argument("--trace", help="write the trace of a single run here")
    sp.set_defaults(func=cmd_sim_corr)

    sp = sub.add_parser("verify", help="run the inequality suite over a corpus")
    sp.add_argument("--corpus", default="default", help="comma list: all-n1..all-n3, families, random")
    sp.add_argument("--eps", dest="eps_list", type=_eps_list, default=None, help="comma list of fractions")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--trials", type=int, default=400)
    sp.add_argument("--jobs", type=int, default=1)
    sp.add_argument("--timing", action="store_true", help="include runtimes in the JSON")
    sp.add_argument("--out")
    sp.add_argument("--json", action="store_true")
    sp.set_defaults(func=cmd_verify)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)  # exits 2 on usage errors
    if getattr(args, "seed", 0) < 0 or getattr(args, "seed", 0) >= 1 << 64:
        parser.error("--seed must be an unsigned 64-bit integer")
    if getattr(args, "trials", 1) < 1:
        parser.error("--trials must be positive")
    try:
        return args.func(args)
    except UsageError as exc:
        parser.error(str(exc))
    return 2


if __name__ == "__main__":
    sys.exit(main())
