"""Command-line interface: ``ec3lab <command> ...``.

Errors are reported on stderr as a single line starting with ``error:``.
``solve`` exits 10 for SAT, 20 for UNSAT and 30 when the node budget runs out.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import formula as fm
from .harness import (
    NoCrossing,
    ODE_TRAJECTORY_HEADER,
    SC_TRAJECTORY_HEADER,
    SweepConfig,
    crossing_estimate,
    plot_script,
    sweep,
    write_trajectory_csv,
)
from .ode import FOREST_DENSITY, OdeConfig, critical_r, integrate, max_lambda1
from .policy import Policy
from .residual import NotForest, build_graph, is_forest, leaf_peel_satisfy
from .sc import run as sc_run
from .solver import BudgetExceeded, solve

EXIT_SAT, EXIT_UNSAT, EXIT_BUDGET = 10, 20, 30


class CliError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(2)


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc.strerror}") from None


def _write(path: str | None, text: str):
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _load_formula(path: str) -> fm.Formula:
    try:
        return fm.parse(_read(path))
    except fm.FormatError as exc:
        raise CliError(f"{path}: {exc}") from None


def _policy(text: str) -> Policy:
    try:
        return Policy.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def cmd_gen(args):
    f = fm.generate_random(args.n, args.r, args.seed)
    _write(args.out, fm.to_dimacs(f) if args.cnf else fm.serialize(f))
    return 0


def _ones(witness):
    return " ".join(str(i + 1) for i, b in enumerate(witness) if b)


def cmd_solve(args):
    f = _load_formula(args.input)
    try:
        res = solve(f, args.budget)
    except BudgetExceeded as exc:
        print(f"s UNKNOWN\nc node budget {exc.budget} exceeded")
        return EXIT_BUDGET
    print(f"s {'SATISFIABLE' if res.sat else 'UNSATISFIABLE'}")
    if res.sat:
        print(f"v {_ones(res.witness)}".rstrip())
    print(f"c nodes {res.nodes} propagations {res.propagations} seconds {res.seconds:.4f}")
    return EXIT_SAT if res.sat else EXIT_UNSAT


def cmd_sc(args):
    f = _load_formula(args.input)
    res = sc_run(f, args.policy, args.seed, sample_stride=args.stride)
    print(f"outcome {res.outcome.value}")
    print(f"rounds {res.rounds}")
    print(f"max_round_size {res.max_round_size}")
    x, s2, s3 = res.trajectory[-1]
    print(f"final x {x:.6g} s2 {s2:.6g} s3 {s3:.6g}")
    if res.satisfied:
        print(f"v {_ones(res.witness)}".rstrip())
    if args.traj:
        _write(args.traj, write_trajectory_csv(res.trajectory, SC_TRAJECTORY_HEADER))
    return 0


def cmd_ode(args):
    try:
        cfg = OdeConfig(args.r, args.policy, step=args.step, swap=args.swap)
    except ValueError as exc:
        raise CliError(str(exc)) from None
    tr = integrate(cfg)
    x_at, lam = max_lambda1(tr)
    print(f"terminal {tr.terminal.value}")
    print(f"terminal_x {tr.terminal_x:.6g}")
    print(f"lambda1_max {lam:.6g}")
    print(f"x_at_max {x_at:.6g}")
    if tr.x0 is not None:
        print(f"x0 {tr.x0:.6g}")
    print(f"residual_density {tr.residual_density:.6g}")
    if args.traj:
        _write(args.traj, write_trajectory_csv(tr.rows(args.every), ODE_TRAJECTORY_HEADER))
    return 0


def cmd_critical(args):
    try:
        r = critical_r(args.policy, tol=args.tol, step=args.step, guard=args.guard)
    except ValueError as exc:
        raise CliError(str(exc)) from None
    print(f"critical_r {r:.6g}")
    return 0


def cmd_sweep(args):
    try:
        cfg = SweepConfig.from_json(_read(args.config))
    except (ValueError, TypeError) as exc:
        raise CliError(f"{args.config}: {exc}") from None
    table = sweep(cfg)
    text = table.to_csv()
    _write(args.out, text)
    if args.out and args.out != "-":
        print(f"wrote {len(table.rows)} rows to {args.out}", file=sys.stderr)
    if args.plot:
        _write(args.plot, plot_script(args.out or "sweep.csv", table.n_values))
    if len(table.n_values) >= 2:
        try:
            est = crossing_estimate(table)
            print(f"crossing r_star {est.r_star:.6g} spread {est.spread:.3g}", file=sys.stderr)
        except NoCrossing as exc:
            print(f"crossing not found: {exc}", file=sys.stderr)
    return 0


def cmd_residual(args):
    f = _load_formula(args.input)
    g = build_graph(f)
    forest, biggest = is_forest(g)
    print(f"clauses {g.n_nodes} edges {g.n_edges} components {len(g.components)}")
    print(f"forest {'yes' if forest else 'no'} max_component {biggest}")
    hist: dict[int, int] = {}
    for size, _ in g.components:
        hist[size] = hist.get(size, 0) + 1
    for size in sorted(hist):
        print(f"component_size {size} count {hist[size]}")
    try:
        a = leaf_peel_satisfy(f)
    except NotForest:
        print("leaf_peel not-forest")
    else:
        print(f"leaf_peel satisfied\nv {_ones(a)}".rstrip())
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="ec3lab", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("gen", help="generate a random formula")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--r", type=str, required=True, help="clause density, e.g. 0.62 or 31/50")
    s.add_argument("--seed", type=int, required=True)
    s.add_argument("--out")
    s.add_argument("--cnf", action="store_true", help="write DIMACS CNF instead of the native format")
    s.set_defaults(func=cmd_gen)

    s = sub.add_parser("solve", help="decide satisfiability")
    s.add_argument("--in", dest="input", required=True)
    s.add_argument("--budget", type=int)
    s.set_defaults(func=cmd_solve)

    s = sub.add_parser("sc", help="run the unit-clause heuristic")
    s.add_argument("--in", dest="input", required=True)
    s.add_argument("--policy", type=_policy, default=Policy.parse("sc"))
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--stride", type=int, default=1, help="record every k-th round")
    s.add_argument("--traj")
    s.set_defaults(func=cmd_sc)

    s = sub.add_parser("ode", help="integrate the fluid-limit equations")
    s.add_argument("--r", type=float, required=True)
    s.add_argument("--policy", type=_policy, default=Policy.parse("sc"))
    s.add_argument("--step", type=float, default=1e-5)
    s.add_argument("--every", type=int, default=100, help="write every k-th step to --traj")
    s.add_argument("--swap", action="store_true", help="exchange m_T and m_F (diagnostic)")
    s.add_argument("--traj")
    s.set_defaults(func=cmd_ode)

    s = sub.add_parser("critical", help="critical density by bisection")
    s.add_argument("--policy", type=_policy, default=Policy.parse("sc"))
    s.add_argument("--tol", type=float, default=1e-4)
    s.add_argument("--step", type=float, default=1e-5)
    s.add_argument("--guard", type=float, default=FOREST_DENSITY)
    s.set_defaults(func=cmd_critical)

    s = sub.add_parser("sweep", help="satisfiability sweep over an (n, r) grid")
    s.add_argument("--config", required=True)
    s.add_argument("--out")
    s.add_argument("--plot")
    s.set_defaults(func=cmd_sweep)

    s = sub.add_parser("residual", help="forest check and leaf peeling")
    s.add_argument("--in", dest="input", required=True)
    s.set_defaults(func=cmd_residual)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
