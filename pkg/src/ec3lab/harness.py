"""Satisfiability sweeps over (n, r) grids, crossing-point estimation, and file I/O.

Every trial's instance seed is a 64-bit BLAKE2b digest of
``"{base_seed}:{n}:{num}/{den}:{trial}"`` (little-endian), where ``num/den``
is ``r`` in lowest terms. Adding grid points or trials never changes the
instances of existing ones.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np
from scipy.optimize import curve_fit

from .formula import generate_random
from .solver import BudgetExceeded, brute_force, solve

__all__ = [
    "SweepConfig",
    "SweepRow",
    "SweepTable",
    "CrossingEstimate",
    "NoCrossing",
    "trial_seed",
    "sweep",
    "crossing_estimate",
    "logistic_fit",
    "monotonicity_warnings",
    "write_trajectory_csv",
    "read_trajectory_csv",
    "plot_script",
    "SC_TRAJECTORY_HEADER",
    "ODE_TRAJECTORY_HEADER",
    "SWEEP_HEADER",
]

log = logging.getLogger(__name__)

SWEEP_HEADER = ["n", "r", "trials", "sat", "budget_exceeded", "sat_fraction"]
SC_TRAJECTORY_HEADER = ["x", "s2", "s3"]
ODE_TRAJECTORY_HEADER = ["x", "s2", "s3", "lambda1", "mT", "mF"]


def _frac(r) -> Fraction:
    if isinstance(r, Fraction):
        return r
    if isinstance(r, float):
        return Fraction(repr(r))
    return Fraction(str(r))


def trial_seed(base_seed: int, n: int, r, trial: int) -> int:
    r = _frac(r)
    key = f"{base_seed}:{n}:{r.numerator}/{r.denominator}:{trial}".encode()
    return int.from_bytes(hashlib.blake2b(key, digest_size=8).digest(), "little")


@dataclass(frozen=True)
class SweepConfig:
    n_list: tuple[int, ...]
    r_list: tuple[Fraction, ...]
    trials: int
    base_seed: int = 0
    solver: str = "native"
    node_budget: int | None = None
    workers: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "n_list", tuple(int(n) for n in self.n_list))
        object.__setattr__(self, "r_list", tuple(_frac(r) for r in self.r_list))
        if not self.n_list or any(n < 3 for n in self.n_list):
            raise ValueError("n_list must be non-empty with every n >= 3")
        if not self.r_list or any(r <= 0 for r in self.r_list):
            raise ValueError("r_list must be non-empty and positive")
        if any(b <= a for a, b in zip(self.r_list, self.r_list[1:])):
            raise ValueError("r_list must be strictly increasing")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.solver not in ("native", "brute-force"):
            raise ValueError(f"unknown solver {self.solver!r}")
        if self.node_budget is not None and self.node_budget < 1:
            raise ValueError("node_budget must be positive")

    @classmethod
    def from_dict(cls, d: dict) -> "SweepConfig":
        d = dict(d)
        if "r_range" in d:
            if "r_list" in d:
                raise ValueError("give either r_list or r_range, not both")
            rr = d.pop("r_range")
            lo, hi, step = (_frac(rr[k]) for k in ("from", "to", "step"))
            if step <= 0:
                raise ValueError("r_range step must be positive")
            count = int((hi - lo) / step + Fraction(1, 10**9)) + 1
            d["r_list"] = [lo + k * step for k in range(count)]
        unknown = set(d) - {"n_list", "r_list", "trials", "base_seed", "solver", "node_budget", "workers"}
        if unknown:
            raise ValueError(f"unknown sweep config keys: {sorted(unknown)}")
        return cls(**d)

    @classmethod
    def from_json(cls, text: str) -> "SweepConfig":
        return cls.from_dict(json.loads(text))

    def resolved_workers(self) -> int:
        env = os.environ.get("EC3LAB_WORKERS")
        if env:
            return max(1, int(env))
        if self.workers:
            return max(1, int(self.workers))
        return os.cpu_count() or 1


@dataclass(frozen=True)
class SweepRow:
    n: int
    r: Fraction
    trials: int
    sat: int
    budget_exceeded: int
    mean_solve_nodes: float = float("nan")

    @property
    def decided(self) -> int:
        return self.trials - self.budget_exceeded

    @property
    def sat_fraction(self) -> float:
        return self.sat / self.decided if self.decided else float("nan")


@dataclass
class SweepTable:
    rows: list[SweepRow]
    seed_collisions: int = 0

    def __post_init__(self):
        self.rows = sorted(self.rows, key=lambda row: (row.n, row.r))

    @property
    def n_values(self) -> list[int]:
        return sorted({row.n for row in self.rows})

    def curve(self, n: int) -> tuple[np.ndarray, np.ndarray]:
        rows = [row for row in self.rows if row.n == n]
        return (np.array([float(row.r) for row in rows]), np.array([row.sat_fraction for row in rows]))

    def row(self, n: int, r) -> SweepRow:
        r = _frac(r)
        for row in self.rows:
            if row.n == n and row.r == r:
                return row
        raise KeyError((n, r))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(SWEEP_HEADER)
        for row in self.rows:
            w.writerow([row.n, f"{float(row.r):.6g}", row.trials, row.sat, row.budget_exceeded,
                        f"{row.sat_fraction:.6g}"])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "SweepTable":
        reader = csv.reader(io.StringIO(text))
        header = next(reader)
        if header != SWEEP_HEADER:
            raise ValueError(f"unexpected sweep CSV header {header}")
        rows = []
        for rec in reader:
            n, r, trials, sat, budget, _ = rec
            rows.append(SweepRow(int(n), Fraction(r), int(trials), int(sat), int(budget)))
        return cls(rows)


def _run_cell(args):
    n, r, seeds, solver, budget = args
    sat = exceeded = 0
    nodes = 0
    for seed in seeds:
        f = generate_random(n, r, seed)
        if solver == "brute-force":
            res = brute_force(f)
        else:
            try:
                res = solve(f, budget)
            except BudgetExceeded:
                exceeded += 1
                continue
        sat += res.sat
        nodes += res.nodes
    return n, r, len(seeds), sat, exceeded, nodes


def sweep(cfg: SweepConfig) -> SweepTable:
    """Solve ``cfg.trials`` random formulas at every grid point."""
    tasks = []
    seen: set[int] = set()
    collisions = 0
    for n in cfg.n_list:
        for r in cfg.r_list:
            seeds = [trial_seed(cfg.base_seed, n, r, t) for t in range(cfg.trials)]
            for s in seeds:
                if s in seen:
                    collisions += 1
                seen.add(s)
            tasks.append((n, r, seeds, cfg.solver, cfg.node_budget))
    if collisions:
        log.warning("%d trial seed collisions across the grid", collisions)

    workers = cfg.resolved_workers()
    if workers == 1:
        results = [_run_cell(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_cell, tasks))

    rows = []
    for n, r, trials, sat, exceeded, nodes in results:
        decided = trials - exceeded
        rows.append(SweepRow(n, r, trials, sat, exceeded, nodes / decided if decided else float("nan")))
        if exceeded:
            log.warning("n=%d r=%s: %d of %d trials exceeded the node budget", n, r, exceeded, trials)
    table = SweepTable(rows, seed_collisions=collisions)
    for msg in monotonicity_warnings(table):
        log.warning(msg)
    return table


def monotonicity_warnings(table: SweepTable, z: float = 4.0) -> list[str]:
    """Adjacent-r increases in sat_fraction larger than ``z`` binomial standard errors."""
    out = []
    for n in table.n_values:
        rows = [row for row in table.rows if row.n == n]
        for a, b in zip(rows, rows[1:]):
            p, q = a.sat_fraction, b.sat_fraction
            if not (math.isfinite(p) and math.isfinite(q)) or not a.decided:
                continue
            se = math.sqrt(max(p * (1 - p), 1e-12) / a.decided)
            if q - p > z * se:
                out.append(f"n={n}: sat_fraction rises from {p:.3f} at r={float(a.r):g} "
                           f"to {q:.3f} at r={float(b.r):g}")
    return out


class NoCrossing(ValueError):
    """Two satisfiability curves do not cross inside the band."""


@dataclass(frozen=True)
class CrossingEstimate:
    r_star: float
    pairwise: list[tuple[tuple[int, int], float]] = field(default_factory=list)

    @property
    def spread(self) -> float:
        vals = [r for _, r in self.pairwise]
        return max(vals) - min(vals)


def _pair_crossings(r1, f1, r2, f2, band):
    grid = np.union1d(r1, r2)
    grid = grid[(grid >= max(r1[0], r2[0])) & (grid <= min(r1[-1], r2[-1]))]
    a = np.interp(grid, r1, f1)
    d = a - np.interp(grid, r2, f2)
    out = []
    for k in range(len(grid)):
        if d[k] == 0.0:
            if 0 < k < len(grid) - 1 and d[k - 1] * d[k + 1] < 0:
                out.append((grid[k], a[k]))
        elif k + 1 < len(grid) and d[k] * d[k + 1] < 0:
            t = d[k] / (d[k] - d[k + 1])
            out.append((grid[k] + t * (grid[k + 1] - grid[k]), a[k] + t * (a[k + 1] - a[k])))
    lo, hi = band
    return [r for r, v in out if lo <= v <= hi]


def crossing_estimate(table: SweepTable, band: tuple[float, float] = (0.2, 0.8)) -> CrossingEstimate:
    """Median over all pairs of sizes of where their curves cross.

    A pair whose curves cross several times inside the band contributes the
    median of its crossings.
    """
    ns = table.n_values
    if len(ns) < 2:
        raise ValueError("need at least two system sizes")
    curves = {n: table.curve(n) for n in ns}
    pairwise = []
    for i, ni in enumerate(ns):
        for nj in ns[i + 1:]:
            xs = _pair_crossings(*curves[ni], *curves[nj], band)
            if not xs:
                raise NoCrossing(f"curves for n={ni} and n={nj} do not cross in {band}")
            pairwise.append(((ni, nj), float(np.median(xs))))
    return CrossingEstimate(float(np.median([r for _, r in pairwise])), pairwise)


def _logistic(r, r0, width):
    return 1.0 / (1.0 + np.exp((r - r0) / width))


def logistic_fit(r: Sequence[float], frac: Sequence[float]) -> tuple[float, float]:
    """Fit ``1 / (1 + exp((r - r0) / w))``; returns ``(r0, w)``. Max slope is ``1 / (4 w)``."""
    r, frac = np.asarray(r, float), np.asarray(frac, float)
    ok = np.isfinite(frac)
    (r0, w), _ = curve_fit(_logistic, r[ok], frac[ok], p0=(float(np.median(r)), 0.05))
    return float(r0), abs(float(w))


def write_trajectory_csv(rows: np.ndarray, header: Sequence[str]) -> str:
    rows = np.asarray(rows, dtype=float)
    if rows.ndim != 2 or rows.shape[1] != len(header):
        raise ValueError("row width does not match header")
    lines = [",".join(header)]
    lines += [",".join(f"{v:.12g}" for v in row) for row in rows.tolist()]
    return "\n".join(lines) + "\n"


def read_trajectory_csv(text: str) -> tuple[list[str], np.ndarray]:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    header = lines[0].split(",")
    data = np.array([[float(v) for v in ln.split(",")] for ln in lines[1:]], dtype=float)
    return header, data.reshape(-1, len(header))


def plot_script(csv_path: str, n_values: Iterable[int], out_image: str = "sweep.png") -> str:
    """A gnuplot script drawing sat_fraction against r, one curve per n."""
    lines = [
        "set datafile separator ','",
        "set terminal pngcairo size 900,600",
        f"set output '{out_image}'",
        "set xlabel 'clauses per variable r'",
        "set ylabel 'fraction satisfiable'",
        "set yrange [0:1]",
        "set key top right",
    ]
    plots = [
        f"'{csv_path}' using (($1=={n}) ? $2 : 1/0):6 with linespoints title 'n = {n}'"
        for n in n_values
    ]
    lines.append("plot " + ", \\\n     ".join(plots))
    return "\n".join(lines) + "\n"
