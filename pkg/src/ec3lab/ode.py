"""Fluid limit of the heuristic: the scaled 2- and 3-clause densities as functions
of the fraction ``x`` of variables set.

For every free-step policy one round has expected effects ``E[dX]``,
``E[dS2]`` and ``E[dS3]`` (all divided by ``n``), and the trajectory follows
``ds/dx = E[dS] / E[dX]``. With ``w = 1 - x`` and the branching-process
totals ``m_T``, ``m_F`` (``S = m_T + m_F``):

    short clause:    dX = S   dS3 = -S 3 s3/w        dS2 = m_F 3 s3/w - S 2 s2/w - 1
    random variable: dX = S   dS3 = -S 3 s3/w        dS2 = m_F 3 s3/w - S 2 s2/w
    random 3-clause: dX = S   dS3 = -S 3 s3/w - 1    dS2 = m_F 3 s3/w - S 2 s2/w

The policies differ in the initial unit population of the branching
process: (1, 1) for short clause, (1, 0) for a random variable set true
((0, 1) if set false) and (1, 2) for a variable picked inside a 3-clause.
A mix policy averages the per-round expectations with its weights. Once the
3-clauses run out, the random 3-clause step falls back to short clause.

Integration is classical fixed-step RK4 from ``(s2, s3) = (0, r)``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .branching import Supercritical
from .policy import Kind, Policy, SHORT_CLAUSE

__all__ = [
    "OdeConfig",
    "Terminal",
    "AnalyticTrajectory",
    "integrate",
    "policy_drift",
    "round_expectations",
    "max_lambda1",
    "is_feasible",
    "critical_r",
    "FOREST_DENSITY",
]

# Clause-interaction graph of a random 3-clause formula with m' clauses on n'
# variables has branching factor 6 m'/n'; below 1/6 it has no giant component.
FOREST_DENSITY = 1.0 / 6.0

_P0 = {
    Kind.SHORT_CLAUSE: (1.0, 1.0),
    Kind.RANDOM_VARIABLE: (1.0, 0.0),
    Kind.RANDOM_3CLAUSE: (1.0, 2.0),
}


class Terminal(enum.Enum):
    S2_EXTINCT = "s2-extinct"
    SUPERCRITICAL = "supercritical"
    REACHED_X_MAX = "reached-x-max"


@dataclass(frozen=True)
class OdeConfig:
    r: float
    policy: Policy = SHORT_CLAUSE
    step: float = 1e-5
    x_max: float = 0.999
    swap: bool = False  # diagnostic: exchange m_T and m_F

    def __post_init__(self):
        if not (math.isfinite(self.r) and self.r > 0):
            raise ValueError(f"r must be positive, got {self.r}")
        if not (0 < self.step <= 1e-2):
            raise ValueError(f"step must lie in (0, 1e-2], got {self.step}")
        if not (0 < self.x_max < 1):
            raise ValueError(f"x_max must lie in (0, 1), got {self.x_max}")


@dataclass
class AnalyticTrajectory:
    config: OdeConfig
    x: np.ndarray
    s2: np.ndarray
    s3: np.ndarray
    lambda1: np.ndarray
    m_T: np.ndarray
    m_F: np.ndarray
    terminal: Terminal
    terminal_x: float
    terminal_lambda1: float = float("nan")
    s3_exhausted_at: float | None = None

    @property
    def residual_density(self) -> float:
        """Density ``s3 / (1 - x)`` of the 3-clauses left at the terminal point."""
        if self.terminal is Terminal.SUPERCRITICAL:
            return float("nan")
        return float(self.s3[-1] / (1.0 - self.x[-1]))

    @property
    def x0(self) -> float | None:
        return self.terminal_x if self.terminal is Terminal.S2_EXTINCT else None

    def rows(self, every: int = 1) -> np.ndarray:
        """Samples as an array with columns x, s2, s3, lambda1, mT, mF.

        Every ``every``-th integration step plus the terminal point.
        """
        cols = np.column_stack([self.x, self.s2, self.s3, self.lambda1, self.m_T, self.m_F])
        idx = np.arange(0, len(cols), every)
        if idx[-1] != len(cols) - 1:
            idx = np.append(idx, len(cols) - 1)
        return cols[idx]

    def at(self, x) -> tuple[np.ndarray, np.ndarray]:
        """Linearly interpolated (s2, s3) at the given x values."""
        return np.interp(x, self.x, self.s2), np.interp(x, self.x, self.s3)


def _totals(x, s2, s3, p0, swap):
    w = 1.0 - x
    a = (6.0 * s3 + 2.0 * s2) / w
    b = 2.0 * s2 / w
    ab = a * b
    if ab >= 1.0:
        raise Supercritical(math.sqrt(ab))
    d = 1.0 - ab
    pos, neg = p0
    m_T = (pos + b * neg) / d
    m_F = (neg + a * pos) / d
    if swap:
        m_T, m_F = m_F, m_T
    return m_T, m_F


def round_expectations(
    kind: Kind,
    x: float,
    s2: float,
    s3: float,
    free_value: bool = True,
    swap: bool = False,
    s3_exhausted: bool = False,
) -> tuple[float, float, float, float, float]:
    """Expected ``(dX, dS2, dS3, m_T, m_F)`` of one round of a pure policy."""
    if kind is Kind.RANDOM_3CLAUSE and s3_exhausted:
        kind = Kind.SHORT_CLAUSE
    p0 = _P0[kind]
    if kind is Kind.RANDOM_VARIABLE and not free_value:
        p0 = (0.0, 1.0)
    m_T, m_F = _totals(x, s2, s3, p0, swap)
    w = 1.0 - x
    tot = m_T + m_F
    d3 = -tot * 3.0 * s3 / w
    d2 = m_F * 3.0 * s3 / w - tot * 2.0 * s2 / w
    if kind is Kind.SHORT_CLAUSE:
        d2 -= 1.0
    elif kind is Kind.RANDOM_3CLAUSE:
        d3 -= 1.0
    return tot, d2, d3, m_T, m_F


def _components(policy: Policy):
    if policy.kind is Kind.MIX:
        kinds = (Kind.SHORT_CLAUSE, Kind.RANDOM_VARIABLE, Kind.RANDOM_3CLAUSE)
        return [(k, w) for k, w in zip(kinds, policy.mix_weights) if w > 0]
    return [(policy.kind, 1.0)]


def _make_field(policy: Policy, swap: bool):
    comps = _components(policy)
    fv = policy.free_value

    def field_(x, s2, s3, exhausted):
        dx = d2 = d3 = mt = mf = 0.0
        for kind, wgt in comps:
            a, b, c, t, f = round_expectations(kind, x, s2, s3, fv, swap, exhausted)
            dx += wgt * a
            d2 += wgt * b
            d3 += wgt * c
            mt += wgt * t
            mf += wgt * f
        return d2 / dx, d3 / dx, mt, mf

    return field_


def policy_drift(policy: Policy, x: float, s2: float, s3: float, swap: bool = False) -> tuple[float, float]:
    """``(ds2/dx, ds3/dx)`` at one point; raises :class:`Supercritical` if ``lambda1 >= 1``."""
    d2, d3, _, _ = _make_field(policy, swap)(x, s2, s3, False)
    return d2, d3


def _lam(x, s2, s3):
    if s2 <= 0:
        return 0.0
    return 2.0 / (1.0 - x) * math.sqrt(s2 * (s2 + 3.0 * s3))


def integrate(cfg: OdeConfig) -> AnalyticTrajectory:
    """Integrate until s2 returns to zero, ``lambda1`` reaches 1, or ``x_max``."""
    fld = _make_field(cfg.policy, cfg.swap)
    drops_3clauses = any(k is Kind.RANDOM_3CLAUSE for k, _ in _components(cfg.policy))
    h = cfg.step
    x, s2, s3 = 0.0, 0.0, float(cfg.r)
    exhausted = False
    exhausted_at = None

    _, _, mt, mf = fld(x, s2, s3, exhausted)
    xs, s2s, s3s, lams, mts, mfs = [x], [s2], [s3], [0.0], [mt], [mf]
    terminal = Terminal.REACHED_X_MAX
    term_x, term_lam = cfg.x_max, float("nan")

    k = 0
    while True:
        k += 1
        xn = min(k * h, cfg.x_max)
        dh = xn - x
        if dh <= 0:
            break
        try:
            a2, a3, _, _ = fld(x, s2, s3, exhausted)
            b2, b3, _, _ = fld(x + dh / 2, s2 + dh / 2 * a2, s3 + dh / 2 * a3, exhausted)
            c2, c3, _, _ = fld(x + dh / 2, s2 + dh / 2 * b2, s3 + dh / 2 * b3, exhausted)
            e2, e3, _, _ = fld(xn, s2 + dh * c2, s3 + dh * c3, exhausted)
        except Supercritical as exc:
            terminal, term_x, term_lam = Terminal.SUPERCRITICAL, x, exc.lambda1
            break
        n2 = s2 + dh / 6 * (a2 + 2 * b2 + 2 * c2 + e2)
        n3 = s3 + dh / 6 * (a3 + 2 * b3 + 2 * c3 + e3)

        if drops_3clauses and not exhausted and n3 <= 0:
            # 3-clauses run out inside this step: stop on the event, switch rule
            t = s3 / (s3 - n3)
            x, s2, s3 = x + t * dh, s2 + t * (n2 - s2), 0.0
            exhausted, exhausted_at = True, x
            k = int(math.floor(x / h))
            _append(xs, s2s, s3s, lams, mts, mfs, fld, x, s2, s3, exhausted)
            continue
        if n2 < 0:
            t = s2 / (s2 - n2)
            x0 = x + t * dh
            s3_0 = s3 + t * (n3 - s3)
            terminal, term_x = Terminal.S2_EXTINCT, x0
            if x0 > x:
                _append(xs, s2s, s3s, lams, mts, mfs, fld, x0, 0.0, s3_0, exhausted)
            break
        lam = _lam(xn, n2, n3)
        if lam >= 1.0:
            prev = lams[-1]
            t = (1.0 - prev) / (lam - prev) if lam > prev else 1.0
            terminal, term_x, term_lam = Terminal.SUPERCRITICAL, x + t * dh, lam
            break
        x, s2, s3 = xn, n2, n3
        _append(xs, s2s, s3s, lams, mts, mfs, fld, x, s2, s3, exhausted)
        if x >= cfg.x_max:
            break

    return AnalyticTrajectory(
        config=cfg,
        x=np.array(xs),
        s2=np.array(s2s),
        s3=np.array(s3s),
        lambda1=np.array(lams),
        m_T=np.array(mts),
        m_F=np.array(mfs),
        terminal=terminal,
        terminal_x=float(term_x),
        terminal_lambda1=float(term_lam),
        s3_exhausted_at=exhausted_at,
    )


def _append(xs, s2s, s3s, lams, mts, mfs, fld, x, s2, s3, exhausted):
    _, _, mt, mf = fld(x, s2, s3, exhausted)
    xs.append(x)
    s2s.append(s2)
    s3s.append(s3)
    lams.append(_lam(x, s2, s3))
    mts.append(mt)
    mfs.append(mf)


def max_lambda1(traj: AnalyticTrajectory) -> tuple[float, float]:
    """``(x_at_max, lambda1_max)``, refined by a parabola through the peak samples."""
    lam = traj.lambda1
    i = int(np.argmax(lam))
    if 0 < i < len(lam) - 1:
        x0, x1, x2 = traj.x[i - 1:i + 2]
        y0, y1, y2 = lam[i - 1:i + 2]
        denom = (x0 - x1) * (x0 - x2) * (x1 - x2)
        A = (x2 * (y1 - y0) + x1 * (y0 - y2) + x0 * (y2 - y1)) / denom
        B = (x2 * x2 * (y0 - y1) + x1 * x1 * (y2 - y0) + x0 * x0 * (y1 - y2)) / denom
        if A < 0:
            xv = -B / (2 * A)
            if x0 <= xv <= x2:
                C = y1 - A * x1 * x1 - B * x1
                return float(xv), float(A * xv * xv + B * xv + C)
    return float(traj.x[i]), float(lam[i])


def is_feasible(traj: AnalyticTrajectory, guard: float = FOREST_DENSITY) -> bool:
    """Subcritical throughout, and the leftover 3-clauses are sparse enough to peel."""
    if traj.terminal is Terminal.SUPERCRITICAL:
        return False
    return traj.residual_density < guard


def critical_r(
    policy: Policy = SHORT_CLAUSE,
    tol: float = 1e-4,
    lo: float = 0.1,
    hi: float = 1.0,
    step: float = 1e-5,
    guard: float = FOREST_DENSITY,
    swap: bool = False,
) -> float:
    """Largest feasible initial density, located by bisection to within ``tol``."""
    if tol < 1e-5:
        raise ValueError("tol must be at least 1e-5")

    def feasible(r):
        return is_feasible(integrate(OdeConfig(r, policy, step=step, swap=swap)), guard)

    f_lo, f_hi = feasible(lo), feasible(hi)
    if f_lo == f_hi:
        raise ValueError(f"degenerate bracket: feasible({lo}) == feasible({hi}) == {f_lo}")
    if not f_lo:
        raise ValueError("bracket must have the feasible end below the infeasible end")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if feasible(mid):
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
