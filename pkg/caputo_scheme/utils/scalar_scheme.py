import cmath
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
import pandas as pd
from dagster import get_dagster_logger

from .coefficients import FractionalOrder, caputo_difference, coefficient_table
from .special_functions import DEFAULT_TOL, MLParams, SectorConfig, mittag_leffler

DEFAULT_SECTOR = SectorConfig(math.pi / 3)
# a growth trend over the final decade of n steeper than this power counts as unbounded
DECAY_SLOPE_LIMIT = 0.05

logger = get_dagster_logger()


@dataclass(frozen=True)
class TimeGrid:
    horizon: float
    steps: int

    def __post_init__(self):
        if not (self.horizon > 0 and math.isfinite(self.horizon)):
            raise ValueError(f"Time horizon must be positive, got {self.horizon}")
        if self.steps < 1:
            raise ValueError(f"Number of time steps must be >= 1, got {self.steps}")

    @property
    def dt(self) -> float:
        return self.horizon / self.steps

    @property
    def nodes(self) -> np.ndarray:
        return np.arange(self.steps + 1) * self.dt


@dataclass(frozen=True)
class ScalarProblem:
    order: FractionalOrder
    lam: complex
    sector: SectorConfig = DEFAULT_SECTOR

    def __post_init__(self):
        lam = complex(self.lam)
        object.__setattr__(self, "lam", lam)
        if lam != 0 and abs(cmath.phase(-lam)) > self.sector.phi0:
            raise ValueError(f"lambda={lam} violates the sector condition |arg(-lambda)| <= {self.sector.phi0}")

    @property
    def alpha(self) -> float:
        return self.order.alpha

    def step_parameter(self, dt: float) -> float:
        """|lambda| dt^alpha."""
        return abs(self.lam) * dt ** self.alpha


@dataclass(frozen=True)
class ScalarTrajectory:
    grid: TimeGrid
    values: np.ndarray = field(repr=False)


@dataclass(frozen=True)
class DecayStudy:
    rows: pd.DataFrame
    sup_ratio: float
    bounded: bool


@dataclass(frozen=True)
class ConvergenceStudy:
    rows: pd.DataFrame
    theory_rate: float

    @property
    def min_order(self) -> float:
        orders = self.rows["empirical_order"].dropna()
        return float(orders.min()) if len(orders) else math.nan


def solve_scalar(p: ScalarProblem, grid: TimeGrid) -> ScalarTrajectory:
    """
    Recurrence v_n = -(sum_{j<n} a_jn v_j) / (a_nn - lambda dt^alpha), v_0 = 1.

    The sum is taken over v_j - 1 (the row sums to zero), which keeps v_n = 1 exactly when
    lambda = 0.
    """
    v = np.zeros(grid.steps + 1, dtype=complex)
    v[0] = 1.0
    shift = p.lam * grid.dt ** p.alpha
    for n in range(1, grid.steps + 1):
        a = coefficient_table(p.alpha, n).a
        v[n] = (a[n] - np.dot(a[:n], v[:n] - 1.0)) / (a[n] - shift)
    v.setflags(write=False)
    return ScalarTrajectory(grid=grid, values=v)


def exact_scalar(p: ScalarProblem, t: float, tol: float = DEFAULT_TOL) -> complex:
    """E_alpha(lambda t^alpha)."""
    if t < 0:
        raise ValueError(f"Exact solution is defined for t >= 0, got t={t}")
    if t == 0 or p.lam == 0:
        return 1 + 0j
    return mittag_leffler(MLParams(p.alpha, 1.0), p.lam * t ** p.alpha, tol)


def scheme_residual(p: ScalarProblem, trajectory: ScalarTrajectory) -> float:
    derivative = caputo_difference(p.alpha, trajectory.values, trajectory.grid.dt)
    return float(np.max(np.abs(derivative - p.lam * trajectory.values[1:])))


def decay_study(p: ScalarProblem, grid: TimeGrid) -> DecayStudy:
    """|v_n| |lambda| dt^alpha n^s(alpha) for n = 1..N, with a boundedness verdict."""
    if p.lam == 0:
        raise ValueError("Decay study needs lambda != 0")
    trajectory = solve_scalar(p, grid)
    n = np.arange(1, grid.steps + 1)
    abs_v = np.abs(trajectory.values[1:])
    ratio = abs_v * p.step_parameter(grid.dt) * np.power(n, p.order.s_alpha)
    rows = pd.DataFrame({"n": n, "abs_v": abs_v, "bound_ratio": ratio})

    tail = n >= max(1, grid.steps // 10)
    bounded = bool(np.all(np.isfinite(ratio)))
    if bounded and np.count_nonzero(tail) >= 3 and np.all(ratio[tail] > 0):
        slope = np.polyfit(np.log(n[tail]), np.log(ratio[tail]), 1)[0]
        bounded = slope <= DECAY_SLOPE_LIMIT
        logger.debug(f"decay ratio slope over the final decade: {slope:.4f}")
    return DecayStudy(rows=rows, sup_ratio=float(np.max(ratio)), bounded=bounded)


def convergence_study(p: ScalarProblem, horizon: float, steps: Sequence[int],
                      tol: float = DEFAULT_TOL) -> ConvergenceStudy:
    steps = list(steps)
    if any(s < 2 for s in steps) or any(b <= a for a, b in zip(steps, steps[1:])):
        raise ValueError(f"Step counts must be strictly increasing and >= 2, got {steps}")
    exact = exact_scalar(p, horizon, tol)
    errors = []
    for count in steps:
        trajectory = solve_scalar(p, TimeGrid(horizon, count))
        errors.append(abs(trajectory.values[-1] - exact))
        logger.debug(f"alpha={p.alpha}, N={count}: error {errors[-1]:.3e}")
    orders = [math.nan]
    for k in range(1, len(steps)):
        if errors[k] > 0 and errors[k - 1] > 0:
            orders.append(-math.log(errors[k] / errors[k - 1]) / math.log(steps[k] / steps[k - 1]))
        else:
            orders.append(math.nan)
    rows = pd.DataFrame({"steps": steps, "error": errors, "empirical_order": orders})
    return ConvergenceStudy(rows=rows, theory_rate=p.order.s_alpha)
