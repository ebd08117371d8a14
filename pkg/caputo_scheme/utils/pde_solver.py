import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Literal, Optional, Union

import numpy as np
import pandas as pd
from dagster import get_dagster_logger
from scipy.integrate import simpson, trapezoid
from scipy.linalg import solve_banded

from .coefficients import CoefficientTable, coefficient_table
from .scalar_scheme import TimeGrid
from .special_functions import MLParams, gamma, gl_weights, mittag_leffler

CoefficientFunction = Callable[[np.ndarray], np.ndarray]
InitialData = Union[str, np.ndarray]

DEFAULT_SPATIAL_INTERVALS = 2048
RESIDUAL_LIMIT = 1e-12
TAIL_LIMIT = 1e-10
ANGLE_SAMPLES = 100_001

logger = get_dagster_logger()


def _evaluate(fun: CoefficientFunction, s: np.ndarray) -> np.ndarray:
    # constant callables such as `lambda s: 0.0` are broadcast over the grid
    return np.broadcast_to(np.asarray(fun(s), dtype=float), s.shape).copy()


@dataclass(frozen=True)
class EllipticOperator1D:
    """a0^2 u'' - b(s) u' - c(s) u on [0, 1] with homogeneous Dirichlet conditions."""
    a0: float
    b_fun: CoefficientFunction
    c_fun: CoefficientFunction
    M: int
    b_prime: Optional[CoefficientFunction] = None

    def __post_init__(self):
        if self.a0 <= 0:
            raise ValueError(f"Diffusion coefficient a0 must be positive, got {self.a0}")
        if self.M < 2:
            raise ValueError(f"Need at least 2 spatial intervals, got M={self.M}")

    @classmethod
    def laplacian(cls, M: int = DEFAULT_SPATIAL_INTERVALS) -> "EllipticOperator1D":
        return cls(1.0, lambda s: 0.0, lambda s: 0.0, M, b_prime=lambda s: 0.0)

    @classmethod
    def drift_reaction(cls, M: int = DEFAULT_SPATIAL_INTERVALS) -> "EllipticOperator1D":
        """a0 = 0.1, b = 0.02 s, c = s(1 - s) + 0.02."""
        return cls(0.1, lambda s: 0.02 * s, lambda s: s * (1 - s) + 0.02, M, b_prime=lambda s: 0.02)

    @property
    def h(self) -> float:
        return 1.0 / self.M

    @property
    def grid(self) -> np.ndarray:
        return np.linspace(0.0, 1.0, self.M + 1)

    def is_pure_laplacian(self) -> bool:
        s = self.grid
        return self.a0 == 1.0 and not np.any(_evaluate(self.b_fun, s)) and not np.any(_evaluate(self.c_fun, s))


@dataclass(frozen=True)
class TridiagonalOperator:
    """Interior rows 1..M-1; lower[0] and upper[-1] are unused and zero."""
    lower: np.ndarray
    diag: np.ndarray
    upper: np.ndarray

    def matvec(self, u: np.ndarray) -> np.ndarray:
        out = self.diag * u
        out[1:] += self.lower[1:] * u[:-1]
        out[:-1] += self.upper[:-1] * u[1:]
        return out

    def to_dense(self) -> np.ndarray:
        return np.diag(self.diag) + np.diag(self.lower[1:], -1) + np.diag(self.upper[:-1], 1)

    def shifted(self, scale: float, shift: float) -> "TridiagonalOperator":
        """scale * A - shift * I."""
        return TridiagonalOperator(scale * self.lower, scale * self.diag - shift, scale * self.upper)


@dataclass(frozen=True)
class FieldHistory:
    grid: TimeGrid
    fields: np.ndarray = field(repr=False)  # shape (N + 1, M + 1)
    scheme_tag: Literal["main", "comparison"]
    residuals: Optional[np.ndarray] = field(default=None, repr=False)

    @property
    def final(self) -> np.ndarray:
        return self.fields[-1]


def assemble_operator(op: EllipticOperator1D) -> TridiagonalOperator:
    """Second-order central differences on the interior nodes, Dirichlet rows eliminated."""
    s = op.grid[1:-1]
    h = op.h
    b = _evaluate(op.b_fun, s)
    c = _evaluate(op.c_fun, s)
    diffusion = op.a0 ** 2 / h ** 2
    lower = diffusion + b / (2 * h)
    upper = diffusion - b / (2 * h)
    diag = -2 * diffusion - c
    lower[0] = 0.0
    upper[-1] = 0.0
    return TridiagonalOperator(lower, diag, upper)


def thomas_solve(lower: np.ndarray, diag: np.ndarray, upper: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    """
    Solve a tridiagonal system, handed to LAPACK through scipy's banded solver.

    lower = (0, a_2, ..., a_n), diag = (b_1, ..., b_n), upper = (c_1, ..., c_{n-1}, 0).
    On diagonally dominant systems the elimination takes no pivots and is the Thomas algorithm.
    """
    off = np.abs(lower) + np.abs(upper)
    if np.any(np.abs(diag) < off):
        logger.warning(f"Tridiagonal system is not diagonally dominant in "
                       f"{int(np.count_nonzero(np.abs(diag) < off))} rows; elimination may be unstable")

    ab = np.zeros((3, diag.size))
    ab[0, 1:] = upper[:-1]
    ab[1] = diag
    ab[2, :-1] = lower[1:]
    try:
        return solve_banded((1, 1), ab, rhs, check_finite=False)
    except np.linalg.LinAlgError as e:
        raise np.linalg.LinAlgError(f"Singular tridiagonal system: {e}") from e


def validate_field(values: np.ndarray, M: int) -> np.ndarray:
    values = np.asarray(values, dtype=float)
    if values.shape != (M + 1,):
        raise ValueError(f"Spatial field must have {M + 1} values, got shape {values.shape}")
    if values[0] != 0.0 or values[-1] != 0.0:
        raise ValueError(f"Spatial field violates the Dirichlet conditions: u(0)={values[0]}, u(1)={values[-1]}")
    return values


def sample_initial(tag: str, M: int, path: Optional[Union[str, Path]] = None) -> np.ndarray:
    """Initial data on the grid s_i = i/M: `poly` is s^2 (s - 1), `sine` is sin(2 pi s), `file` reads a CSV column."""
    s = np.linspace(0.0, 1.0, M + 1)
    if tag == "poly":
        values = s ** 2 * (s - 1)
    elif tag == "sine":
        values = np.sin(2 * math.pi * s)
    elif tag == "file":
        if path is None:
            raise ValueError("Initial data tag 'file' needs a path")
        values = pd.read_csv(path, header=None, comment="#").iloc[:, 0].to_numpy(dtype=float)
    else:
        raise ValueError(f"Unknown initial data tag '{tag}' (expected poly, sine or file)")
    values = np.array(values, dtype=float)
    if tag != "file":
        values[0] = values[-1] = 0.0
    return validate_field(values, M)


def step_scheme51(history: np.ndarray, coeffs: CoefficientTable, operator: TridiagonalOperator,
                  dt: float) -> np.ndarray:
    """
    One step of the main scheme: solve (dt^alpha A - a_nn I) u_n = sum_{j<n} a_jn u_j on the interior.
    `history` holds u_0 .. u_{n-1} as rows.
    """
    n = coeffs.n
    if history.shape[0] != n:
        raise ValueError(f"Step {n} needs the history u_0..u_{n - 1}, got {history.shape[0]} fields")
    rhs = coeffs.a[:n] @ history[:, 1:-1]
    system = operator.shifted(dt ** coeffs.alpha, coeffs.a_nn)
    u = np.zeros(history.shape[1])
    u[1:-1] = thomas_solve(system.lower, system.diag, system.upper, rhs)
    return u


def run_scheme51(op: EllipticOperator1D, f: np.ndarray, alpha: float, grid: TimeGrid) -> FieldHistory:
    f = validate_field(f, op.M)
    operator = assemble_operator(op)
    fields = np.zeros((grid.steps + 1, op.M + 1))
    fields[0] = f
    for n in range(1, grid.steps + 1):
        fields[n] = step_scheme51(fields[:n], coefficient_table(alpha, n), operator, grid.dt)
    fields.setflags(write=False)
    return FieldHistory(grid=grid, fields=fields, scheme_tag="main")


def scheme63_residual(operator: TridiagonalOperator, weights: np.ndarray, fields: np.ndarray,
                      f: np.ndarray, n: int, dt: float, alpha: float) -> float:
    """
    Componentwise backward error of sum_{j=0}^n w_j (u_{n-j} - f) = dt^alpha A u_n at step n:
    max_i |memory_i - action_i| / (sum_j |w_j| |u_{n-j} - f|_i + dt^alpha (|A| |u_n|)_i).
    """
    interior = fields[n::-1, 1:-1] - f[1:-1]
    u = fields[n, 1:-1]
    memory = weights[:n + 1] @ interior
    action = dt ** alpha * operator.matvec(u)
    magnitude = TridiagonalOperator(np.abs(operator.lower), np.abs(operator.diag), np.abs(operator.upper))
    scale = np.abs(weights[:n + 1]) @ np.abs(interior) + dt ** alpha * magnitude.matvec(np.abs(u))
    gap = np.abs(memory - action)
    return float(np.max(gap / np.maximum(scale, np.finfo(float).tiny)))


def run_scheme63(op: EllipticOperator1D, f: np.ndarray, alpha: float, grid: TimeGrid) -> FieldHistory:
    """
    Grunwald-Letnikov comparison scheme, rearranged with the j = 0 term on the left:
    (dt^alpha A - w_0 I) u_n = sum_{j=1}^n w_j (u_{n-j} - f) - w_0 f.
    """
    f = validate_field(f, op.M)
    operator = assemble_operator(op)
    weights = gl_weights(alpha, grid.steps)
    system = operator.shifted(grid.dt ** alpha, weights[0])
    fields = np.zeros((grid.steps + 1, op.M + 1))
    fields[0] = f
    residuals = np.zeros(grid.steps)
    for n in range(1, grid.steps + 1):
        rhs = weights[1:n + 1] @ (fields[n - 1::-1, 1:-1] - f[1:-1]) - weights[0] * f[1:-1]
        fields[n, 1:-1] = thomas_solve(system.lower, system.diag, system.upper, rhs)
        residuals[n - 1] = scheme63_residual(operator, weights, fields, f, n, grid.dt, alpha)
        if residuals[n - 1] > RESIDUAL_LIMIT:
            logger.warning(f"Comparison scheme residual {residuals[n - 1]:.2e} at step {n} exceeds {RESIDUAL_LIMIT}")
    fields.setflags(write=False)
    return FieldHistory(grid=grid, fields=fields, scheme_tag="comparison", residuals=residuals)


def sine_coefficients(f: InitialData, n_modes: int) -> np.ndarray:
    """f_n = 2 int_0^1 f(s) sin(pi n s) ds for n = 1..n_modes."""
    n = np.arange(1, n_modes + 1, dtype=float)
    if isinstance(f, str):
        if f == "poly":
            return 4 * (2 * (-1.0) ** n + 1) / (math.pi * n) ** 3
        if f == "sine":
            coeffs = np.zeros(n_modes)
            if n_modes >= 2:
                coeffs[1] = 1.0
            return coeffs
        raise ValueError(f"No closed-form sine coefficients for initial data '{f}'")
    values = np.asarray(f, dtype=float)
    s = np.linspace(0.0, 1.0, values.size)
    return 2 * simpson(values[None, :] * np.sin(math.pi * n[:, None] * s[None, :]), x=s, axis=1)


def mode_factors(alpha: float, horizon: float, n_modes: int) -> np.ndarray:
    """E_alpha(-pi^2 n^2 T^alpha) for n = 1..n_modes."""
    params = MLParams(alpha, 1.0)
    return np.array([mittag_leffler(params, -(math.pi * k) ** 2 * horizon ** alpha).real
                     for k in range(1, n_modes + 1)])


def spectral_reference(f: InitialData, alpha: float, horizon: float, n_modes: int = 400,
                       M: Optional[int] = None, op: Optional[EllipticOperator1D] = None) -> np.ndarray:
    """Separation-of-variables solution of the pure heat problem, truncated to n_modes sine modes."""
    if op is not None and not op.is_pure_laplacian():
        raise ValueError("Spectral reference is only available for a0 = 1, b = 0, c = 0")
    if isinstance(f, str):
        if M is None:
            M = op.M if op is not None else DEFAULT_SPATIAL_INTERVALS
    else:
        M = len(f) - 1
    s = np.linspace(0.0, 1.0, M + 1)
    amplitudes = sine_coefficients(f, n_modes) * mode_factors(alpha, horizon, n_modes)
    modes = np.sin(math.pi * np.arange(1, n_modes + 1)[:, None] * s[None, :])
    u = amplitudes @ modes
    u[0] = u[-1] = 0.0
    tail = spectral_tail_bound(f, alpha, horizon, n_modes)
    if tail > TAIL_LIMIT:
        logger.warning(f"Spectral reference truncated at {n_modes} modes: discarded modes may contribute up to {tail:.2e}")
    return u


def spectral_tail_bound(f: InitialData, alpha: float, horizon: float, n_modes: int) -> float:
    """
    Sup-norm bound on the discarded modes, from |E_alpha(-x)| <= 1/(Gamma(1-alpha) x) and
    |f_n| <= 12/(pi n)^3 for `poly`, |f_n| <= 2 ||f||_1 otherwise.
    """
    decay = 1.0 / (gamma(1.0 - alpha) * math.pi ** 2 * horizon ** alpha)
    if isinstance(f, str):
        if f == "sine":
            return 0.0 if n_modes >= 2 else decay / 4
        if f == "poly":
            # sum_{n>K} n^-5 <= 1/(4 K^4)
            return 12 / math.pi ** 3 * decay / (4 * n_modes ** 4)
        raise ValueError(f"No tail bound for initial data '{f}'")
    values = np.asarray(f, dtype=float)
    s = np.linspace(0.0, 1.0, values.size)
    return 2 * trapezoid(np.abs(values), s) * decay / n_modes


def sectorial_angle(op: EllipticOperator1D, samples: int = ANGLE_SAMPLES) -> float:
    """
    phi0* with tan phi0* = max_s |b(s)| max{1/(2 a0^2), 1/(2c(s) - b'(s))}. Dense grid search,
    refined on the bracketing cell of the maximiser with a second grid of 1001 points.
    """
    def objective(s: np.ndarray) -> np.ndarray:
        b = _evaluate(op.b_fun, s)
        c = _evaluate(op.c_fun, s)
        if op.b_prime is not None:
            db = _evaluate(op.b_prime, s)
        else:
            db = np.gradient(b, s, edge_order=2)
        margin = 2 * c - db
        if np.any(margin <= 0):
            worst = s[int(np.argmin(margin))]
            raise ValueError(f"Sectorial condition 2c(s) - b'(s) > 0 fails at s={worst:.6f}")
        return np.abs(b) * np.maximum(1 / (2 * op.a0 ** 2), 1 / margin)

    s = np.linspace(0.0, 1.0, samples)
    if not np.any(_evaluate(op.b_fun, s)):
        # no drift: the maximum vanishes whatever c is
        return 0.0
    values = objective(s)
    best = int(np.argmax(values))
    lo, hi = s[max(best - 1, 0)], s[min(best + 1, samples - 1)]
    refined = np.linspace(lo, hi, 1001)
    peak = max(float(values[best]), float(np.max(objective(refined))))
    return math.atan(peak)


def field_norm(u: np.ndarray) -> float:
    """Discrete L2[0, 1] norm by the composite trapezoidal rule."""
    u = np.asarray(u, dtype=float)
    h = 1.0 / (u.size - 1)
    return math.sqrt(trapezoid(u * u, dx=h))


def l2_distance(u: np.ndarray, v: np.ndarray) -> float:
    return field_norm(np.asarray(u) - np.asarray(v))


def max_norm_ratio(history: FieldHistory) -> float:
    """max_n ||u_n|| / ||u_0||, the empirical stability constant of a run."""
    initial = field_norm(history.fields[0])
    if initial == 0:
        return 0.0
    return max(field_norm(u) for u in history.fields) / initial
