import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, List, NamedTuple, Optional, Tuple, Union

import numpy as np

from .special_functions import ArrayLike, gamma, incomplete_beta

# Floating-point convention for the bound checks: mathematically strict inequalities are
# compared exactly, equalities get this much slack.
EQUALITY_SLACK = 1e-12
DEFAULT_EPSILON = 0.05


@dataclass(frozen=True)
class FractionalOrder:
    alpha: float
    epsilon: float = DEFAULT_EPSILON

    def __post_init__(self):
        if not (0.0 < self.alpha < 1.0):
            raise ValueError(f"Fractional order alpha must lie in (0, 1), got {self.alpha}")
        if not (0.0 < self.epsilon < 1.0 - self.alpha):
            raise ValueError(f"Rate slack epsilon must lie in (0, 1 - alpha) = (0, {1.0 - self.alpha}), "
                             f"got {self.epsilon}")

    @classmethod
    def with_default_epsilon(cls, alpha: float) -> "FractionalOrder":
        """Order with epsilon = min(0.05, (1 - alpha)/2), valid for every alpha in (0, 1)."""
        return cls(alpha, min(DEFAULT_EPSILON, (1.0 - alpha) / 2))

    @property
    def s_alpha(self) -> float:
        """Proven convergence-rate exponent: alpha below 1/2, otherwise 1 - alpha - epsilon."""
        if self.alpha < 0.5:
            return self.alpha
        return 1.0 - self.alpha - self.epsilon


@dataclass(frozen=True)
class CoefficientTable:
    alpha: float
    n: int
    b: np.ndarray  # b_{1n} .. b_{nn}
    a: np.ndarray  # a_{0n} .. a_{nn}

    @property
    def a_nn(self) -> float:
        return float(self.a[-1])

    def sum_residual(self) -> float:
        return abs(math.fsum(self.a))

    def sign_pattern_ok(self) -> bool:
        middle = self.a[1:-1]
        return bool(self.a[0] < 0 and np.all(middle <= 0) and self.a[-1] > 0)


class InequalityCheck(NamedTuple):
    passed: bool
    margin: float


def _validate_index(j: int, n: int):
    if n < 1 or not (1 <= j <= n):
        raise ValueError(f"Coefficient index out of range: need 1 <= j <= n, got j={j}, n={n}")


def power_increments(alpha: float, j: np.ndarray) -> np.ndarray:
    """j^alpha - (j-1)^alpha for j >= 1, without cancellation for large j."""
    j = np.asarray(j, dtype=float)
    out = np.ones_like(j)
    big = j > 1
    jb = j[big]
    out[big] = -np.power(jb, alpha) * np.expm1(alpha * np.log1p(-1.0 / jb))
    return out


def b_coeff(alpha: float, j: int, n: int) -> float:
    """b_jn = B_{j/n}(alpha, 1-alpha) - B_{(j-1)/n}(alpha, 1-alpha)."""
    _validate_index(j, n)
    ends = incomplete_beta(alpha, 1.0 - alpha, np.array([(j - 1) / n, j / n]))
    return float(ends[1] - ends[0])


def b_row(alpha: float, n: int) -> np.ndarray:
    if n < 1:
        raise ValueError(f"Row index must be >= 1, got n={n}")
    nodes = np.arange(n + 1, dtype=float) / n
    return np.diff(incomplete_beta(alpha, 1.0 - alpha, nodes))


def b_bounds(alpha: float, j: Union[int, np.ndarray], n: int) -> Tuple[ArrayLike, ArrayLike]:
    """
    Bracketing of b_jn by the kernel values at the ends of [j-1, j]; upper is inf for j = n.
    `j` may be a single index or an array of indices of row n.
    """
    js = np.atleast_1d(np.asarray(j, dtype=float))
    if n < 1 or np.any(js < 1) or np.any(js > n):
        raise ValueError(f"Coefficient index out of range: need 1 <= j <= n, got j={j}, n={n}")
    inc = power_increments(alpha, js) / alpha
    lower = inc / np.power(n - js + 1, alpha)
    upper = np.full_like(inc, math.inf)
    inner = js < n
    upper[inner] = inc[inner] / np.power(n - js[inner], alpha)
    if np.ndim(j) == 0:
        return float(lower[0]), float(upper[0])
    return lower, upper


@lru_cache(maxsize=2048)
def coefficient_table(alpha: float, n: int) -> CoefficientTable:
    """
    Row n of the scheme coefficients. Each row is computed independently, so a run up to N
    costs O(N^2) incomplete-beta evaluations in total. Rows are cached and read-only.
    """
    if n < 1:
        raise ValueError(f"Row index must be >= 1, got n={n}")
    b = b_row(alpha, n)
    scale = alpha / gamma(1.0 - alpha)
    c = b / power_increments(alpha, np.arange(1, n + 1))
    a = scale * (np.concatenate(([0.0], c)) - np.concatenate((c, [0.0])))
    b.setflags(write=False)
    a.setflags(write=False)
    return CoefficientTable(alpha=alpha, n=n, b=b, a=a)


def a_coeffs(alpha: float, n: int) -> np.ndarray:
    if n < 1:
        raise ValueError(f"Row index must be >= 1, got n={n}")
    return coefficient_table(alpha, n).a


def a0_bounds(alpha: float, n: int) -> Tuple[float, float]:
    g = gamma(1.0 - alpha)
    return 1.0 / (g * n ** alpha), 1.0 / (g * (n - 1) ** alpha)


def ann_bounds(alpha: float, n: int) -> Tuple[float, float]:
    g = gamma(2.0 - alpha)
    return ((n - 1) / n) ** (1 - alpha) / g, (n / (n - 1)) ** (1 - alpha) / g


def _weighted_comparison(table: CoefficientTable, exponent: float) -> InequalityCheck:
    n = table.n
    j = np.arange(1, n, dtype=float)
    left = math.fsum(np.abs(table.a[1:-1]) / np.power(j, exponent))
    right = table.a_nn / n ** exponent
    return InequalityCheck(left <= right, right - left)


def check_lemma41(alpha: float, epsilon: float, n: int) -> InequalityCheck:
    """sum_{j<n} |a_jn| / j^(1-alpha-eps) <= a_nn / n^(1-alpha-eps), with the signed slack."""
    FractionalOrder(alpha, epsilon)
    if n < 2:
        raise ValueError(f"Inequality is stated for n >= 2, got n={n}")
    return _weighted_comparison(coefficient_table(alpha, n), 1.0 - alpha - epsilon)


def check_corollary41(alpha: float, epsilon: float, n: int) -> InequalityCheck:
    """sum_{j<n} |a_jn| / j^alpha <= a_nn / n^alpha, for alpha < 1/2."""
    if alpha >= 0.5:
        raise ValueError(f"Corollary inequality requires alpha < 1/2, got {alpha}")
    FractionalOrder(alpha, epsilon)
    if n < 2:
        raise ValueError(f"Inequality is stated for n >= 2, got n={n}")
    return _weighted_comparison(coefficient_table(alpha, n), alpha)


def caputo_difference(alpha: float, values: np.ndarray, dt: float) -> np.ndarray:
    """
    Approximate Caputo derivative sum_j a_jn v_j / dt^alpha at the nodes n = 1..N of a
    sampled function v_0..v_N (first axis is time). Exact for v = c0 + c1 t^alpha.
    """
    values = np.asarray(values)
    steps = values.shape[0] - 1
    out = np.empty((steps,) + values.shape[1:], dtype=np.result_type(values.dtype, float))
    for n in range(1, steps + 1):
        out[n - 1] = np.tensordot(coefficient_table(alpha, n).a, values[:n + 1], axes=1)
    return out / dt ** alpha


def midpoint_nodes(alpha: float, nodes: np.ndarray) -> np.ndarray:
    """Auxiliary nodes s_j in (t_{j-1}, t_j) with s_j^alpha the mean of t_{j-1}^alpha and t_j^alpha."""
    powered = np.power(np.asarray(nodes, dtype=float), alpha)
    return np.power((powered[:-1] + powered[1:]) / 2, 1.0 / alpha)


# Sweeps

def identity_sweep(alpha: float, n_max: int) -> Dict[str, float]:
    """
    Row sums, the beta-function total, the sign pattern, the b/a bracketings and the placement of
    the auxiliary nodes for every n <= n_max.
    """
    target = math.pi / math.sin(alpha * math.pi)
    sum_a_max = 0.0
    beta_dev = 0.0
    signs_ok = True
    bounds_ok = True
    for n in range(1, n_max + 1):
        table = coefficient_table(alpha, n)
        sum_a_max = max(sum_a_max, table.sum_residual())
        beta_dev = max(beta_dev, abs(math.fsum(table.b) - target))
        signs_ok = signs_ok and table.sign_pattern_ok()
        if n >= 2:
            lower, upper = b_bounds(alpha, np.arange(1, n), n)
            inner = table.b[:-1]
            # auxiliary nodes interlace the integer grid
            s = midpoint_nodes(alpha, np.arange(n + 1, dtype=float))
            nodes_ok = bool(np.all(s > np.arange(n)) and np.all(s < np.arange(1, n + 1)))
            lo0, hi0 = a0_bounds(alpha, n)
            lon, hin = ann_bounds(alpha, n)
            bounds_ok = bounds_ok and bool(
                nodes_ok and np.all(lower < inner) and np.all(inner < upper)
                and lo0 <= abs(table.a[0]) <= hi0
                and lon <= table.a_nn <= hin
            )
    return {
        "alpha": alpha,
        "n_max": n_max,
        "sum_a_max": sum_a_max,
        "beta_sum_dev": beta_dev,
        "signs_ok": signs_ok,
        "bounds_ok": bounds_ok,
        "passed": signs_ok and bounds_ok and sum_a_max <= EQUALITY_SLACK and beta_dev <= 1e-10,
    }


def inequality_sweep(alpha: float, epsilon: float, n_max: int) -> Dict[str, Optional[float]]:
    """Weighted coefficient inequality (and its alpha < 1/2 variant) for every n in [2, n_max]."""
    margins41: List[float] = []
    for n in range(2, n_max + 1):
        margins41.append(check_lemma41(alpha, epsilon, n).margin)
    margins41 = np.array(margins41)
    passing = np.flatnonzero(margins41 >= 0)
    row = {
        "alpha": alpha,
        "epsilon": epsilon,
        "n_max": n_max,
        "min_margin_41": float(margins41.min()),
        "first_pass_41": int(passing[0]) + 2 if passing.size else None,
        "all_pass_41": bool(passing.size == margins41.size),
        "min_margin_corollary": None,
        "all_pass_corollary": None,
    }
    if alpha < 0.5:
        margins_c = np.array([check_corollary41(alpha, epsilon, n).margin for n in range(2, n_max + 1)])
        row["min_margin_corollary"] = float(margins_c.min())
        row["all_pass_corollary"] = bool(np.all(margins_c >= 0))
    return row
