"""Kernel interpolation, fill distances and exact native-space norms."""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from scipy import linalg
from scipy.spatial import cKDTree

from .kernels import KernelSpec, as_points, gram, kernel_matrix

log = logging.getLogger(__name__)


class UnsolvableSystemError(RuntimeError):
    """The Gram system could not be factorized even at the largest jitter."""

    def __init__(self, message, condition_estimate=None, jitter=None):
        super().__init__(message)
        self.condition_estimate = condition_estimate
        self.jitter = jitter


@dataclass(frozen=True)
class SolveOptions:
    base_jitter: float = 0.0
    max_jitter: float = 1e-8
    escalation_factor: float = 10.0

    def __post_init__(self):
        if self.base_jitter < 0 or self.max_jitter < 0:
            raise ValueError("jitter levels must be nonnegative")
        if self.base_jitter > self.max_jitter:
            raise ValueError("base_jitter must not exceed max_jitter")
        if self.escalation_factor <= 1:
            raise ValueError("escalation_factor must be > 1")


@dataclass(frozen=True, eq=False)
class Interpolant:
    """The fitted interpolant s = sum_i a_i k(., x_i).

    ``jitter_applied`` is the relative diagonal shift (in units of trace/n)
    that was needed to factorize the Gram matrix; 0 means an exact solve.
    """

    kernel: KernelSpec
    centers: np.ndarray
    coefficients: np.ndarray
    jitter_applied: float = 0.0

    def __call__(self, points) -> np.ndarray:
        return eval_interpolant(self, points)

    def native_norm_sq(self) -> float:
        """a^T K_X a."""
        if len(self.coefficients) == 0:
            return 0.0
        a = self.coefficients
        return float(a @ gram(self.kernel, self.centers) @ a)


@dataclass(frozen=True, eq=False)
class KernelExpansion:
    """Finite kernel expansion v = sum_i rho_i k(., z_i)."""

    kernel: KernelSpec
    sites: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        sites = as_points(self.sites, self.kernel.d)
        weights = np.asarray(self.weights, dtype=float).ravel()
        if len(sites) != len(weights):
            raise ValueError("sites and weights differ in length")
        object.__setattr__(self, "sites", sites)
        object.__setattr__(self, "weights", weights)

    def __call__(self, points) -> np.ndarray:
        return kernel_matrix(self.kernel, points, self.sites) @ self.weights


def _cholesky(K):
    return linalg.cho_factor(K, lower=True, check_finite=False)


def solve_gram(K, values, opts: SolveOptions | None = None):
    """Solve ``K a = values`` by Cholesky, escalating diagonal jitter on failure.

    Returns ``(a, jitter)`` where ``jitter`` is relative to ``trace(K) / n``.
    """
    opts = opts or SolveOptions()
    n = K.shape[0]
    scale = np.trace(K) / n
    try:
        if opts.base_jitter > 0:
            raise linalg.LinAlgError("base jitter requested")
        factor = _cholesky(K)
        return linalg.cho_solve(factor, values, check_finite=False), 0.0
    except linalg.LinAlgError:
        pass
    delta = max(opts.base_jitter, 1e-14)
    while delta <= opts.max_jitter * (1 + 1e-12):
        try:
            factor = _cholesky(K + delta * scale * np.eye(n))
        except linalg.LinAlgError:
            delta *= opts.escalation_factor
            continue
        log.warning("Gram matrix needed jitter %.1e (relative) for n=%d", delta, n)
        return linalg.cho_solve(factor, values, check_finite=False), delta
    cond = np.linalg.cond(K)
    raise UnsolvableSystemError(
        f"Gram matrix of size {n} not factorizable with jitter up to "
        f"{opts.max_jitter:g} (condition estimate {cond:.3e})",
        condition_estimate=cond,
        jitter=opts.max_jitter,
    )


def fit_interpolant(
    spec: KernelSpec, X, values, opts: SolveOptions | None = None
) -> Interpolant:
    X = as_points(X, spec.d)
    y = np.asarray(values, dtype=float).ravel()
    if len(y) != len(X):
        raise ValueError(f"got {len(y)} values for {len(X)} centers")
    if len(X) == 0:
        return Interpolant(spec, X, np.zeros(0), 0.0)
    a, jitter = solve_gram(gram(spec, X), y, opts)
    return Interpolant(spec, X, a, jitter)


def eval_interpolant(s: Interpolant, grid, block: int = 8192) -> np.ndarray:
    """Evaluate the interpolant on ``grid`` (evaluated in row blocks)."""
    grid = as_points(grid, s.kernel.d)
    if len(s.coefficients) == 0:
        return np.zeros(len(grid))
    out = np.empty(len(grid))
    for start in range(0, len(grid), block):
        rows = grid[start : start + block]
        out[start : start + block] = kernel_matrix(s.kernel, rows, s.centers) @ s.coefficients
    return out


def fill_distance(X, candidates) -> float:
    """max over candidates of the distance to the nearest point of X."""
    X = as_points(X)
    if len(X) == 0:
        raise ValueError("fill distance of an empty point set is undefined")
    candidates = as_points(candidates, X.shape[1])
    dist, _ = cKDTree(X).query(candidates)
    return float(np.max(dist))


def separation_distance(X) -> float:
    """Smallest pairwise distance within X (inf for a single point)."""
    X = as_points(X)
    if len(X) < 2:
        return np.inf
    dist, _ = cKDTree(X).query(X, k=2)
    return float(np.min(dist[:, 1]))


def equispaced_interior(n_per_dim: int, d: int = 1, include_boundary: bool = False) -> np.ndarray:
    """Tensor-product equispaced nodes in [0, 1]^d.

    Interior: ``i / (n + 1)`` for ``i = 1..n``; with boundary: ``i / (n - 1)``
    for ``i = 0..n-1``.
    """
    n = int(n_per_dim)
    if n < 1 or (include_boundary and n < 2):
        raise ValueError(f"too few points per dimension: {n}")
    if include_boundary:
        line = np.arange(n) / (n - 1)
    else:
        line = np.arange(1, n + 1) / (n + 1)
    if d == 1:
        return line[:, None]
    if d == 2:
        g0, g1 = np.meshgrid(line, line, indexing="ij")
        return np.column_stack([g0.ravel(), g1.ravel()])
    raise ValueError(f"unsupported dimension {d}")


def native_norm_sq(e: KernelExpansion) -> float:
    """||v||_H^2 = rho^T K_Z rho."""
    if len(e.weights) == 0:
        return 0.0
    value = float(e.weights @ gram(e.kernel, e.sites) @ e.weights)
    return max(value, 0.0)


@dataclass(frozen=True)
class NativeError:
    error_sq: float
    interpolant: Interpolant | None
    clamped: bool


def native_error(e: KernelExpansion, X, opts: SolveOptions | None = None) -> NativeError:
    """Squared native-norm error of the interpolant of ``e`` on ``X``, with details."""
    vsq = native_norm_sq(e)
    X = as_points(X, e.kernel.d)
    if len(X) == 0:
        return NativeError(vsq, None, False)
    s = fit_interpolant(e.kernel, X, e(X), opts)
    # ||v - s||^2 = ||v||^2 - ||s||^2, since s is the orthogonal projection of v
    diff = vsq - s.native_norm_sq()
    if diff >= 0:
        return NativeError(diff, s, False)
    if diff < -1e-8 * vsq:
        raise ArithmeticError(
            f"native error {diff:.3e} is negative beyond round-off (||v||^2 = {vsq:.3e})"
        )
    log.warning("clamping negative native error %.3e to 0", diff)
    return NativeError(0.0, s, True)


def native_error_sq(e: KernelExpansion, X, opts: SolveOptions | None = None) -> float:
    return native_error(e, X, opts).error_sq
