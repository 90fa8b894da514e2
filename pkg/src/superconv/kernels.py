"""Kernel families, Gram assembly and positive-definiteness diagnostics.

Every family is described by an immutable :class:`KernelSpec` and evaluated in
vectorized form by :func:`kernel_matrix`.  Points are arrays of shape
``(n, d)``; 1D inputs of shape ``(n,)`` are promoted to ``(n, 1)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, NamedTuple

import numpy as np

MATERN_BASIC = "matern-basic"
MATERN_LINEAR = "matern-linear"
MATERN_QUADRATIC = "matern-quadratic"
WENDLAND_LINEAR = "wendland-1"
PERIODIC_BERNOULLI = "periodic-bernoulli"
PERIODIC_SERIES = "periodic-series"
GREEN_W21_STANDARD = "green-w21-std"
GREEN_W21_MATERN = "green-w21-matern"
GREEN_W22 = "green-w22"

FAMILIES = (
    MATERN_BASIC,
    MATERN_LINEAR,
    MATERN_QUADRATIC,
    WENDLAND_LINEAR,
    PERIODIC_BERNOULLI,
    PERIODIC_SERIES,
    GREEN_W21_STANDARD,
    GREEN_W21_MATERN,
    GREEN_W22,
)

# identifiers accepted by kernel_from_id / the command line
KERNEL_IDS = (
    "matern-basic",
    "matern-linear",
    "matern-quadratic",
    "wendland-1",
    "periodic-r1",
    "periodic-r2",
    "periodic-series",
    "green-w21-std",
    "green-w21-matern",
    "green-w22",
)

_ONE_D_ONLY = {
    WENDLAND_LINEAR,
    PERIODIC_BERNOULLI,
    PERIODIC_SERIES,
    GREEN_W21_STANDARD,
    GREEN_W21_MATERN,
    GREEN_W22,
}

SINH_1 = math.sinh(1.0)
SINH_E = math.sinh(math.e)


class KernelError(ValueError):
    """Invalid kernel specification or evaluation request."""


@dataclass(frozen=True)
class KernelSpec:
    """Tagged description of a kernel family.

    ``order`` is the Bernoulli order r of the periodic kernel, ``alpha`` and
    ``terms`` parametrize the truncated Fourier series, ``divisor`` is the
    normalization of the Neumann Green kernel and ``w22`` holds the constructed
    fourth-order Green kernel (see :mod:`superconv.green`).
    """

    family: str
    d: int = 1
    order: int | None = None
    alpha: float | None = None
    terms: int = 1000
    divisor: float = SINH_1
    w22: Any = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise KernelError(f"unknown kernel family {self.family!r}")
        if self.d not in (1, 2):
            raise KernelError(f"dimension must be 1 or 2, got {self.d}")
        if self.family in _ONE_D_ONLY and self.d != 1:
            raise KernelError(f"{self.family} is only defined for d=1")
        if self.family == PERIODIC_BERNOULLI and self.order not in (1, 2):
            raise KernelError("periodic Bernoulli kernel needs order r in {1, 2}")
        if self.family == PERIODIC_SERIES:
            if self.alpha is None or self.alpha <= 0:
                raise KernelError("periodic series kernel needs alpha > 0")
            if self.terms < 1:
                raise KernelError("periodic series truncation must be >= 1")

    @property
    def name(self) -> str:
        """Stable identifier, as used in output files."""
        if self.family == PERIODIC_BERNOULLI:
            return f"periodic-r{self.order}"
        return self.family

    @property
    def smoothness(self) -> float | None:
        """Sobolev order tau of the native space, when known."""
        if self.family == MATERN_BASIC:
            return (self.d + 1) / 2
        if self.family == MATERN_LINEAR:
            return (self.d + 3) / 2
        if self.family == MATERN_QUADRATIC:
            return (self.d + 5) / 2
        if self.family in (WENDLAND_LINEAR, GREEN_W21_STANDARD, GREEN_W21_MATERN):
            return 1.0
        if self.family == PERIODIC_BERNOULLI:
            return float(self.order)
        if self.family == PERIODIC_SERIES:
            return float(self.alpha)
        if self.family == GREEN_W22:
            return 2.0
        return None


def kernel_from_id(kernel_id: str, d: int = 1, **kwargs) -> KernelSpec:
    """Build a :class:`KernelSpec` from its string identifier.

    ``green-w22`` additionally requires a constructed kernel passed as ``w22=``
    (or built later with :func:`superconv.green.build_w22_kernel`).
    """
    if kernel_id in ("periodic-r1", "periodic-r2"):
        return KernelSpec(PERIODIC_BERNOULLI, d=d, order=int(kernel_id[-1]), **kwargs)
    if kernel_id == PERIODIC_SERIES:
        kwargs.setdefault("alpha", 1.0)
    if kernel_id not in KERNEL_IDS:
        raise KernelError(
            f"unknown kernel id {kernel_id!r}; choose from {', '.join(KERNEL_IDS)}"
        )
    return KernelSpec(kernel_id, d=d, **kwargs)


def as_points(X, d: int | None = None) -> np.ndarray:
    """Return ``X`` as a float array of shape ``(n, d)``."""
    X = np.asarray(X, dtype=float)
    if X.ndim == 0:
        X = X.reshape(1, 1)
    elif X.ndim == 1:
        X = X[:, None] if d in (None, 1) else X[None, :]
    if X.ndim != 2:
        raise KernelError(f"points must be a 2D array, got shape {X.shape}")
    if d is not None and X.shape[1] != d:
        raise KernelError(f"dimension mismatch: points have d={X.shape[1]}, expected {d}")
    return X


def bernoulli_poly(degree: int, t):
    """Bernoulli polynomial B_2 or B_4 evaluated at ``t``."""
    t = np.asarray(t, dtype=float)
    if degree == 2:
        return t * t - t + 1.0 / 6.0
    if degree == 4:
        t2 = t * t
        return t2 * t2 - 2.0 * t2 * t + t2 - 1.0 / 30.0
    raise KernelError(f"unsupported Bernoulli degree {degree}; use 2 or 4")


def _distance(X, Y):
    diff = X[:, None, :] - Y[None, :, :]
    if X.shape[1] == 1:
        return np.abs(diff[..., 0])
    return np.sqrt(np.sum(diff * diff, axis=-1))


def kernel_matrix(spec: KernelSpec, X, Y) -> np.ndarray:
    """Cross-kernel matrix ``K[i, j] = k(X[i], Y[j])``."""
    X = as_points(X, spec.d)
    Y = as_points(Y, spec.d)
    fam = spec.family
    if fam in (MATERN_BASIC, MATERN_LINEAR, MATERN_QUADRATIC):
        r = _distance(X, Y)
        e = np.exp(-r)
        if fam == MATERN_BASIC:
            return e
        if fam == MATERN_LINEAR:
            return e * (1.0 + r)
        return e * (3.0 + 3.0 * r + r * r)
    if fam == WENDLAND_LINEAR:
        return np.maximum(1.0 - _distance(X, Y), 0.0)
    if fam == PERIODIC_BERNOULLI:
        # 1-periodic kernel: reduce the lag to [0, 1)
        t = np.mod(_distance(X, Y), 1.0)
        r = spec.order
        scale = (-1) ** (r + 1) * (2 * np.pi) ** (2 * r) / math.factorial(2 * r)
        return 1.0 + scale * bernoulli_poly(2 * r, t)
    if fam == PERIODIC_SERIES:
        return _periodic_series(X[:, 0], Y[:, 0], spec.alpha, spec.terms)
    if fam == GREEN_W21_STANDARD:
        x, y = X[:, 0][:, None], Y[:, 0][None, :]
        lo, hi = np.minimum(x, y), np.maximum(x, y)
        return np.cosh(lo) * np.cosh(1.0 - hi) / spec.divisor
    if fam == GREEN_W21_MATERN:
        return 0.5 * np.exp(-_distance(X, Y))
    if fam == GREEN_W22:
        if spec.w22 is None:
            raise KernelError("green-w22 kernel used before build_w22_kernel()")
        return spec.w22.matrix(X[:, 0], Y[:, 0])
    raise KernelError(f"unhandled family {fam}")  # pragma: no cover


def _periodic_series(x, y, alpha, terms):
    lag = x[:, None] - y[None, :]
    out = np.ones_like(lag)
    # chunk over frequencies to keep the temporary below ~4M entries
    chunk = max(1, min(terms, 4_000_000 // max(lag.size, 1)))
    for start in range(1, terms + 1, chunk):
        j = np.arange(start, min(start + chunk, terms + 1), dtype=float)
        out += 2.0 * np.sum(
            j ** (-2.0 * alpha) * np.cos(2 * np.pi * j * lag[..., None]), axis=-1
        )
    return out


def eval_kernel(spec: KernelSpec, x, y) -> float:
    """Scalar kernel value k(x, y)."""
    return float(kernel_matrix(spec, as_points(x, spec.d), as_points(y, spec.d))[0, 0])


def gram(spec: KernelSpec, X) -> np.ndarray:
    """Gram matrix of ``spec`` on the points ``X``; exactly symmetric."""
    X = as_points(X, spec.d)
    K = kernel_matrix(spec, X, X)
    lower = np.tril(K)
    return lower + np.tril(K, -1).T


class SPDDiagnosis(NamedTuple):
    status: str  # "spd", "semidefinite" or "indefinite"
    smallest_pivot: float


def check_spd(G, strict_tol: float = 1e-12) -> SPDDiagnosis:
    """Diagnose definiteness of a symmetric matrix by an unpivoted LDL^T sweep.

    Pivots with magnitude at most ``strict_tol * trace(G) / n`` count as zero.
    """
    A = np.array(G, dtype=float, copy=True)
    n = A.shape[0]
    if n == 0:
        return SPDDiagnosis("spd", math.inf)
    scale = abs(np.trace(A)) / n
    tol = strict_tol * scale
    smallest = math.inf
    status = "spd"
    for k in range(n):
        p = A[k, k]
        smallest = min(smallest, p)
        if p < -tol:
            return SPDDiagnosis("indefinite", float(p))
        if p <= tol:
            # a PSD matrix has |a_kj|^2 <= a_kk * a_jj
            bound = 10.0 * np.sqrt(max(p, tol) * np.abs(np.diag(A)[k + 1 :]) + tol * tol)
            if np.any(np.abs(A[k + 1 :, k]) > bound):
                return SPDDiagnosis("indefinite", float(smallest))
            status = "semidefinite"
            continue
        col = A[k + 1 :, k] / p
        A[k + 1 :, k + 1 :] -= np.outer(col, A[k, k + 1 :])
    return SPDDiagnosis(status, float(smallest))
