"""Discrete error norms and log-log convergence-rate fits."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

NORMS = ("L1", "L2", "Linf", "W1", "native")
"""Norm tags in canonical output order; ``W1`` is the W_2^1 seminorm and
``native`` the RKHS norm."""


@dataclass
class ErrorRecord:
    """Errors of one refinement level."""

    n: int
    h: float
    errors: dict = field(default_factory=dict)
    jitter: float = 0.0

    def __post_init__(self):
        if not self.h > 0:
            raise ValueError(f"fill distance must be positive, got {self.h}")
        for tag, value in self.errors.items():
            if tag not in NORMS:
                raise ValueError(f"unknown norm tag {tag!r}")
            if not (value >= 0 and math.isfinite(value)):
                raise ValueError(f"error {tag}={value} is not finite and nonnegative")


@dataclass(frozen=True)
class RateEstimate:
    norm: str
    slope: float
    intercept: float
    r_squared: float
    levels_used: int
    excluded: int = 0


class RateFitError(ValueError):
    """Too few usable levels or invalid errors for a rate fit."""


def discrete_lp_error(f_values, s_values, p, cell_volume: float) -> float:
    """Riemann-sum L_p norm of ``f - s`` on a uniform grid; ``p`` in {1, 2, inf}."""
    f_values = np.asarray(f_values, dtype=float).ravel()
    s_values = np.asarray(s_values, dtype=float).ravel()
    if f_values.shape != s_values.shape:
        raise ValueError(f"length mismatch: {f_values.size} vs {s_values.size}")
    diff = np.abs(f_values - s_values)
    if p in (np.inf, "inf", "Linf"):
        return float(np.max(diff)) if diff.size else 0.0
    p = float(p)
    if p not in (1.0, 2.0):
        raise ValueError(f"unsupported exponent p={p}")
    return float((cell_volume * np.sum(diff**p)) ** (1.0 / p))


def _first_derivative(values, spacing):
    # second-order accurate everywhere, one-sided at the ends
    return np.gradient(values, spacing, edge_order=2)


def w1_seminorm_error(f_values, s_values, grid_spacing: float) -> float:
    """Discrete L2 norm of (f - s)' on a uniform 1D grid.

    Cells of width ``grid_spacing``, with half cells at the two ends so the
    weights add up to the interval length.
    """
    diff = np.asarray(f_values, dtype=float).ravel() - np.asarray(s_values, dtype=float).ravel()
    if diff.size < 3:
        raise ValueError("need at least 3 grid points")
    sq = _first_derivative(diff, grid_spacing) ** 2
    total = np.sum(sq) - 0.5 * (sq[0] + sq[-1])
    return float(np.sqrt(grid_spacing * total))


def error_norms(f_values, s_values, cell_volume: float, grid_spacing: float | None = None) -> dict:
    """All norm tags for one level; ``W1`` only when a 1D ``grid_spacing`` is given."""
    out = {
        "L1": discrete_lp_error(f_values, s_values, 1, cell_volume),
        "L2": discrete_lp_error(f_values, s_values, 2, cell_volume),
        "Linf": discrete_lp_error(f_values, s_values, np.inf, cell_volume),
    }
    if grid_spacing is not None:
        out["W1"] = w1_seminorm_error(f_values, s_values, grid_spacing)
    return out


def fit_rate(
    records,
    norm: str,
    drop_fraction: float = 0.2,
    *,
    dim: int = 1,
    against: str = "n",
    floor: float | None = None,
) -> RateEstimate:
    """Least-squares slope of log(error) against log(n).

    The slope is negated so that ``e ~ n^(-slope)``; ``dim`` multiplies it to
    express the rate as an exponent of the fill distance (h ~ n^(-1/d)).
    With ``against="h"`` the fit is done on log(h) directly.

    Levels below the error floor (``1e3 * eps`` times the largest error, unless
    ``floor`` is given) are excluded and counted in ``excluded``.
    """
    if not 0 <= drop_fraction < 1:
        raise ValueError("drop_fraction must lie in [0, 1)")
    usable = [r for r in records if norm in r.errors]
    usable.sort(key=lambda r: r.n)
    usable = usable[int(math.floor(drop_fraction * len(usable))) :]
    errors = np.array([r.errors[norm] for r in usable], dtype=float)
    if np.any(errors < 0) or not np.all(np.isfinite(errors)):
        raise RateFitError(f"invalid {norm} errors encountered")
    if floor is None:
        floor = 1e3 * np.finfo(float).eps * (errors.max() if errors.size else 0.0)
    keep = errors > floor
    excluded = int(np.count_nonzero(~keep))
    if np.count_nonzero(keep) < 2:
        raise RateFitError(f"fewer than 2 usable levels for {norm}")
    errors = errors[keep]
    kept = [r for r, k in zip(usable, keep) if k]
    if against == "n":
        x = np.log([r.n for r in kept])
        sign = -float(dim)
    elif against == "h":
        x = np.log([r.h for r in kept])
        sign = 1.0
    else:
        raise ValueError(f"against must be 'n' or 'h', got {against!r}")
    y = np.log(errors)
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    sst = np.sum((y - y.mean()) ** 2)
    r2 = 1.0 - np.sum(resid**2) / sst if sst > 0 else 1.0
    return RateEstimate(
        norm=norm,
        slope=float(sign * slope),
        intercept=float(intercept),
        r_squared=float(min(max(r2, 0.0), 1.0)),
        levels_used=len(kept),
        excluded=excluded,
    )
