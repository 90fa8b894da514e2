"""Experiment suites: refinement sweeps, rate fits and result serialization."""

from __future__ import annotations

import csv
import dataclasses
import io
import json
import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .green import GreenKernelW22
from .interpolation import (
    SolveOptions,
    UnsolvableSystemError,
    equispaced_interior,
    fill_distance,
    fit_interpolant,
    native_error,
    native_norm_sq,
)
from .kernels import GREEN_W22, KernelSpec, kernel_from_id
from .metrics import ErrorRecord, RateEstimate, RateFitError, error_norms, fit_rate
from .targets import bc_target, expansion_target, power_target, random_periodic_target

log = logging.getLogger(__name__)

SUITES = ("sobolev-rates", "saturation", "boundary-conditions", "periodic", "expansion-superconvergence")
NORM_ORDER = ("L1", "L2", "Linf", "W1", "native")

NODES_1D = (16, 23, 32, 45, 64, 91, 128, 181, 256)
NODES_2D = (4, 6, 8, 11, 16, 23, 32)

# a level whose Gram solve needed more relative jitter than this ends its sweep
JITTER_ABORT = 1e-10

_SUITE_DEFAULTS = {
    "sobolev-rates": {"kernel": "matern-basic", "alphas": [0.55, 0.7, 0.9, 1.7, 1.9]},
    "saturation": {
        "kernel": "wendland-1",
        "alphas": [0.5, 0.9, 1.2, 1.9, 2.4, 3.0],
        "include_boundary": True,
    },
    "boundary-conditions": {
        "kernel": "green-w22",
        "alphas": list(np.linspace(1.5, 6.0, 20)),
        "targets": ["bc1", "bc2", "bc3"],
    },
    "periodic": {"kernel": "periodic-r1", "alphas": [0.3, 0.8, 1.3, 1.8]},
    "expansion-superconvergence": {"kernel": "matern-basic", "alphas": [0.0], "replicates": 5},
}

_ALLOWED_KERNELS = {
    "sobolev-rates": ("matern-basic", "matern-linear", "matern-quadratic"),
    "saturation": ("wendland-1",),
    "boundary-conditions": ("green-w22",),
    "periodic": ("periodic-r1", "periodic-r2"),
    "expansion-superconvergence": ("matern-basic", "matern-linear"),
}


@dataclass
class ExperimentConfig:
    suite: str
    kernel: str | None = None
    d: int = 1
    alphas: list | None = None
    nodes: list | None = None
    eval_grid: int | None = None
    include_boundary: bool | None = None
    targets: list | None = None
    replicates: int | None = None
    seed: int = 0
    drop_fraction: float = 0.2
    terms: int = 1000
    expansion_sites: int = 10
    w22_resolution: int = 256
    workers: int = 1
    output: str | None = None
    format: str = "csv"

    def __post_init__(self):
        if self.suite not in SUITES:
            raise ValueError(f"unknown suite {self.suite!r}; choose from {', '.join(SUITES)}")
        defaults = _SUITE_DEFAULTS[self.suite]
        if self.kernel is None:
            self.kernel = defaults["kernel"]
        if self.alphas is None:
            self.alphas = list(defaults["alphas"])
        if self.include_boundary is None:
            self.include_boundary = defaults.get("include_boundary", False)
        if self.targets is None and "targets" in defaults:
            self.targets = list(defaults["targets"])
        if self.replicates is None:
            self.replicates = defaults.get("replicates", 25)
        if self.nodes is None:
            self.nodes = list(NODES_1D if self.d == 1 else NODES_2D)
        if self.eval_grid is None:
            self.eval_grid = 2048 if self.d == 1 else 256
        self.alphas = [float(a) for a in self.alphas]
        self.nodes = [int(n) for n in self.nodes]
        if self.kernel not in _ALLOWED_KERNELS[self.suite]:
            raise ValueError(
                f"suite {self.suite} supports kernels {_ALLOWED_KERNELS[self.suite]}, got {self.kernel}"
            )
        if self.d not in (1, 2) or (self.d == 2 and self.suite != "sobolev-rates"):
            raise ValueError(f"suite {self.suite} does not support d={self.d}")
        if not self.alphas:
            raise ValueError("alpha grid must be nonempty")
        if len(self.nodes) < 4 or any(b <= a for a, b in zip(self.nodes, self.nodes[1:])):
            raise ValueError("node counts must be strictly increasing with at least 4 levels")
        if self.format not in ("csv", "json"):
            raise ValueError(f"format must be csv or json, got {self.format!r}")
        if not 0 <= self.drop_fraction < 1:
            raise ValueError("drop_fraction must lie in [0, 1)")
        if self.replicates < 1:
            raise ValueError("replicates must be >= 1")

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        names = {f.name for f in dataclasses.fields(cls)}
        clean = {k.replace("-", "_"): v for k, v in data.items()}
        unknown = set(clean) - names
        if unknown:
            raise ValueError(f"unknown config keys: {', '.join(sorted(unknown))}")
        return cls(**clean)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


@dataclass
class Series:
    """One refinement sweep: a fixed target, its error records and rates."""

    target: str
    alpha: float
    seed: int | None
    records: list = field(default_factory=list)
    rates: dict = field(default_factory=dict)
    warnings: list = field(default_factory=list)
    failed_levels: int = 0
    unstable: bool = False
    seconds: list = field(default_factory=list, compare=False)


@dataclass
class RunResult:
    config: dict
    series: list = field(default_factory=list)
    summary: list = field(default_factory=list)

    @property
    def warnings(self) -> list:
        return [w for s in self.series for w in s.warnings]

    @property
    def level_failures(self) -> int:
        return sum(s.failed_levels for s in self.series)

    def rate(self, alpha, norm="L2", target=None, seed=None) -> float:
        """Fitted rate of the first series matching ``alpha`` (and target/seed)."""
        for s in self.series:
            if (
                math.isclose(s.alpha, alpha, abs_tol=1e-9)
                and (target is None or s.target == target)
                and (seed is None or s.seed == seed)
            ):
                return s.rates[norm].slope
        raise KeyError(f"no series with alpha={alpha}, target={target}, seed={seed}")

    def mean_rate(self, alpha, norm="L2", target=None) -> float:
        for row in self.summary:
            if math.isclose(row["alpha"], alpha, abs_tol=1e-9) and (
                target is None or row["target"] == target
            ) and row["norm"] == norm:
                return row["mean"]
        raise KeyError(f"no summary for alpha={alpha}, norm={norm}")


# ---------------------------------------------------------------------------
# sweeps


def _eval_grid(size, d):
    line = np.linspace(0.0, 1.0, size)
    if d == 1:
        return line[:, None]
    g0, g1 = np.meshgrid(line, line, indexing="ij")
    return np.column_stack([g0.ravel(), g1.ravel()])


def _make_kernel(config: ExperimentConfig) -> KernelSpec:
    if config.kernel == GREEN_W22:
        return KernelSpec(GREEN_W22, w22=GreenKernelW22(config.w22_resolution))
    return kernel_from_id(config.kernel, d=config.d)


def _fit_rates(series: Series, config: ExperimentConfig, norms, floors=None):
    if len(series.records) < 4:
        series.warnings.append(
            f"{series.target} alpha={series.alpha:g}: only {len(series.records)} levels, no rate fitted"
        )
        return
    for norm in norms:
        try:
            series.rates[norm] = fit_rate(
                series.records,
                norm,
                config.drop_fraction,
                dim=config.d,
                floor=(floors or {}).get(norm),
            )
        except RateFitError as exc:
            series.warnings.append(f"{series.target} alpha={series.alpha:g} {norm}: {exc}")


def _interpolation_sweep(series, kernel, target, config, grid, opts):
    d = config.d
    f_grid = target(grid)
    cell_volume = 1.0 / len(grid)
    spacing = 1.0 / (config.eval_grid - 1) if d == 1 else None
    for n in config.nodes:
        start = time.perf_counter()
        X = equispaced_interior(n, d, config.include_boundary)
        try:
            s = fit_interpolant(kernel, X, target(X), opts)
        except UnsolvableSystemError as exc:
            series.failed_levels += 1
            series.warnings.append(f"{series.target} alpha={series.alpha:g} n={len(X)}: {exc}")
            break
        errors = error_norms(f_grid, s(grid), cell_volume, spacing)
        series.records.append(ErrorRecord(len(X), fill_distance(X, grid), errors, s.jitter_applied))
        series.seconds.append(time.perf_counter() - start)
        if s.jitter_applied > JITTER_ABORT:
            series.failed_levels += 1
            series.warnings.append(
                f"{series.target} alpha={series.alpha:g} n={len(X)}: jitter "
                f"{s.jitter_applied:.1e} exceeds {JITTER_ABORT:.0e}, sweep stopped"
            )
            break
        if s.jitter_applied > 0:
            series.warnings.append(
                f"{series.target} alpha={series.alpha:g} n={len(X)}: jitter {s.jitter_applied:.1e}"
            )
    norms = ("L1", "L2", "Linf", "W1") if d == 1 else ("L1", "L2", "Linf")
    _fit_rates(series, config, norms)
    return series


def _expansion_sweep(series, kernel, config, grid, opts):
    target = expansion_target(kernel, config.expansion_sites, series.seed)
    v = target.data
    vsq = native_norm_sq(v)
    for n in config.nodes:
        start = time.perf_counter()
        X = equispaced_interior(n, config.d, config.include_boundary)
        try:
            res = native_error(v, X, opts)
        except (UnsolvableSystemError, ArithmeticError) as exc:
            series.failed_levels += 1
            series.warnings.append(f"expansion seed={series.seed} n={len(X)}: {exc}")
            break
        jitter = res.interpolant.jitter_applied
        series.records.append(
            ErrorRecord(len(X), fill_distance(X, grid), {"native": math.sqrt(res.error_sq)}, jitter)
        )
        series.seconds.append(time.perf_counter() - start)
        if np.min(np.abs(X[:, None, :] - v.sites[None, :, :]).sum(-1)) < 1e-12:
            series.warnings.append(
                f"expansion seed={series.seed} n={len(X)}: expansion sites coincide with nodes"
            )
        if jitter > JITTER_ABORT:
            series.failed_levels += 1
            series.warnings.append(f"expansion seed={series.seed} n={len(X)}: jitter {jitter:.1e}")
            break
    # the squared error is a difference of two O(||v||^2) numbers, so the
    # floor applies to error^2 relative to ||v||^2
    floor = math.sqrt(1e3 * np.finfo(float).eps * vsq)
    _fit_rates(series, config, ("native",), floors={"native": floor})
    return series


def _work_items(config: ExperimentConfig):
    suite = config.suite
    for alpha in config.alphas:
        if suite == "periodic":
            for r in range(config.replicates):
                yield ("random-periodic", alpha, config.seed + r)
        elif suite == "expansion-superconvergence":
            pass
        elif suite == "boundary-conditions":
            for t in config.targets:
                yield (t, alpha, None)
        else:
            yield ("power", alpha, None)
    if suite == "expansion-superconvergence":
        for r in range(config.replicates):
            yield ("expansion", config.alphas[0], config.seed + r)


def _make_target(name, alpha, seed, config):
    if name == "power":
        return power_target(alpha, config.d)
    if name in ("bc1", "bc2", "bc3"):
        return bc_target(int(name[-1]), alpha)
    if name == "random-periodic":
        return random_periodic_target(alpha, seed, config.terms)
    raise ValueError(f"unknown target {name!r}")


def run(config: ExperimentConfig, opts: SolveOptions | None = None) -> RunResult:
    """Run the suite named by ``config.suite``."""
    opts = opts or SolveOptions()
    kernel = _make_kernel(config)
    grid = _eval_grid(config.eval_grid, config.d)

    def work(item):
        name, alpha, seed = item
        series = Series(name, alpha, seed, unstable=name != "expansion" and float(alpha).is_integer())
        if name == "expansion":
            return _expansion_sweep(series, kernel, config, grid, opts)
        target = _make_target(name, alpha, seed, config)
        return _interpolation_sweep(series, kernel, target, config, grid, opts)

    items = list(_work_items(config))
    if config.workers > 1:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            series = list(pool.map(work, items))
    else:
        series = [work(item) for item in items]

    result = RunResult(config.to_dict(), series)
    if config.suite in ("periodic", "expansion-superconvergence"):
        result.summary = _summarize(series)
    for s in series:
        for w in s.warnings:
            log.warning(w)
    return result


def _summarize(series):
    groups = {}
    for s in series:
        for norm, est in s.rates.items():
            groups.setdefault((s.target, s.alpha, norm), []).append(est.slope)
    rows = []
    for (target, alpha, norm), slopes in groups.items():
        slopes = np.asarray(slopes)
        rows.append(
            {
                "target": target,
                "alpha": alpha,
                "norm": norm,
                "mean": float(np.mean(slopes)),
                "std": float(np.std(slopes, ddof=1)) if len(slopes) > 1 else 0.0,
                "min": float(np.min(slopes)),
                "replicates": int(len(slopes)),
            }
        )
    rows.sort(key=lambda r: (r["target"], r["alpha"], NORM_ORDER.index(r["norm"])))
    return rows


def run_sobolev_rates(config: ExperimentConfig, **kwargs) -> RunResult:
    return run(dataclasses.replace(config, suite="sobolev-rates"), **kwargs)


def run_saturation(config: ExperimentConfig, **kwargs) -> RunResult:
    """Wendland sweep; also reports whether any L2 rate for alpha >= 2 exceeds 2.05."""
    result = run(dataclasses.replace(config, suite="saturation"), **kwargs)
    over = [s.alpha for s in result.series if s.alpha >= 2 and "L2" in s.rates and s.rates["L2"].slope > 2.05]
    result.config["saturation_exceeded"] = over
    return result


def run_boundary_conditions(config: ExperimentConfig, **kwargs) -> RunResult:
    return run(dataclasses.replace(config, suite="boundary-conditions"), **kwargs)


def run_periodic(config: ExperimentConfig, **kwargs) -> RunResult:
    return run(dataclasses.replace(config, suite="periodic"), **kwargs)


def run_expansion_superconvergence(config: ExperimentConfig, **kwargs) -> RunResult:
    return run(dataclasses.replace(config, suite="expansion-superconvergence"), **kwargs)


# ---------------------------------------------------------------------------
# serialization

RECORD_COLUMNS = ("suite", "kernel", "d", "target", "alpha", "seed", "norm", "n", "h", "error", "jitter")
RATE_COLUMNS = ("suite", "kernel", "d", "target", "alpha", "seed", "norm", "rate", "r_squared", "levels_used", "unstable")
SUMMARY_COLUMNS = ("suite", "kernel", "d", "target", "alpha", "norm", "mean", "std", "min", "replicates")


def _fmt(value):
    if value is None:
        return ""
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def _sorted_series(result):
    return sorted(
        result.series,
        key=lambda s: (s.target, s.alpha, -1 if s.seed is None else s.seed),
    )


def record_rows(result: RunResult):
    cfg = result.config
    for s in _sorted_series(result):
        for rec in sorted(s.records, key=lambda r: r.n):
            for norm in NORM_ORDER:
                if norm in rec.errors:
                    yield (cfg["suite"], cfg["kernel"], cfg["d"], s.target, s.alpha, s.seed,
                           norm, rec.n, rec.h, rec.errors[norm], rec.jitter)


def rate_rows(result: RunResult):
    cfg = result.config
    for s in _sorted_series(result):
        for norm in NORM_ORDER:
            if norm in s.rates:
                est = s.rates[norm]
                yield (cfg["suite"], cfg["kernel"], cfg["d"], s.target, s.alpha, s.seed,
                       norm, est.slope, est.r_squared, est.levels_used, int(s.unstable))


def summary_rows(result: RunResult):
    cfg = result.config
    for row in result.summary:
        yield (cfg["suite"], cfg["kernel"], cfg["d"], row["target"], row["alpha"], row["norm"],
               row["mean"], row["std"], row["min"], row["replicates"])


def _csv_text(columns, rows):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def companion_paths(path) -> dict:
    """File names written by :func:`emit` in CSV format."""
    path = Path(path)
    stem = path.with_suffix("")
    return {
        "records": path,
        "rates": Path(f"{stem}.rates.csv"),
        "summary": Path(f"{stem}.summary.csv"),
    }


def to_json_dict(result: RunResult) -> dict:
    return {
        "config": result.config,
        "series": [
            {
                "target": s.target,
                "alpha": s.alpha,
                "seed": s.seed,
                "unstable": s.unstable,
                "failed_levels": s.failed_levels,
                "warnings": list(s.warnings),
                "records": [
                    {"n": r.n, "h": r.h, "jitter": r.jitter,
                     "errors": {k: r.errors[k] for k in NORM_ORDER if k in r.errors}}
                    for r in sorted(s.records, key=lambda r: r.n)
                ],
                "rates": {
                    norm: dataclasses.asdict(s.rates[norm]) for norm in NORM_ORDER if norm in s.rates
                },
            }
            for s in _sorted_series(result)
        ],
        "summary": result.summary,
    }


def from_json_dict(data: dict) -> RunResult:
    series = []
    for item in data["series"]:
        series.append(
            Series(
                target=item["target"],
                alpha=item["alpha"],
                seed=item["seed"],
                records=[ErrorRecord(r["n"], r["h"], dict(r["errors"]), r["jitter"]) for r in item["records"]],
                rates={k: RateEstimate(**v) for k, v in item["rates"].items()},
                warnings=list(item["warnings"]),
                failed_levels=item["failed_levels"],
                unstable=item["unstable"],
            )
        )
    return RunResult(data["config"], series, list(data["summary"]))


def emit(result: RunResult, fmt: str = "csv", path=None) -> list:
    """Write ``result`` to ``path``; returns the list of files written.

    CSV writes the error records to ``path`` plus ``<stem>.rates.csv`` (and
    ``<stem>.summary.csv`` for replicate suites); JSON writes one document.
    """
    if path is None:
        raise ValueError("emit needs an output path")
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        if fmt == "json":
            text = json.dumps(to_json_dict(result), indent=1, sort_keys=False) + "\n"
            path.write_text(text)
            return [path]
        if fmt != "csv":
            raise ValueError(f"unknown format {fmt!r}")
        paths = companion_paths(path)
        paths["records"].write_text(_csv_text(RECORD_COLUMNS, record_rows(result)))
        paths["rates"].write_text(_csv_text(RATE_COLUMNS, rate_rows(result)))
        written = [paths["records"], paths["rates"]]
        if result.summary:
            paths["summary"].write_text(_csv_text(SUMMARY_COLUMNS, summary_rows(result)))
            written.append(paths["summary"])
        return written
    except OSError as exc:
        raise OSError(f"could not write results to {path}: {exc}") from exc


def load_json(path) -> RunResult:
    return from_json_dict(json.loads(Path(path).read_text()))
