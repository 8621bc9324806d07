"""Seeded estimation campaigns: matrix generation, execution, statistics, reports."""
from __future__ import annotations

import csv
import io
import json
import logging
import math
import re
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np

from .algebra import matrix_algebra
from .estimators import ESTIMATORS, SampleBatch, pooled, run_estimator
from .multilinear import (NAIVE_PERMANENT_MAX_N, RYSER_MAX_N, SizeGuardError, as_square, permanent_naive,
                          permanent_ryser)
from .sampling import sample_seeds
from .sdet import BRUTE_CDET_MAX_N, sdet_plan

log = logging.getLogger(__name__)

SCHEMA = 1
CHUNK = 1024
FAMILIES = ("identity", "all_ones", "bernoulli", "uniform01", "diagonal_ramp")
MAX_SDET_WORK_PER_SAMPLE = 1e8


class ConfigError(ValueError):
    pass


def parse_family(family) -> tuple[str, dict]:
    """``"bernoulli(0.3)"``, ``{"family": "bernoulli", "p": 0.3}`` or a bare name."""
    if isinstance(family, dict):
        params = {k: v for k, v in family.items() if k != "family"}
        name = family.get("family")
    else:
        m = re.fullmatch(r"\s*(\w+)\s*(?:\(\s*([^)]*)\s*\))?\s*", str(family))
        if not m:
            raise ConfigError(f"cannot parse matrix family {family!r}")
        name = m.group(1)
        params = {"p": float(m.group(2))} if m.group(2) else {}
    if name not in FAMILIES:
        raise ConfigError(f"unknown matrix family {name!r}; choose from {', '.join(FAMILIES)}")
    if name == "bernoulli":
        p = float(params.get("p", 0.5))
        if not 0.0 <= p <= 1.0:
            raise ConfigError(f"bernoulli parameter must lie in [0, 1], got {p}")
        params = {"p": p}
    return name, params


def generate_matrix(family, n: int, seed: int = 0) -> np.ndarray:
    name, params = parse_family(family)
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise ConfigError(f"matrix size must be a positive integer, got {n!r}")
    rng = np.random.default_rng(seed)
    if name == "identity":
        return np.eye(n)
    if name == "all_ones":
        return np.ones((n, n))
    if name == "bernoulli":
        return (rng.random((n, n)) < params["p"]).astype(np.float64)
    if name == "uniform01":
        return rng.random((n, n))
    return np.diag(np.arange(1.0, n + 1.0))


def read_matrix_csv(path) -> np.ndarray:
    try:
        M = np.loadtxt(path, delimiter=",", ndmin=2, dtype=np.float64)
    except ValueError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    return as_square(M, str(path))


@dataclass
class ExperimentConfig:
    matrix_source: object = "all_ones"
    n: int | None = None
    estimator: str = "sdet"
    d: int = 1
    samples: int = 1000
    master_seed: int = 0
    output: str | None = None
    quantiles: list = field(default_factory=lambda: [0.05, 0.25, 0.5, 0.75, 0.95])
    workers: int = 1
    independent_denominator: bool = False
    bootstrap: int = 0  # resamples for a bootstrap SE of the pooled ratio; 0 = off

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config fields: {', '.join(sorted(unknown))}")
        cfg = cls(**data)
        cfg.validate()
        return cfg

    @classmethod
    def load(cls, path) -> "ExperimentConfig":
        try:
            return cls.from_dict(json.loads(Path(path).read_text()))
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: invalid JSON ({exc})") from exc

    def is_file_source(self) -> bool:
        if isinstance(self.matrix_source, dict):
            return "path" in self.matrix_source
        return str(self.matrix_source).lower().endswith(".csv")

    def validate(self) -> None:
        if self.estimator not in ESTIMATORS:
            raise ConfigError(f"unknown estimator {self.estimator!r}; choose from {', '.join(ESTIMATORS)}")
        if not isinstance(self.samples, int) or self.samples < 1:
            raise ConfigError("samples must be >= 1")
        if not isinstance(self.d, int) or self.d < 1:
            raise ConfigError("d must be >= 1")
        if not isinstance(self.workers, int) or self.workers < 1:
            raise ConfigError("workers must be >= 1")
        if not isinstance(self.master_seed, int) or not 0 <= self.master_seed < 2**64:
            raise ConfigError("master_seed must be an unsigned 64-bit integer")
        if not isinstance(self.bootstrap, int) or self.bootstrap < 0:
            raise ConfigError("bootstrap must be a non-negative integer")
        if any(not 0.0 <= float(q) <= 1.0 for q in self.quantiles):
            raise ConfigError("quantiles must lie in [0, 1]")
        if not self.is_file_source():
            parse_family(self.matrix_source)
            if self.n is None or not isinstance(self.n, int) or self.n < 1:
                raise ConfigError("generated matrices need n >= 1")

    def echo(self) -> dict:
        out = asdict(self)
        out.pop("workers")
        out.pop("output")
        return out

    def matrix(self) -> np.ndarray:
        if self.is_file_source():
            src = self.matrix_source["path"] if isinstance(self.matrix_source, dict) else self.matrix_source
            A = read_matrix_csv(src)
            if self.n is not None and A.shape[0] != self.n:
                raise ConfigError(f"{src} is {A.shape[0]}x{A.shape[0]} but config says n = {self.n}")
            return A
        return generate_matrix(self.matrix_source, self.n, self.master_seed)


def check_feasible(estimator: str, d: int, n: int) -> None:
    """Raise :class:`SizeGuardError` with an actionable message if a cell is too big."""
    if estimator == "cdet" and n > BRUTE_CDET_MAX_N:
        raise SizeGuardError(f"cdet needs n <= {BRUTE_CDET_MAX_N}; use the sdet estimator for n = {n}")
    if estimator == "sdet":
        r = d * d
        if math.comb(n + r, r) * n**3 > MAX_SDET_WORK_PER_SAMPLE:
            raise SizeGuardError(
                f"sdet with d = {d} at n = {n} costs about {math.comb(n + r, r) * n**3:.2e} flops per sample "
                f"(limit {MAX_SDET_WORK_PER_SAMPLE:.0e}); lower d or n"
            )
        sdet_plan(matrix_algebra(d), n)


@dataclass
class EstimateReport:
    data: dict
    batch: SampleBatch
    timings: dict

    @property
    def pooled_estimate(self) -> float:
        return self.data["pooled"]["estimate"]


def _chunk_job(args) -> SampleBatch:
    estimator, A, d, master_seed, start, stop, indep = args
    return run_estimator(estimator, A, sample_seeds(master_seed, start, stop), d=d, independent_denominator=indep)


def run_samples(estimator: str, A: np.ndarray, d: int, samples: int, master_seed: int,
                workers: int = 1, independent_denominator: bool = False) -> SampleBatch:
    """Draw samples ``0..samples-1``; chunk boundaries are fixed, so worker count never changes bits."""
    jobs = [(estimator, A, d, master_seed, s, min(s + CHUNK, samples), independent_denominator)
            for s in range(0, samples, CHUNK)]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_chunk_job, jobs))
    else:
        parts = [_chunk_job(j) for j in jobs]
    return SampleBatch.concat(parts)


def _exact(A: np.ndarray) -> dict:
    n = A.shape[0]
    out = {}
    if n <= RYSER_MAX_N:
        out["exact_permanent"] = permanent_ryser(A)
    if n <= NAIVE_PERMANENT_MAX_N:
        out["exact_permanent_naive"] = permanent_naive(A)
    return out


def bootstrap_stderr(batch: SampleBatch, resamples: int, seed: int) -> float:
    """Bootstrap standard error of ``sum(num) / sum(den)``."""
    rng = np.random.default_rng([seed, 0xB007])
    N = len(batch)
    est = np.empty(resamples)
    for b in range(resamples):
        idx = rng.integers(0, N, size=N)
        est[b] = batch.numerators[idx].sum() / batch.denominators[idx].sum()
    return float(est.std(ddof=1))


def summarize(batch: SampleBatch, n: int, per: float | None, quantiles) -> dict:
    alphas = batch.alphas
    finite = alphas[np.isfinite(alphas)]
    P = pooled(batch.numerators, batch.denominators)
    out = {
        "pooled": {"estimate": P.estimate, "stderr": P.stderr, "samples": P.samples},
        "alpha": {
            "mean": float(finite.mean()) if len(finite) else None,
            "stderr": float(finite.std(ddof=1) / math.sqrt(len(finite))) if len(finite) > 1 else None,
            "undefined": int(len(alphas) - len(finite)),
        },
        "denominator": {
            "mean": float(batch.denominators.mean()),
            "stderr": float(batch.denominators.std(ddof=1) / math.sqrt(len(batch))) if len(batch) > 1 else None,
        },
    }
    den = out["denominator"]
    den["near_zero"] = bool(den["stderr"] is not None and den["mean"] <= 4 * den["stderr"])
    if len(quantiles) and len(finite):
        levels = sorted(float(q) for q in quantiles)
        qs = np.quantile(finite, levels)
        out["alpha"]["quantiles"] = {repr(q): float(v) for q, v in zip(levels, qs)}
    if per is not None and per > 0:
        pos = finite[finite > 0]
        lr = np.log(pos / per) / n
        out["log_ratio"] = {
            "mean": float(lr.mean()) if len(lr) else None,
            "variance": float(lr.var(ddof=1)) if len(lr) > 1 else None,
            "count": int(len(lr)),
            "zero_alpha": int(len(finite) - len(pos)),
        }
        root = np.maximum(finite, 0.0) / per
        root = root ** (1.0 / n)
        q25, q50, q75 = np.quantile(root, [0.25, 0.5, 0.75])
        out["root_ratio"] = {"median": float(q50), "iqr": float(q75 - q25)}
    return _finite_or_none(out)


def _finite_or_none(obj):
    # NaN/inf are not valid JSON
    if isinstance(obj, dict):
        return {k: _finite_or_none(v) for k, v in obj.items()}
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    return obj


def run_experiment(config: ExperimentConfig, write: bool = True) -> EstimateReport:
    config.validate()
    timings = {}
    t = time.perf_counter()
    A = config.matrix()
    if np.any(A < 0):
        raise ConfigError("matrix has negative entries")
    n = A.shape[0]
    check_feasible(config.estimator, config.d, n)
    timings["matrix"] = time.perf_counter() - t

    t = time.perf_counter()
    exact = _exact(A)
    timings["exact"] = time.perf_counter() - t

    t = time.perf_counter()
    batch = run_samples(config.estimator, A, config.d, config.samples, config.master_seed,
                        config.workers, config.independent_denominator)
    timings["sampling"] = time.perf_counter() - t

    t = time.perf_counter()
    data = {"schema": SCHEMA, "config": config.echo(), "n": n}
    data.update(exact)
    data.update(summarize(batch, n, exact.get("exact_permanent"), config.quantiles))
    if config.bootstrap and len(batch) > 1:
        data["pooled"]["bootstrap_stderr"] = _finite_or_none(
            bootstrap_stderr(batch, config.bootstrap, config.master_seed))
    timings["statistics"] = time.perf_counter() - t

    report = EstimateReport(data, batch, timings)
    if write and config.output:
        write_report(report, config.output)
    return report


def _g17(x: float) -> str:
    return format(float(x), ".17g")


def samples_csv(batch: SampleBatch) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["sample_index", "seed", "numerator", "denominator", "alpha"])
    alphas = batch.alphas
    for i in range(len(batch)):
        w.writerow([i, int(batch.seeds[i]), _g17(batch.numerators[i]), _g17(batch.denominators[i]), _g17(alphas[i])])
    return buf.getvalue()


def write_report(report: EstimateReport, path) -> dict:
    """Write ``report.json``, ``samples.csv`` and ``timings.json`` into directory ``path``."""
    out = Path(path)
    out.mkdir(parents=True, exist_ok=True)
    files = {
        "report.json": json.dumps(report.data, indent=2, sort_keys=True) + "\n",
        "samples.csv": samples_csv(report.batch),
        "timings.json": json.dumps(report.timings, indent=2, sort_keys=True) + "\n",
    }
    for name, text in files.items():
        (out / name).write_text(text)
    return {name: out / name for name in files}


def load_samples(path) -> tuple[np.ndarray, np.ndarray]:
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2, dtype=np.float64, usecols=(2, 3))
    return data[:, 0], data[:, 1]


@dataclass
class SweepConfig:
    family: object = "all_ones"
    estimator: str = "sdet"
    d_values: list = field(default_factory=lambda: [1, 2])
    n_values: list = field(default_factory=lambda: [3, 4, 5])
    samples: int = 1000
    master_seed: int = 0
    output: str | None = None
    workers: int = 1

    @classmethod
    def from_dict(cls, data: dict) -> "SweepConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown sweep fields: {', '.join(sorted(unknown))}")
        cfg = cls(**data)
        parse_family(cfg.family)
        if cfg.estimator not in ("sdet", "cdet") and any(d != 1 for d in cfg.d_values):
            raise ConfigError("classical estimators have no order d; use d_values = [1]")
        if cfg.samples < 1:
            raise ConfigError("samples must be >= 1")
        return cfg

    @classmethod
    def load(cls, path) -> "SweepConfig":
        try:
            return cls.from_dict(json.loads(Path(path).read_text()))
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: invalid JSON ({exc})") from exc


def sweep(config: SweepConfig) -> dict:
    """Median and IQR of ``(alpha / per A)^(1/n)`` for every (d, n) cell.

    Exploratory only: cells are reported, never compared.
    """
    cells = []
    for d in config.d_values:
        for n in config.n_values:
            cell = {"d": d, "n": n}
            try:
                check_feasible(config.estimator, d, n)
            except SizeGuardError as exc:
                cell.update(status="skipped", reason=str(exc))
                log.warning("skipping d=%s n=%s: %s", d, n, exc)
                cells.append(cell)
                continue
            exp = ExperimentConfig(config.family, n, config.estimator, d, config.samples,
                                   config.master_seed, None, [], config.workers)
            rep = run_experiment(exp, write=False)
            cell.update(
                status="ok",
                exact_permanent=rep.data.get("exact_permanent"),
                pooled_estimate=rep.data["pooled"]["estimate"],
                pooled_stderr=rep.data["pooled"]["stderr"],
            )
            if "root_ratio" in rep.data:
                cell.update(median_root_ratio=rep.data["root_ratio"]["median"], iqr_root_ratio=rep.data["root_ratio"]["iqr"])
            cells.append(cell)
    summary = {"schema": SCHEMA, "config": asdict(config), "cells": cells,
               "skipped": [f"d={c['d']} n={c['n']}" for c in cells if c["status"] == "skipped"]}
    summary["config"].pop("workers")
    summary["config"].pop("output")
    if config.output:
        out = Path(config.output)
        out.mkdir(parents=True, exist_ok=True)
        (out / "sweep.json").write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    return summary


def format_sweep(summary: dict) -> str:
    lines = [f"{'d':>3} {'n':>3} {'per':>12} {'median':>10} {'iqr':>10}  status"]
    for c in summary["cells"]:
        if c["status"] == "ok":
            per = c["exact_permanent"]
            lines.append(f"{c['d']:>3} {c['n']:>3} {'-' if per is None else format(per, '.6g'):>12} "
                         f"{c.get('median_root_ratio', float('nan')):>10.4f} {c.get('iqr_root_ratio', float('nan')):>10.4f}  ok")
        else:
            lines.append(f"{c['d']:>3} {c['n']:>3} {'':>12} {'':>10} {'':>10}  skipped: {c['reason']}")
    return "\n".join(lines)
