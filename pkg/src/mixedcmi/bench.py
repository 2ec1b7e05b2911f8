"""Replicated simulation grid: scenarios x estimators x sample sizes.

Every estimator in a cell sees the same simulated datasets. The seed of a
replicate depends only on (base seed, scenario, n, replicate index), and one
neighbor search per dataset feeds all estimators.
"""

from __future__ import annotations

import csv
import io
import json
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .estimators import EstimatorKind, check_roles, local_xi
from .knn import batch_profiles
from .numerics import mean
from .simulators import Scenario, ScenarioSpec, generate, truth

log = logging.getLogger(__name__)

SCHEMA_VERSION = 1
QUANTILES = (5, 25, 50, 75, 95)
DEFAULT_ESTIMATORS = (
    EstimatorKind.PROPOSED,
    EstimatorKind.FP,
    EstimatorKind.RAVK1,
    EstimatorKind.RAVK2,
)
_SCENARIO_ORDER = list(Scenario)


@dataclass(frozen=True)
class BenchConfig:
    scenarios: tuple[Scenario, ...] = tuple(Scenario)
    estimators: tuple[EstimatorKind, ...] = DEFAULT_ESTIMATORS
    n_grid: tuple[int, ...] = tuple(range(100, 1001, 100))
    replications: int = 100
    k: int = 7
    base_seed: int = 0
    clamp: bool = False

    def __post_init__(self):
        if self.replications < 1:
            raise ValueError("replications must be >= 1")
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if any(n < 1 for n in self.n_grid):
            raise ValueError("sample sizes must be positive")

    def to_dict(self) -> dict:
        return {
            "scenarios": [s.value for s in self.scenarios],
            "estimators": [e.value for e in self.estimators],
            "n_grid": list(self.n_grid),
            "replications": self.replications,
            "k": self.k,
            "base_seed": self.base_seed,
            "clamp": self.clamp,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "BenchConfig":
        return cls(
            scenarios=tuple(Scenario(s) for s in d["scenarios"]),
            estimators=tuple(EstimatorKind(e) for e in d["estimators"]),
            n_grid=tuple(int(n) for n in d["n_grid"]),
            replications=int(d["replications"]),
            k=int(d["k"]),
            base_seed=int(d["base_seed"]),
            clamp=bool(d["clamp"]),
        )


def replicate_seed(base_seed: int, scenario: Scenario, n: int, rep: int) -> int:
    """64-bit seed of one simulated dataset; shared by all estimators."""
    seq = np.random.SeedSequence(
        entropy=base_seed, spawn_key=(_SCENARIO_ORDER.index(scenario), n, rep)
    )
    return int(seq.generate_state(1, dtype=np.uint64)[0])


@dataclass
class BenchCell:
    scenario: Scenario
    estimator: EstimatorKind
    n: int
    truth: float
    raw: list[float] = field(default_factory=list)
    seeds: list[int] = field(default_factory=list)
    error: str | None = None

    @property
    def ok(self) -> bool:
        return self.error is None and bool(self.raw)

    @property
    def mean(self) -> float:
        return mean(self.raw) if self.raw else float("nan")

    @property
    def min(self) -> float:
        return min(self.raw) if self.raw else float("nan")

    @property
    def max(self) -> float:
        return max(self.raw) if self.raw else float("nan")

    @property
    def variance(self) -> float:
        return float(np.var(self.raw, ddof=1)) if len(self.raw) > 1 else float("nan")

    @property
    def quantiles(self) -> dict[int, float]:
        if not self.raw:
            return {q: float("nan") for q in QUANTILES}
        vals = np.quantile(np.asarray(self.raw), [q / 100 for q in QUANTILES])
        return {q: float(v) for q, v in zip(QUANTILES, vals)}

    def to_dict(self) -> dict:
        return {
            "scenario": self.scenario.value,
            "estimator": self.estimator.value,
            "n": self.n,
            "truth": self.truth,
            "mean": _json_float(self.mean),
            "min": _json_float(self.min),
            "max": _json_float(self.max),
            "quantiles": {str(q): _json_float(v) for q, v in self.quantiles.items()},
            "raw": list(self.raw),
            "seeds": list(self.seeds),
            "error": self.error,
        }


def _json_float(v: float):
    return None if v != v else v


@dataclass
class BenchReport:
    config: BenchConfig
    cells: list[BenchCell]

    def cell(self, scenario: Scenario, estimator: EstimatorKind, n: int) -> BenchCell:
        for c in self.cells:
            if c.scenario is scenario and c.estimator is estimator and c.n == n:
                return c
        raise KeyError((scenario, estimator, n))

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "config": self.config.to_dict(),
            "cells": [c.to_dict() for c in self.cells],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "BenchReport":
        if d.get("schema_version") != SCHEMA_VERSION:
            raise ValueError(f"unsupported report schema {d.get('schema_version')!r}")
        cells = [
            BenchCell(
                Scenario(c["scenario"]),
                EstimatorKind(c["estimator"]),
                int(c["n"]),
                float(c["truth"]),
                [float(v) for v in c["raw"]],
                [int(s) for s in c["seeds"]],
                c["error"],
            )
            for c in d["cells"]
        ]
        return cls(BenchConfig.from_dict(d["config"]), cells)


def _run_cell_group(config: BenchConfig, scenario: Scenario, n: int) -> list[BenchCell]:
    """All estimator cells of one (scenario, n) pair, on shared datasets."""
    value = truth(scenario).value
    cells = {e: BenchCell(scenario, e, n, value) for e in config.estimators}
    for rep in range(config.replications):
        seed = replicate_seed(config.base_seed, scenario, n, rep)
        live = [e for e, c in cells.items() if c.error is None]
        if not live:
            break
        try:
            ds, roles = generate(ScenarioSpec(scenario, n, seed))
            table = batch_profiles(ds, roles, config.k)
        except Exception as exc:  # noqa: BLE001 -- failures are recorded per cell
            for e in live:
                cells[e].error = f"replicate {rep} (seed {seed}): {exc}"
            continue
        for e in live:
            cell = cells[e]
            try:
                check_roles(e, roles)
                xi = local_xi(e, table, ds.n)
                if not np.all(np.isfinite(xi)):
                    raise FloatingPointError("non-finite local estimate")
                est = mean(xi)
                if config.clamp:
                    est = max(est, 0.0)
            except Exception as exc:  # noqa: BLE001
                cell.error = f"replicate {rep} (seed {seed}): {exc}"
                continue
            cell.raw.append(est)
            cell.seeds.append(seed)
    for cell in cells.values():
        if cell.error is not None:
            cell.raw.clear()
            cell.seeds.clear()
    return [cells[e] for e in config.estimators]


def run_bench(config: BenchConfig, workers: int | None = None) -> BenchReport:
    """Run the full grid; ``workers`` > 1 spreads (scenario, n) groups over processes."""
    jobs = [(s, n) for s in config.scenarios for n in config.n_grid]
    if workers and workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(_run_cell_group, config, s, n) for s, n in jobs]
            groups = [f.result() for f in futures]
    else:
        groups = []
        for s, n in jobs:
            log.info("bench %s n=%d", s.value, n)
            groups.append(_run_cell_group(config, s, n))
    by_key = {(c.scenario, c.estimator, c.n): c for g in groups for c in g}
    cells = [
        by_key[(s, e, n)]
        for s in config.scenarios
        for e in config.estimators
        for n in config.n_grid
    ]
    return BenchReport(config, cells)


CSV_FIELDS = (
    "record",
    "scenario",
    "estimator",
    "n",
    "replication",
    "seed",
    "estimate",
    "truth",
    "mean",
    "min",
    "max",
    *(f"q{q:02d}" for q in QUANTILES),
    "error",
)


def export_report(report: BenchReport, fmt: str = "json") -> bytes:
    """Serialize a report. JSON mirrors the report; CSV is long-form.

    The CSV holds one ``replicate`` row per simulated dataset and one
    ``summary`` row per cell.
    """
    fmt = fmt.lower()
    if fmt == "json":
        return (json.dumps(report.to_dict(), indent=2) + "\n").encode()
    if fmt != "csv":
        raise ValueError(f"unknown report format {fmt!r}")
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_FIELDS)
    for cell in report.cells:
        for rep, (seed, est) in enumerate(zip(cell.seeds, cell.raw)):
            writer.writerow(
                ["replicate", cell.scenario.value, cell.estimator.value, cell.n, rep, seed,
                 _num(est), _num(cell.truth)] + [""] * (4 + len(QUANTILES))
            )
        qs = cell.quantiles
        stats = [cell.mean, cell.min, cell.max] + [qs[q] for q in QUANTILES]
        writer.writerow(
            ["summary", cell.scenario.value, cell.estimator.value, cell.n, "", "", "",
             _num(cell.truth)]
            + ["" if v != v else _num(v) for v in stats]
            + [cell.error or ""]
        )
    return buf.getvalue().encode()


def _num(v) -> str:
    return repr(float(v))


def load_report(data: bytes) -> BenchReport:
    return BenchReport.from_dict(json.loads(data))
