"""Repeated-split accuracy experiments for the two case-study protocols."""

from __future__ import annotations

import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from decimal import ROUND_HALF_UP, Decimal

import numpy as np

from .dataset import DatasetError, DatasetManifest, SplitSpec, make_split
from .recognizer import recognize
from .trainer import TrainerConfig, train

__all__ = [
    "TABLE1_ROWS",
    "TABLE2_ROWS",
    "CellResult",
    "RowResult",
    "ExperimentReport",
    "run_case_study_1",
    "run_case_study_2",
    "report_render",
    "round_half_up",
    "spearman",
]

log = logging.getLogger(__name__)

# (persons or images-per-person, probe count, reported accuracy %) as published
TABLE1_ROWS = [(8, 40, 87.5), (16, 55, 82.1), (20, 80, 79.4), (26, 120, 75.7), (32, 150, 72.1)]
TABLE2_ROWS = [(2, 50, 72.0), (3, 70, 74.6), (4, 90, 78.0), (5, 120, 80.2), (6, 150, 84.0)]

DEFAULT_SEEDS = tuple(range(1, 11))


@dataclass
class CellResult:
    seed: int
    probes: int
    correct: int
    train_seconds: float
    recognize_seconds: float

    @property
    def accuracy(self) -> float:
        return 100.0 * self.correct / self.probes if self.probes else math.nan


@dataclass
class RowResult:
    param: int  # persons (cs1) or images per person (cs2)
    nii: int | None  # requested probe count, None = all remaining
    cells: list[CellResult] = field(default_factory=list)

    @property
    def accuracies(self) -> list[float]:
        return [c.accuracy for c in self.cells]

    @property
    def mean_accuracy(self) -> float:
        return float(np.mean(self.accuracies)) if self.cells else math.nan

    @property
    def std_accuracy(self) -> float:
        return float(np.std(self.accuracies, ddof=1)) if len(self.cells) > 1 else 0.0

    @property
    def probe_count(self) -> int:
        counts = {c.probes for c in self.cells}
        return counts.pop() if len(counts) == 1 else round(float(np.mean(list(counts))))


@dataclass
class ExperimentReport:
    protocol: str  # "cs1" or "cs2"
    seeds: list[int]
    rows: list[RowResult] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)
    probe_source: str = "test"


def _run_cell(manifest, spec: SplitSpec, cfg: TrainerConfig, probe_source: str) -> CellResult:
    split = make_split(manifest, spec)
    t0 = time.perf_counter()
    model = train(split.training, cfg)
    t1 = time.perf_counter()
    if probe_source == "train":
        probes = [(lab, vec) for lab, vecs in split.training.classes.items() for vec in vecs]
    else:
        probes = [(lab, s.vector) for lab, s in split.probes]
    correct = sum(recognize(model, vec).best_class == lab for lab, vec in probes)
    t2 = time.perf_counter()
    return CellResult(spec.seed, len(probes), correct, t1 - t0, t2 - t1)


def _run(protocol, manifest, rows, seeds, cfg, probe_source, workers, make_spec):
    if probe_source not in ("test", "train"):
        raise ValueError("probe_source must be 'test' or 'train'")
    seeds = list(DEFAULT_SEEDS if seeds is None else seeds)
    report = ExperimentReport(protocol, seeds, probe_source=probe_source)
    jobs = {}
    for param, nii in rows:
        specs = []
        try:
            specs = [make_spec(param, seed, nii) for seed in seeds]
            for spec in specs:  # feasibility is checked up front so a row fails as a unit
                make_split(manifest, spec)
        except (DatasetError, ValueError) as exc:
            msg = f"row {param} (nii={nii}) skipped: {exc}"
            log.warning(msg)
            report.warnings.append(msg)
            continue
        row = RowResult(param, nii)
        report.rows.append(row)
        for spec in specs:
            jobs[(len(report.rows) - 1, spec.seed)] = spec

    def work(key):
        return key, _run_cell(manifest, jobs[key], cfg, probe_source)

    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            results = dict(pool.map(work, jobs))
    else:
        results = dict(map(work, jobs))
    for (i, _seed), cell in sorted(results.items()):
        report.rows[i].cells.append(cell)
    return report


def run_case_study_1(manifest: DatasetManifest, rows, seeds=None,
                     cfg: TrainerConfig = TrainerConfig(), probe_source: str = "test",
                     workers: int = 1) -> ExperimentReport:
    """One training image per person. ``rows`` is a list of ``(num_persons, nii)``."""
    return _run("cs1", manifest, rows, seeds, cfg, probe_source, workers,
                lambda n, seed, nii: SplitSpec.case_study_1(n, seed, nii))


def run_case_study_2(manifest: DatasetManifest, rows, seeds=None,
                     cfg: TrainerConfig = TrainerConfig(), num_persons: int = 32,
                     probe_source: str = "test", workers: int = 1) -> ExperimentReport:
    """Several training images for each of ``num_persons`` persons.
    ``rows`` is a list of ``(images_per_person, nii)``."""
    return _run("cs2", manifest, rows, seeds, cfg, probe_source, workers,
                lambda n, seed, nii: SplitSpec.case_study_2(n, seed, nii, num_persons))


def round_half_up(value: float, places: int = 1) -> str:
    if math.isnan(value):
        return "nan"
    quantum = Decimal(1).scaleb(-places)
    return str(Decimal(repr(value)).quantize(quantum, rounding=ROUND_HALF_UP))


def spearman(x, y) -> float:
    """Spearman rank correlation (average ranks for ties)."""
    from scipy.stats import spearmanr

    return float(spearmanr(x, y).statistic)


def report_render(report: ExperimentReport) -> tuple[str, list[str]]:
    """Render as a fixed-width table plus ``key=value`` records, one per row."""
    first = "NITDS" if report.protocol == "cs1" else "NIPP"
    header = f"{first:>6} {'NII':>6} {'EKRM(%)':>8} {'SD':>6} {'SEEDS':>5}"
    lines = [header, "-" * len(header)]
    records = []
    for row in report.rows:
        mean, sd = round_half_up(row.mean_accuracy), round_half_up(row.std_accuracy)
        lines.append(f"{row.param:>6} {row.probe_count:>6} {mean:>8} {sd:>6} {len(row.cells):>5}")
        per_seed = ",".join(round_half_up(a, 2) for a in row.accuracies)
        records.append(
            f"protocol={report.protocol} {first.lower()}={row.param} nii={row.probe_count} "
            f"seeds={len(row.cells)} mean={row.mean_accuracy!r} sd={row.std_accuracy!r} "
            f"per_seed={per_seed} "
            f"train_s={sum(c.train_seconds for c in row.cells):.3f} "
            f"recognize_s={sum(c.recognize_seconds for c in row.cells):.3f}"
        )
    for w in report.warnings:
        lines.append(f"# warning: {w}")
    return "\n".join(lines) + "\n", records
