"""Probe classification by tentative class-mean shift.

For each class the probe is adjoined to the class, the class mean is
recomputed, and the distance the mean moved is recorded. The class whose mean
moves least wins; the probe is "known" if that shift is within a threshold.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .dataset import natural_key
from .linalg import DimensionError
from .trainer import EigenModel

__all__ = [
    "Verdict",
    "RecognitionResult",
    "project_probe",
    "shifted_class_mean",
    "mean_shift_distance",
    "mean_shift_distances",
    "recognize",
]


class Verdict(str, enum.Enum):
    KNOWN = "Known"
    UNKNOWN = "Unknown"

    def __str__(self):
        return self.value


@dataclass(frozen=True, eq=False)
class RecognitionResult:
    best_class: str
    d_min: float
    per_class_d: dict[str, float]
    verdict: Verdict
    threshold_used: float

    @property
    def known(self) -> bool:
        return self.verdict is Verdict.KNOWN

    def format_line(self) -> str:
        return f"class={self.best_class} dmin={self.d_min!r} verdict={self.verdict}"


def project_probe(model: EigenModel, probe) -> np.ndarray:
    """Face-space coordinates of a probe: ``uᵀ (probe - mean_face)``."""
    probe = np.asarray(probe, dtype=np.float64).ravel()
    if probe.shape[0] != model.dim:
        w, h = model.image_dims
        raise DimensionError(
            f"probe has {probe.shape[0]} pixels; model expects {w}x{h} images ({model.dim} pixels)"
        )
    phi = probe - model.mean_face
    return model.eigenfaces.T @ phi


def _check_omega(model: EigenModel, omega) -> np.ndarray:
    omega = np.asarray(omega, dtype=np.float64)
    if omega.shape != (model.num_eigenfaces,):
        raise DimensionError(
            f"face-space vector has shape {omega.shape}, model has {model.num_eigenfaces} eigenfaces"
        )
    return omega


def shifted_class_mean(model: EigenModel, label, omega_test) -> np.ndarray:
    """Mean of class ``label`` after the probe is added to its members."""
    k = model.class_index(label)
    omega_test = _check_omega(model, omega_test)
    p = model.class_sizes[k]
    return (p * model.class_means[k] + omega_test) / (p + 1)


def mean_shift_distance(model: EigenModel, label, omega_test) -> float:
    """Euclidean distance between the class mean and its probe-shifted mean."""
    k = model.class_index(label)
    mu = shifted_class_mean(model, label, omega_test)
    return float(np.linalg.norm(model.class_means[k] - mu))


def mean_shift_distances(model: EigenModel, omega_test) -> np.ndarray:
    """Vectorised :func:`mean_shift_distance` over every class, in model order."""
    omega_test = _check_omega(model, omega_test)
    sizes = np.asarray(model.class_sizes, dtype=np.float64)[:, None]
    xi = model.class_means
    mu = (sizes * xi + omega_test) / (sizes + 1.0)
    return np.linalg.norm(xi - mu, axis=1)


def recognize(model: EigenModel, probe, threshold: float = math.inf) -> RecognitionResult:
    """Identify ``probe`` (a raw face vector).

    Ties on the minimum distance go to the naturally-lowest label, so the
    outcome does not depend on class order. ``threshold=inf`` gives
    closed-set identification.
    """
    if model.num_classes == 0:
        raise ValueError("model has no classes")
    if not threshold >= 0:
        raise ValueError(f"threshold must be >= 0, got {threshold}")
    dists = mean_shift_distances(model, project_probe(model, probe))
    d_min = float(dists.min())
    tied = [model.labels[i] for i in np.flatnonzero(dists == d_min)]
    best = min(tied, key=natural_key)
    verdict = Verdict.KNOWN if d_min <= threshold else Verdict.UNKNOWN
    return RecognitionResult(
        best_class=best,
        d_min=d_min,
        per_class_d={lab: float(x) for lab, x in zip(model.labels, dists)},
        verdict=verdict,
        threshold_used=float(threshold),
    )
