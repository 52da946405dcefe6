"""Eigenface training: mean face, centring, eigenfaces via the small Gram matrix,
face-space projections and per-class means.
"""

from __future__ import annotations

from dataclasses import dataclass, field, fields
from typing import Mapping, Sequence

import numpy as np

from . import linalg

__all__ = [
    "TrainerConfig",
    "TrainingSet",
    "EigenModel",
    "DegenerateTrainingSetError",
    "mean_face",
    "normalize",
    "eigenfaces_from_surrogate",
    "project",
    "class_means",
    "train",
    "reconstruction_error",
]


class DegenerateTrainingSetError(ValueError):
    pass


@dataclass(frozen=True)
class TrainerConfig:
    """Training knobs.

    requested_E: number of eigenfaces to keep; ``None`` keeps every eigenpair
        that survives the cutoff.
    positive_cutoff: eigenvalues ``<= positive_cutoff * lambda_max`` are
        treated as zero and dropped.
    jacobi_tol: relative off-diagonal tolerance for the eigensolver.
    """

    requested_E: int | None = None
    positive_cutoff: float = 1e-10
    jacobi_tol: float = linalg.DEFAULT_TOL

    def __post_init__(self):
        if self.requested_E is not None and self.requested_E < 1:
            raise ValueError("requested_E must be >= 1")
        if not 0 <= self.positive_cutoff < 1:
            raise ValueError("positive_cutoff must be in [0, 1)")
        if self.jacobi_tol <= 0:
            raise ValueError("jacobi_tol must be positive")

    @classmethod
    def from_mapping(cls, values: Mapping) -> "TrainerConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(values) - known
        if unknown:
            raise ValueError(f"unknown trainer option(s): {', '.join(sorted(unknown))}")
        return cls(**dict(values))


@dataclass
class TrainingSet:
    """Labelled face vectors grouped by class.

    ``classes`` maps each label to a (P_k, d) array; its insertion order is the
    class order used everywhere downstream.
    """

    classes: dict[str, np.ndarray]
    image_dims: tuple[int, int]

    def __post_init__(self):
        if not self.classes:
            raise ValueError("training set has no classes")
        width, height = self.image_dims
        d = width * height
        cleaned = {}
        for label, vecs in self.classes.items():
            vecs = np.atleast_2d(np.asarray(vecs, dtype=np.float64))
            if vecs.shape[0] == 0:
                raise ValueError(f"class {label!r} has no images")
            if vecs.shape[1] != d:
                raise ValueError(
                    f"class {label!r}: vectors have length {vecs.shape[1]}, "
                    f"expected {d} for {width}x{height} images"
                )
            if not np.all(np.isfinite(vecs)):
                raise ValueError(f"class {label!r} has non-finite values")
            cleaned[str(label)] = vecs
        self.classes = cleaned

    @classmethod
    def from_pairs(cls, pairs: Sequence[tuple[str, np.ndarray]], image_dims) -> "TrainingSet":
        grouped: dict[str, list] = {}
        for label, vec in pairs:
            grouped.setdefault(str(label), []).append(vec)
        return cls({k: np.array(v) for k, v in grouped.items()}, tuple(image_dims))

    @property
    def labels(self) -> list[str]:
        return list(self.classes)

    @property
    def dim(self) -> int:
        return self.image_dims[0] * self.image_dims[1]

    @property
    def class_sizes(self) -> list[int]:
        return [v.shape[0] for v in self.classes.values()]

    def __len__(self):
        return sum(self.class_sizes)

    def matrix(self) -> np.ndarray:
        """All face vectors as columns (d, M), class-major then image index."""
        return np.concatenate(list(self.classes.values()), axis=0).T

    def sample_labels(self) -> list[str]:
        return [lab for lab, v in self.classes.items() for _ in range(v.shape[0])]


@dataclass(eq=False)
class EigenModel:
    """A trained eigenface model.

    Stored eigenvalues are those of ``AᵀA`` (no 1/M factor); divide by M to
    compare with the sample covariance spectrum.
    """

    mean_face: np.ndarray  # (d,)
    eigenfaces: np.ndarray  # (d, E), unit columns
    eigenvalues: np.ndarray  # (E,), descending
    projections: np.ndarray  # (M, E)
    projection_labels: list[str]
    labels: list[str]  # class order
    class_means: np.ndarray  # (C, E)
    class_sizes: list[int]
    image_dims: tuple[int, int]
    _index: dict = field(init=False, repr=False)

    def __post_init__(self):
        self.image_dims = tuple(int(x) for x in self.image_dims)
        self.labels = [str(x) for x in self.labels]
        self.projection_labels = [str(x) for x in self.projection_labels]
        self.class_sizes = [int(x) for x in self.class_sizes]
        self._index = {lab: i for i, lab in enumerate(self.labels)}
        if len(self._index) != len(self.labels):
            raise ValueError("class labels must be unique")
        d, e = self.eigenfaces.shape
        if self.mean_face.shape != (d,):
            raise ValueError("mean face length does not match eigenfaces")
        if d != self.image_dims[0] * self.image_dims[1]:
            raise ValueError("eigenface length does not match image_dims")
        if self.eigenvalues.shape != (e,) or self.class_means.shape != (len(self.labels), e):
            raise ValueError("inconsistent model shapes")
        if len(self.class_sizes) != len(self.labels):
            raise ValueError("class_sizes must have one entry per class")
        if self.projections.shape != (len(self.projection_labels), e):
            raise ValueError("projections do not match projection_labels")

    @property
    def dim(self) -> int:
        return self.eigenfaces.shape[0]

    @property
    def num_eigenfaces(self) -> int:
        return self.eigenfaces.shape[1]

    @property
    def num_classes(self) -> int:
        return len(self.labels)

    def class_index(self, label) -> int:
        try:
            return self._index[str(label)]
        except KeyError:
            raise KeyError(f"unknown class label {label!r}") from None


def mean_face(ts: TrainingSet) -> np.ndarray:
    if len(ts) == 0:
        raise ValueError("cannot take the mean of an empty training set")
    return ts.matrix().mean(axis=1)


def normalize(ts: TrainingSet, psi: np.ndarray) -> np.ndarray:
    """Subtract the mean face from every image; returns A as a (d, M) matrix."""
    psi = np.asarray(psi, dtype=np.float64)
    if psi.shape != (ts.dim,):
        raise linalg.DimensionError(f"mean face has length {psi.size}, expected {ts.dim}")
    return ts.matrix() - psi[:, None]


def eigenfaces_from_surrogate(
    a, cfg: TrainerConfig = TrainerConfig(), scale: float | None = None
) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvectors of ``AAᵀ`` obtained from the M x M matrix ``AᵀA``.

    Eigenpairs of ``AᵀA`` at or below ``cfg.positive_cutoff * lambda_max`` are
    dropped, the survivors are lifted with ``u = A v`` and renormalised, and
    at most ``cfg.requested_E`` of them are kept.

    ``scale`` is the largest absolute raw intensity; when given, spectra whose
    magnitude is at floating-point noise level for that scale are rejected as
    degenerate (identical images whose mean is not exactly representable).
    """
    a = linalg.as_matrix(a)
    d, m = a.shape
    values, vectors = linalg.eig_symmetric_arrays(linalg.gram(a), cfg.jacobi_tol)
    lam_max = float(values[0])
    if scale is not None:
        floor = (m * np.finfo(np.float64).eps * float(scale)) ** 2 * d * m
    else:
        floor = 0.0
    if lam_max <= floor:
        raise DegenerateTrainingSetError(
            "degenerate training set: no positive eigenvalues (are all images identical?)"
        )
    keep = values > cfg.positive_cutoff * lam_max
    values, vectors = values[keep], vectors[:, keep]
    if cfg.requested_E is not None:
        values, vectors = values[: cfg.requested_E], vectors[:, : cfg.requested_E]
    u = a @ vectors
    u /= np.linalg.norm(u, axis=0)
    return u, values


def project(u, phi) -> np.ndarray:
    """Face-space coordinates ``uᵀ Φ``. ``phi`` may be a vector or a (d, n) matrix."""
    u = linalg.as_matrix(u)
    phi = np.asarray(phi, dtype=np.float64)
    if phi.shape[0] != u.shape[0]:
        raise linalg.DimensionError(
            f"vector length {phi.shape[0]} does not match eigenface length {u.shape[0]}"
        )
    return u.T @ phi


def class_means(projections, labels: Sequence[str], order: Sequence[str] | None = None):
    """Per-class mean of face-space vectors.

    Returns ``(class_order, means, sizes)``; ``order`` fixes the class order,
    otherwise first appearance in ``labels`` is used.
    """
    projections = np.atleast_2d(np.asarray(projections, dtype=np.float64))
    labels = [str(x) for x in labels]
    if len(labels) != projections.shape[0]:
        raise ValueError("one label per projection is required")
    if order is None:
        order = list(dict.fromkeys(labels))
    order = [str(x) for x in order]
    means, sizes = [], []
    lab_arr = np.array(labels, dtype=object)
    for lab in order:
        members = projections[lab_arr == lab]
        if members.shape[0] == 0:
            raise ValueError(f"class {lab!r} has no projections")
        means.append(members.mean(axis=0))
        sizes.append(members.shape[0])
    return order, np.array(means).reshape(len(order), projections.shape[1]), sizes


def train(ts: TrainingSet, cfg: TrainerConfig = TrainerConfig()) -> EigenModel:
    psi = mean_face(ts)
    a = normalize(ts, psi)
    scale = float(np.max(np.abs(ts.matrix())))
    u, values = eigenfaces_from_surrogate(a, cfg, scale=scale)
    m = len(ts)
    survivors = u.shape[1]
    # centring removes one dimension, so the non-null spectrum has at most M-1 entries
    if survivors > m - 1:
        raise AssertionError(
            f"{survivors} eigenpairs survived for M={m}; centring bound is M-1"
            " (raise positive_cutoff)"
        )
    omegas = project(u, a).T
    sample_labels = ts.sample_labels()
    order, xi, sizes = class_means(omegas, sample_labels, ts.labels)
    return EigenModel(
        mean_face=psi,
        eigenfaces=u,
        eigenvalues=values,
        projections=np.ascontiguousarray(omegas),
        projection_labels=sample_labels,
        labels=order,
        class_means=xi,
        class_sizes=sizes,
        image_dims=ts.image_dims,
    )


def reconstruction_error(model: EigenModel, phi, num: int | None = None) -> float:
    """Relative error ``||Φ - u uᵀ Φ|| / ||Φ||`` using the first ``num`` eigenfaces."""
    u = model.eigenfaces if num is None else model.eigenfaces[:, :num]
    phi = np.asarray(phi, dtype=np.float64)
    norm = float(np.linalg.norm(phi))
    if norm == 0.0:
        return 0.0
    return float(np.linalg.norm(phi - u @ (u.T @ phi))) / norm

