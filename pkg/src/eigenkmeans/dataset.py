"""ORL-style dataset discovery, protocol splits and a synthetic face generator.

ORL layout: ``root/s<k>/<n>.pgm``; every subdirectory is one person.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .imageio import PGMError, read_pgm, vectorize
from .trainer import TrainingSet

__all__ = [
    "DatasetError",
    "Sample",
    "DatasetManifest",
    "SplitSpec",
    "Split",
    "natural_key",
    "scan",
    "make_split",
    "synth_dataset",
    "write_manifest",
    "read_manifest",
]

log = logging.getLogger(__name__)


class DatasetError(ValueError):
    pass


def natural_key(name) -> tuple:
    """Sort key treating digit runs as numbers: ``s2`` < ``s10``, ``2.pgm`` < ``10.pgm``."""
    parts = re.split(r"(\d+)", str(name))
    return tuple((0, int(p), p) if p.isdigit() else (1, 0, p) for p in parts if p)


@dataclass(frozen=True, eq=False)
class Sample:
    name: str  # file path, or a synthetic identifier
    vector: np.ndarray


@dataclass
class DatasetManifest:
    classes: dict[str, list[Sample]]
    image_dims: tuple[int, int]
    root: Path | None = None

    def __post_init__(self):
        if not self.classes:
            raise DatasetError("dataset has no classes")
        d = self.image_dims[0] * self.image_dims[1]
        for label, samples in self.classes.items():
            if not samples:
                raise DatasetError(f"class {label!r} has no images")
            for s in samples:
                if s.vector.shape != (d,):
                    raise DatasetError(
                        f"{s.name}: {s.vector.size} pixels, expected {d} "
                        f"({self.image_dims[0]}x{self.image_dims[1]})"
                    )

    @property
    def labels(self) -> list[str]:
        return list(self.classes)

    @property
    def num_classes(self) -> int:
        return len(self.classes)

    @property
    def available(self) -> dict[str, int]:
        return {k: len(v) for k, v in self.classes.items()}

    def __len__(self):
        return sum(len(v) for v in self.classes.values())


def scan(root) -> DatasetManifest:
    """Load every ``*.pgm`` under each subdirectory of ``root``; one class per subdirectory."""
    root = Path(root)
    if not root.is_dir():
        raise DatasetError(f"dataset root {root} is not a directory")
    classes: dict[str, list[Sample]] = {}
    dims = None
    first = None
    for sub in sorted((p for p in root.iterdir() if p.is_dir()), key=lambda p: natural_key(p.name)):
        files = sorted(
            (f for f in sub.iterdir() if f.is_file() and f.suffix.lower() == ".pgm"),
            key=lambda f: natural_key(f.name),
        )
        if not files:
            log.warning("skipping %s: no .pgm files", sub)
            continue
        samples = []
        for f in files:
            try:
                img = read_pgm(f)
            except (OSError, PGMError) as exc:
                raise DatasetError(f"cannot read {f}: {exc}") from exc
            if dims is None:
                dims, first = img.dims, f
            elif img.dims != dims:
                raise DatasetError(
                    f"image size mismatch: {f} is {img.width}x{img.height}, "
                    f"{first} is {dims[0]}x{dims[1]}"
                )
            samples.append(Sample(str(f), vectorize(img)))
        classes[sub.name] = samples
    if not classes:
        raise DatasetError(f"no class directories with .pgm images under {root}")
    return DatasetManifest(classes, dims, root)


def write_manifest(manifest: DatasetManifest, path) -> None:
    """One ``label<TAB>path`` line per image."""
    lines = [f"{label}\t{s.name}\n" for label, ss in manifest.classes.items() for s in ss]
    Path(path).write_text("".join(lines))


def read_manifest(path) -> DatasetManifest:
    """Inverse of :func:`write_manifest`; images are re-read from disk."""
    classes: dict[str, list[Sample]] = {}
    dims = None
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        if not line.strip():
            continue
        try:
            label, name = line.split("\t")
        except ValueError:
            raise DatasetError(f"{path}:{lineno}: expected 'label<TAB>path'") from None
        try:
            img = read_pgm(name)
        except (OSError, PGMError) as exc:
            raise DatasetError(f"cannot read {name}: {exc}") from exc
        if dims is None:
            dims = img.dims
        elif img.dims != dims:
            raise DatasetError(f"image size mismatch at {name}")
        classes.setdefault(label, []).append(Sample(name, vectorize(img)))
    if not classes:
        raise DatasetError(f"manifest {path} is empty")
    return DatasetManifest(classes, dims)


@dataclass(frozen=True)
class SplitSpec:
    """Which persons and how many images each go into training.

    ``protocol`` is ``"cs1"`` (one training image per person) or ``"cs2"``
    (2..6 images per person). ``seed == 0`` takes the first persons and first
    images in dataset order; any other seed draws both at random.
    ``nii`` caps the probe count by sampling without replacement.
    """

    protocol: str
    num_persons: int
    images_per_person: int = 1
    seed: int = 0
    nii: int | None = None

    def __post_init__(self):
        if self.protocol == "cs1":
            if self.images_per_person != 1:
                raise ValueError("case study 1 uses exactly one training image per person")
        elif self.protocol == "cs2":
            if not 2 <= self.images_per_person <= 6:
                raise ValueError("case study 2 uses 2..6 training images per person")
        else:
            raise ValueError(f"unknown protocol {self.protocol!r}")
        if self.num_persons < 1:
            raise ValueError("num_persons must be >= 1")
        if self.nii is not None and self.nii < 0:
            raise ValueError("nii must be >= 0")

    @classmethod
    def case_study_1(cls, num_persons: int, seed: int = 0, nii: int | None = None):
        return cls("cs1", num_persons, 1, seed, nii)

    @classmethod
    def case_study_2(cls, images_per_person: int, seed: int = 0, nii: int | None = None,
                     num_persons: int = 32):
        return cls("cs2", num_persons, images_per_person, seed, nii)


@dataclass
class Split:
    training: TrainingSet
    train_names: list[str]
    probes: list[tuple[str, Sample]] = field(default_factory=list)


def make_split(manifest: DatasetManifest, spec: SplitSpec) -> Split:
    n = spec.images_per_person
    eligible = [lab for lab, ss in manifest.classes.items() if len(ss) >= n]
    if len(eligible) < spec.num_persons:
        raise DatasetError(
            f"split needs {spec.num_persons} persons with >= {n} images; "
            f"dataset has {len(eligible)}"
        )
    rng = np.random.default_rng(spec.seed)
    if spec.seed == 0:
        persons = eligible[: spec.num_persons]
    else:
        picked = rng.choice(len(eligible), size=spec.num_persons, replace=False)
        persons = [eligible[i] for i in sorted(picked)]

    train_classes: dict[str, np.ndarray] = {}
    train_names: list[str] = []
    remainder: list[tuple[str, Sample]] = []
    for label in persons:
        samples = manifest.classes[label]
        if spec.seed == 0:
            chosen = set(range(n))
        else:
            chosen = set(int(i) for i in rng.choice(len(samples), size=n, replace=False))
        train_classes[label] = np.array([samples[i].vector for i in sorted(chosen)])
        train_names += [samples[i].name for i in sorted(chosen)]
        remainder += [(label, s) for i, s in enumerate(samples) if i not in chosen]

    probes = remainder
    if spec.nii is not None:
        if spec.nii > len(remainder):
            raise DatasetError(
                f"requested {spec.nii} probe images; only {len(remainder)} remain "
                f"after taking {n} per person from {spec.num_persons} persons"
            )
        idx = sorted(rng.choice(len(remainder), size=spec.nii, replace=False))
        probes = [remainder[i] for i in idx]
    return Split(TrainingSet(train_classes, manifest.image_dims), train_names, probes)


def synth_dataset(num_classes: int, per_class: int, dim: int, noise: float, seed: int = 0,
                  image_dims: tuple[int, int] | None = None) -> DatasetManifest:
    """In-memory dataset: per class a uniform random base image in [0, 255]^d, each
    sample that base plus N(0, noise²) pixel noise, clamped to [0, 255]."""
    if num_classes < 1 or per_class < 1 or dim < 1:
        raise ValueError("num_classes, per_class and dim must all be >= 1")
    if noise < 0:
        raise ValueError("noise must be >= 0")
    if image_dims is None:
        image_dims = (dim, 1)
    if image_dims[0] * image_dims[1] != dim:
        raise ValueError(f"image_dims {image_dims} do not multiply to {dim}")
    rng = np.random.default_rng(seed)
    classes = {}
    for k in range(1, num_classes + 1):
        base = rng.uniform(0.0, 255.0, size=dim)
        samples = []
        for j in range(1, per_class + 1):
            vec = base + noise * rng.standard_normal(dim) if noise > 0 else base.copy()
            samples.append(Sample(f"synthetic:s{k}/{j}", np.clip(vec, 0.0, 255.0)))
        classes[f"s{k}"] = samples
    return DatasetManifest(classes, tuple(image_dims))
