import numpy as np
import pytest

from eigenkmeans.dataset import synth_dataset
from eigenkmeans.imageio import GrayImage, write_pgm
from eigenkmeans.trainer import EigenModel, TrainingSet


def naive_matmul(a, b):
    n, k = len(a), len(a[0])
    m = len(b[0])
    assert len(b) == k
    out = [[0.0] * m for _ in range(n)]
    for i in range(n):
        for j in range(m):
            acc = 0.0
            for t in range(k):
                acc += a[i][t] * b[t][j]
            out[i][j] = acc
    return np.array(out)


def random_model(rng, num_classes, dim_e, sizes=None, d=None):
    """A structurally valid model with arbitrary face-space statistics.

    Class means are the true means of the stored projections so the
    re-summation oracle can be applied.
    """
    if sizes is None:
        sizes = [int(rng.integers(1, 6))] * num_classes
    d = d or dim_e + 3
    labels = [f"c{k}" for k in range(num_classes)]
    projections, proj_labels, means = [], [], []
    for lab, p in zip(labels, sizes):
        omegas = rng.normal(scale=3.0, size=(p, dim_e))
        projections.append(omegas)
        proj_labels += [lab] * p
        means.append(omegas.mean(axis=0))
    q, _ = np.linalg.qr(rng.standard_normal((d, dim_e)))
    return EigenModel(
        mean_face=rng.uniform(0, 255, size=d),
        eigenfaces=q,
        eigenvalues=np.sort(rng.uniform(1, 10, size=dim_e))[::-1],
        projections=np.concatenate(projections),
        projection_labels=proj_labels,
        labels=labels,
        class_means=np.array(means),
        class_sizes=list(sizes),
        image_dims=(d, 1),
    )


def manifest_to_training(manifest):
    return TrainingSet(
        {lab: [s.vector for s in ss] for lab, ss in manifest.classes.items()},
        manifest.image_dims,
    )


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def small_set():
    """4 persons x 3 images of 6x5 pixels, well separated."""
    return manifest_to_training(synth_dataset(4, 3, 30, 10.0, seed=5, image_dims=(6, 5)))


def write_orl_tree(root, num_classes=5, per_class=4, dims=(6, 5), noise=12.0, seed=0):
    """Write a synthetic dataset as root/s<k>/<n>.pgm and return the root."""
    w, h = dims
    manifest = synth_dataset(num_classes, per_class, w * h, noise, seed=seed, image_dims=dims)
    for k, samples in enumerate(manifest.classes.values(), 1):
        sub = root / f"s{k}"
        sub.mkdir(parents=True)
        for n, s in enumerate(samples, 1):
            px = np.round(s.vector).astype(int).reshape(h, w)
            write_pgm(sub / f"{n}.pgm", GrayImage(w, h, 255, px))
    return root


@pytest.fixture
def orl_tree(tmp_path):
    return write_orl_tree(tmp_path / "orl")


_ACCEPTANCE_LINES = []


@pytest.fixture
def acceptance():
    """Record a one-line verdict for an acceptance criterion."""

    def record(number, title, passed, detail):
        _ACCEPTANCE_LINES.append(f"[{'PASS' if passed else 'FAIL'}] criterion {number}: {title} -- {detail}")
        print(_ACCEPTANCE_LINES[-1])
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE_LINES, key=lambda s: int(s.split("criterion ")[1].split(":")[0])):
            terminalreporter.write_line(line)
