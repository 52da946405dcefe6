"""Dense float64 matrix helpers and a cyclic Jacobi symmetric eigensolver.

Matrices are plain 2-D numpy arrays; the helpers here only add the dimension
checks and conventions the rest of the package relies on.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "DimensionError",
    "NotSymmetricError",
    "ConvergenceError",
    "EigenPair",
    "as_matrix",
    "gram",
    "matvec",
    "matmul",
    "transpose",
    "scale",
    "axpy",
    "eig_symmetric",
    "eig_symmetric_arrays",
    "DEFAULT_TOL",
    "MAX_SWEEPS",
]

DEFAULT_TOL = 1e-12
MAX_SWEEPS = 50


class DimensionError(ValueError):
    pass


class NotSymmetricError(ValueError):
    pass


class ConvergenceError(RuntimeError):
    def __init__(self, off_norm: float, sweeps: int):
        super().__init__(
            f"Jacobi did not converge in {sweeps} sweeps (off-diagonal norm {off_norm:.3e})"
        )
        self.off_norm = off_norm
        self.sweeps = sweeps


@dataclass(frozen=True, eq=False)
class EigenPair:
    value: float
    vector: np.ndarray


def as_matrix(a) -> np.ndarray:
    a = np.asarray(a, dtype=np.float64)
    if a.ndim != 2:
        raise DimensionError(f"expected a 2-D matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    return a


def _as_vector(x) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1:
        raise DimensionError(f"expected a vector, got shape {x.shape}")
    return x


def gram(a) -> np.ndarray:
    """Return ``AᵀA``, mirrored from the upper triangle so it is exactly symmetric."""
    a = as_matrix(a)
    g = a.T @ a
    upper = np.triu(g)
    return upper + np.triu(g, 1).T


def matvec(a, x) -> np.ndarray:
    a, x = as_matrix(a), _as_vector(x)
    if a.shape[1] != x.shape[0]:
        raise DimensionError(f"cannot multiply {a.shape} matrix by length-{x.shape[0]} vector")
    return a @ x


def matmul(a, b) -> np.ndarray:
    a, b = as_matrix(a), as_matrix(b)
    if a.shape[1] != b.shape[0]:
        raise DimensionError(f"cannot multiply {a.shape} by {b.shape}")
    return a @ b


def transpose(a) -> np.ndarray:
    return np.ascontiguousarray(as_matrix(a).T)


def scale(alpha: float, a) -> np.ndarray:
    return float(alpha) * np.asarray(a, dtype=np.float64)


def axpy(alpha: float, x, y) -> np.ndarray:
    """``alpha * x + y`` for equally shaped arrays."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape:
        raise DimensionError(f"shape mismatch {x.shape} vs {y.shape}")
    return float(alpha) * x + y


def _off_norm(a: np.ndarray) -> float:
    return math.sqrt(2.0 * float(np.sum(np.triu(a, 1) ** 2)))


def _round_robin(n: int) -> list[tuple[np.ndarray, np.ndarray]]:
    """Tournament ordering: n-1 (or n) rounds of disjoint (p, q) pairs, p < q,
    that together visit every off-diagonal pair exactly once."""
    players = list(range(n + (n % 2)))
    size = len(players)
    rounds = []
    for _ in range(size - 1):
        pairs = [
            (min(players[i], players[size - 1 - i]), max(players[i], players[size - 1 - i]))
            for i in range(size // 2)
        ]
        pairs = [pq for pq in pairs if pq[1] < n]  # drop the bye for odd n
        if pairs:
            p, q = zip(*sorted(pairs))
            rounds.append((np.array(p), np.array(q)))
        players = [players[0], players[-1]] + players[1:-1]
    return rounds


def _rows(m: np.ndarray, p, q, c, s) -> None:
    # rows p, q of m <- rows of Jᵀ m
    mp, mq = m[p], m[q]
    new_p = c * mp
    new_p -= s * mq
    mq *= c
    mp *= s
    mq += mp
    m[p] = new_p
    m[q] = mq


def _rotate(a: np.ndarray, vt: np.ndarray, p: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Annihilate a[p_i, q_i] for a set of disjoint pairs at once.

    Returns JᵀAJ (computed as Jᵀ(JᵀA)ᵀ, valid for symmetric A, so only
    contiguous row updates are needed) and updates ``vt`` (= Vᵀ) in place.
    """
    apq = a[p, q]
    live = apq != 0.0
    if not live.any():
        return a
    p, q, apq = p[live], q[live], apq[live]
    theta = (a[q, q] - a[p, p]) / (2.0 * apq)
    t = np.sign(theta) / (np.abs(theta) + np.hypot(theta, 1.0))
    t[theta == 0.0] = 1.0
    c = 1.0 / np.sqrt(t * t + 1.0)
    s = t * c
    c2, s2 = c[:, None], s[:, None]

    _rows(a, p, q, c2, s2)
    a = np.ascontiguousarray(a.T)
    _rows(a, p, q, c2, s2)
    a[p, q] = 0.0
    a[q, p] = 0.0
    _rows(vt, p, q, c2, s2)
    return a


def eig_symmetric_arrays(s, tol: float = DEFAULT_TOL) -> tuple[np.ndarray, np.ndarray]:
    """Eigen-decompose a symmetric matrix with the cyclic Jacobi method.

    Returns ``(values, vectors)`` with eigenvalues in descending order and the
    matching unit eigenvectors as columns. Each eigenvector is flipped so that
    its largest-magnitude component (lowest index on ties) is positive.

    Sweeps stop once the off-diagonal Frobenius norm is at most
    ``tol * ||S||_F``; :class:`ConvergenceError` is raised after 50 sweeps.
    """
    a = as_matrix(s)
    n, m = a.shape
    if n != m or n == 0:
        raise DimensionError(f"expected a non-empty square matrix, got shape {a.shape}")
    amax = float(np.max(np.abs(a)))
    asym = float(np.max(np.abs(a - a.T)))
    if asym > tol * amax:
        raise NotSymmetricError(f"matrix not symmetric: max |S - Sᵀ| = {asym:.3e}")

    a = (a + a.T) * 0.5
    vt = np.eye(n)
    target = tol * float(np.linalg.norm(a))
    off = _off_norm(a)
    schedule = _round_robin(n)
    sweeps = 0
    while off > target:
        if sweeps == MAX_SWEEPS:
            raise ConvergenceError(off, sweeps)
        sweeps += 1
        for p, q in schedule:
            a = _rotate(a, vt, p, q)
        # rounding breaks exact symmetry slightly; the row-only update relies on it
        a = (a + a.T) * 0.5
        off = _off_norm(a)
    v = vt.T

    values = np.diag(a).copy()
    # stable sort keeps equal eigenvalues in index order
    order = np.argsort(-values, kind="stable")
    values = values[order]
    v = v[:, order]
    pivots = np.argmax(np.abs(v), axis=0)
    signs = np.where(v[pivots, np.arange(n)] < 0.0, -1.0, 1.0)
    return values, v * signs


def eig_symmetric(s, tol: float = DEFAULT_TOL) -> list[EigenPair]:
    values, vectors = eig_symmetric_arrays(s, tol)
    return [EigenPair(float(values[i]), vectors[:, i].copy()) for i in range(values.size)]
