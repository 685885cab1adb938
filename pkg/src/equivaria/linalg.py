"""Dense linear-algebra helpers shared by all modules.

Subspaces of C^D are represented as arrays of shape (k, D) whose rows are
orthonormal.  Matrices are flattened row-major, so the standard inner
product of flattened matrices equals the trace inner product trace(a* b).
"""
from __future__ import annotations

import numpy as np

DEFAULT_TOL = 1e-9


def flatten(mats: np.ndarray) -> np.ndarray:
    """Flatten an array of matrices (..., n, m) to vectors (..., n*m)."""
    mats = np.asarray(mats, dtype=complex)
    n, m = mats.shape[-2:]
    return mats.reshape(mats.shape[:-2] + (n * m,))


def unflatten(vecs: np.ndarray, n: int, m: int | None = None) -> np.ndarray:
    if m is None:
        m = n
    vecs = np.asarray(vecs, dtype=complex)
    return vecs.reshape(vecs.shape[:-1] + (n, m))


def orthonormal_rows(vectors: np.ndarray, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Orthonormal basis (as rows) of the row span of `vectors`."""
    vectors = np.atleast_2d(np.asarray(vectors, dtype=complex))
    if vectors.size == 0:
        return np.zeros((0, vectors.shape[-1]), dtype=complex)
    scale = np.abs(vectors).max()
    if scale == 0.0:
        return np.zeros((0, vectors.shape[-1]), dtype=complex)
    u, s, vh = np.linalg.svd(vectors, full_matrices=False)
    rank = int(np.sum(s > tol * max(s[0], 1.0)))
    return vh[:rank]


def nullspace_rows(matrix: np.ndarray, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Orthonormal basis (rows) of the kernel of `matrix` (acting on columns)."""
    matrix = np.atleast_2d(np.asarray(matrix, dtype=complex))
    if matrix.shape[0] == 0:
        return np.eye(matrix.shape[1], dtype=complex)
    m, n = matrix.shape
    # Full V is needed to read the kernel; U never is.  For tall matrices the
    # economy SVD already returns all n right singular vectors.
    u, s, vh = np.linalg.svd(matrix, full_matrices=(m < n))
    # Floor the scale so an all-roundoff matrix reads as rank zero.
    scale = max(s[0], 1.0) if s.size else 1.0
    rank = int(np.sum(s > tol * scale))
    return vh[rank:].conj()


def project_coefficients(basis_rows: np.ndarray, vec: np.ndarray) -> np.ndarray:
    """Coefficients of `vec` against orthonormal rows."""
    return basis_rows.conj() @ vec


def residual_to_span(basis_rows: np.ndarray, vec: np.ndarray) -> float:
    """Distance from `vec` to the span of the orthonormal rows."""
    if basis_rows.shape[0] == 0:
        return float(np.linalg.norm(vec))
    coeffs = basis_rows.conj() @ vec
    return float(np.linalg.norm(vec - basis_rows.T @ coeffs))


def span_contains(basis_rows: np.ndarray, vecs: np.ndarray, tol: float = DEFAULT_TOL) -> bool:
    vecs = np.atleast_2d(np.asarray(vecs, dtype=complex))
    for v in vecs:
        scale = max(np.linalg.norm(v), 1.0)
        if residual_to_span(basis_rows, v) > tol * scale:
            return False
    return True


def spans_equal(a_rows: np.ndarray, b_rows: np.ndarray, tol: float = DEFAULT_TOL) -> bool:
    if a_rows.shape[0] != b_rows.shape[0]:
        return False
    return span_contains(a_rows, b_rows, tol) and span_contains(b_rows, a_rows, tol)


def span_intersection(a_rows: np.ndarray, b_rows: np.ndarray, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Orthonormal basis of the intersection of two row spans."""
    d = a_rows.shape[1]
    # Vectors orthogonal to both orthocomplements.
    comp_a = nullspace_rows(a_rows.conj(), tol)
    comp_b = nullspace_rows(b_rows.conj(), tol)
    stacked = np.vstack([comp_a.conj(), comp_b.conj()])
    if stacked.shape[0] == 0:
        return np.eye(d, dtype=complex)
    return nullspace_rows(stacked, tol)


def cluster_values(values: np.ndarray, gap: float) -> list[np.ndarray]:
    """Group sorted real values into clusters separated by more than `gap`.

    Returns a list of index arrays into the original `values`.
    """
    order = np.argsort(values)
    clusters: list[list[int]] = []
    for idx in order:
        if clusters and values[idx] - values[clusters[-1][-1]] <= gap:
            clusters[-1].append(int(idx))
        else:
            clusters.append([int(idx)])
    return [np.array(c) for c in clusters]


def random_hermitian(n: int, rng: np.random.Generator) -> np.ndarray:
    m = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return (m + m.conj().T) / 2.0


def frobenius_close(a: np.ndarray, b: np.ndarray, tol: float = DEFAULT_TOL) -> bool:
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    scale = max(np.linalg.norm(a), np.linalg.norm(b), 1.0)
    return float(np.linalg.norm(a - b)) <= tol * scale
