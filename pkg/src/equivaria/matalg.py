"""Finite-dimensional *-algebras of complex matrices.

This is the brute-force oracle layer: generation by closure, commutants by
nullspace, block (Wedderburn) structure by randomized central splitting,
GNS, ideals, and the finite-dimensional separating-subalgebra checker.

An algebra is stored as an orthonormal basis under the trace inner product
trace(a* b); with row-major flattening that is the standard inner product
on C^(N*N), so all span arithmetic reduces to plain linear algebra.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .linalg import (
    DEFAULT_TOL,
    cluster_values,
    flatten,
    nullspace_rows,
    orthonormal_rows,
    random_hermitian,
    residual_to_span,
    span_contains,
    spans_equal,
    unflatten,
)


class AlgebraError(ValueError):
    pass


class SplitError(RuntimeError):
    """Randomized central splitting failed after bounded retries."""


def operator_norm(a: np.ndarray) -> float:
    """Largest singular value."""
    a = np.atleast_2d(np.asarray(a, dtype=complex))
    if a.size == 0:
        return 0.0
    return float(np.linalg.svd(a, compute_uv=False)[0])


@dataclass(frozen=True)
class MatrixStarAlgebra:
    """A *-closed linear span of N x N complex matrices.

    `basis` has shape (dim, N, N) and is orthonormal under trace(a* b).
    """

    ambient_dim: int
    basis: np.ndarray

    def __post_init__(self):
        basis = np.asarray(self.basis, dtype=complex)
        n = self.ambient_dim
        if basis.ndim != 3 or basis.shape[1:] != (n, n):
            raise AlgebraError("basis must be a (dim, N, N) array")
        object.__setattr__(self, "basis", basis)

    # -- basic span machinery ------------------------------------------------

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    def basis_rows(self) -> np.ndarray:
        return flatten(self.basis)

    def contains(self, mats, tol: float = DEFAULT_TOL) -> bool:
        return span_contains(self.basis_rows(), flatten(np.asarray(mats, dtype=complex)), tol)

    def coefficients(self, a: np.ndarray) -> np.ndarray:
        """Expansion of a against the orthonormal basis."""
        return self.basis_rows().conj() @ flatten(a)

    def element(self, coeffs: np.ndarray) -> np.ndarray:
        return np.einsum("k,kij->ij", np.asarray(coeffs, dtype=complex), self.basis)

    def random_element(self, rng: np.random.Generator, hermitian: bool = False) -> np.ndarray:
        c = rng.standard_normal(self.dim) + 1j * rng.standard_normal(self.dim)
        a = self.element(c)
        if hermitian:
            a = (a + a.conj().T) / 2.0
        return a

    def closure_residual(self) -> float:
        """How far products and adjoints stray from the span (0 for an algebra)."""
        if self.dim == 0:
            return 0.0
        rows = self.basis_rows()
        prods = (self.basis[:, None] @ self.basis[None]).reshape(
            -1, self.ambient_dim, self.ambient_dim)
        stars = np.conj(np.transpose(self.basis, (0, 2, 1)))
        vecs = np.vstack([flatten(prods), flatten(stars)])
        coeffs = vecs @ rows.conj().T
        resid = vecs - coeffs @ rows
        return float(np.sqrt(np.abs(resid * resid.conj()).sum(axis=1)).max())

    def validate(self, tol: float = DEFAULT_TOL) -> None:
        rows = self.basis_rows()
        gram = rows.conj() @ rows.T
        if not np.allclose(gram, np.eye(self.dim), atol=max(tol, 1e-9) * 10):
            raise AlgebraError("basis is not orthonormal")
        if self.closure_residual() > tol * max(self.ambient_dim, 1):
            raise AlgebraError("span is not closed under product/adjoint")

    # -- structural elements -------------------------------------------------

    def unit(self, tol: float = DEFAULT_TOL) -> np.ndarray:
        """The algebra's own unit (sum of minimal central projections).

        Solved as the element e with e b = b e = b for every basis element;
        for a *-closed matrix algebra this always exists (possibly 0).
        """
        n = self.ambient_dim
        if self.dim == 0:
            return np.zeros((n, n), dtype=complex)
        # Unknown e in the span: coefficients c with sum_k c_k (b_k b_j) = b_j.
        cols = []
        rhs = []
        for b in self.basis:
            left = np.einsum("kij,jl->kil", self.basis, b)   # b_k b
            right = np.einsum("ij,kjl->kil", b, self.basis)  # b b_k
            cols.append(np.concatenate([flatten(left), flatten(right)], axis=1))
            rhs.append(np.concatenate([flatten(b), flatten(b)]))
        a_mat = np.concatenate(cols, axis=1).T  # rows: equations, cols: c_k
        b_vec = np.concatenate(rhs)
        coeffs, *_ = np.linalg.lstsq(a_mat, b_vec, rcond=None)
        e = self.element(coeffs)
        for b in self.basis:
            if np.linalg.norm(e @ b - b) > 1e-6 * max(1.0, np.linalg.norm(b)):
                raise AlgebraError("algebra has no unit in its span")
        return e

    def is_unital(self, tol: float = DEFAULT_TOL) -> bool:
        """True when the ambient identity lies in the span."""
        return self.contains(np.eye(self.ambient_dim), tol)

    # -- trace functional ----------------------------------------------------

    def normalized_trace(self) -> "State":
        """The state a -> trace(e a)/trace(e) with e the algebra's unit."""
        e = self.unit()
        tr = np.real(np.trace(e))
        if tr <= 0:
            raise AlgebraError("degenerate trace: zero algebra has no state")
        vec = np.array([np.trace(e @ b) / tr for b in self.basis])
        return State(self, vec)


def algebra_from_span(mats, ambient_dim: int | None = None,
                      tol: float = DEFAULT_TOL) -> MatrixStarAlgebra:
    """Wrap an already-*-closed span (orthonormalizes; validates closure)."""
    mats = np.asarray(mats, dtype=complex)
    if mats.ndim == 2:
        mats = mats[None]
    if mats.shape[0] == 0:
        if ambient_dim is None:
            raise AlgebraError("ambient dimension needed for the zero algebra")
        return MatrixStarAlgebra(ambient_dim, np.zeros((0, ambient_dim, ambient_dim), dtype=complex))
    n = mats.shape[1]
    rows = orthonormal_rows(flatten(mats), tol)
    alg = MatrixStarAlgebra(n, unflatten(rows, n))
    alg.validate(max(tol, 1e-8))
    return alg


def generate(gens, ambient_dim: int | None = None,
             tol: float = DEFAULT_TOL) -> MatrixStarAlgebra:
    """Smallest *-closed span containing the generators.

    Fixed-point iteration: span <- span + span*span + span* until the
    dimension stabilizes.
    """
    gens = np.asarray(gens, dtype=complex)
    if gens.ndim == 2:
        gens = gens[None]
    if gens.shape[0] == 0:
        if ambient_dim is None:
            raise AlgebraError("ambient dimension needed for the zero algebra")
        return MatrixStarAlgebra(ambient_dim, np.zeros((0, ambient_dim, ambient_dim), dtype=complex))
    n = gens.shape[1]
    if gens.shape[1] != gens.shape[2]:
        raise AlgebraError("generators must be square matrices")
    rows = orthonormal_rows(flatten(gens), tol)
    if rows.shape[0] == 0:
        return MatrixStarAlgebra(n, np.zeros((0, n, n), dtype=complex))
    while True:
        mats = unflatten(rows, n)
        stars = np.conj(np.transpose(mats, (0, 2, 1)))
        prods = np.einsum("aij,bjk->abik", mats, mats).reshape(-1, n, n)
        new_rows = orthonormal_rows(
            np.vstack([rows, flatten(stars), flatten(prods)]), tol)
        if new_rows.shape[0] == rows.shape[0]:
            return MatrixStarAlgebra(n, unflatten(new_rows, n))
        rows = new_rows


def commutant(alg: MatrixStarAlgebra, tol: float = DEFAULT_TOL) -> MatrixStarAlgebra:
    """{t : tb = bt for every b in the algebra}, inside the full ambient M_N."""
    n = alg.ambient_dim
    if alg.dim == 0:
        return full_matrix_algebra(n)
    eye = np.eye(n)
    blocks = [np.kron(b, eye) - np.kron(eye, b.T) for b in alg.basis]
    rows = nullspace_rows(np.vstack(blocks), tol)
    return MatrixStarAlgebra(n, unflatten(rows, n))


def full_matrix_algebra(n: int) -> MatrixStarAlgebra:
    basis = np.eye(n * n, dtype=complex).reshape(n * n, n, n)
    return MatrixStarAlgebra(n, basis)


def center(alg: MatrixStarAlgebra, tol: float = DEFAULT_TOL) -> MatrixStarAlgebra:
    """A intersect A'."""
    comm = commutant(alg, tol)
    rows_a = alg.basis_rows()
    rows_c = comm.basis_rows()
    from .linalg import span_intersection
    inter = span_intersection(rows_a, rows_c, tol)
    return MatrixStarAlgebra(alg.ambient_dim, unflatten(inter, alg.ambient_dim))


@dataclass(frozen=True)
class Block:
    size: int
    multiplicity: int
    projection: np.ndarray  # minimal central projection, ambient N x N


@dataclass(frozen=True)
class BlockStructure:
    algebra: MatrixStarAlgebra
    blocks: tuple[Block, ...]

    def sizes(self) -> list[int]:
        return sorted(b.size for b in self.blocks)


def _compress(p: np.ndarray, mats: np.ndarray, tol: float) -> tuple[np.ndarray, np.ndarray]:
    """Orthonormal basis q of range(p) and the compressed matrices q* m q."""
    evals, evecs = np.linalg.eigh((p + p.conj().T) / 2.0)
    keep = evals > 0.5
    q = evecs[:, keep]
    comp = np.einsum("ij,kjl,lm->kim", q.conj().T, mats, q)
    return q, comp


def _minimal_projection_rank(basis: np.ndarray, rng: np.random.Generator,
                             tol: float) -> int:
    """Rank of a minimal projection in a factor given by its (compressed) basis.

    For a factor M_n (x) 1_m the commutant is 1_n (x) M_m; a random Hermitian
    commutant element has n-fold degenerate eigenvalues, so the smallest
    eigenspace of the factor's own random Hermitian element has dimension m
    and n = dim_of_range / m.  We instead read n directly: dim(span) = n^2.
    """
    return int(round(np.sqrt(basis.shape[0])))


def block_decompose(alg: MatrixStarAlgebra, seed: int = 0,
                    tol: float = DEFAULT_TOL, max_attempts: int = 8) -> BlockStructure:
    """Minimal central projections and per-block (size, multiplicity).

    The center is split by eigenvalue clustering of a seeded random Hermitian
    central element; the number of clusters must match the center dimension.
    """
    if alg.dim == 0:
        return BlockStructure(alg, ())
    rng = np.random.default_rng(seed)
    cen = center(alg, tol)
    k = cen.dim
    gap = 1e-7
    for attempt in range(max_attempts):
        z = cen.random_element(rng, hermitian=True)
        evals, evecs = np.linalg.eigh(z)
        # Cluster the distinct eigenvalues of z restricted to the support.
        clusters = cluster_values(evals, gap)
        # Central projections: spectral projections of z for each cluster,
        # dropping the one corresponding to the kernel of the algebra's unit.
        e = alg.unit()
        blocks = []
        ok = True
        for idx in clusters:
            q = evecs[:, idx]
            p = q @ q.conj().T
            if np.linalg.norm(p @ e - p) > 1e-6:
                # This cluster lives (at least partly) outside the support.
                if np.linalg.norm(p @ e) > 1e-6:
                    ok = False
                    break
                continue
            if not alg.contains(p, max(tol, 1e-7)):
                ok = False
                break
            blocks.append(p)
        if ok and len(blocks) == k:
            out = []
            for p in blocks:
                q, comp = _compress(p, alg.basis, tol)
                rows = orthonormal_rows(flatten(comp), tol)
                n_k = int(round(np.sqrt(rows.shape[0])))
                if n_k * n_k != rows.shape[0]:
                    ok = False
                    break
                m_k = int(round(np.real(np.trace(p)) / n_k))
                out.append(Block(size=n_k, multiplicity=m_k, projection=p))
            if ok:
                out.sort(key=lambda b: (b.size, -np.real(np.trace(b.projection))))
                return BlockStructure(alg, tuple(out))
        gap *= 2.0
    raise SplitError("central splitting failed; reseed or loosen tolerance")


def is_positive(a: np.ndarray, within: MatrixStarAlgebra,
                tol: float = DEFAULT_TOL) -> bool:
    """Positivity of an algebra element: Hermitian with spectrum >= -tol."""
    a = np.asarray(a, dtype=complex)
    if not within.contains(a, max(tol, 1e-8)):
        raise AlgebraError("element lies outside the algebra")
    scale = max(operator_norm(a), 1.0)
    if np.linalg.norm(a - a.conj().T) > tol * scale:
        return False
    evals = np.linalg.eigvalsh((a + a.conj().T) / 2.0)
    return bool(evals.min() >= -tol * scale)


# -- states and GNS ---------------------------------------------------------


@dataclass(frozen=True)
class State:
    """A positive normalized linear functional, stored against the basis."""

    algebra: MatrixStarAlgebra
    vector: np.ndarray  # functional values on basis elements

    def __call__(self, a: np.ndarray) -> complex:
        return complex(self.vector @ self.algebra.coefficients(a))

    def validate(self, tol: float = 1e-8) -> None:
        alg = self.algebra
        gram = _state_gram(alg, self)
        evals = np.linalg.eigvalsh((gram + gram.conj().T) / 2.0)
        if evals.min() < -tol * max(1.0, abs(evals).max()):
            raise AlgebraError("functional is not positive")
        if abs(self(alg.unit()) - 1.0) > tol:
            raise AlgebraError("functional is not normalized on the unit")


def vector_state(alg: MatrixStarAlgebra, xi: np.ndarray) -> State:
    xi = np.asarray(xi, dtype=complex)
    vec = np.array([np.vdot(xi, b @ xi) for b in alg.basis])
    e = alg.unit()
    norm = np.vdot(xi, e @ xi).real
    if norm <= 0:
        raise AlgebraError("vector is annihilated by the algebra's unit")
    return State(alg, vec / norm)


def _state_gram(alg: MatrixStarAlgebra, phi: State) -> np.ndarray:
    k = alg.dim
    gram = np.zeros((k, k), dtype=complex)
    for i in range(k):
        for j in range(k):
            gram[i, j] = phi(alg.basis[i].conj().T @ alg.basis[j])
    return gram


@dataclass(frozen=True)
class GNSRepresentation:
    """The cyclic representation of an algebra built from a state.

    `vectors[i]` holds coordinates of basis element i's class in the quotient
    Hilbert space; `matrices[i]` is left multiplication by basis element i.
    """

    algebra: MatrixStarAlgebra
    state: State
    dim: int
    vectors: np.ndarray    # (alg.dim, dim): a -> class of a
    matrices: np.ndarray   # (alg.dim, dim, dim)
    cyclic_vector: np.ndarray

    def represent(self, a: np.ndarray) -> np.ndarray:
        coeffs = self.algebra.coefficients(a)
        return np.einsum("k,kij->ij", coeffs, self.matrices)


def gns(alg: MatrixStarAlgebra, phi: State, tol: float = 1e-9) -> GNSRepresentation:
    """GNS construction: quotient by the null space of phi(a* b), left action."""
    phi.validate()
    gram = _state_gram(alg, phi)
    gram = (gram + gram.conj().T) / 2.0
    evals, evecs = np.linalg.eigh(gram)
    scale = max(evals.max(), 1.0)
    keep = evals > tol * scale * 10
    d = int(keep.sum())
    # Map a basis-coefficient vector c to Hilbert-space coordinates:
    # coords = diag(sqrt(lambda)) V* c, so that <coords|coords'> = c* G c'.
    v = evecs[:, keep]
    to_coords = np.diag(np.sqrt(evals[keep])) @ v.conj().T       # (d, alg.dim)
    from_coords = v @ np.diag(1.0 / np.sqrt(evals[keep]))        # (alg.dim, d)
    vectors = to_coords.T                                        # class of b_i = row i
    # Left multiplication: b_i * b_j expanded back in the basis.
    mats = np.zeros((alg.dim, d, d), dtype=complex)
    for i in range(alg.dim):
        prod_coeffs = np.stack([alg.coefficients(alg.basis[i] @ alg.basis[j])
                                for j in range(alg.dim)], axis=1)  # (alg.dim, alg.dim)
        mats[i] = to_coords @ prod_coeffs @ from_coords
    cyclic = to_coords @ alg.coefficients(alg.unit())
    return GNSRepresentation(alg, phi, d, vectors, mats, cyclic)


def gns_commutant_dim(rep: GNSRepresentation, tol: float = DEFAULT_TOL) -> int:
    span = generate(rep.matrices, ambient_dim=rep.dim, tol=tol)
    return commutant(span, tol).dim


# -- ideals ------------------------------------------------------------------


def is_ideal(ideal: MatrixStarAlgebra, alg: MatrixStarAlgebra,
             tol: float = DEFAULT_TOL) -> bool:
    """Two-sided *-closed ideal test: a i and i a stay in the span."""
    if ideal.dim == 0:
        return True
    if not alg.contains(ideal.basis, max(tol, 1e-8)):
        return False
    rows = ideal.basis_rows()
    for a in alg.basis:
        for i in ideal.basis:
            for m in (a @ i, i @ a, i.conj().T):
                if residual_to_span(rows, flatten(m)) > tol * max(1.0, np.linalg.norm(m)):
                    return False
    return True


def ideal_sum(i: MatrixStarAlgebra, j: MatrixStarAlgebra,
              tol: float = DEFAULT_TOL) -> MatrixStarAlgebra:
    rows = orthonormal_rows(np.vstack([i.basis_rows(), j.basis_rows()]), tol)
    return MatrixStarAlgebra(i.ambient_dim, unflatten(rows, i.ambient_dim))


def ideal_intersection(i: MatrixStarAlgebra, j: MatrixStarAlgebra,
                       tol: float = DEFAULT_TOL) -> MatrixStarAlgebra:
    from .linalg import span_intersection
    rows = span_intersection(i.basis_rows(), j.basis_rows(), tol)
    return MatrixStarAlgebra(i.ambient_dim, unflatten(rows, i.ambient_dim))


def ideal_is_whole(ideal: MatrixStarAlgebra, alg: MatrixStarAlgebra,
                   seed: int = 0, tol: float = DEFAULT_TOL) -> bool:
    """An ideal equals the algebra iff it contains every minimal central projection."""
    structure = block_decompose(alg, seed=seed, tol=tol)
    return all(ideal.contains(b.projection, max(tol, 1e-7)) for b in structure.blocks)


# -- separating subalgebras / Stone-Weierstrass -----------------------------


@dataclass(frozen=True)
class SeparationReport:
    separating: bool
    reducible_blocks: tuple[int, ...]          # blocks whose restriction is reducible
    merged_pairs: tuple[tuple[int, int], ...]  # block pairs made equivalent
    missing_unit: bool                         # B does not contain A's unit


def _block_restriction(structure: BlockStructure, sub: MatrixStarAlgebra,
                       index: int, tol: float) -> np.ndarray:
    """Restriction of the subalgebra to one irreducible block slice of A.

    Compress to a single copy of the block: pick a minimal projection in the
    block's commutant and cut with it.  We realize this by compressing to
    range(p) and then slicing a single irreducible summand via the commutant
    of the compressed subalgebra of A.
    """
    p = structure.blocks[index].projection
    q, comp_a = _compress(p, structure.algebra.basis, tol)
    # Inside range(p), A acts as M_n (x) 1_m; its commutant is 1_n (x) M_m.
    alg_p = algebra_from_span(comp_a, tol=tol)
    comm_p = commutant(alg_p, tol)
    # A minimal projection in the commutant cuts one irreducible copy.
    rng = np.random.default_rng(7)
    h = comm_p.random_element(rng, hermitian=True)
    evals, evecs = np.linalg.eigh(h)
    clusters = cluster_values(evals, 1e-7)
    r = evecs[:, clusters[0]]  # one eigenspace = range of a minimal projection
    comp_sub = np.einsum("ij,kjl,lm->kim", (q @ r).conj().T, sub.basis, q @ r)
    return comp_sub


def is_separating(sub: MatrixStarAlgebra, alg: MatrixStarAlgebra,
                  seed: int = 0, tol: float = DEFAULT_TOL) -> SeparationReport:
    """Do all irreducible blocks of A stay irreducible and inequivalent on B?

    Uses the algebra's own unit: if B misses A's unit, the restriction of the
    identity representation is degenerate and B cannot separate.
    """
    if not alg.contains(sub.basis, max(tol, 1e-8)):
        raise AlgebraError("first argument is not a subalgebra of the second")
    structure = block_decompose(alg, seed=seed, tol=tol)
    missing_unit = not sub.contains(alg.unit(), max(tol, 1e-7))
    restrictions = [_block_restriction(structure, sub, i, tol)
                    for i in range(len(structure.blocks))]
    reducible = []
    for i, mats in enumerate(restrictions):
        span = generate(mats, ambient_dim=mats.shape[1], tol=tol)
        if commutant(span, tol).dim != 1:
            reducible.append(i)
    merged = []
    for i in range(len(restrictions)):
        for j in range(i + 1, len(restrictions)):
            if _nonzero_intertwiner(restrictions[i], restrictions[j], tol):
                merged.append((i, j))
    separating = not reducible and not merged and not missing_unit
    return SeparationReport(separating, tuple(reducible), tuple(merged), missing_unit)


def _nonzero_intertwiner(mats1: np.ndarray, mats2: np.ndarray, tol: float) -> bool:
    """Is there a nonzero s with s m1 = m2 s for all basis pairs?"""
    d1, d2 = mats1.shape[1], mats2.shape[1]
    blocks = [np.kron(np.eye(d2), m1.T) - np.kron(m2, np.eye(d1))
              for m1, m2 in zip(mats1, mats2)]
    return nullspace_rows(np.vstack(blocks), tol).shape[0] > 0


@dataclass(frozen=True)
class SWVerdict:
    holds: bool
    separating: bool
    dims_equal: bool
    report: SeparationReport


def check_stone_weierstrass(sub: MatrixStarAlgebra, alg: MatrixStarAlgebra,
                            seed: int = 0, tol: float = DEFAULT_TOL) -> SWVerdict:
    """Separating subalgebra implies equality (finite-dimensional check)."""
    report = is_separating(sub, alg, seed=seed, tol=tol)
    dims_equal = sub.dim == alg.dim
    holds = (not report.separating) or dims_equal
    return SWVerdict(holds, report.separating, dims_equal, report)
