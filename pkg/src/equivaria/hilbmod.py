"""Finite-dimensional Hilbert C*-modules and Morita-equivalence witnesses.

A module is a carrier space C^m with a right action of a matrix *-algebra B
and a B-valued inner product, conjugate-linear in the first argument.  The
compact operators K_B(E) are the span of the rank-one maps
|eta><xi| : zeta -> eta <xi|zeta>.  Module adjoints are taken with respect
to the faithful scalar form tau(<xi|eta>), tau the normalized trace on B;
conjugating by the square root of the Gram matrix turns the module adjoint
into the ordinary conjugate transpose, so K_B(E) becomes an honest matrix
*-algebra.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .groups import FiniteGroup
from .linalg import (
    DEFAULT_TOL,
    flatten,
    nullspace_rows,
    orthonormal_rows,
    residual_to_span,
    span_contains,
    span_intersection,
    spans_equal,
    unflatten,
)
from .matalg import MatrixStarAlgebra, algebra_from_span, operator_norm
from .systems import (
    AlgebraAction,
    CrossedProduct,
    EquivariantSystem,
    crossed_embed,
    crossed_product,
)


class ModuleError(ValueError):
    pass


@dataclass(frozen=True)
class FDHilbertModule:
    """A Hilbert module over a matrix *-algebra, given by dense tensors.

    `action[k]` is the carrier matrix of the right action of basis element k;
    `inner[i, j]` is <e_i | e_j> as an element of B's ambient matrix space.
    """

    algebra: MatrixStarAlgebra
    action: np.ndarray  # (dim B, m, m)
    inner: np.ndarray   # (m, m, N, N)
    name: str = ""

    def __post_init__(self):
        action = np.asarray(self.action, dtype=complex)
        inner = np.asarray(self.inner, dtype=complex)
        m = action.shape[1] if action.ndim == 3 else inner.shape[0]
        n = self.algebra.ambient_dim
        if action.shape != (self.algebra.dim, m, m):
            raise ModuleError("action tensor has wrong shape")
        if inner.shape != (m, m, n, n):
            raise ModuleError("inner tensor has wrong shape")
        object.__setattr__(self, "action", action)
        object.__setattr__(self, "inner", inner)

    @property
    def carrier_dim(self) -> int:
        return self.action.shape[1]

    def act(self, xi: np.ndarray, b: np.ndarray) -> np.ndarray:
        """xi . b for an algebra element b (given as an ambient matrix)."""
        coeffs = self.algebra.coefficients(b)
        return np.einsum("k,kij,j->i", coeffs, self.action, xi)

    def action_matrix(self, b: np.ndarray) -> np.ndarray:
        coeffs = self.algebra.coefficients(b)
        return np.einsum("k,kij->ij", coeffs, self.action)

    def inner_product(self, xi: np.ndarray, eta: np.ndarray) -> np.ndarray:
        """<xi | eta> in B, conjugate-linear in xi."""
        return np.einsum("i,j,ijab->ab", np.conj(xi), eta, self.inner)

    def norm(self, xi: np.ndarray) -> float:
        return float(np.sqrt(max(operator_norm(self.inner_product(xi, xi)), 0.0)))

    # -- the scalar form and the Gram transform ------------------------------

    def trace_functional(self) -> np.ndarray:
        """tau as a matrix functional: tau(b) = trace(e b) / trace(e)."""
        e = self.algebra.unit()
        return e.conj().T / np.real(np.trace(e))

    def gram(self) -> np.ndarray:
        """G[i, j] = tau(<e_i | e_j>): the faithful scalar inner product."""
        tau = self.trace_functional()
        g = np.einsum("ba,ijab->ij", tau.conj().T, self.inner)
        return (g + g.conj().T) / 2.0

    def gram_sqrt(self, tol: float = 1e-10) -> tuple[np.ndarray, np.ndarray]:
        """(S, S^-1) with S = G^(1/2); requires a definite inner product."""
        g = self.gram()
        evals, evecs = np.linalg.eigh(g)
        if self.carrier_dim and evals.min() < tol * max(evals.max(), 1.0):
            raise ModuleError("inner product is degenerate on the carrier")
        s = evecs @ np.diag(np.sqrt(evals)) @ evecs.conj().T
        s_inv = evecs @ np.diag(1.0 / np.sqrt(evals)) @ evecs.conj().T
        return s, s_inv

    def module_adjoint(self, t: np.ndarray) -> np.ndarray:
        """The adjoint of a carrier operator w.r.t. the scalar form."""
        g = self.gram()
        return np.linalg.solve(g, t.conj().T @ g)

    def random_vector(self, rng: np.random.Generator) -> np.ndarray:
        m = self.carrier_dim
        return rng.standard_normal(m) + 1j * rng.standard_normal(m)

    # -- axiom residuals ------------------------------------------------------

    def axiom_residuals(self, rng: np.random.Generator | None = None,
                        n_samples: int = 20) -> dict:
        """Numeric residuals of the Hilbert-module axioms.

        Keys: values_in_algebra, bimodule, compatibility, symmetry,
        positivity, definiteness.  Completeness holds automatically at
        finite dimension and is not measured.
        """
        rng = rng or np.random.default_rng(0)
        b_alg = self.algebra
        rows = b_alg.basis_rows()
        m = self.carrier_dim
        res = {k: 0.0 for k in ("values_in_algebra", "bimodule", "compatibility",
                                "symmetry", "positivity", "definiteness")}
        for i in range(m):
            for j in range(m):
                res["values_in_algebra"] = max(
                    res["values_in_algebra"],
                    residual_to_span(rows, flatten(self.inner[i, j])))
        for _ in range(n_samples):
            xi = self.random_vector(rng)
            eta = self.random_vector(rng)
            b1 = b_alg.random_element(rng)
            b2 = b_alg.random_element(rng)
            scale = max(1.0, np.linalg.norm(xi) * np.linalg.norm(eta),
                        operator_norm(b1) * operator_norm(b2))
            # (xi b1) b2 = xi (b1 b2)
            lhs = self.act(self.act(xi, b1), b2)
            rhs = self.act(xi, b1 @ b2)
            res["bimodule"] = max(res["bimodule"],
                                  float(np.linalg.norm(lhs - rhs)) / scale)
            # <xi b1 | eta b2> = b1* <xi|eta> b2
            lhs2 = self.inner_product(self.act(xi, b1), self.act(eta, b2))
            rhs2 = b1.conj().T @ self.inner_product(xi, eta) @ b2
            res["compatibility"] = max(res["compatibility"],
                                       float(np.linalg.norm(lhs2 - rhs2)) / scale)
            # <eta|xi> = <xi|eta>*
            diff = self.inner_product(eta, xi) - self.inner_product(xi, eta).conj().T
            res["symmetry"] = max(res["symmetry"], float(np.linalg.norm(diff)) / scale)
            # <xi|xi> >= 0
            q = self.inner_product(xi, xi)
            herm = float(np.linalg.norm(q - q.conj().T))
            neg = max(0.0, -float(np.linalg.eigvalsh((q + q.conj().T) / 2.0).min()))
            res["positivity"] = max(res["positivity"], (herm + neg) / scale)
        if m:
            evals = np.linalg.eigvalsh(self.gram())
            res["definiteness"] = max(0.0, -float(evals.min())) + \
                (1.0 if evals.min() < 1e-10 * max(evals.max(), 1.0) else 0.0)
        return res

    def validate(self, tol: float = 1e-8, rng=None) -> None:
        res = self.axiom_residuals(rng)
        bad = {k: v for k, v in res.items() if v > tol}
        if bad:
            raise ModuleError(f"Hilbert-module axioms violated: {bad}")

    def cauchy_schwarz_residual(self, xi: np.ndarray, eta: np.ndarray) -> float:
        """Violation of <eta|xi><xi|eta> <= ||xi||^2 <eta|eta> (0 if it holds)."""
        lhs = self.inner_product(eta, xi) @ self.inner_product(xi, eta)
        rhs = self.norm(xi) ** 2 * self.inner_product(eta, eta)
        gap = rhs - lhs
        evals = np.linalg.eigvalsh((gap + gap.conj().T) / 2.0)
        return max(0.0, -float(evals.min()))


# -- standard constructions ---------------------------------------------------


def standard_module(b_alg: MatrixStarAlgebra) -> FDHilbertModule:
    """B as a module over itself with <b1|b2> = b1* b2."""
    k = b_alg.dim
    action = np.zeros((k, k, k), dtype=complex)
    for j in range(k):
        for i in range(k):
            action[j, :, i] = b_alg.coefficients(b_alg.basis[i] @ b_alg.basis[j])
    inner = np.zeros((k, k, b_alg.ambient_dim, b_alg.ambient_dim), dtype=complex)
    for i in range(k):
        for j in range(k):
            inner[i, j] = b_alg.basis[i].conj().T @ b_alg.basis[j]
    return FDHilbertModule(b_alg, action, inner, name="standard")


def scalar_algebra(n_points: int) -> MatrixStarAlgebra:
    """C(X) for |X| = n_points, as the diagonal algebra in M_{|X|}."""
    basis = np.zeros((n_points, n_points, n_points), dtype=complex)
    for x in range(n_points):
        basis[x, x, x] = 1.0
    return MatrixStarAlgebra(n_points, basis)


def function_module(sys: EquivariantSystem) -> FDHilbertModule:
    """C(X, C^d) over C(X): pointwise action and inner product."""
    x_n, d = sys.n_points, sys.fiber_dim
    b_alg = scalar_algebra(x_n)
    m = x_n * d
    action = np.zeros((x_n, m, m), dtype=complex)
    inner = np.zeros((m, m, x_n, x_n), dtype=complex)
    for x in range(x_n):
        for i in range(d):
            action[x, x * d + i, x * d + i] = 1.0
            for j in range(d):
                if i == j:
                    inner[x * d + i, x * d + j, x, x] = 1.0
    return FDHilbertModule(b_alg, action, inner, name="function")


def free_module(n: int) -> FDHilbertModule:
    """C^n over C (the scalars realized as M_1)."""
    b_alg = MatrixStarAlgebra(1, np.ones((1, 1, 1), dtype=complex))
    action = np.eye(n, dtype=complex)[None]
    inner = np.zeros((n, n, 1, 1), dtype=complex)
    for i in range(n):
        inner[i, i, 0, 0] = 1.0
    return FDHilbertModule(b_alg, action, inner, name="free")


# -- compact operators ---------------------------------------------------------


def rank_one(e: FDHilbertModule, eta: np.ndarray, xi: np.ndarray) -> np.ndarray:
    """|eta><xi| : zeta -> eta <xi|zeta>, as a raw carrier matrix."""
    m = e.carrier_dim
    # zeta -> <xi|zeta> is linear: column j gives <xi|e_j> in B.
    cols = np.empty((m, m), dtype=complex)
    ip = np.einsum("i,ijab->jab", np.conj(xi), e.inner)  # <xi|e_j> per j
    for j in range(m):
        cols[:, j] = e.act(eta, ip[j])
    return cols


@dataclass(frozen=True)
class CompactOperators:
    """K_B(E) in Gram coordinates, with the raw-coordinate span alongside.

    `algebra` is a genuine matrix *-algebra: matrices S k S^-1 for raw
    compacts k, with S the Gram square root, so * is the conjugate transpose.
    """

    module: FDHilbertModule
    algebra: MatrixStarAlgebra
    raw_rows: np.ndarray        # orthonormal rows spanning raw compacts
    transform: np.ndarray       # S
    transform_inv: np.ndarray   # S^-1

    def to_raw(self, mat: np.ndarray) -> np.ndarray:
        return self.transform_inv @ mat @ self.transform

    def from_raw(self, mat: np.ndarray) -> np.ndarray:
        return self.transform @ mat @ self.transform_inv

    def contains_raw(self, mats, tol: float = 1e-8) -> bool:
        return span_contains(self.raw_rows, flatten(np.asarray(mats, dtype=complex)), tol)


def compact_operators(e: FDHilbertModule, tol: float = DEFAULT_TOL) -> CompactOperators:
    """Span of the rank-one module maps, closed as a matrix *-algebra."""
    m = e.carrier_dim
    s, s_inv = e.gram_sqrt()
    raws = []
    for i in range(m):
        for j in range(m):
            eta = np.zeros(m, dtype=complex)
            xi = np.zeros(m, dtype=complex)
            eta[i] = 1.0
            xi[j] = 1.0
            raws.append(rank_one(e, eta, xi))
    if not raws:
        alg = MatrixStarAlgebra(0, np.zeros((0, 0, 0), dtype=complex))
        return CompactOperators(e, alg, np.zeros((0, 0), dtype=complex), s, s_inv)
    raws = np.stack(raws)
    raw_rows = orthonormal_rows(flatten(raws), tol)
    dressed = np.einsum("ij,kjl,lm->kim", s, raws, s_inv)
    alg = algebra_from_span(dressed, ambient_dim=m, tol=tol)
    return CompactOperators(e, alg, raw_rows, s, s_inv)


def adjointable_operators(e: FDHilbertModule, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Orthonormal rows spanning the B-linear carrier operators (raw coords).

    In finite dimension every B-linear map is adjointable, so this is the
    commutant of the right-action matrices.
    """
    m = e.carrier_dim
    eye = np.eye(m)
    blocks = [np.kron(r, eye) - np.kron(eye, r.T) for r in e.action]
    if not blocks:
        return np.eye(m * m, dtype=complex)
    return nullspace_rows(np.vstack(blocks), tol)


def fullness_ideal(e: FDHilbertModule, tol: float = DEFAULT_TOL) -> MatrixStarAlgebra:
    """span{<xi|eta>} inside B; an ideal of B, all of B iff E is full."""
    m = e.carrier_dim
    n = e.algebra.ambient_dim
    if m == 0:
        return MatrixStarAlgebra(n, np.zeros((0, n, n), dtype=complex))
    vals = e.inner.reshape(m * m, n, n)
    rows = orthonormal_rows(flatten(vals), tol)
    return MatrixStarAlgebra(n, unflatten(rows, n))


def is_full(e: FDHilbertModule, tol: float = 1e-8) -> bool:
    return fullness_ideal(e).dim == e.algebra.dim


# -- equivariant modules -------------------------------------------------------


@dataclass(frozen=True)
class EquivariantModule:
    """A Hilbert B-module with compatible group actions gamma (on E), beta (on B)."""

    base: FDHilbertModule
    beta: AlgebraAction
    gamma: np.ndarray  # (|W|, m, m)

    @property
    def group(self) -> FiniteGroup:
        return self.beta.group

    def validate(self, tol: float = 1e-8, rng=None) -> None:
        self.base.validate(tol, rng)
        self.beta.validate(tol)
        g = self.group
        m = self.base.carrier_dim
        if self.gamma.shape != (g.order, m, m):
            raise ModuleError("gamma has wrong shape")
        if np.linalg.norm(self.gamma[0] - np.eye(m)) > tol * max(m, 1):
            raise ModuleError("gamma at the identity is not the identity")
        for w1 in g.elements():
            for w2 in g.elements():
                diff = self.gamma[g.mul[w1, w2]] - self.gamma[w1] @ self.gamma[w2]
                if np.linalg.norm(diff) > tol * max(m, 1):
                    raise ModuleError("gamma is not a group homomorphism")
        rng = rng or np.random.default_rng(1)
        for w in g.elements():
            for _ in range(4):
                xi = self.base.random_vector(rng)
                eta = self.base.random_vector(rng)
                b = self.base.algebra.random_element(rng)
                scale = max(1.0, np.linalg.norm(xi) * max(1.0, operator_norm(b)))
                lhs = self.gamma[w] @ self.base.act(xi, b)
                rhs = self.base.act(self.gamma[w] @ xi, self.beta.apply(w, b))
                if np.linalg.norm(lhs - rhs) > tol * scale:
                    raise ModuleError(f"gamma_w(xi b) != gamma_w(xi) beta_w(b) at w={w}")
                lhs2 = self.base.inner_product(self.gamma[w] @ xi, self.gamma[w] @ eta)
                rhs2 = self.beta.apply(w, self.base.inner_product(xi, eta))
                scale2 = max(1.0, np.linalg.norm(xi) * np.linalg.norm(eta))
                if np.linalg.norm(lhs2 - rhs2) > tol * scale2:
                    raise ModuleError(f"inner product is not equivariant at w={w}")


def equivariant_function_module(sys: EquivariantSystem) -> EquivariantModule:
    """C(X, C^d) with gamma_w xi(x) = I_{w, w^-1 x} xi(w^-1 x)."""
    base = function_module(sys)
    g = sys.group
    x_n, d = sys.n_points, sys.fiber_dim
    m = x_n * d
    gamma = np.zeros((g.order, m, m), dtype=complex)
    beta_maps = np.zeros((g.order, x_n, x_n), dtype=complex)
    for w in g.elements():
        w_inv = g.inverse(w)
        for x in range(x_n):
            pre = sys.action[w_inv, x]
            gamma[w, x * d:(x + 1) * d, pre * d:(pre + 1) * d] = sys.cocycle[w, pre]
            beta_maps[w, x, pre] = 1.0  # beta_w(f)(x) = f(w^-1 x)
    beta = AlgebraAction(g, base.algebra, beta_maps)
    return EquivariantModule(base, beta, gamma)


def trivial_equivariant_module(e: FDHilbertModule,
                               group: FiniteGroup) -> EquivariantModule:
    maps = np.tile(np.eye(e.algebra.dim, dtype=complex), (group.order, 1, 1))
    gamma = np.tile(np.eye(e.carrier_dim, dtype=complex), (group.order, 1, 1))
    return EquivariantModule(e, AlgebraAction(group, e.algebra, maps), gamma)


# -- crossed-product and averaged modules --------------------------------------


def _crossed_coefficient_map(cp: CrossedProduct) -> np.ndarray:
    """Pseudo-inverse taking an embedded matrix to crossed coefficients.

    Returns P with P @ flatten(mat) = coefficients (|W| * dim B,) laid out
    row-major by (w, basis index).
    """
    g = cp.group
    k = cp.action.algebra.dim
    cols = []
    for w in range(g.order):
        for i in range(k):
            f = np.zeros((g.order, k), dtype=complex)
            f[w, i] = 1.0
            cols.append(flatten(crossed_embed(cp.action, f)))
    emb = np.stack(cols, axis=1)
    return np.linalg.pinv(emb)


def green_julg_module(eq: EquivariantModule,
                      cp: CrossedProduct | None = None,
                      tol: float = DEFAULT_TOL) -> tuple[FDHilbertModule, CrossedProduct]:
    """E as a module over B >| W: xi . bw = gamma_{w^-1}(xi b), averaged inner.

    The inner product is <<xi|eta>> = sum_w <xi|gamma_w eta> w.
    """
    g = eq.group
    base = eq.base
    b_alg = base.algebra
    cp = cp or crossed_product(eq.beta, tol)
    coeff_map = _crossed_coefficient_map(cp)
    m = base.carrier_dim
    k = b_alg.dim
    # Right action of each crossed-algebra basis element.
    action = np.zeros((cp.algebra.dim, m, m), dtype=complex)
    for idx in range(cp.algebra.dim):
        f = (coeff_map @ flatten(cp.algebra.basis[idx])).reshape(g.order, k)
        for w in range(g.order):
            for i in range(k):
                if abs(f[w, i]) < 1e-14:
                    continue
                action[idx] += f[w, i] * (eq.gamma[g.inv[w]] @ base.action[i])
    # Inner products <<e_p | e_q>>, embedded in the crossed ambient.
    amb = cp.algebra.ambient_dim
    inner = np.zeros((m, m, amb, amb), dtype=complex)
    for p in range(m):
        for q in range(m):
            f = np.zeros((g.order, k), dtype=complex)
            for w in range(g.order):
                ip = base.inner_product(np.eye(m)[p], eq.gamma[w] @ np.eye(m)[q])
                f[w] = b_alg.coefficients(ip)
            inner[p, q] = crossed_embed(cp.action, f)
    return FDHilbertModule(cp.algebra, action, inner,
                           name=(base.name or "module") + "-averaged"), cp


def module_crossed_product(eq: EquivariantModule,
                           cp: CrossedProduct | None = None,
                           tol: float = DEFAULT_TOL) -> tuple[FDHilbertModule, CrossedProduct]:
    """E >| W over B >| W: carrier C^{m |W|}, (xi w1)(b w2) = xi beta_w1(b) w1w2."""
    g = eq.group
    base = eq.base
    b_alg = base.algebra
    cp = cp or crossed_product(eq.beta, tol)
    coeff_map = _crossed_coefficient_map(cp)
    m = base.carrier_dim
    k = b_alg.dim
    big = m * g.order  # coordinate (w, i) -> w * m + i
    action = np.zeros((cp.algebra.dim, big, big), dtype=complex)
    for idx in range(cp.algebra.dim):
        f = (coeff_map @ flatten(cp.algebra.basis[idx])).reshape(g.order, k)
        for v in range(g.order):       # group part of the algebra element
            for i in range(k):
                if abs(f[v, i]) < 1e-14:
                    continue
                for w in range(g.order):   # group part of the module element
                    # (xi (x) delta_w) . (b_i v) = (xi . beta_w(b_i)) (x) delta_{wv}
                    bmat = np.einsum("l,lij->ij", eq.beta.maps[w][:, i], base.action)
                    wv = g.mul[w, v]
                    action[idx, wv * m:(wv + 1) * m, w * m:(w + 1) * m] += f[v, i] * bmat
    amb = cp.algebra.ambient_dim
    inner = np.zeros((big, big, amb, amb), dtype=complex)
    for w1 in range(g.order):
        for w2 in range(g.order):
            slot = g.mul[g.inv[w1], w2]
            for p in range(m):
                for q in range(m):
                    f = np.zeros((g.order, k), dtype=complex)
                    f[slot] = eq.beta.maps[g.inv[w1]] @ b_alg.coefficients(
                        base.inner[p, q])
                    inner[w1 * m + p, w2 * m + q] = crossed_embed(cp.action, f)
    return FDHilbertModule(cp.algebra, action, inner,
                           name=(base.name or "module") + "-crossed"), cp


@dataclass(frozen=True)
class CrossedCompactsVerdict:
    ok: bool
    image_dim: int
    compacts_dim: int


def verify_module_crossed_compacts(eq: EquivariantModule,
                                   tol: float = 1e-8) -> CrossedCompactsVerdict:
    """K_{B >| W}(E >| W) = K_B(E) >| W, via phi(k w): xi v -> k(gamma_w xi) wv."""
    g = eq.group
    m = eq.base.carrier_dim
    ecp, _ = module_crossed_product(eq)
    big = compact_operators(ecp)
    base_c = compact_operators(eq.base)
    imgs = []
    for w in g.elements():
        for row in base_c.raw_rows:
            k = row.reshape(m, m)
            phi = np.zeros((g.order * m, g.order * m), dtype=complex)
            for v in g.elements():
                wv = g.mul[w, v]
                phi[wv * m:(wv + 1) * m, v * m:(v + 1) * m] = k @ eq.gamma[w]
            imgs.append(phi)
    img_rows = orthonormal_rows(flatten(np.stack(imgs))) if imgs else \
        np.zeros((0, (g.order * m) ** 2), dtype=complex)
    ok = spans_equal(img_rows, big.raw_rows, tol)
    return CrossedCompactsVerdict(ok, img_rows.shape[0], big.raw_rows.shape[0])


def invariant_compacts_rows(eq: EquivariantModule,
                            compacts: CompactOperators | None = None,
                            tol: float = DEFAULT_TOL) -> np.ndarray:
    """Raw-coordinate span of K_B(E)^W = {k : gamma_w k = k gamma_w}."""
    compacts = compacts or compact_operators(eq.base, tol)
    m = eq.base.carrier_dim
    eye = np.eye(m)
    blocks = [np.kron(eq.gamma[w], eye) - np.kron(eye, eq.gamma[w].T)
              for w in eq.group.elements()]
    comm_rows = nullspace_rows(np.vstack(blocks), tol)
    return span_intersection(compacts.raw_rows, comm_rows, tol)


@dataclass(frozen=True)
class GreenJulgVerdict:
    ok: bool
    averaged_compacts_dim: int
    invariant_compacts_dim: int
    residual: float


def verify_green_julg(eq: EquivariantModule, tol: float = 1e-8) -> GreenJulgVerdict:
    """K_{B >| W}(E) = K_B(E)^W, compared as raw spans on the carrier."""
    gj, cp = green_julg_module(eq)
    gj_compacts = compact_operators(gj)
    inv_rows = invariant_compacts_rows(eq)
    lhs = gj_compacts.raw_rows
    ok = spans_equal(lhs, inv_rows, tol)
    resid = 0.0
    for rows_a, rows_b in ((lhs, inv_rows), (inv_rows, lhs)):
        for v in rows_a:
            resid = max(resid, residual_to_span(rows_b, v))
    return GreenJulgVerdict(ok, lhs.shape[0], inv_rows.shape[0], resid)


def green_julg_norms(eq: EquivariantModule, xi: np.ndarray,
                     gj: FDHilbertModule | None = None,
                     cp: CrossedProduct | None = None) -> tuple[float, float, int]:
    """(||xi||^2 in E, ||xi||^2 in the averaged module, |W|)."""
    if gj is None:
        gj, cp = green_julg_module(eq)
    return (eq.base.norm(xi) ** 2, gj.norm(xi) ** 2, eq.group.order)


# -- duality and Morita equivalence -------------------------------------------


def dual_module(e: FDHilbertModule,
                compacts: CompactOperators | None = None,
                tol: float = DEFAULT_TOL) -> tuple[FDHilbertModule, np.ndarray]:
    """K_B(E, B) over K_B(E), with <<k | l>> = k* l.

    Dual vectors are bras <xi|; the carrier coordinate of <xi| is conj(xi)
    so that everything stays linear.  Also returns the left action of B on
    the dual (b . <xi| = <xi b*|) as matrices, one per B basis element.
    """
    compacts = compacts or compact_operators(e, tol)
    m = e.carrier_dim
    s, s_inv = compacts.transform, compacts.transform_inv
    k_alg = compacts.algebra
    # Right action of a compact a (in Gram coords): bra_xi . a = bra_{a# xi},
    # and in conj coordinates delta -> conj(a#) delta with a# = S^-1 a* S.
    action = np.stack([np.conj(s_inv @ a.conj().T @ s) for a in k_alg.basis])
    inner = np.zeros((m, m, m, m), dtype=complex)
    for p in range(m):
        for q in range(m):
            ep = np.zeros(m, dtype=complex)
            eq_ = np.zeros(m, dtype=complex)
            ep[p] = 1.0
            eq_[q] = 1.0
            inner[p, q] = compacts.from_raw(rank_one(e, ep, eq_))
    dual = FDHilbertModule(k_alg, action, inner, name=(e.name or "module") + "-dual")
    # Left action of B: b . bra_xi = bra_{xi b*}; conj coords: conj(R_{b*}).
    left = np.zeros((e.algebra.dim, m, m), dtype=complex)
    for i in range(e.algebra.dim):
        bstar = e.algebra.basis[i].conj().T
        left[i] = np.conj(e.action_matrix(bstar))
    return dual, left


@dataclass(frozen=True)
class MoritaWitness:
    a_dim: int
    b_dim: int
    full: bool
    span_match: bool
    multiplicative_residual: float
    star_residual: float
    injective: bool
    block_counts: tuple[int, int] | None = None

    @property
    def ok(self) -> bool:
        return (self.full and self.span_match and self.injective
                and self.multiplicative_residual < 1e-8
                and self.star_residual < 1e-8)


def verify_morita(a_alg: MatrixStarAlgebra, e: FDHilbertModule,
                  left_action: np.ndarray, tol: float = 1e-8,
                  check_blocks: bool = False,
                  rng: np.random.Generator | None = None) -> MoritaWitness:
    """Witness that A ~ B via E: E full over B and A = K_B(E) through left_action.

    `left_action[k]` is the raw carrier matrix by which A's basis element k
    acts on E.  The map must be a *-isomorphism onto the compacts.
    """
    rng = rng or np.random.default_rng(0)
    left_action = np.asarray(left_action, dtype=complex)
    full = is_full(e, tol)
    compacts = compact_operators(e)
    img_rows = orthonormal_rows(flatten(left_action))
    injective = img_rows.shape[0] == a_alg.dim
    span_match = (img_rows.shape[0] == compacts.raw_rows.shape[0]
                  and spans_equal(img_rows, compacts.raw_rows, tol))
    mult_res = 0.0
    star_res = 0.0
    for _ in range(8):
        c1 = rng.standard_normal(a_alg.dim) + 1j * rng.standard_normal(a_alg.dim)
        c2 = rng.standard_normal(a_alg.dim) + 1j * rng.standard_normal(a_alg.dim)
        a1 = a_alg.element(c1)
        a2 = a_alg.element(c2)
        l1 = np.einsum("k,kij->ij", c1, left_action)
        l2 = np.einsum("k,kij->ij", c2, left_action)
        l12 = np.einsum("k,kij->ij", a_alg.coefficients(a1 @ a2), left_action)
        scale = max(1.0, float(np.abs(l1).max() * np.abs(l2).max()))
        mult_res = max(mult_res, float(np.abs(l1 @ l2 - l12).max()) / scale)
        lstar = np.einsum("k,kij->ij", a_alg.coefficients(a1.conj().T), left_action)
        star_res = max(star_res,
                       float(np.abs(lstar - e.module_adjoint(l1)).max()) / scale)
    blocks = None
    if check_blocks:
        from .matalg import block_decompose
        blocks = (len(block_decompose(a_alg).blocks),
                  len(block_decompose(e.algebra).blocks))
    return MoritaWitness(a_alg.dim, e.algebra.dim, full, span_match,
                         mult_res, star_res, injective, blocks)


def direct_sum_module(e1: FDHilbertModule, e2: FDHilbertModule) -> FDHilbertModule:
    """E1 (+) E2 over B1 (+) B2 (block-diagonal ambient)."""
    b1, b2 = e1.algebra, e2.algebra
    n1, n2 = b1.ambient_dim, b2.ambient_dim
    n = n1 + n2
    basis = np.zeros((b1.dim + b2.dim, n, n), dtype=complex)
    basis[:b1.dim, :n1, :n1] = b1.basis
    basis[b1.dim:, n1:, n1:] = b2.basis
    b_sum = MatrixStarAlgebra(n, basis)
    m1, m2 = e1.carrier_dim, e2.carrier_dim
    m = m1 + m2
    action = np.zeros((b_sum.dim, m, m), dtype=complex)
    action[:b1.dim, :m1, :m1] = e1.action
    action[b1.dim:, m1:, m1:] = e2.action
    inner = np.zeros((m, m, n, n), dtype=complex)
    inner[:m1, :m1, :n1, :n1] = e1.inner
    inner[m1:, m1:, n1:, n1:] = e2.inner
    return FDHilbertModule(b_sum, action, inner, name="direct-sum")


def direct_sum_left_action(a1: MatrixStarAlgebra, l1: np.ndarray,
                           a2: MatrixStarAlgebra, l2: np.ndarray,
                           m1: int, m2: int) -> tuple[MatrixStarAlgebra, np.ndarray]:
    """Block-diagonal assembly of two algebras with left actions."""
    n1, n2 = a1.ambient_dim, a2.ambient_dim
    n = n1 + n2
    basis = np.zeros((a1.dim + a2.dim, n, n), dtype=complex)
    basis[:a1.dim, :n1, :n1] = a1.basis
    basis[a1.dim:, n1:, n1:] = a2.basis
    a_sum = MatrixStarAlgebra(n, basis)
    m = m1 + m2
    left = np.zeros((a_sum.dim, m, m), dtype=complex)
    left[:a1.dim, :m1, :m1] = l1
    left[a1.dim:, m1:, m1:] = l2
    return a_sum, left


def interior_tensor_product(e1: FDHilbertModule, e2: FDHilbertModule,
                            left_b_on_e2: np.ndarray,
                            tol: float = DEFAULT_TOL) -> tuple[FDHilbertModule, np.ndarray]:
    """E1 (x)_B E2 over C, for E1 over B and E2 over C with B acting on E2.

    <xi1 (x) xi2 | eta1 (x) eta2> = <xi2 | <xi1|eta1> eta2>; the null space
    of this semi-inner product is quotiented out.  Returns the module and
    the quotient map Q (quotient coords = Q @ tensor coords).
    """
    b_alg = e1.algebra
    c_alg = e2.algebra
    m1, m2 = e1.carrier_dim, e2.carrier_dim
    big = m1 * m2
    # Semi-inner product on the full tensor space, valued in C's ambient.
    # left_b_on_e2[k] is the action of B basis element k on E2's carrier.
    inner_big = np.zeros((big, big, c_alg.ambient_dim, c_alg.ambient_dim), dtype=complex)
    for p1 in range(m1):
        for q1 in range(m1):
            coeffs = b_alg.coefficients(e1.inner[p1, q1])
            bmat = np.einsum("k,kij->ij", coeffs, left_b_on_e2)
            # <e_{p2} | bmat e_{q2}>_C
            vals = np.einsum("pjab,jq->pqab", e2.inner, bmat)
            for p2 in range(m2):
                for q2 in range(m2):
                    inner_big[p1 * m2 + p2, q1 * m2 + q2] = vals[p2, q2]
    # Scalar Gram and null space.
    e_unit = c_alg.unit()
    tau = e_unit.conj().T / np.real(np.trace(e_unit))
    gram = np.einsum("ba,pqab->pq", tau.conj().T, inner_big)
    gram = (gram + gram.conj().T) / 2.0
    evals, evecs = np.linalg.eigh(gram)
    keep = evals > max(tol, 1e-10) * max(evals.max(), 1.0)
    u = evecs[:, keep]          # orthonormal complement of the null space
    q_map = u.conj().T          # tensor coords -> quotient coords
    m = u.shape[1]
    inner = np.einsum("pi,pqab,qj->ijab", u.conj(), inner_big, u)
    action = np.zeros((c_alg.dim, m, m), dtype=complex)
    eye1 = np.eye(m1)
    for k in range(c_alg.dim):
        action[k] = q_map @ np.kron(eye1, e2.action[k]) @ u
    return FDHilbertModule(c_alg, action, inner, name="interior-tensor"), q_map


def tensor_left_action(left_a_on_e1: np.ndarray, m2: int,
                       q_map: np.ndarray) -> np.ndarray:
    """Push a left action on E1 through to the quotiented tensor product."""
    eye2 = np.eye(m2)
    return np.stack([q_map @ np.kron(l, eye2) @ q_map.conj().T
                     for l in left_a_on_e1])
