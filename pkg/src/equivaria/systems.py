"""Equivariant systems (X, W, H, I) at finite scale.

A system is a finite point set X, a finite group W permuting it, a fiber
dimension d, and a unitary cocycle I_{w,x} satisfying
I_{w1, w2 x} I_{w2, x} = I_{w1 w2, x}.  The induced action on matrix-valued
functions is alpha_w(k)(x) = I_{w, w^-1 x} k(w^-1 x) I_{w^-1, x}.

The module also realizes crossed products B >| W by the regular embedding
on l^2(W) (x) C^N and verifies the two structural isomorphisms
C(X) >| W ~ C(X, K(l^2 W))^W and (B >| U) >| V ~ B >| W for W = U >| V.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .groups import FiniteGroup, GroupError, semidirect_decomposition
from .linalg import (
    DEFAULT_TOL,
    flatten,
    nullspace_rows,
    orthonormal_rows,
    spans_equal,
    unflatten,
)
from .matalg import MatrixStarAlgebra, algebra_from_span
from .reps import regular_rep


class SystemError(ValueError):
    pass


@dataclass(frozen=True)
class EquivariantSystem:
    """The datum (X, W, H, I): points, action, fiber dimension, cocycle.

    `action[w, x]` is the index of w.x; `cocycle[w, x]` is the d x d unitary
    I_{w,x}.  Systems are validated eagerly; invalid ones never exist.
    """

    group: FiniteGroup
    points: tuple
    action: np.ndarray   # (|W|, |X|) point permutation
    fiber_dim: int
    cocycle: np.ndarray  # (|W|, |X|, d, d)
    name: str = "system"

    def __post_init__(self):
        w_n = self.group.order
        x_n = len(self.points)
        action = np.asarray(self.action, dtype=np.intp)
        coc = np.asarray(self.cocycle, dtype=complex)
        d = self.fiber_dim
        if action.shape != (w_n, x_n):
            raise SystemError("action table has wrong shape")
        if coc.shape != (w_n, x_n, d, d):
            raise SystemError("cocycle tensor has wrong shape")
        if not np.array_equal(action[0], np.arange(x_n)):
            raise SystemError("identity does not act trivially on points")
        for w in range(w_n):
            if sorted(action[w]) != list(range(x_n)):
                raise SystemError(f"element {w} does not permute the points")
        mul = self.group.mul
        for w1 in range(w_n):
            for w2 in range(w_n):
                if not np.array_equal(action[mul[w1, w2]], action[w1][action[w2]]):
                    raise SystemError("action is not a group action")
        eye = np.eye(d)
        for w in range(w_n):
            for x in range(x_n):
                u = coc[w, x]
                if np.linalg.norm(u.conj().T @ u - eye) > 1e-9 * d:
                    raise SystemError(f"cocycle I_({w},{x}) is not unitary")
        for w1 in range(w_n):
            for w2 in range(w_n):
                for x in range(x_n):
                    lhs = coc[w1, action[w2, x]] @ coc[w2, x]
                    rhs = coc[mul[w1, w2], x]
                    if np.linalg.norm(lhs - rhs) > 1e-9 * d:
                        raise SystemError(
                            f"cocycle identity fails at (w1={w1}, w2={w2}, x={x})")
        object.__setattr__(self, "action", action)
        object.__setattr__(self, "cocycle", coc)
        object.__setattr__(self, "points", tuple(self.points))

    @property
    def n_points(self) -> int:
        return len(self.points)

    @property
    def total_dim(self) -> int:
        return self.n_points * self.fiber_dim


# -- system builders ---------------------------------------------------------


def trivial_system(n_points: int, fiber_dim: int = 1,
                   group: FiniteGroup | None = None) -> EquivariantSystem:
    """Trivial group (or trivial action with identity cocycle) on n points."""
    from .groups import cyclic
    g = group or cyclic(1)
    action = np.tile(np.arange(n_points), (g.order, 1))
    coc = np.tile(np.eye(fiber_dim, dtype=complex), (g.order, n_points, 1, 1))
    return EquivariantSystem(g, tuple(range(n_points)), action, fiber_dim, coc,
                             name="trivial")


def one_point_system(group: FiniteGroup, rep_matrices: np.ndarray,
                     name: str = "one-point") -> EquivariantSystem:
    """A single fixed point with cocycle a unitary representation of W."""
    mats = np.asarray(rep_matrices, dtype=complex)
    d = mats.shape[1]
    action = np.zeros((group.order, 1), dtype=np.intp)
    return EquivariantSystem(group, ("pt",), action, d, mats[:, None], name=name)


@dataclass(frozen=True)
class ClosedFormFamily:
    """A named cocycle family over the real line/plane, sampled onto grids.

    `point_map(w, x)` moves a point; `cocycle_at(w, x)` evaluates I_{w,x}.
    """

    name: str
    group: FiniteGroup
    fiber_dim: int
    point_map: object   # callable (w, point) -> point
    cocycle_at: object  # callable (w, point) -> (d, d) array

    def system(self, points, name: str | None = None) -> EquivariantSystem:
        pts = [self._canon(p) for p in points]
        index = {p: i for i, p in enumerate(pts)}
        w_n = self.group.order
        action = np.zeros((w_n, len(pts)), dtype=np.intp)
        coc = np.zeros((w_n, len(pts), self.fiber_dim, self.fiber_dim), dtype=complex)
        for w in range(w_n):
            for i, p in enumerate(pts):
                q = self._canon(self.point_map(w, p))
                if q not in index:
                    raise SystemError(f"grid is not closed under the action: {p} -> {q}")
                action[w, i] = index[q]
                coc[w, i] = self.cocycle_at(w, p)
        return EquivariantSystem(self.group, tuple(pts), action, self.fiber_dim,
                                 coc, name=name or self.name)

    @staticmethod
    def _canon(p):
        if isinstance(p, tuple):
            return tuple(round(float(c), 12) for c in p)
        return round(float(p), 12)


def z2_line_family() -> ClosedFormFamily:
    """Z/2 on the line by x -> -x with I_{w,x} = diag(e^{ix}, -e^{-ix})."""
    from .groups import cyclic
    g = cyclic(2)

    def point_map(w, x):
        return -x if w == 1 else x

    def cocycle_at(w, x):
        if w == 0:
            return np.eye(2, dtype=complex)
        return np.diag([np.exp(1j * x), -np.exp(-1j * x)])

    return ClosedFormFamily("z2-line", g, 2, point_map, cocycle_at)


def z2_line_system(n: int) -> EquivariantSystem:
    """The symmetric grid {-n..n} (2n+1 points) of the Z/2 line family."""
    pts = [float(j) for j in range(-n, n + 1)]
    return z2_line_family().system(pts, name=f"z2-line-{n}")


def dihedral_plane_family() -> ClosedFormFamily:
    """The symmetry group of the square on the plane, constant cocycle I=w."""
    from .groups import dihedral
    g = dihedral(8)
    mats = _dihedral8_standard_matrices()

    def point_map(w, p):
        v = mats[w].real @ np.array(p, dtype=float)
        return (float(v[0]), float(v[1]))

    def cocycle_at(w, p):
        return mats[w]

    return ClosedFormFamily("dihedral-plane", g, 2, point_map, cocycle_at)


def _dihedral8_standard_matrices() -> np.ndarray:
    """The standard 2-dim representation matching the builtin D8 ordering."""
    from .groups import dihedral
    g = dihedral(8)
    rot = np.array([[0.0, -1.0], [1.0, 0.0]])
    flip = np.array([[1.0, 0.0], [0.0, -1.0]])
    mats = np.zeros((8, 2, 2), dtype=complex)
    # Builtin ordering: index k < 4 is r^k, index 4 + k is r^k s.
    for k in range(4):
        mats[k] = np.linalg.matrix_power(rot, k)
        mats[4 + k] = np.linalg.matrix_power(rot, k) @ flip
    for a in range(8):
        for b in range(8):
            if np.abs(mats[g.mul[a, b]] - mats[a] @ mats[b]).max() > 1e-12:
                raise SystemError("dihedral matrices do not match the group table")
    return mats


def dihedral_plane_system(generic=(2.0, 1.0)) -> EquivariantSystem:
    """Origin + one axis orbit + one diagonal orbit + one generic orbit."""
    fam = dihedral_plane_family()
    seeds = [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), tuple(map(float, generic))]
    pts = []
    for s in seeds:
        for w in range(fam.group.order):
            q = fam._canon(fam.point_map(w, s))
            if q not in pts:
                pts.append(q)
    return fam.system(pts, name="dihedral-plane")


def z2xz2_line_system(n: int) -> EquivariantSystem:
    """Z/2 x Z/2 on the grid {-n..n}: the first factor fixes every point with
    identity cocycle, the second factor is the Z/2 line family."""
    from .groups import cyclic, direct_product
    g = direct_product(cyclic(2), cyclic(2))   # (a, b) -> 2a + b
    fam = z2_line_family()
    pts = [float(j) for j in range(-n, n + 1)]
    index = {p: i for i, p in enumerate(pts)}
    action = np.zeros((4, len(pts)), dtype=np.intp)
    coc = np.zeros((4, len(pts), 2, 2), dtype=complex)
    for w in range(4):
        b = w % 2
        for i, p in enumerate(pts):
            action[w, i] = index[float(fam.point_map(b, p))]
            coc[w, i] = fam.cocycle_at(b, p)
    return EquivariantSystem(g, tuple(pts), action, 2, coc, name=f"z2xz2-line-{n}")


def restrict_system(sys: EquivariantSystem, elems):
    """The same points and cocycle, acted on by the subgroup spanned by `elems`.

    Returns (system, subgroup); the subgroup carries the reindexing maps.
    """
    sub = sys.group.subgroup(sorted(set(int(e) for e in elems)))
    parents = [sub.to_parent(v) for v in range(sub.group.order)]
    action = sys.action[parents]
    coc = sys.cocycle[parents]
    return EquivariantSystem(sub.group, sys.points, action, sys.fiber_dim, coc,
                             name=f"{sys.name}|sub"), sub


def anticomplete_point_system() -> EquivariantSystem:
    """One point, W = Z/2, scalar fiber, I_w = -1 on the nontrivial element."""
    from .groups import cyclic
    g = cyclic(2)
    action = np.zeros((2, 1), dtype=np.intp)
    coc = np.array([[[[1.0]]], [[[-1.0]]]], dtype=complex)
    return EquivariantSystem(g, ("pt",), action, 1, coc, name="anticomplete-point")


def left_translation_system(sys: EquivariantSystem) -> EquivariantSystem:
    """Same points and action, fiber l^2(W), constant left-translation cocycle."""
    lam = regular_rep(sys.group).matrices
    w_n = sys.group.order
    coc = np.tile(lam[:, None], (1, sys.n_points, 1, 1))
    return EquivariantSystem(sys.group, sys.points, sys.action, w_n, coc,
                             name=sys.name + "-left-translation")


# -- the induced action on functions ----------------------------------------


def alpha(sys: EquivariantSystem, w: int, k: np.ndarray) -> np.ndarray:
    """alpha_w(k)(x) = I_{w, w^-1 x} k(w^-1 x) I_{w^-1, x}."""
    k = np.asarray(k, dtype=complex)
    w_inv = sys.group.inverse(w)
    pre = sys.action[w_inv]  # x -> w^-1 x
    return np.einsum("xij,xjk,xkl->xil",
                     sys.cocycle[w, pre], k[pre], sys.cocycle[w_inv])


def alpha_matrix(sys: EquivariantSystem, w: int) -> np.ndarray:
    """alpha_w as a matrix on flattened function coordinates C^{|X| d^2}."""
    d = sys.fiber_dim
    x_n = sys.n_points
    w_inv = sys.group.inverse(w)
    out = np.zeros((x_n * d * d, x_n * d * d), dtype=complex)
    for x in range(x_n):
        pre = sys.action[w_inv, x]
        block = np.kron(sys.cocycle[w, pre], sys.cocycle[w_inv, x].T)
        out[x * d * d:(x + 1) * d * d, pre * d * d:(pre + 1) * d * d] = block
    return out


def embed_function(sys: EquivariantSystem, k: np.ndarray) -> np.ndarray:
    """Block-diagonal matrix of a function in M_{|X| d}, blocks by point index."""
    k = np.asarray(k, dtype=complex)
    d = sys.fiber_dim
    out = np.zeros((sys.total_dim, sys.total_dim), dtype=complex)
    for x in range(sys.n_points):
        out[x * d:(x + 1) * d, x * d:(x + 1) * d] = k[x]
    return out


def extract_function(sys: EquivariantSystem, mat: np.ndarray) -> np.ndarray:
    d = sys.fiber_dim
    return np.stack([mat[x * d:(x + 1) * d, x * d:(x + 1) * d]
                     for x in range(sys.n_points)])


def function_algebra(sys: EquivariantSystem) -> MatrixStarAlgebra:
    """All of C(X, M_d), embedded block-diagonally; dim |X| d^2."""
    d = sys.fiber_dim
    x_n = sys.n_points
    basis = np.zeros((x_n * d * d, sys.total_dim, sys.total_dim), dtype=complex)
    idx = 0
    for x in range(x_n):
        for i in range(d):
            for j in range(d):
                basis[idx, x * d + i, x * d + j] = 1.0
                idx += 1
    return MatrixStarAlgebra(sys.total_dim, basis)


def invariant_functions(sys: EquivariantSystem, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Orthonormal basis of {k : alpha_w(k) = k for all w}, as (dim, |X|, d, d)."""
    d = sys.fiber_dim
    size = sys.n_points * d * d
    eye = np.eye(size)
    stacked = [alpha_matrix(sys, w) - eye for w in sys.group.elements() if w != 0]
    if not stacked:
        rows = np.eye(size, dtype=complex)
    else:
        rows = nullspace_rows(np.vstack(stacked), tol)
    return rows.reshape(-1, sys.n_points, d, d)


def fixed_point_algebra(sys: EquivariantSystem, tol: float = DEFAULT_TOL) -> MatrixStarAlgebra:
    """C(X, M_d)^W as a matrix *-algebra in M_{|X| d}."""
    funcs = invariant_functions(sys, tol)
    basis = np.stack([embed_function(sys, k) for k in funcs]) if funcs.shape[0] \
        else np.zeros((0, sys.total_dim, sys.total_dim), dtype=complex)
    alg = MatrixStarAlgebra(sys.total_dim, basis)
    alg.validate(max(tol, 1e-8))
    return alg


# -- orbits ------------------------------------------------------------------


def orbits_and_stabilizers(sys: EquivariantSystem) -> list[tuple[list[int], list[int]]]:
    """Partition of X into orbits (lowest index first) with stabilizer elements."""
    seen = set()
    out = []
    for x in range(sys.n_points):
        if x in seen:
            continue
        orbit = sorted(set(int(sys.action[w, x]) for w in sys.group.elements()))
        seen.update(orbit)
        stab = [w for w in sys.group.elements() if sys.action[w, x] == x]
        out.append((orbit, stab))
    return out


@dataclass(frozen=True)
class QuotientAlgebra:
    """C(X)^W presented as functions on the orbit set X/W."""

    algebra: MatrixStarAlgebra          # inside M_{|X|}
    orbits: tuple[tuple[int, ...], ...]
    orbit_basis: np.ndarray             # (n_orbits, |X|): normalized indicators

    @property
    def dim(self) -> int:
        return len(self.orbits)


def quotient_algebra(sys: EquivariantSystem, tol: float = DEFAULT_TOL) -> QuotientAlgebra:
    """For scalar fibers with trivial cocycle: C(X)^W ~ C(X/W)."""
    if sys.fiber_dim != 1:
        raise SystemError("quotient algebra requires scalar fibers")
    if np.linalg.norm(sys.cocycle - 1.0) > 1e-9 * sys.cocycle.size:
        raise SystemError("quotient algebra requires the trivial cocycle")
    orbs = [tuple(o) for o, _ in orbits_and_stabilizers(sys)]
    n = sys.n_points
    indicators = np.zeros((len(orbs), n), dtype=complex)
    basis = np.zeros((len(orbs), n, n), dtype=complex)
    for i, orb in enumerate(orbs):
        indicators[i, list(orb)] = 1.0 / np.sqrt(len(orb))
        basis[i][list(orb), list(orb)] = 1.0 / np.sqrt(len(orb))
    q = QuotientAlgebra(MatrixStarAlgebra(n, basis), tuple(orbs), indicators)
    # Cross-check against the invariant-function solver.
    fpa = fixed_point_algebra(sys, tol)
    if not spans_equal(fpa.basis_rows(), q.algebra.basis_rows(), max(tol, 1e-8)):
        raise SystemError("orbit indicators disagree with the invariant solver")
    return q


# -- actions on algebras and crossed products --------------------------------


@dataclass(frozen=True)
class AlgebraAction:
    """An action of a finite group on a matrix *-algebra by *-automorphisms.

    `maps[w]` acts on basis-coefficient vectors of the algebra.
    """

    group: FiniteGroup
    algebra: MatrixStarAlgebra
    maps: np.ndarray  # (|W|, dim, dim)

    def apply(self, w: int, a: np.ndarray) -> np.ndarray:
        return self.algebra.element(self.maps[w] @ self.algebra.coefficients(a))

    def validate(self, tol: float = 1e-8) -> None:
        alg = self.algebra
        k = alg.dim
        if self.maps.shape != (self.group.order, k, k):
            raise SystemError("action maps have wrong shape")
        if np.linalg.norm(self.maps[0] - np.eye(k)) > tol * max(k, 1):
            raise SystemError("identity does not act as identity")
        mul = self.group.mul
        for w1 in self.group.elements():
            for w2 in self.group.elements():
                if np.linalg.norm(self.maps[mul[w1, w2]] - self.maps[w1] @ self.maps[w2]) > tol * max(k, 1):
                    raise SystemError("maps are not a group homomorphism")
        for w in self.group.elements():
            for i in range(k):
                bi = alg.basis[i]
                img_star = self.apply(w, bi.conj().T)
                if np.linalg.norm(img_star - self.apply(w, bi).conj().T) > tol:
                    raise SystemError("action does not preserve the involution")
                for j in range(k):
                    bj = alg.basis[j]
                    lhs = self.apply(w, bi @ bj)
                    rhs = self.apply(w, bi) @ self.apply(w, bj)
                    if np.linalg.norm(lhs - rhs) > tol:
                        raise SystemError("action is not multiplicative")


def trivial_algebra_action(group: FiniteGroup, alg: MatrixStarAlgebra) -> AlgebraAction:
    maps = np.tile(np.eye(alg.dim, dtype=complex), (group.order, 1, 1))
    return AlgebraAction(group, alg, maps)


def function_algebra_action(sys: EquivariantSystem) -> AlgebraAction:
    """alpha as an AlgebraAction on the full function algebra of the system."""
    alg = function_algebra(sys)
    maps = np.stack([alpha_matrix(sys, w) for w in sys.group.elements()])
    return AlgebraAction(sys.group, alg, maps)


@dataclass(frozen=True)
class CrossedProduct:
    """B >| W realized faithfully on l^2(W) (x) C^N by the regular embedding.

    Coefficient elements are (|W|, dim B) arrays f meaning sum_w b(f_w) w.
    """

    action: AlgebraAction
    algebra: MatrixStarAlgebra  # span of the embedded elements

    @property
    def group(self) -> FiniteGroup:
        return self.action.group

    def embed(self, f: np.ndarray) -> np.ndarray:
        return crossed_embed(self.action, f)

    def multiply(self, f: np.ndarray, g: np.ndarray) -> np.ndarray:
        return crossed_multiply(self.action, f, g)

    def star(self, f: np.ndarray) -> np.ndarray:
        return crossed_star(self.action, f)


def crossed_embed(action: AlgebraAction, f: np.ndarray) -> np.ndarray:
    """Regular embedding: (b w)(delta_v (x) a) = delta_{wv} (x) beta_{(wv)^-1}(b) a."""
    g = action.group
    alg = action.algebra
    n = alg.ambient_dim
    w_n = g.order
    f = np.asarray(f, dtype=complex)
    out = np.zeros((w_n * n, w_n * n), dtype=complex)
    for w in range(w_n):
        if not f[w].any():
            continue
        for v in range(w_n):
            vp = g.mul[w, v]
            b = alg.element(action.maps[g.inv[vp]] @ f[w])
            out[vp * n:(vp + 1) * n, v * n:(v + 1) * n] += b
    return out


def crossed_multiply(action: AlgebraAction, f: np.ndarray, g: np.ndarray) -> np.ndarray:
    """(a w)(b v) = a beta_w(b) (w v), coefficient-level."""
    grp = action.group
    alg = action.algebra
    out = np.zeros_like(np.asarray(f, dtype=complex))
    for w in range(grp.order):
        if not f[w].any():
            continue
        a = alg.element(f[w])
        for v in range(grp.order):
            if not g[v].any():
                continue
            prod = a @ alg.element(action.maps[w] @ g[v])
            out[grp.mul[w, v]] += alg.coefficients(prod)
    return out


def crossed_star(action: AlgebraAction, f: np.ndarray) -> np.ndarray:
    """(a w)* = beta_{w^-1}(a*) w^-1."""
    grp = action.group
    alg = action.algebra
    f = np.asarray(f, dtype=complex)
    out = np.zeros_like(f)
    for w in range(grp.order):
        star_coeffs = alg.coefficients(alg.element(f[w]).conj().T)
        out[grp.inv[w]] += action.maps[grp.inv[w]] @ star_coeffs
    return out


def crossed_product(action: AlgebraAction, tol: float = DEFAULT_TOL) -> CrossedProduct:
    """The crossed product algebra; dim = |W| dim B, embedding injective."""
    action.validate()
    g = action.group
    k = action.algebra.dim
    mats = []
    for w in range(g.order):
        for i in range(k):
            f = np.zeros((g.order, k), dtype=complex)
            f[w, i] = 1.0
            mats.append(crossed_embed(action, f))
    n = g.order * action.algebra.ambient_dim
    if not mats:
        return CrossedProduct(action, MatrixStarAlgebra(n, np.zeros((0, n, n), dtype=complex)))
    alg = algebra_from_span(np.stack(mats), tol=tol)
    if alg.dim != g.order * k:
        raise SystemError(
            f"regular embedding is not injective: dim {alg.dim} != {g.order * k}")
    return CrossedProduct(action, alg)


# -- structural isomorphisms -------------------------------------------------


@dataclass(frozen=True)
class IsoWitness:
    """A verified *-isomorphism between two concretely realized algebras."""

    source_dim: int
    target_dim: int
    bijective: bool
    multiplicative_residual: float
    star_residual: float

    @property
    def ok(self) -> bool:
        return self.bijective and self.multiplicative_residual < 1e-8 \
            and self.star_residual < 1e-8


def phi_iso(sys: EquivariantSystem, tol: float = DEFAULT_TOL,
            rng: np.random.Generator | None = None):
    """The isomorphism C(X) >| W ~ C(X, K(l^2 W))^W for scalar-fiber systems.

    phi(f w)(x): delta_v -> f(w v^-1 x) delta_{v w^-1}.  Returns the witness
    together with the image map on crossed-product coefficients.
    """
    if sys.fiber_dim != 1:
        raise SystemError("phi_iso requires scalar fibers")
    g = sys.group
    x_n = sys.n_points
    w_n = g.order
    rng = rng or np.random.default_rng(0)

    action = function_algebra_action(sys)   # C(X) with the translation action
    cp = crossed_product(action, tol)
    target_sys = left_translation_system(sys)
    target = fixed_point_algebra(target_sys, tol)

    def phi(f):
        """f: (|W|, |X|) coefficients -> block-diagonal matrix in the target."""
        func = np.zeros((x_n, w_n, w_n), dtype=complex)
        for w in range(w_n):
            for v in range(w_n):
                vp = g.mul[v, g.inv[w]]  # row index v w^-1
                for x in range(x_n):
                    # f(w v^-1 x)
                    src = sys.action[g.mul[w, g.inv[v]], x]
                    func[x, vp, v] += f[w, src]
        return embed_function(target_sys, func)

    basis_imgs = []
    for w in range(w_n):
        for x in range(x_n):
            f = np.zeros((w_n, x_n), dtype=complex)
            f[w, x] = 1.0
            basis_imgs.append(phi(f))
    img_rows = orthonormal_rows(flatten(np.stack(basis_imgs)), tol)
    bijective = (img_rows.shape[0] == w_n * x_n
                 and spans_equal(img_rows, target.basis_rows(), max(tol, 1e-8)))

    mult_res = 0.0
    star_res = 0.0
    for _ in range(8):
        f = rng.standard_normal((w_n, x_n)) + 1j * rng.standard_normal((w_n, x_n))
        h = rng.standard_normal((w_n, x_n)) + 1j * rng.standard_normal((w_n, x_n))
        lhs = phi(cp.multiply(f, h))
        rhs = phi(f) @ phi(h)
        mult_res = max(mult_res, float(np.abs(lhs - rhs).max())
                       / max(1.0, float(np.abs(rhs).max())))
        star_res = max(star_res, float(np.abs(phi(cp.star(f)) - phi(f).conj().T).max())
                       / max(1.0, float(np.abs(phi(f)).max())))
    witness = IsoWitness(w_n * x_n, target.dim, bijective, mult_res, star_res)
    return witness, cp, target, phi


def iterated_crossed_iso(action: AlgebraAction, normal, complement,
                         tol: float = DEFAULT_TOL,
                         rng: np.random.Generator | None = None):
    """(B >| U) >| V ~ B >| W for W = U >| V, via phi((a u) v) = a (u v).

    `normal` and `complement` are element lists of W.  Verifies the map is a
    *-isomorphism at coefficient level; returns the witness.
    """
    g = action.group
    factor = semidirect_decomposition(g, normal, complement)
    u_sub = g.subgroup(sorted(set(int(e) for e in normal)))
    v_sub = g.subgroup(sorted(set(int(e) for e in complement)))
    rng = rng or np.random.default_rng(0)
    alg = action.algebra
    k = alg.dim
    u_n, v_n = u_sub.group.order, v_sub.group.order

    # Inner layer A = B >| U with the restricted action.
    inner_maps = np.stack([action.maps[u_sub.to_parent(u)] for u in range(u_n)])
    inner_action = AlgebraAction(u_sub.group, alg, inner_maps)

    def inner_mult(f, h):
        return crossed_multiply(inner_action, f, h)

    def inner_star(f):
        return crossed_star(inner_action, f)

    # The action of V on A-coefficients: alpha_v(a u) = beta_v(a) (v u v^-1).
    def outer_apply(v, f):
        vp = v_sub.to_parent(v)
        out = np.zeros_like(f)
        for u in range(u_n):
            conj = u_sub.from_parent(g.conjugate(vp, u_sub.to_parent(u)))
            out[conj] += action.maps[vp] @ f[u]
        return out

    # Elements of (B >| U) >| V: arrays (v_n, u_n, k).
    def outer_mult(fa, fb):
        out = np.zeros_like(fa)
        for v1 in range(v_n):
            if not fa[v1].any():
                continue
            for v2 in range(v_n):
                if not fb[v2].any():
                    continue
                prod = inner_mult(fa[v1], outer_apply(v1, fb[v2]))
                out[v_sub.group.mul[v1, v2]] += prod
        return out

    def outer_star(fa):
        out = np.zeros_like(fa)
        for v in range(v_n):
            vi = v_sub.group.inv[v]
            out[vi] += outer_apply(vi, inner_star(fa[v]))
        return out

    # phi: (v_n, u_n, k) -> (|W|, k) via (u, v) -> uv.
    def phi(fa):
        out = np.zeros((g.order, k), dtype=complex)
        for v in range(v_n):
            for u in range(u_n):
                w = g.product(u_sub.to_parent(u), v_sub.to_parent(v))
                out[w] += fa[v, u]
        return out

    mult_res = 0.0
    star_res = 0.0
    for _ in range(8):
        fa = rng.standard_normal((v_n, u_n, k)) + 1j * rng.standard_normal((v_n, u_n, k))
        fb = rng.standard_normal((v_n, u_n, k)) + 1j * rng.standard_normal((v_n, u_n, k))
        lhs = phi(outer_mult(fa, fb))
        rhs = crossed_multiply(action, phi(fa), phi(fb))
        mult_res = max(mult_res, float(np.abs(lhs - rhs).max())
                       / max(1.0, float(np.abs(rhs).max())))
        lhs_s = phi(outer_star(fa))
        rhs_s = crossed_star(action, phi(fa))
        star_res = max(star_res, float(np.abs(lhs_s - rhs_s).max())
                       / max(1.0, float(np.abs(rhs_s).max())))
    # phi is bijective iff (u, v) -> uv covers W once: guaranteed by the
    # verified semidirect decomposition.
    bijective = len(factor) == g.order
    return IsoWitness(v_n * u_n * k, g.order * k, bijective, mult_res, star_res)
