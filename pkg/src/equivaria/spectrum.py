"""Classify the irreducible representations of a fixed-point algebra.

For a system (X, W, H, I) the irreducibles of C(X, M_d)^W are labeled by
pairs (orbit Wx, irrep rho of the stabilizer W_x occurring in I_x); the
representation space is HS(rho, I_x)^{W_x} and the action is
pi_{x,rho}(k): s -> k(x) s.  The module cross-checks the classification
against the Wedderburn block structure and produces limit certificates for
closed-form cocycle families (the finite stand-in for Fell-topology
limit points, detected through matrix-coefficient convergence).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .groups import Subgroup
from .linalg import DEFAULT_TOL
from .matalg import MatrixStarAlgebra, block_decompose, commutant, generate
from .reps import UnitaryRep, enumerate_irreps, equivariant_maps, isotypic_projection
from .systems import (
    ClosedFormFamily,
    EquivariantSystem,
    fixed_point_algebra,
    invariant_functions,
    orbits_and_stabilizers,
)


class SpectrumError(ValueError):
    pass


@dataclass(frozen=True)
class SpectrumEntry:
    """One irreducible: orbit representative, stabilizer irrep, dimension."""

    orbit: tuple[int, ...]
    point: int                 # canonical representative: lowest index
    stabilizer: Subgroup
    rho: UnitaryRep            # irrep of the (reindexed) stabilizer
    dim: int                   # dim HS(rho, I_x)^{W_x}
    basis: np.ndarray          # (dim, d, dim rho) orthonormal equivariant maps

    @property
    def label(self) -> str:
        return f"x{self.point}:{self.rho.label}"


@dataclass(frozen=True)
class SpectrumDescription:
    system: EquivariantSystem
    entries: tuple[SpectrumEntry, ...]

    def dims(self) -> list[int]:
        return sorted(e.dim for e in self.entries)


def stabilizer_rep(sys: EquivariantSystem, x: int) -> tuple[Subgroup, UnitaryRep]:
    """The representation w -> I_{w,x} of the stabilizer of point x."""
    stab = [w for w in sys.group.elements() if sys.action[w, x] == x]
    sub = sys.group.subgroup(stab)
    mats = np.stack([sys.cocycle[sub.to_parent(v), x] for v in range(sub.group.order)])
    return sub, UnitaryRep(sub.group, mats, label=f"I@x{x}")


def classify_irreps(sys: EquivariantSystem, seed: int = 0,
                    tol: float = DEFAULT_TOL) -> SpectrumDescription:
    """One entry per (orbit, stabilizer irrep occurring in the cocycle)."""
    entries = []
    for orbit, _ in orbits_and_stabilizers(sys):
        x = orbit[0]
        sub, i_rep = stabilizer_rep(sys, x)
        for rho in enumerate_irreps(sub.group, seed=seed, tol=tol):
            maps = equivariant_maps(rho, i_rep, tol)
            if maps.shape[0] > 0:
                entries.append(SpectrumEntry(tuple(orbit), x, sub, rho,
                                             maps.shape[0], maps))
    return SpectrumDescription(sys, tuple(entries))


def realize_irrep(sys: EquivariantSystem, entry: SpectrumEntry,
                  tol: float = DEFAULT_TOL) -> np.ndarray:
    """Matrices of pi_{x,rho}(k): s -> k(x) s on the entry's basis.

    Returns one dim x dim matrix per basis element of the fixed-point
    algebra (ordered as invariant_functions); verified *-homomorphism with
    scalar commutant by the caller or test suite.
    """
    funcs = invariant_functions(sys, tol)
    x = entry.point
    s = entry.basis  # (m, d, r)
    mats = np.einsum("mar,kab,nbr->kmn", s.conj(), funcs[:, x], s)
    return mats


def realized_commutant_dim(mats: np.ndarray, tol: float = DEFAULT_TOL) -> int:
    alg = generate(mats, ambient_dim=mats.shape[1], tol=tol)
    return commutant(alg, tol).dim


@dataclass(frozen=True)
class WedderburnVerdict:
    ok: bool
    spectrum_dims: tuple[int, ...]
    block_sizes: tuple[int, ...]
    algebra_dim: int
    sum_of_squares: int

    def diff(self) -> str:
        return (f"spectrum dims {list(self.spectrum_dims)} vs "
                f"block sizes {list(self.block_sizes)}; "
                f"sum of squares {self.sum_of_squares} vs dim {self.algebra_dim}")


def wedderburn_crosscheck(sys: EquivariantSystem, seed: int = 0,
                          tol: float = DEFAULT_TOL) -> WedderburnVerdict:
    """The classification must reproduce the block structure exactly."""
    desc = classify_irreps(sys, seed=seed, tol=tol)
    fpa = fixed_point_algebra(sys, tol)
    blocks = block_decompose(fpa, seed=seed, tol=tol)
    dims = tuple(desc.dims())
    sizes = tuple(blocks.sizes())
    total = sum(d * d for d in dims)
    ok = dims == sizes and total == fpa.dim
    return WedderburnVerdict(ok, dims, sizes, fpa.dim, total)


# -- Fell-limit certificates -------------------------------------------------


@dataclass(frozen=True)
class LimitCertificate:
    family: str
    sequence: tuple[float, ...]
    point: object              # candidate limit point
    rho_label: str
    candidate_values: tuple[complex, ...]   # candidate rep on each test element
    residuals: tuple[float, ...]            # max residual per sample
    accepted: bool
    tail_length: int


def _default_profiles(center):
    """Decaying scalar bump profiles, flat to sixth order at `center`.

    Flatness at the candidate limit point makes the matrix-coefficient
    residuals fall off like |x - x0|^6 along the sequence, while the
    profiles still separate distant orbits (for rejection cases).
    """
    def sq(p):
        if isinstance(p, tuple):
            c = center if isinstance(center, tuple) else (center,) * len(p)
            return sum((float(a) - float(b)) ** 2 for a, b in zip(p, c))
        return (float(p) - float(center)) ** 2

    return [
        lambda p: 1.0 / (1.0 + sq(p) ** 3),
        lambda p: np.exp(-sq(p) ** 3),
        lambda p: sq(p) ** 3 / (1.0 + sq(p) ** 3),
    ]


def _family_invariant_value(family: ClosedFormFamily, h, point) -> np.ndarray:
    """k(x) for k = (1/|W|) sum_w alpha_w(h), evaluated from closed forms."""
    g = family.group
    acc = np.zeros((family.fiber_dim, family.fiber_dim), dtype=complex)
    for w in g.elements():
        w_inv = g.inverse(w)
        pre = family.point_map(w_inv, point)
        acc += family.cocycle_at(w, pre) @ h(pre) @ family.cocycle_at(w_inv, point)
    return acc / g.order


def fell_limit_certificate(family: ClosedFormFamily, sequence, point, rho_label: str,
                           seed: int = 0, tol: float = 1e-6,
                           tail_length: int = 8) -> LimitCertificate:
    """Matrix-coefficient limit test for a candidate 1-dim stabilizer irrep.

    The candidate is the entry (point, rho) of the limit point's stabilizer.
    For symmetrized bump test elements k, the certificate checks that
    <xi0 | k(x_n) xi0> converges to the candidate representation's value,
    where xi0 spans the rho-isotypic line of I_{point}.  Accepts iff the
    last `tail_length` residuals fall below tol * scale.
    """
    g = family.group
    canon = family._canon(point)
    stab = [w for w in g.elements()
            if family._canon(family.point_map(w, canon)) == canon]
    sub = g.subgroup(stab)
    mats = np.stack([np.asarray(family.cocycle_at(sub.to_parent(v), canon), dtype=complex)
                     for v in range(sub.group.order)])
    i_rep = UnitaryRep(sub.group, mats, label="I@limit")
    rho = None
    for cand in enumerate_irreps(sub.group, seed=seed):
        if cand.label == rho_label:
            rho = cand
    if rho is None:
        raise SpectrumError(f"no stabilizer irrep labeled {rho_label!r}")
    if rho.dim != 1:
        raise SpectrumError(
            "limit certificates support one-dimensional stabilizer irreps only")
    proj = isotypic_projection(i_rep, rho)
    rank = int(round(np.real(np.trace(proj))))
    if rank == 0:
        raise SpectrumError("candidate irrep does not occur in the limit cocycle")
    if rank != 1:
        raise SpectrumError(
            "limit certificates require multiplicity one for the candidate")
    evals, evecs = np.linalg.eigh((proj + proj.conj().T) / 2.0)
    xi0 = evecs[:, -1]

    d = family.fiber_dim
    tests = []
    for prof in _default_profiles(canon):
        for i in range(d):
            for j in range(d):
                def h(p, prof=prof, i=i, j=j):
                    out = np.zeros((d, d), dtype=complex)
                    out[i, j] = prof(p)
                    return out
                tests.append(h)

    seq = tuple(float(x) for x in np.asarray(sequence, dtype=float))
    cand_values = []
    for h in tests:
        k0 = _family_invariant_value(family, h, canon)
        cand_values.append(complex(np.vdot(xi0, k0 @ xi0)))
    residuals = []
    scale = 1.0
    for x_n in seq:
        worst = 0.0
        for h, cand in zip(tests, cand_values):
            kx = _family_invariant_value(family, h, family._canon(x_n))
            val = complex(np.vdot(xi0, kx @ xi0))
            scale = max(scale, abs(val), abs(cand))
            worst = max(worst, abs(val - cand))
        residuals.append(worst)
    tail = residuals[-tail_length:]
    accepted = len(residuals) >= tail_length and all(r < tol * scale for r in tail)
    return LimitCertificate(family.name, seq, canon, rho_label,
                            tuple(cand_values), tuple(residuals), accepted,
                            tail_length)
