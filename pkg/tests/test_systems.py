"""Equivariant systems, fixed-point algebras, and crossed products."""
import numpy as np
import pytest

from equivaria.groups import builtin_group, cyclic, symmetric
from equivaria.matalg import block_decompose, full_matrix_algebra, generate
from equivaria.linalg import spans_equal
from equivaria.reps import enumerate_irreps, regular_rep
from equivaria.systems import (
    AlgebraAction,
    EquivariantSystem,
    SystemError,
    alpha_matrix,
    anticomplete_point_system,
    crossed_product,
    dihedral_plane_system,
    embed_function,
    fixed_point_algebra,
    function_algebra,
    function_algebra_action,
    invariant_functions,
    iterated_crossed_iso,
    left_translation_system,
    one_point_system,
    orbits_and_stabilizers,
    phi_iso,
    quotient_algebra,
    restrict_system,
    trivial_system,
    z2_line_system,
    z2xz2_line_system,
)


def flip_system(n_points=3):
    """Z/2 flipping the symmetric grid, scalar trivial cocycle."""
    g = cyclic(2)
    pts = tuple(float(j) for j in range(-(n_points // 2), n_points // 2 + 1))
    action = np.stack([np.arange(n_points), np.arange(n_points)[::-1]])
    coc = np.ones((2, n_points, 1, 1), dtype=complex)
    return EquivariantSystem(g, pts, action, 1, coc, name="flip")


def test_cocycle_identity_enforced():
    g = cyclic(2)
    bad = np.ones((2, 1, 1, 1), dtype=complex)
    bad[1, 0, 0, 0] = 2.0  # not unitary
    with pytest.raises(SystemError):
        EquivariantSystem(g, ("pt",), np.zeros((2, 1), dtype=np.intp), 1, bad)


def test_orbits_and_stabilizers():
    sys = flip_system(5)
    orbits = orbits_and_stabilizers(sys)
    sizes = sorted(len(o) for o, _ in orbits)
    assert sizes == [1, 2, 2]
    fixed = next(stab for orb, stab in orbits if len(orb) == 1)
    assert len(fixed) == 2


@pytest.mark.parametrize("n", [1, 2])
def test_z2_line_fixed_point_algebra(n):
    sys = z2_line_system(n)
    fpa = fixed_point_algebra(sys)
    assert fpa.dim == 4 * n + 2
    sizes = sorted(block_decompose(fpa).sizes())
    assert sizes == [1, 1] + [2] * n


def test_alpha_is_star_automorphism():
    sys = z2_line_system(2)
    rng = np.random.default_rng(0)
    falg = function_algebra(sys)
    for w in sys.group.elements():
        mat = alpha_matrix(sys, w)
        for _ in range(3):
            a = falg.random_element(rng)
            b = falg.random_element(rng)
            ca, cb = falg.coefficients(a), falg.coefficients(b)
            lhs = falg.element(mat @ falg.coefficients(a @ b))
            rhs = falg.element(mat @ ca) @ falg.element(mat @ cb)
            assert np.abs(lhs - rhs).max() < 1e-9
            star = falg.element(mat @ falg.coefficients(a.conj().T))
            assert np.abs(star - falg.element(mat @ ca).conj().T).max() < 1e-9


def test_invariant_functions_are_fixed():
    sys = z2_line_system(2)
    funcs = invariant_functions(sys)
    for w in sys.group.elements():
        mat = alpha_matrix(sys, w)
        for f in funcs:
            moved = (mat @ f.reshape(-1)).reshape(f.shape)
            assert np.abs(moved - f).max() < 1e-9


def test_quotient_algebra_orbit_count():
    q = quotient_algebra(flip_system(5))
    assert q.dim == 3
    assert sorted(len(o) for o in q.orbits) == [1, 2, 2]


def test_group_algebra_crossed_product():
    # One point, trivial action: C >| W is the group algebra.
    for name in ("Z2", "S3"):
        g = builtin_group(name)
        sys = trivial_system(1, 1, g)
        cp = crossed_product(function_algebra_action(sys))
        sizes = sorted(block_decompose(cp.algebra).sizes())
        assert sizes == sorted(r.dim for r in enumerate_irreps(g))


def test_free_orbit_crossed_product_is_full():
    # Z/2 swapping two points: C(X) >| Z2 = M2.
    g = cyclic(2)
    action = np.array([[0, 1], [1, 0]])
    coc = np.ones((2, 2, 1, 1), dtype=complex)
    sys = EquivariantSystem(g, (0.0, 1.0), action, 1, coc, name="swap")
    cp = crossed_product(function_algebra_action(sys))
    assert cp.algebra.dim == 4
    assert spans_equal(cp.algebra.basis_rows(),
                       full_matrix_algebra(4).basis_rows()) is False
    assert sorted(block_decompose(cp.algebra).sizes()) == [2]


def test_phi_iso_on_flip_grid():
    witness, cp, target, phi = phi_iso(flip_system(5))
    assert witness.ok
    assert witness.multiplicative_residual < 1e-9


def test_iterated_crossed_iso_s3():
    g = symmetric(3)
    rotations = [w for w in g.elements() if g.product(w, w, w) == 0]
    complement = [0, min(set(g.elements()) - set(rotations))]
    sys = trivial_system(2, 1, g)
    action = function_algebra_action(sys)
    witness = iterated_crossed_iso(action, rotations, complement)
    assert witness.ok
    assert witness.multiplicative_residual < 1e-9


def test_restrict_system():
    sys = z2xz2_line_system(2)
    sub_sys, sub = restrict_system(sys, [0, 1])
    assert sub_sys.group.order == 2
    # The restricted factor is exactly the Z/2 line system.
    line = z2_line_system(2)
    assert np.array_equal(sub_sys.action, line.action)
    assert np.abs(sub_sys.cocycle - line.cocycle).max() < 1e-12


def test_left_translation_embedding():
    sys = flip_system(3)
    target = left_translation_system(sys)
    assert target.fiber_dim == sys.group.order
    k = np.zeros((3, 2, 2), dtype=complex)
    k[0] = np.eye(2)
    mat = embed_function(target, k)
    assert mat.shape == (6, 6)


def test_one_point_regular_rep_fpa():
    g = symmetric(3)
    sys = one_point_system(g, regular_rep(g).matrices)
    fpa = fixed_point_algebra(sys)
    # The commutant of the regular representation has dimension sum(mult^2).
    assert fpa.dim == 6
    assert sorted(block_decompose(fpa).sizes()) == [1, 1, 2]


def test_anticomplete_fixed_points():
    sys = anticomplete_point_system()
    fpa = fixed_point_algebra(sys)
    assert fpa.dim == 1


def test_dihedral_plane_validates():
    sys = dihedral_plane_system()
    assert sys.n_points == 17
    assert len(orbits_and_stabilizers(sys)) == 4
