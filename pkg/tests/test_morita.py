"""Scalar subgroups, the relation ideal, the Morita theorem, and reductions."""
import numpy as np
import pytest

from equivaria.groups import cyclic
from equivaria.morita import (
    MoritaError,
    SplittingError,
    assemble_toy_dual,
    c_ideal,
    scalar_subgroups,
    semidirect_reduction,
    verify_morita_theorem,
)
from equivaria.systems import (
    EquivariantSystem,
    anticomplete_point_system,
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


def test_scalar_subgroups_z2_line():
    sys = z2_line_system(2)
    origin = sys.points.index(0.0)
    scalar = scalar_subgroups(sys)
    assert scalar.stabilizers[origin] == (0, 1)
    # The cocycle at the origin is diag(1, -1): not scalar, so only the
    # identity contributes.
    assert scalar.scalar_elements[origin] == (0,)
    assert scalar.wprime[origin] == (0,)
    assert scalar.normalisation_ok
    assert scalar.completeness_ok


def test_scalar_subgroups_trivial_cocycle():
    scalar = scalar_subgroups(flip_system(3))
    fixed = flip_system(3).points.index(0.0)
    # With a trivial cocycle every stabilizer element is scalar with value 1.
    assert scalar.wprime[fixed] == (0, 1)
    assert scalar.scalar_elements[fixed] == (0, 1)
    assert scalar.normalisation_ok
    assert scalar.completeness_ok


def test_scalar_subgroups_anticomplete():
    scalar = scalar_subgroups(anticomplete_point_system())
    # The nontrivial element acts by the scalar -1: scalar but not normalised.
    assert scalar.scalar_elements[0] == (0, 1)
    assert scalar.wprime[0] == (0,)
    assert not scalar.normalisation_ok
    assert not scalar.completeness_ok


def test_c_ideal_no_constraints_is_whole():
    sys = z2_line_system(1)
    cid = c_ideal(sys)
    # W'_x is trivial at every point: no constraints, C = the full crossed
    # product of dimension |W| |X|.
    assert cid.dim == 2 * sys.n_points
    assert cid.algebra.dim == cid.cp.algebra.dim


def test_c_ideal_anticomplete_dimension():
    cid = c_ideal(anticomplete_point_system())
    assert cid.dim == 2


def test_c_ideal_fixed_point_constraint():
    # One fixed point with full scalar stabilizer pins f_e = f_w there:
    # dim C = |W| |X| - 1.
    cid = c_ideal(flip_system(3))
    assert cid.dim == 2 * 3 - 1


def test_morita_theorem_z2_line():
    verdict = verify_morita_theorem(z2_line_system(1))
    assert verdict.conditions_hold
    assert verdict.spans_match
    assert verdict.j_dim == verdict.c_dim
    assert verdict.witness is not None and verdict.witness.ok
    assert verdict.fpa_blocks == verdict.c_blocks
    assert verdict.ok


def test_morita_theorem_anticomplete_strict():
    verdict = verify_morita_theorem(anticomplete_point_system())
    assert not verdict.conditions_hold
    assert verdict.j_dim == 1
    assert verdict.c_dim == 2
    assert verdict.strict_inclusion
    assert verdict.j_in_c_residual < 1e-8
    assert verdict.ok


def test_semidirect_reduction_z2xz2_line():
    report = semidirect_reduction(z2xz2_line_system(1), [0, 2], [0, 1])
    assert report.ok
    assert report.fpa_block_count == report.final_block_count == 3  # n + 2
    assert report.ideal_transport_ok
    assert report.iso_mult_residual < 1e-9


def test_reduction_with_trivial_wprime_is_the_theorem():
    # W' = {e}: the chain collapses to fpa ~ C(X) >| W.
    report = semidirect_reduction(z2_line_system(1), [0], [0, 1])
    assert report.ok


def test_reduction_with_trivial_r():
    # R = {e}: the final algebra is the orbit-function algebra C(X/W').
    report = semidirect_reduction(flip_system(3), [0, 1], [0])
    assert report.ok
    assert report.final_dim == 2   # two orbits: {0} and {-1, 1}


def test_reduction_rejects_bad_splitting():
    # On the line with the sign cocycle, W'_origin is trivial, so the
    # global splitting W' = W fails exactly at the origin.
    sys = z2_line_system(1)
    with pytest.raises(SplittingError) as err:
        semidirect_reduction(sys, [0, 1], [0])
    assert err.value.point == sys.points.index(0.0)


def test_toy_dual_single_component():
    report = assemble_toy_dual([(z2xz2_line_system(1), [0, 2], [0, 1])])
    assert report.ok
    assert len(report.reductions) == 1


def test_toy_dual_two_components():
    report = assemble_toy_dual([
        (z2xz2_line_system(1), [0, 2], [0, 1]),
        (z2_line_system(1), [0], [0, 1]),
    ])
    assert report.ok
    assert report.witness.block_counts is not None
    # The assembled witness covers the direct sum of both components.
    assert len(report.fpa_dims) == 2
