"""Spectrum classification, Wedderburn cross-checks, and limit certificates."""
import numpy as np
import pytest

from equivaria.groups import symmetric
from equivaria.matalg import commutant, generate
from equivaria.reps import regular_rep
from equivaria.spectrum import (
    SpectrumError,
    classify_irreps,
    fell_limit_certificate,
    realize_irrep,
    realized_commutant_dim,
    stabilizer_rep,
    wedderburn_crosscheck,
)
from equivaria.systems import (
    ClosedFormFamily,
    dihedral_plane_system,
    one_point_system,
    trivial_system,
    z2_line_family,
    z2_line_system,
)


def test_stabilizer_rep_at_origin():
    sys = z2_line_system(2)
    origin = sys.points.index(0.0)
    sub, i_rep = stabilizer_rep(sys, origin)
    assert sub.group.order == 2
    assert np.abs(i_rep.matrices[1] - np.diag([1.0, -1.0])).max() < 1e-12


def test_classification_z2_line():
    sys = z2_line_system(3)
    desc = classify_irreps(sys)
    dims = sorted(e.dim for e in desc.entries)
    assert dims == [1, 1, 2, 2, 2]
    origin_labels = sorted(e.label for e in desc.entries if e.stabilizer.group.order == 2)
    assert len(origin_labels) == 2


def test_realized_irreps_are_irreducible():
    sys = z2_line_system(2)
    desc = classify_irreps(sys)
    for entry in desc.entries:
        mats = realize_irrep(sys, entry)
        assert mats.shape[1] == entry.dim
        # Scalar commutant = irreducibility of the realized representation.
        assert realized_commutant_dim(mats) == 1
        # *-homomorphism spot check against the algebra product.
        alg = generate(mats, ambient_dim=entry.dim)
        assert alg.closure_residual() < 1e-8


def test_crosscheck_on_fixtures():
    for sys in (z2_line_system(2), trivial_system(3, 2),
                one_point_system(symmetric(3), regular_rep(symmetric(3)).matrices)):
        verdict = wedderburn_crosscheck(sys)
        assert verdict.ok, verdict.diff()


def test_crosscheck_dihedral_plane():
    verdict = wedderburn_crosscheck(dihedral_plane_system())
    assert verdict.ok, verdict.diff()


def test_fell_certificate_accepts_both_origin_entries():
    fam = z2_line_family()
    seq = [1.0 / k for k in range(1, 17)]
    for label in ("1d0", "1d1"):
        cert = fell_limit_certificate(fam, seq, 0.0, label, tail_length=4)
        assert cert.accepted, (label, cert.residuals[-4:])


def test_fell_certificate_unknown_label():
    fam = z2_line_family()
    seq = [1.0 / k for k in range(1, 17)]
    with pytest.raises(SpectrumError):
        fell_limit_certificate(fam, seq, 5.0, "nonexistent")


def test_fell_certificate_rejects_wrong_limit():
    # A family with a constant nontrivial cocycle everywhere: the candidate at
    # a distant fixed point sees different matrix coefficients.
    from equivaria.groups import cyclic
    g = cyclic(2)

    def point_map(w, x):
        return x

    def cocycle_at(w, x):
        if w == 0:
            return np.eye(1, dtype=complex)
        return np.array([[1.0 if abs(x - 5.0) < 0.5 else -1.0]], dtype=complex)

    fam = ClosedFormFamily("plateau", g, 1, point_map, cocycle_at)
    seq = [5.0] * 16   # constant sequence away from the candidate point
    cert = fell_limit_certificate(fam, seq, 0.0, "1d0", tail_length=4)
    assert not cert.accepted


def test_certificate_requires_multiplicity_one():
    fam = z2_line_family()
    with pytest.raises(SpectrumError):
        # At a free point the stabilizer is trivial and rho occurs twice.
        fell_limit_certificate(fam, [1.0], 3.0, "1d0")
