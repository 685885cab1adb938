"""Bundled example datasets for the command-line interface and tests."""
from __future__ import annotations

from .systems import (
    anticomplete_point_system,
    dihedral_plane_system,
    z2_line_system,
    z2xz2_line_system,
)

DATASET_DESCRIPTIONS = {
    "z2-line": "Z/2 acting on the 9-point grid {-4..4} with the line cocycle",
    "dihedral-plane": "the square's symmetry group on a 17-point planar grid",
    "anticomplete-point": "one point, W = Z/2, scalar cocycle -1 (completeness fails)",
    "two-component": "two Z/2 x Z/2 line systems with splittings, for the toy dual",
}


def bundled(name: str):
    """Return the named dataset as domain objects.

    Systems come back as EquivariantSystem; "two-component" as a list of
    (system, wprime, r) triples.
    """
    if name == "z2-line":
        return z2_line_system(4)
    if name == "dihedral-plane":
        return dihedral_plane_system()
    if name == "anticomplete-point":
        return anticomplete_point_system()
    if name == "two-component":
        return [(z2xz2_line_system(1), [0, 2], [0, 1]),
                (z2xz2_line_system(2), [0, 2], [0, 1])]
    raise KeyError(f"no bundled dataset named {name!r}")


def dataset_names() -> list[str]:
    return sorted(DATASET_DESCRIPTIONS)
