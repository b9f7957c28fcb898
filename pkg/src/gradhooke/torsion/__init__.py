"""Torsion of prismatic bars in second-gradient elasticity."""

from .cube import CubeState, elementary_cube_state
from .fields import (
    BoundaryActions,
    TorsionError,
    TorsionSolution,
    annulus_quadrature,
    annulus_solution,
    basis_actions,
    energy_matrix,
    global_equilibrium_check,
    polar_moment,
    ring_area,
    stiffness_from_energy,
    torsion_fields,
)
from .mesh import BoundaryEdge, CrossSectionMesh, MeshError, annulus_mesh, rectangle_mesh
from .solver import quadrature_points, warp_solve

__all__ = [
    "BoundaryActions", "BoundaryEdge", "CrossSectionMesh", "CubeState", "MeshError",
    "TorsionError", "TorsionSolution", "annulus_mesh", "annulus_quadrature",
    "annulus_solution", "basis_actions", "elementary_cube_state", "energy_matrix",
    "global_equilibrium_check", "polar_moment", "quadrature_points", "rectangle_mesh",
    "ring_area", "stiffness_from_energy", "torsion_fields", "warp_solve",
]
