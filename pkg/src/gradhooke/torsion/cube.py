"""Elementary strain-gradient states of a cube ``[-a, a]^3``.

The displacement ``u_i = C_ijk X_j X_k / 2`` (``C`` symmetric in its last two
indices) has constant strain gradient ``(C_ijk + C_jik) / 2`` and a strain
that is linear in ``X`` with zero average over the cube.  The hyperstress is
constant, so it contributes nothing to the face tractions; it acts through
face double forces and edge forces only.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np
from scipy.special import roots_legendre

from ..constitutive import apply_hooke
from ..tensor_core import check_symtri

FACES = tuple((s * np.eye(3)[a]) for a in range(3) for s in (1.0, -1.0))
FACE_NAMES = ("+X1", "-X1", "+X2", "-X2", "+X3", "-X3")


@dataclass
class CubeState:
    """Constant-gradient state of the cube.

    ``faces`` maps a face name to ``(normal, tau, t_hyper)`` where
    ``t_hyper`` is the hyperstress share of the traction (zero).  ``edges``
    lists ``(face_a, face_b, direction, f)``.
    """

    a: float
    K: np.ndarray
    C: np.ndarray
    P: np.ndarray
    faces: dict
    edges: list
    mean_strain: np.ndarray

    def displacement(self, X):
        X = np.asarray(X, dtype=float)
        return 0.5 * np.einsum("ijk,...j,...k->...i", self.C, X, X)

    def strain(self, X):
        return np.einsum("ijk,...k->...ij", self.K, np.asarray(X, dtype=float))

    def grid(self, n=5):
        """Displacement sampled on an ``n^3`` grid: (points, u)."""
        s = np.linspace(-self.a, self.a, n)
        X = np.stack(np.meshgrid(s, s, s, indexing="ij"), axis=-1).reshape(-1, 3)
        return X, self.displacement(X)


def displacement_coefficients(K):
    """``C`` symmetric in its last two indices with ``sym_12(C) = K``."""
    return K + K.transpose(0, 2, 1) - K.transpose(2, 0, 1)


def elementary_cube_state(K, m, a=1.0):
    """Elementary cube state generated by the strain gradient ``K``."""
    K = np.asarray(K, dtype=float)
    check_symtri(K)
    if not a > 0:
        raise ValueError("cube half-width must be positive")
    C = displacement_coefficients(K)
    # strain is K_ijk X_k; the constitutive response to the gradient alone
    P = apply_hooke(m, np.zeros((3, 3)), K).P

    faces = {}
    for name, n in zip(FACE_NAMES, FACES):
        tau = np.einsum("ajk,j,k->a", P, n, n)
        faces[name] = (n, tau, np.zeros(3))

    edges = []
    for (na, n), (nb, nn) in combinations(zip(FACE_NAMES, FACES), 2):
        if abs(n @ nn) > 0.5:
            continue  # parallel faces share no edge
        # outward conormal of each face at the shared edge is the other normal
        f = np.einsum("ajk,k,j->a", P, n, nn) + np.einsum("ajk,k,j->a", P, nn, n)
        edges.append((na, nb, np.cross(n, nn), f))

    # Gauss average of the strain over the cube
    x, w = roots_legendre(2)
    pts = a * np.stack(np.meshgrid(x, x, x, indexing="ij"), axis=-1).reshape(-1, 3)
    wt = np.einsum("i,j,k->ijk", w, w, w).ravel() / 8.0
    mean = np.einsum("q,qij->ij", wt, np.einsum("ijk,qk->qij", K, pts))
    return CubeState(a=float(a), K=K, C=C, P=P, faces=faces, edges=edges, mean_strain=mean)
