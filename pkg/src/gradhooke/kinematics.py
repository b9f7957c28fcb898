"""Finite-strain kinematics from analytic placement maps.

A :class:`PlacementProbe` supplies the placement ``chi`` together with its
first and second material derivatives.  Quantities that need one derivative
more than the probe provides (the strain gradient, the gradient of the
rotation, the curl of the stretch) are obtained by central differences.

Curl convention: ``(curl U)_nl = eps_lab U_na,b``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .tensor_core import LEVI_CIVITA, TensorError, check_symtri

#: Default finite-difference step relative to the characteristic length.
FD_STEP = np.finfo(float).eps ** (1.0 / 3.0)


class KinematicsError(ValueError):
    """Raised for non-invertible or orientation-reversing deformations."""


@dataclass(frozen=True)
class PlacementProbe:
    """Analytic placement map with its first two material derivatives.

    ``gradF(X)[a, i, j]`` is ``d^2 chi_a / dX_i dX_j``.
    """

    chi: Callable[[np.ndarray], np.ndarray]
    F: Callable[[np.ndarray], np.ndarray]
    gradF: Callable[[np.ndarray], np.ndarray]
    length: float = 1.0

    def step(self, h=None):
        return FD_STEP * self.length if h is None else float(h)

    @classmethod
    def affine(cls, F0, c=None):
        F0 = np.asarray(F0, dtype=float)
        c = np.zeros(3) if c is None else np.asarray(c, dtype=float)
        return cls(
            chi=lambda X: F0 @ np.asarray(X, dtype=float) + c,
            F=lambda X: F0.copy(),
            gradF=lambda X: np.zeros((3, 3, 3)),
        )

    @classmethod
    def quadratic(cls, C, F0=None):
        """``chi_a = F0_aj X_j + C_ajk X_j X_k / 2`` with ``C`` symmetric in (j, k)."""
        C = np.asarray(C, dtype=float)
        C = 0.5 * (C + C.transpose(0, 2, 1))
        F0 = np.eye(3) if F0 is None else np.asarray(F0, dtype=float)
        return cls(
            chi=lambda X: F0 @ X + 0.5 * np.einsum("ajk,j,k->a", C, X, X),
            F=lambda X: F0 + np.einsum("ajk,k->aj", C, X),
            gradF=lambda X: C.copy(),
        )

    @classmethod
    def torsion(cls, theta, w=None, dw=None, d2w=None):
        """Saint-Venant torsion placement ``chi = X + u`` with
        ``u = (-theta X2 X3, theta X1 X3, theta w(X1, X2))``.

        ``w``, ``dw`` and ``d2w`` return the warping, its gradient (2,) and its
        Hessian (2, 2); all default to zero.
        """
        w = w or (lambda x1, x2: 0.0)
        dw = dw or (lambda x1, x2: np.zeros(2))
        d2w = d2w or (lambda x1, x2: np.zeros((2, 2)))
        t = float(theta)

        def chi(X):
            X = np.asarray(X, dtype=float)
            return X + t * np.array([-X[1] * X[2], X[0] * X[2], w(X[0], X[1])])

        def F(X):
            X = np.asarray(X, dtype=float)
            g = dw(X[0], X[1])
            du = np.array(
                [[0.0, -X[2], -X[1]], [X[2], 0.0, X[0]], [g[0], g[1], 0.0]]
            )
            return np.eye(3) + t * du

        def gradF(X):
            X = np.asarray(X, dtype=float)
            H = d2w(X[0], X[1])
            d = np.zeros((3, 3, 3))
            d[0, 1, 2] = d[0, 2, 1] = -1.0
            d[1, 0, 2] = d[1, 2, 0] = 1.0
            d[2, :2, :2] = H
            return t * d

        return cls(chi=chi, F=F, gradF=gradF)


@dataclass(frozen=True)
class PolarFactors:
    R: np.ndarray
    U: np.ndarray


@dataclass(frozen=True)
class StrainState:
    E: np.ndarray
    gradE: np.ndarray


def _check_det(F):
    F = np.asarray(F, dtype=float)
    if F.shape != (3, 3):
        raise KinematicsError(f"deformation gradient must be 3x3, got {F.shape}")
    J = np.linalg.det(F)
    if not J > 0.0:
        raise KinematicsError(f"det F must be positive, got {J:.6g}")
    return F, J


def green_lagrange(F):
    """``E_ik = (F_ai F_ak - delta_ik) / 2``."""
    F, _ = _check_det(F)
    E = 0.5 * (F.T @ F - np.eye(3))
    return 0.5 * (E + E.T)


def strain_gradient_exact(F, gradF):
    """``E_ij,k = (F_ai,k F_aj + F_ai F_aj,k) / 2`` from analytic derivatives."""
    F = np.asarray(F, dtype=float)
    gradF = np.asarray(gradF, dtype=float)
    a = np.einsum("aik,aj->ijk", gradF, F)
    return 0.5 * (a + a.transpose(1, 0, 2))


def _central(fun, X, h):
    """Stack ``d fun / dX_k`` along a trailing axis by central differences."""
    X = np.asarray(X, dtype=float)
    cols = []
    for k in range(3):
        e = np.zeros(3)
        e[k] = h
        cols.append((fun(X + e) - fun(X - e)) / (2.0 * h))
    return np.stack(cols, axis=-1)


def strain_state(probe, X, h=None):
    """Green-Lagrange strain and its material gradient at ``X``.

    The gradient is formed by central differences of ``E`` with step ``h``.
    """
    h = probe.step(h)
    X = np.asarray(X, dtype=float)
    E = green_lagrange(probe.F(X))
    gradE = _central(lambda Y: green_lagrange(probe.F(Y)), X, h)
    gradE = 0.5 * (gradE + gradE.transpose(1, 0, 2))
    return StrainState(E=E, gradE=gradE)


def polar(F):
    """Right polar decomposition ``F = R U``.

    ``U = V diag(s) V^T`` where ``s^2, V`` is the eigensystem of ``F^T F``; the
    singular vectors are taken from an SVD of ``F`` so that ``R`` stays
    orthogonal to machine precision even for badly conditioned ``F``.
    """
    F, _ = _check_det(F)
    W, s, Vt = np.linalg.svd(F)
    if s[-1] <= 0.0:
        raise KinematicsError("F^T F is not positive definite")
    R = W @ Vt
    U = (Vt.T * s) @ Vt
    return PolarFactors(R=R, U=0.5 * (U + U.T))


def rotation_gradient_pullback(probe, X, h=None):
    """Lagrangian gradient of rotation ``W_flk = R_af R_al,k``."""
    h = probe.step(h)
    X = np.asarray(X, dtype=float)
    R = polar(probe.F(X)).R
    dR = _central(lambda Y: polar(probe.F(Y)).R, X, h)
    return np.einsum("af,alk->flk", R, dR)


def curl(dT):
    """``(curl T)_nl = eps_lab T_na,b`` given ``dT[n, a, b] = T_na,b``."""
    return np.einsum("lab,nab->nl", LEVI_CIVITA, dT)


def compatibility_A(probe, X, h=None):
    """Closed form of the rotation-gradient generator ``A``.

    ``A = (U curl(U)^T - (U : curl U) I / 2) U / det U`` so that
    ``W_flk = eps_flm A_mk``.
    """
    h = probe.step(h)
    X = np.asarray(X, dtype=float)
    U = polar(probe.F(X)).U
    detU = np.linalg.det(U)
    if abs(detU) < np.finfo(float).tiny:
        raise KinematicsError("stretch tensor is singular")
    cU = curl(_central(lambda Y: polar(probe.F(Y)).U, X, h))
    return (U @ cU.T - 0.5 * np.sum(U * cU) * np.eye(3)) @ U / detU


def extract_A(W):
    """Inverse of ``W_flk = eps_flm A_mk``: ``A_mk = eps_flm W_flk / 2``."""
    return 0.5 * np.einsum("flm,flk->mk", LEVI_CIVITA, W)


def push_forward(S, P, F, gradF):
    """Eulerian stress and hyperstress from their Piola-Kirchhoff counterparts.

    Parameters
    ----------
    S : (3, 3) second Piola-Kirchhoff stress
    P : (3, 3, 3) referential hyperstress, symmetric in its first two indices
    F : (3, 3) deformation gradient
    gradF : (3, 3, 3) with ``gradF[a, i, k] = F_ai,k``

    Returns
    -------
    Sigma, Pi
    """
    F, J = _check_det(F)
    S = np.asarray(S, dtype=float)
    P = check_symtri(P)
    gradF = np.asarray(gradF, dtype=float)
    Sigma = np.einsum("ij,ai,bj->ab", S, F, F)
    Sigma += np.einsum("ijk,aj,bik->ab", P, F, gradF)
    Sigma += np.einsum("ijk,aik,bj->ab", P, gradF, F)
    Pi = np.einsum("ijk,aj,bi,gk->abg", P, F, F, F)
    return Sigma / J, Pi / J


def curl_gradient_linear(d2u):
    """``kappa_ij = -eps_ipq u_p,qj`` from ``d2u[p, q, j] = u_p,qj``."""
    d2u = np.asarray(d2u, dtype=float)
    if d2u.shape != (3, 3, 3):
        raise TensorError(f"expected (3, 3, 3), got {d2u.shape}")
    return -np.einsum("ipq,pqj->ij", LEVI_CIVITA, d2u)
