"""Torsion fields, the closed-form hollow-circle solution and boundary actions.

Kinematics: ``u = theta * (-X2 X3, X1 X3, w(X1, X2))``.  Strain, stress and
hyperstress follow from the general constitutive law by full contraction;
the linearized shear stress is ``S_13 = mu theta (w_1 - X2)`` (twice the
strain times ``mu``).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.special import roots_legendre

from ..constitutive import apply_hooke, energy
from ..stability import report as stability_report


class TorsionError(ValueError):
    pass


# Generalized torsion state z = (X1, X2, 1, w_1, w_2, w_11, w_12, w_22):
# strain and strain gradient are linear in z.
Z_NAMES = ("X1", "X2", "1", "w1", "w2", "w11", "w12", "w22")


def _unit_states():
    """(eps, grad eps) produced by each entry of ``z`` set to one."""
    out = []
    for a in range(8):
        du = np.zeros((3, 3))      # du[p, q] = u_p,q
        d2u = np.zeros((3, 3, 3))  # d2u[p, q, j] = u_p,qj
        if a == 0:
            du[1, 2] = 1.0          # u2,3 = X1
        elif a == 1:
            du[0, 2] = -1.0         # u1,3 = -X2
        elif a == 2:
            d2u[0, 1, 2] = d2u[0, 2, 1] = -1.0
            d2u[1, 0, 2] = d2u[1, 2, 0] = 1.0
        elif a in (3, 4):
            du[2, a - 3] = 1.0
        else:
            A, B = {5: (0, 0), 6: (0, 1), 7: (1, 1)}[a]
            d2u[2, A, B] = d2u[2, B, A] = 1.0
        eps = 0.5 * (du + du.T)
        geps = 0.5 * (d2u + d2u.transpose(1, 0, 2))
        out.append((eps, geps))
    return out


UNIT_STATES = _unit_states()


def strain_from_z(z):
    z = np.asarray(z, dtype=float)
    eps = sum(z[a] * UNIT_STATES[a][0] for a in range(8))
    geps = sum(z[a] * UNIT_STATES[a][1] for a in range(8))
    return eps, geps


def energy_matrix(m):
    """8x8 ``Q`` with stored energy density ``z^T Q z / 2`` (unit twist).

    Built by polarization of :func:`gradhooke.constitutive.energy`.
    """
    Q = np.zeros((8, 8))
    e = [energy(m, *UNIT_STATES[a]) for a in range(8)]
    for a in range(8):
        Q[a, a] = 2.0 * e[a]
        for b in range(a):
            ea = UNIT_STATES[a]
            eb = UNIT_STATES[b]
            s = energy(m, ea[0] + eb[0], ea[1] + eb[1])
            Q[a, b] = Q[b, a] = s - e[a] - e[b]
    return Q


def torsion_fields(w_probe, theta, m, X):
    """Strain, strain gradient, stress and hyperstress at a section point.

    ``w_probe(x1, x2)`` returns ``(w, grad w, hess w)``.
    """
    x1, x2 = float(X[0]), float(X[1])
    _, g, H = w_probe(x1, x2)
    z = theta * np.array([x1, x2, 1.0, g[0], g[1], H[0, 0], H[0, 1], H[1, 1]])
    eps, geps = strain_from_z(z)
    st = apply_hooke(m, eps, geps)
    return eps, geps, st.S, st.P


def zero_warping(x1, x2):
    return 0.0, np.zeros(2), np.zeros((2, 2))


@dataclass
class TorsionSolution:
    """Warping solution at unit twist; fields scale linearly with ``theta``.

    ``w_probe(x1, x2) -> (w, grad w, hess w)`` evaluates the warping
    (length^2 units, since ``u3 = theta w``).
    """

    material: object
    theta: float
    K_t: float
    w_probe: Callable
    geometry: dict
    w_nodes: np.ndarray | None = None
    diagnostics: dict = field(default_factory=dict)

    def fields(self, X):
        return torsion_fields(self.w_probe, self.theta, self.material, X)

    @property
    def is_annulus(self):
        return self.geometry.get("kind") == "annulus"


def polar_moment(r_int, r_ext):
    return np.pi * (r_ext ** 4 - r_int ** 4) / 2.0


def ring_area(r_int, r_ext):
    return np.pi * (r_ext ** 2 - r_int ** 2)


def annulus_solution(m, theta, r_int, r_ext, check=True):
    """Closed-form hollow-circle solution: ``w = 0``, ``K_t = mu I_P + 2 (c11 - c15) A``."""
    if not (0.0 <= r_int < r_ext) or not np.isfinite(r_ext):
        raise TorsionError(f"degenerate radii r_int={r_int}, r_ext={r_ext}")
    diagnostics = {}
    if check:
        rep = stability_report(m)
        diagnostics["stability"] = rep.status
    I_P = polar_moment(r_int, r_ext)
    A = ring_area(r_int, r_ext)
    K_t = m.mu * I_P + 2.0 * (m.c11 - m.c15) * A
    diagnostics.update({"mu_IP": m.mu * I_P, "gradient_correction": 2.0 * (m.c11 - m.c15) * A})
    return TorsionSolution(
        material=m, theta=float(theta), K_t=float(K_t), w_probe=zero_warping,
        geometry={"kind": "annulus", "r_int": float(r_int), "r_ext": float(r_ext)},
        diagnostics=diagnostics,
    )


def annulus_quadrature(r_int, r_ext, n_r=8, n_theta=64):
    """Tensor Gauss rule in (r, phi); exact for polynomials in X up to degree
    ``min(2 n_r - 2, n_theta - 1)``."""
    x, w = roots_legendre(n_r)
    r = 0.5 * (r_ext - r_int) * (x + 1.0) + r_int
    wr = 0.5 * (r_ext - r_int) * w * r
    phi = 2 * np.pi * np.arange(n_theta) / n_theta
    wphi = np.full(n_theta, 2 * np.pi / n_theta)
    R, PHI = np.meshgrid(r, phi, indexing="ij")
    pts = np.column_stack([(R * np.cos(PHI)).ravel(), (R * np.sin(PHI)).ravel()])
    return pts, np.outer(wr, wphi).ravel()


def stiffness_from_energy(sol, points=None, weights=None):
    """``K_t = 2 psi / theta^2`` with ``psi`` the stored energy per unit length.

    Quadrature defaults to a polar Gauss rule for annulus solutions; pass
    ``points``/``weights`` for other sections.
    """
    if points is None:
        if not sol.is_annulus:
            raise TorsionError("quadrature points required for non-annulus solutions")
        points, weights = annulus_quadrature(sol.geometry["r_int"], sol.geometry["r_ext"])
    psi = 0.0
    for X, wq in zip(points, weights):
        eps, geps, S, P = sol.fields(X)
        psi += 0.5 * wq * (np.sum(S * eps) + np.sum(P * geps))
    return 2.0 * psi / sol.theta ** 2


# --------------------------------------------------------------------------
# boundary actions and global statics


@dataclass
class BoundaryActions:
    """Contact actions on one base, discretized for quadrature.

    Surface part: points (n, 3), weights (n,), traction t (n, 3), double
    force tau (n, 3) and the constant outward normal.  Edge part: points,
    weights and line forces f on the base circumferences.
    """

    normal: np.ndarray
    points: np.ndarray
    weights: np.ndarray
    t: np.ndarray
    tau: np.ndarray
    edge_points: np.ndarray
    edge_weights: np.ndarray
    f: np.ndarray

    def flipped(self, x3):
        """Reaction on the opposite base at height ``x3``."""
        def at(p):
            q = p.copy()
            q[:, 2] = x3
            return q
        return BoundaryActions(
            -self.normal, at(self.points), self.weights, -self.t, -self.tau,
            at(self.edge_points), self.edge_weights, -self.f,
        )


def basis_actions(sol, length=1.0, n_r=8, n_theta=128):
    """Tractions, double forces and edge forces on the base ``X3 = length``.

    Edge forces are ``f_a = P_ajk n_k nu_j`` with ``n`` the mantle normal and
    ``nu = +e3`` the outward conormal of the mantle at the base edge, giving
    ``f = theta (c11 - c15) (-sin vartheta, cos vartheta, 0)`` where
    ``vartheta`` is the angle of the outward normal of the section.
    """
    if not sol.is_annulus:
        raise TorsionError("basis actions are defined for the hollow-circle solution")
    m, th = sol.material, sol.theta
    r_int, r_ext = sol.geometry["r_int"], sol.geometry["r_ext"]
    pts2, wts = annulus_quadrature(r_int, r_ext, n_r, n_theta)
    normal = np.array([0.0, 0.0, 1.0])
    t = np.empty((len(pts2), 3))
    tau = np.empty((len(pts2), 3))
    for q, X in enumerate(pts2):
        _, _, S, P = sol.fields(X)
        # P is constant, so its divergence terms drop out of the traction
        t[q] = S @ normal
        tau[q] = np.einsum("ajk,j,k->a", P, normal, normal)
    pts = np.column_stack([pts2, np.full(len(pts2), length)])

    ep, ew, ef = [], [], []
    phi = 2 * np.pi * np.arange(n_theta) / n_theta
    for radius, outward in ((r_ext, 1.0), (r_int, -1.0)):
        if radius == 0.0:
            continue
        for a in phi:
            n2 = outward * np.array([np.cos(a), np.sin(a)])
            X = radius * np.array([np.cos(a), np.sin(a)])
            _, _, _, P = sol.fields(X)
            nvec = np.array([n2[0], n2[1], 0.0])
            ef.append(np.einsum("ajk,k,j->a", P, nvec, normal))
            ep.append([X[0], X[1], length])
            ew.append(2 * np.pi * radius / n_theta)
    return BoundaryActions(
        normal, pts, wts, t, tau,
        np.array(ep).reshape(-1, 3), np.array(ew), np.array(ef).reshape(-1, 3),
    )


def edge_force_printed(theta, m, vartheta):
    """Edge force with the sign as printed: ``theta (c11 - c15) (sin, -cos, 0)``."""
    k = theta * (m.c11 - m.c15)
    return np.array([k * np.sin(vartheta), -k * np.cos(vartheta), 0.0])


def resultants(actions):
    """Force and moment (skew matrix ``M_ab``) of a set of contact actions."""
    F = actions.weights @ actions.t + actions.edge_weights @ actions.f
    x, w = actions.points, actions.weights
    M = np.einsum("q,qa,qb->ab", w, actions.t, x)
    M += np.einsum("q,qa,b->ab", w, actions.tau, actions.normal)
    M += np.einsum("q,qa,qb->ab", actions.edge_weights, actions.f, actions.edge_points)
    return F, M - M.T


def global_equilibrium_check(*actions):
    """Residuals of global force and moment balance with zero body force.

    Returns ``(force, moment)`` where ``moment`` is the axial vector of the
    skew resultant ``M_ab = int (t_a x_b - t_b x_a + tau_a m_b - tau_b m_a)
    + sum int (f_a x_b - f_b x_a)``; the torque about ``X3`` is ``moment[2]``.
    """
    F = np.zeros(3)
    M = np.zeros((3, 3))
    for act in actions:
        f, m = resultants(act)
        F += f
        M += m
    # axial vector with torque about e3 = x1 t2 - x2 t1 = M_21
    axial = np.array([M[2, 1], M[0, 2], M[1, 0]])
    return F, axial
