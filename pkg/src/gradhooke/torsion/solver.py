"""Warping of a general cross section by energy minimization.

The stored energy per unit length is a quadratic functional of ``w`` and
its first and second derivatives.  It is minimized over the Argyris C1
space, so the traction and double-traction boundary conditions, including
the boundary-curvature term, arise as natural conditions and are never
imposed.  The warping is fixed up to a constant; the solution is returned
with zero mean.
"""

from __future__ import annotations

import logging
import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from scipy.spatial import cKDTree

from ..stability import spectral_positivity
from .argyris import ElementSet
from .fields import TorsionError, TorsionSolution, energy_matrix

log = logging.getLogger(__name__)

CHUNK = 1024


def _threads():
    try:
        n = int(os.environ.get("GRADHOOKE_THREADS", "0"))
    except ValueError:
        n = 0
    return max(1, n) if n else max(1, min(4, os.cpu_count() or 1))


def _check_material(m):
    # mu > 0 and a semidefinite gradient block keep the functional bounded
    # below; the classical limit (all gradient moduli zero) is admitted
    if m.mu <= 0:
        raise TorsionError("shear modulus must be positive for the warping problem")
    spec = spectral_positivity(m)
    if not spec.ok and spec.margins["min_eigenvalue"] < -spec.margins["band"]:
        raise TorsionError(
            "gradient energy is indefinite; the warping functional is unbounded below"
        )


def _element_blocks(es, elems, Q, order):
    """Element stiffness (ne, 21, 21), load (ne, 21) and constant energy (ne,)."""
    x, wq, xi, eta = es.quadrature(elems, order)
    B = np.stack([
        es.derivative_matrix(elems, xi, eta, 1, 0),
        es.derivative_matrix(elems, xi, eta, 0, 1),
        es.derivative_matrix(elems, xi, eta, 2, 0),
        es.derivative_matrix(elems, xi, eta, 1, 1),
        es.derivative_matrix(elems, xi, eta, 0, 2),
    ], axis=2)  # (ne, nq, 5, 21)
    y = np.concatenate([x, np.ones(x.shape[:2] + (1,))], axis=2)  # (X1, X2, 1)
    Qyy, Qsy, Qss = Q[:3, :3], Q[3:, :3], Q[3:, 3:]
    ne = len(elems)
    Bw = (B * wq[:, :, None, None]).reshape(ne, -1, 21)
    QB = np.matmul(Qss, B).reshape(ne, -1, 21)
    K = np.matmul(Bw.transpose(0, 2, 1), QB)
    g = np.matmul(Bw.transpose(0, 2, 1), (y @ Qsy.T).reshape(ne, -1, 1))[..., 0]
    c0 = np.einsum("eq,eqy,eqy->e", wq, y @ Qyy, y)
    return K, g, c0


def assemble(es, Q, order=5):
    ne = len(es.mesh.triangles)
    chunks = [np.arange(s, min(s + CHUNK, ne)) for s in range(0, ne, CHUNK)]
    with ThreadPoolExecutor(max_workers=_threads()) as pool:
        parts = list(pool.map(lambda el: _element_blocks(es, el, Q, order), chunks))
    Ke = np.concatenate([p[0] for p in parts])
    ge = np.concatenate([p[1] for p in parts])
    c0 = float(sum(p[2].sum() for p in parts))
    rows = np.repeat(es.dofs, 21, axis=1).ravel()
    cols = np.tile(es.dofs, (1, 21)).ravel()
    K = sp.csr_matrix((Ke.ravel(), (rows, cols)), shape=(es.ndof, es.ndof))
    g = np.zeros(es.ndof)
    np.add.at(g, es.dofs.ravel(), ge.ravel())
    return K, g, c0


class MeshWarping:
    """Point evaluator for a discrete warping field."""

    def __init__(self, es, d):
        self.es = es
        self.d = d
        self.local = d[es.dofs]  # (ne, 21)
        self._tree = cKDTree(es.center)

    def locate(self, x):
        x = np.atleast_2d(np.asarray(x, dtype=float))
        nodes, tris = self.es.mesh.nodes, self.es.mesh.triangles
        k = min(16, len(tris))
        _, cand = self._tree.query(x, k=k)
        cand = np.atleast_2d(cand)
        out = np.full(len(x), -1, dtype=np.int64)
        for n, (pt, cs) in enumerate(zip(x, cand)):
            p = nodes[tris[cs]]
            v0 = p[:, 1] - p[:, 0]
            v1 = p[:, 2] - p[:, 0]
            v2 = pt - p[:, 0]
            det = v0[:, 0] * v1[:, 1] - v0[:, 1] * v1[:, 0]
            l1 = (v2[:, 0] * v1[:, 1] - v2[:, 1] * v1[:, 0]) / det
            l2 = (v0[:, 0] * v2[:, 1] - v0[:, 1] * v2[:, 0]) / det
            inside = np.minimum(np.minimum(l1, l2), 1 - l1 - l2)
            best = int(np.argmax(inside))
            if inside[best] < -1e-9:
                raise TorsionError(f"point {pt} lies outside the mesh")
            out[n] = cs[best]
        return out

    def derivative(self, x, dx, dy, elems=None):
        x = np.atleast_2d(np.asarray(x, dtype=float))
        elems = self.locate(x) if elems is None else np.asarray(elems)
        xi, eta = self.es.local_coordinates(elems, x)
        M = self.es.derivative_matrix(elems, xi[:, None], eta[:, None], dx, dy)[:, 0]
        return np.einsum("ed,ed->e", M, self.local[elems])

    def __call__(self, x1, x2):
        x = np.array([[x1, x2]])
        e = self.locate(x)
        val = self.derivative(x, 0, 0, e)[0]
        g = np.array([self.derivative(x, 1, 0, e)[0], self.derivative(x, 0, 1, e)[0]])
        h12 = self.derivative(x, 1, 1, e)[0]
        H = np.array([[self.derivative(x, 2, 0, e)[0], h12], [h12, self.derivative(x, 0, 2, e)[0]]])
        return val, g, H


def _mean(es, d, order=5):
    elems = np.arange(len(es.mesh.triangles))
    x, wq, xi, eta = es.quadrature(elems, order)
    N = es.derivative_matrix(elems, xi, eta, 0, 0)
    vals = np.einsum("eqd,ed->eq", N, d[es.dofs])
    return float((wq * vals).sum() / wq.sum())


def residuals(warp, m):
    """Interior and natural-boundary residuals of the Euler-Lagrange system.

    Interior: ``mu lap w - (c11 + c15 + c5) lap lap w`` at element centroids.
    Boundary (edge midpoints): ``N_AB w_AB`` and the traction condition
    ``mu (d_n w + a.n) - k d_n lap w - d_s M_nt`` with ``a = (-X2, X1)``,
    ``k = c11 + c15 + c5`` and ``M_nt = (c11 + c15) n_A t_B w_AB``;
    tangential derivatives are exact on straight edges.
    """
    es = warp.es
    k = m.c11 + m.c15 + m.c5
    e = np.arange(len(es.mesh.triangles))
    c = es.center
    D = lambda dx, dy, x=c, el=e: warp.derivative(x, dx, dy, el)  # noqa: E731
    lap = D(2, 0) + D(0, 2)
    bilap = D(4, 0) + 2 * D(2, 2) + D(0, 4)
    interior = m.mu * lap - k * bilap

    mesh = es.mesh
    xm = mesh.edge_midpoint
    n = mesh.edge_normal
    t = mesh.edge_tangent
    el = warp.locate(xm - 1e-9 * mesh.edge_length[:, None] * n)
    d = {}
    for dx in range(4):
        for dy in range(4 - dx):
            d[dx, dy] = warp.derivative(xm, dx, dy, el)
    H = lambda a, b: (d[2, 0], d[1, 1], d[0, 2])[a + b]  # noqa: E731
    Nww = sum(
        ((m.c11 + m.c15) * n[:, A] * n[:, B] + m.c5 * (A == B)) * H(A, B)
        for A in range(2) for B in range(2)
    )
    grad = np.column_stack([d[1, 0], d[0, 1]])
    glap = np.column_stack([d[3, 0] + d[1, 2], d[2, 1] + d[0, 3]])
    a = np.column_stack([-xm[:, 1], xm[:, 0]])
    # third derivatives along t, contracted n t
    T3 = {(0, 0, 0): d[3, 0], (0, 0, 1): d[2, 1], (0, 1, 1): d[1, 2], (1, 1, 1): d[0, 3]}

    def third(i, j, l):
        key = tuple(sorted((i, j, l)))
        return T3[key]

    ds_Mnt = (m.c11 + m.c15) * sum(
        n[:, A] * t[:, B] * t[:, C] * third(A, B, C)
        for A in range(2) for B in range(2) for C in range(2)
    )
    traction = (
        m.mu * np.einsum("ea,ea->e", grad + a, n)
        - k * np.einsum("ea,ea->e", glap, n)
        - ds_Mnt
    )
    return {"interior": interior, "double_traction": Nww, "traction": traction}


def warp_solve(mesh, m, theta=1.0, order=5, diagnostics=True):
    """Minimize the torsion energy over the Argyris space on ``mesh``."""
    _check_material(m)
    es = ElementSet(mesh)
    Q = energy_matrix(m)
    K, g, c0 = assemble(es, Q, order)
    # pin the value dof of node 0 to remove the rigid axial translation
    keep = np.ones(es.ndof, dtype=bool)
    keep[0] = False
    Kr = K[keep][:, keep].tocsc()
    try:
        lu = spla.splu(Kr)
    except RuntimeError as exc:
        raise TorsionError(f"singular warping system: {exc}") from exc
    d = np.zeros(es.ndof)
    d[keep] = lu.solve(-g[keep])
    if not np.all(np.isfinite(d)):
        raise TorsionError("singular warping system")
    K_t = c0 + float(d @ g)
    # shift the value dofs so that the mean vanishes
    mean = _mean(es, d, order)
    d[0 : 6 * es.nv : 6] -= mean
    warp = MeshWarping(es, d)
    diag = {
        "ndof": int(es.ndof),
        "elements": int(len(mesh.triangles)),
        "h": mesh.h,
        "area": mesh.area,
        "polar_moment": mesh.polar_moment,
        "first_gradient_part": None,
        "second_gradient_part": None,
    }
    parts = _energy_split(es, d, m, order)
    diag.update(parts)
    if diagnostics:
        res = residuals(warp, m)
        diag["interior_residual_rms"] = float(np.sqrt(np.mean(res["interior"] ** 2)))
        diag["traction_residual_rms"] = float(np.sqrt(np.mean(res["traction"] ** 2)))
        diag["double_traction_residual_rms"] = float(np.sqrt(np.mean(res["double_traction"] ** 2)))
    log.info("warp_solve: %d elements, %d dofs, K_t=%.10g", len(mesh.triangles), es.ndof, K_t)
    return TorsionSolution(
        material=m, theta=float(theta), K_t=float(K_t), w_probe=warp,
        geometry={"kind": "mesh"}, w_nodes=d[0 : 6 * es.nv : 6].copy(), diagnostics=diag,
    )


def _energy_split(es, d, m, order):
    """First- and second-gradient parts of ``K_t`` (unit twist)."""
    from ..constitutive import MaterialParams

    first = MaterialParams(m.lam, m.mu)
    second = MaterialParams(0.0, 0.0, m.c2, m.c3, m.c5, m.c11, m.c15, m.c8)
    out = {}
    for name, mat in (("first_gradient_part", first), ("second_gradient_part", second)):
        Q = energy_matrix(mat)
        elems = np.arange(len(es.mesh.triangles))
        total = 0.0
        for s in range(0, len(elems), CHUNK):
            el = elems[s : s + CHUNK]
            Ke, ge, c0 = _element_blocks(es, el, Q, order)
            dl = d[es.dofs[el]]
            total += c0.sum() + 2 * np.einsum("ei,ei->", ge, dl) + np.einsum("ei,eij,ej->", dl, Ke, dl)
        out[name] = float(total)
    return out


def quadrature_points(es, order=5):
    elems = np.arange(len(es.mesh.triangles))
    x, wq, _, _ = es.quadrature(elems, order)
    return x.reshape(-1, 2), wq.ravel()
