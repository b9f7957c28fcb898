"""Argyris C1 quintic triangle.

Each element carries 21 degrees of freedom: value, gradient and Hessian at
the three vertices plus the normal derivative at the three edge midpoints.
Normals are global (edge from lower to higher node index, rotated
clockwise), so neighbouring elements share them without sign bookkeeping.

Shape functions are obtained per element by inverting the 21x21 matrix of
the degree-of-freedom functionals applied to monomials in centred, scaled
coordinates ``xi = (x - xc) / h``.
"""

from __future__ import annotations

from math import factorial

import numpy as np
from scipy.special import roots_jacobi, roots_legendre

DEGREE = 5
EXPONENTS = np.array([(a, n - a) for n in range(DEGREE + 1) for a in range(n, -1, -1)])
NDOF = len(EXPONENTS)  # 21
DOFS_PER_VERTEX = 6
# local edge k joins local vertices (k, k+1)
LOCAL_EDGES = ((0, 1), (1, 2), (2, 0))
# physical derivative order of each local dof (vertex block x3, then edges)
DOF_ORDER = np.array([0, 1, 1, 2, 2, 2] * 3 + [1, 1, 1])


def monomials(xi, eta, dx=0, dy=0):
    """``d^(dx+dy)/dxi^dx deta^dy`` of every monomial; trailing axis of size 21."""
    xi = np.asarray(xi, dtype=float)
    eta = np.asarray(eta, dtype=float)
    out = np.zeros(xi.shape + (NDOF,))
    for m, (a, b) in enumerate(EXPONENTS):
        if a < dx or b < dy:
            continue
        ca = factorial(a) // factorial(a - dx)
        cb = factorial(b) // factorial(b - dy)
        out[..., m] = ca * cb * xi ** (a - dx) * eta ** (b - dy)
    return out


def triangle_rule(n):
    """Collapsed Gauss rule on the unit triangle, exact to degree ``2n - 1``.

    Returns barycentric coordinates (nq, 3) and weights summing to 1.
    """
    x, wx = roots_legendre(n)
    y, wy = roots_jacobi(n, 1.0, 0.0)
    u = 0.5 * (x + 1.0)
    v = 0.5 * (y + 1.0)
    U, V = np.meshgrid(u, v, indexing="ij")
    W = np.outer(wx, wy)
    # (s, t) = (u (1 - v), v) maps the square onto the triangle; jacobian (1 - v)
    s = (U * (1.0 - V)).ravel()
    t = V.ravel()
    w = W.ravel()
    w = w / w.sum()
    bary = np.column_stack([1.0 - s - t, s, t])
    return bary, w


class ElementSet:
    """Argyris shape functions for every triangle of a mesh."""

    def __init__(self, mesh):
        self.mesh = mesh
        nodes = mesh.nodes
        tris = mesh.triangles
        self.nv = len(nodes)
        p = nodes[tris]  # (ne, 3, 2)
        self.center = p.mean(axis=1)
        self.size = np.linalg.norm(p - np.roll(p, 1, axis=1), axis=2).max(axis=1)
        self.area = np.abs(mesh.signed_areas())

        # global edges and their normals
        edge_id = {}
        elem_edges = np.empty((len(tris), 3), dtype=np.int64)
        for e, t in enumerate(tris):
            for k, (i, j) in enumerate(LOCAL_EDGES):
                key = (min(t[i], t[j]), max(t[i], t[j]))
                elem_edges[e, k] = edge_id.setdefault(key, len(edge_id))
        self.edges = np.array(sorted(edge_id, key=edge_id.get), dtype=np.int64)
        d = nodes[self.edges[:, 1]] - nodes[self.edges[:, 0]]
        d /= np.linalg.norm(d, axis=1)[:, None]
        self.edge_normal = np.column_stack([d[:, 1], -d[:, 0]])
        self.elem_edges = elem_edges
        self.ndof = DOFS_PER_VERTEX * self.nv + len(self.edges)

        # global dof indices per element
        vd = DOFS_PER_VERTEX * tris[:, :, None] + np.arange(DOFS_PER_VERTEX)
        self.dofs = np.hstack([vd.reshape(len(tris), -1), DOFS_PER_VERTEX * self.nv + elem_edges])

        self.coef = self._shape_coefficients(p)

    def _shape_coefficients(self, p):
        ne = len(p)
        h = self.size[:, None]
        q = (p - self.center[:, None, :]) / h[:, :, None]  # scaled vertices
        D = np.zeros((ne, NDOF, NDOF))
        for v in range(3):
            xi, eta = q[:, v, 0], q[:, v, 1]
            r = DOFS_PER_VERTEX * v
            D[:, r + 0] = monomials(xi, eta)
            D[:, r + 1] = monomials(xi, eta, 1, 0)
            D[:, r + 2] = monomials(xi, eta, 0, 1)
            D[:, r + 3] = monomials(xi, eta, 2, 0)
            D[:, r + 4] = monomials(xi, eta, 1, 1)
            D[:, r + 5] = monomials(xi, eta, 0, 2)
        for k, (i, j) in enumerate(LOCAL_EDGES):
            mid = 0.5 * (q[:, i] + q[:, j])
            n = self.edge_normal[self.elem_edges[:, k]]
            D[:, 18 + k] = (
                n[:, 0:1] * monomials(mid[:, 0], mid[:, 1], 1, 0)
                + n[:, 1:2] * monomials(mid[:, 0], mid[:, 1], 0, 1)
            )
        inv = np.linalg.inv(D)
        # scaled dof = h^order * physical dof
        return inv * (self.size[:, None, None] ** DOF_ORDER[None, None, :])

    def local_coordinates(self, elems, x):
        """Scaled coordinates of physical points ``x`` (n, 2) in ``elems``."""
        q = (x - self.center[elems]) / self.size[elems, None]
        return q[:, 0], q[:, 1]

    def derivative_matrix(self, elems, xi, eta, dx, dy):
        """Rows mapping element dofs to the physical derivative at points.

        ``xi``/``eta`` have shape (len(elems), nq); the result has shape
        (len(elems), nq, 21).
        """
        M = monomials(xi, eta, dx, dy)
        h = self.size[elems][:, None, None] ** (dx + dy)
        return np.matmul(M, self.coef[elems]) / h

    def quadrature(self, elems, order=5):
        bary, w = triangle_rule(order)
        p = self.mesh.nodes[self.mesh.triangles[elems]]
        x = np.einsum("qv,evc->eqc", bary, p)
        weights = w[None, :] * self.area[elems, None]
        h = self.size[elems]
        xi = (x[..., 0] - self.center[elems, 0, None]) / h[:, None]
        eta = (x[..., 1] - self.center[elems, 1, None]) / h[:, None]
        return x, weights, xi, eta
