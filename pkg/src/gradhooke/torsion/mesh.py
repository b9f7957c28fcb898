"""Triangulated cross sections with boundary geometry."""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np


class MeshError(ValueError):
    pass


@dataclass(frozen=True)
class BoundaryEdge:
    nodes: tuple
    loop: int


@dataclass
class CrossSectionMesh:
    """Planar triangulation of a cross section.

    Boundary edges are oriented so the domain lies to their left
    (counterclockwise outer loop, clockwise holes).  Per edge the mesh stores
    the outward unit normal ``n``, the arc-length abscissa of the midpoint
    ``s``, the normal angle ``vartheta`` and the curvature, which is zero on
    a polygon; the turning at polygon vertices is kept in ``vertex_turning``.
    """

    nodes: np.ndarray
    triangles: np.ndarray
    boundary: list

    def __post_init__(self):
        self.nodes = np.asarray(self.nodes, dtype=float)
        self.triangles = np.asarray(self.triangles, dtype=np.int64)
        if self.nodes.ndim != 2 or self.nodes.shape[1] != 2:
            raise MeshError("nodes must be an (n, 2) array")
        if self.triangles.ndim != 2 or self.triangles.shape[1] != 3:
            raise MeshError("triangles must be an (m, 3) array")
        if self.triangles.min() < 0 or self.triangles.max() >= len(self.nodes):
            raise MeshError("triangle index out of range")
        a = self.signed_areas()
        if np.any(a == 0):
            raise MeshError("degenerate triangle")
        # orient every triangle counterclockwise
        flip = a < 0
        self.triangles[flip] = self.triangles[flip][:, [0, 2, 1]]
        if not self.boundary:
            self.boundary = _boundary_from_triangles(self.nodes, self.triangles)
        self._check_boundary()
        self._edge_geometry()

    # -- geometry ---------------------------------------------------------

    def signed_areas(self):
        p = self.nodes[self.triangles]
        d1 = p[:, 1] - p[:, 0]
        d2 = p[:, 2] - p[:, 0]
        return 0.5 * (d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0])

    @property
    def area(self):
        return float(self.signed_areas().sum())

    @property
    def polar_moment(self):
        """``int (X1^2 + X2^2) dA`` about the origin, exact on triangles."""
        p = self.nodes[self.triangles]
        s = np.zeros(len(p))
        for c in range(2):
            x = p[:, :, c]
            s += (x.sum(1) ** 2 + (x ** 2).sum(1)) / 12.0
        return float((s * self.signed_areas()).sum())

    @property
    def h(self):
        p = self.nodes[self.triangles]
        e = np.linalg.norm(p - np.roll(p, 1, axis=1), axis=2)
        return float(e.max())

    def _check_boundary(self):
        tri_edges = {}
        for t in self.triangles:
            for a, b in ((t[0], t[1]), (t[1], t[2]), (t[2], t[0])):
                tri_edges[(int(a), int(b))] = True
        for e in self.boundary:
            a, b = e.nodes
            if (a, b) not in tri_edges:
                if (b, a) in tri_edges:
                    raise MeshError(f"boundary edge {e.nodes} is oriented clockwise")
                raise MeshError(f"boundary edge {e.nodes} is not a triangle edge")
        # closed loops: each node enters and leaves once per loop
        for loop in {e.loop for e in self.boundary}:
            ins, outs = {}, {}
            for e in self.boundary:
                if e.loop == loop:
                    outs[e.nodes[0]] = outs.get(e.nodes[0], 0) + 1
                    ins[e.nodes[1]] = ins.get(e.nodes[1], 0) + 1
            if ins != outs:
                raise MeshError(f"boundary loop {loop} is not closed")

    def _edge_geometry(self):
        ends = np.array([e.nodes for e in self.boundary], dtype=np.int64).reshape(-1, 2)
        a, b = self.nodes[ends[:, 0]], self.nodes[ends[:, 1]]
        d = b - a
        length = np.linalg.norm(d, axis=1)
        t = d / length[:, None]
        self.edge_nodes = ends
        self.edge_length = length
        self.edge_midpoint = 0.5 * (a + b)
        self.edge_tangent = t
        self.edge_normal = np.column_stack([t[:, 1], -t[:, 0]])
        self.edge_vartheta = np.arctan2(self.edge_normal[:, 1], self.edge_normal[:, 0])
        self.edge_curvature = np.zeros(len(ends))
        self.edge_loop = np.array([e.loop for e in self.boundary], dtype=np.int64)
        s = np.zeros(len(ends))
        turning = {}
        nxt = {int(p): i for i, p in enumerate(ends[:, 0])}
        for loop in np.unique(self.edge_loop):
            idx = np.flatnonzero(self.edge_loop == loop)
            start = idx[0]
            acc, i = 0.0, start
            while True:
                s[i] = acc + 0.5 * length[i]
                acc += length[i]
                j = nxt[int(ends[i, 1])]
                cross = t[i, 0] * t[j, 1] - t[i, 1] * t[j, 0]
                turning[int(ends[i, 1])] = float(np.arctan2(cross, t[i] @ t[j]))
                i = j
                if i == start:
                    break
        self.edge_s = s
        self.vertex_turning = turning

    # -- io ---------------------------------------------------------------

    def to_dict(self):
        return {
            "nodes": self.nodes.tolist(),
            "triangles": self.triangles.tolist(),
            "boundary": [{"edge": list(map(int, e.nodes)), "loop": e.loop} for e in self.boundary],
        }

    @classmethod
    def from_dict(cls, data):
        try:
            nodes = data["nodes"]
            tris = data["triangles"]
            bnd = data.get("boundary") or []
            boundary = [BoundaryEdge(tuple(int(v) for v in b["edge"]), int(b.get("loop", 0))) for b in bnd]
        except (KeyError, TypeError) as exc:
            raise MeshError(f"malformed mesh data: {exc}") from exc
        return cls(np.array(nodes, dtype=float), np.array(tris, dtype=np.int64), boundary)

    @classmethod
    def load(cls, path):
        with open(path) as fh:
            try:
                data = json.load(fh)
            except json.JSONDecodeError as exc:
                raise MeshError(f"{path}: invalid JSON ({exc})") from exc
        return cls.from_dict(data)


def _boundary_from_triangles(nodes, tris):
    count = {}
    for t in tris:
        for a, b in ((t[0], t[1]), (t[1], t[2]), (t[2], t[0])):
            key = (min(a, b), max(a, b))
            count[key] = count.get(key, []) + [(int(a), int(b))]
    directed = [v[0] for v in count.values() if len(v) == 1]
    nxt = {a: b for a, b in directed}
    seen, loops = set(), []
    for a, _ in directed:
        if a in seen:
            continue
        loop, p = [], a
        while p not in seen:
            seen.add(p)
            loop.append((p, nxt[p]))
            p = nxt[p]
        loops.append(loop)

    # outer loop first (largest enclosed area)
    def enclosed(loop):
        pts = nodes[[e[0] for e in loop]]
        x, y = pts[:, 0], pts[:, 1]
        return 0.5 * np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y)

    loops.sort(key=lambda lp: -abs(enclosed(lp)))
    return [BoundaryEdge(e, i) for i, lp in enumerate(loops) for e in lp]


def annulus_mesh(r_int, r_ext, n_theta, n_r):
    """Structured ring mesh; ``r_int = 0`` gives a disk with a centre node."""
    if not 0 <= r_int < r_ext:
        raise MeshError("need 0 <= r_int < r_ext")
    th = 2 * np.pi * np.arange(n_theta) / n_theta
    if r_int == 0:
        # disk: rings k = 1..n_r with k*n_theta/n_r... keep it simple and uniform
        nodes = [np.zeros((1, 2))]
        rings = []
        for k in range(1, n_r + 1):
            m = max(3, round(n_theta * k / n_r))
            a = 2 * np.pi * np.arange(m) / m
            r = r_ext * k / n_r
            rings.append(np.column_stack([r * np.cos(a), r * np.sin(a)]))
        nodes = np.vstack(nodes + rings)
        from scipy.spatial import Delaunay

        tri = Delaunay(nodes).simplices
        return CrossSectionMesh(nodes, tri, [])
    r = np.linspace(r_int, r_ext, n_r + 1)
    R, T = np.meshgrid(r, th, indexing="ij")
    nodes = np.column_stack([(R * np.cos(T)).ravel(), (R * np.sin(T)).ravel()])
    idx = np.arange(len(nodes)).reshape(n_r + 1, n_theta)
    tris = []
    for i in range(n_r):
        for j in range(n_theta):
            jn = (j + 1) % n_theta
            a, b, c, d = idx[i, j], idx[i, jn], idx[i + 1, jn], idx[i + 1, j]
            # alternate the diagonal so the mesh has no preferred direction
            if (i + j) % 2 == 0:
                tris += [(a, b, c), (a, c, d)]
            else:
                tris += [(a, b, d), (b, c, d)]
    boundary = [BoundaryEdge((int(idx[n_r, j]), int(idx[n_r, (j + 1) % n_theta])), 0) for j in range(n_theta)]
    boundary += [BoundaryEdge((int(idx[0, (j + 1) % n_theta]), int(idx[0, j])), 1) for j in range(n_theta)]
    return CrossSectionMesh(nodes, np.array(tris), boundary)


def rectangle_mesh(a, b, nx, ny, center=(0.0, 0.0)):
    """Structured triangulation of ``[-a/2, a/2] x [-b/2, b/2]`` (crossed diagonals
    alternate per cell)."""
    x = np.linspace(-a / 2, a / 2, nx + 1) + center[0]
    y = np.linspace(-b / 2, b / 2, ny + 1) + center[1]
    X, Y = np.meshgrid(x, y, indexing="ij")
    nodes = np.column_stack([X.ravel(), Y.ravel()])
    idx = np.arange(len(nodes)).reshape(nx + 1, ny + 1)
    tris = []
    for i in range(nx):
        for j in range(ny):
            p, q, r, s = idx[i, j], idx[i + 1, j], idx[i + 1, j + 1], idx[i, j + 1]
            if (i + j) % 2 == 0:
                tris += [(p, q, r), (p, r, s)]
            else:
                tris += [(p, q, s), (q, r, s)]
    return CrossSectionMesh(nodes, np.array(tris), [])
