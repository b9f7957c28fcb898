"""Generalized Hooke's law for isotropic second-gradient materials.

Stored energy::

    psi = 1/2 (C_ijkl E_ij E_kl + 2 H_ijklp E_ij,k E_lp + G_ijklpq E_ij,k E_lp,q)

with ``C`` the classical isotropic tensor, ``G`` the five-parameter isotropic
sixth-order tensor and ``H`` the hemitropic coupling, which vanishes unless
``c8`` is set.  All contractions run over the full index range; the packed
5x5 / 3x3 blocks are only produced to compare against their printed forms.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, fields

import numpy as np

from .tensor_core import LEVI_CIVITA, decompose, sym_basis, symtri_basis, unpack_symtri

_D = np.eye(3)


class MaterialError(ValueError):
    """Raised for malformed or non-finite material data."""


@dataclass(frozen=True)
class MaterialParams:
    """Isotropic moduli.  ``lam``/``mu`` in Pa, the ``c`` moduli in Pa m^2."""

    lam: float
    mu: float
    c2: float = 0.0
    c3: float = 0.0
    c5: float = 0.0
    c11: float = 0.0
    c15: float = 0.0
    c8: float = 0.0

    def __post_init__(self):
        for f in fields(self):
            v = getattr(self, f.name)
            if isinstance(v, bool) or not isinstance(v, (int, float, np.floating)):
                raise MaterialError(f"{f.name} must be a number, got {v!r}")
            if not math.isfinite(v):
                raise MaterialError(f"{f.name} must be finite, got {v!r}")
            object.__setattr__(self, f.name, float(v))

    @property
    def hemitropic(self):
        return self.c8 != 0.0

    @property
    def gradient_moduli(self):
        return np.array([self.c2, self.c3, self.c5, self.c11, self.c15])

    def scaled_gradient(self, t):
        return MaterialParams(
            self.lam, self.mu, t * self.c2, t * self.c3, t * self.c5,
            t * self.c11, t * self.c15, t * self.c8,
        )

    # file format uses "lambda"; the attribute cannot
    def to_dict(self):
        d = asdict(self)
        d["lambda"] = d.pop("lam")
        return {k: d[k] for k in MATERIAL_KEYS}

    @classmethod
    def from_dict(cls, data):
        if not isinstance(data, dict):
            raise MaterialError("material must be a JSON object")
        unknown = set(data) - set(MATERIAL_KEYS)
        if unknown:
            raise MaterialError(f"unknown material keys: {sorted(unknown)}")
        missing = set(MATERIAL_KEYS) - {"c8"} - set(data)
        if missing:
            raise MaterialError(f"missing material keys: {sorted(missing)}")
        kw = {k: v for k, v in data.items() if k != "lambda"}
        return cls(lam=data["lambda"], **kw)

    @classmethod
    def load(cls, path):
        with open(path) as fh:
            try:
                data = json.load(fh)
            except json.JSONDecodeError as exc:
                raise MaterialError(f"{path}: invalid JSON ({exc})") from exc
        return cls.from_dict(data)


MATERIAL_KEYS = ("lambda", "mu", "c2", "c3", "c5", "c11", "c15", "c8")


@dataclass(frozen=True)
class GammaParams:
    gamma1: float
    gamma2: float
    gamma3: float
    gamma4: float
    gamma5: float

    def as_array(self):
        return np.array([self.gamma1, self.gamma2, self.gamma3, self.gamma4, self.gamma5])


@dataclass(frozen=True)
class StressState:
    S: np.ndarray
    P: np.ndarray


# --------------------------------------------------------------------------
# elasticity tensors


def _delta3(spec):
    return np.einsum(spec + "->ijklpq", _D, _D, _D)


_G_TERMS = {
    "c2": ("ij,kl,pq", "ij,kp,lq", "ik,jq,lp", "iq,jk,lp"),
    # the c3 pattern is the trace-gradient product E_ii,k E_ll,k
    "c3": ("ij,kq,lp",),
    "c5": ("ik,jl,pq", "ik,jp,lq", "il,jk,pq", "ip,jk,lq"),
    "c11": ("il,jp,kq", "ip,jl,kq"),
    "c15": ("il,jq,kp", "ip,jq,kl", "iq,jl,kp", "iq,jp,kl"),
}
_G_BASIS = {
    name: sum(_delta3(s) for s in specs) for name, specs in _G_TERMS.items()
}


def build_C(m):
    return (
        m.lam * np.einsum("ij,kl->ijkl", _D, _D)
        + m.mu * (np.einsum("ik,jl->ijkl", _D, _D) + np.einsum("il,jk->ijkl", _D, _D))
    )


def build_G(m):
    G = np.zeros((3,) * 6)
    for name, basis in _G_BASIS.items():
        G += getattr(m, name) * basis
    return G


def build_H(m):
    """Hemitropic coupling ``c8 (eps_ikl d_jp + eps_ikp d_jl + eps_jkl d_ip + eps_jkp d_il)``.

    The third term is the (i, j) partner of the first, which makes ``H``
    symmetric in (i, j) and in (l, p).
    """
    e = LEVI_CIVITA
    H = (
        np.einsum("ikl,jp->ijklp", e, _D)
        + np.einsum("ikp,jl->ijklp", e, _D)
        + np.einsum("jkl,ip->ijklp", e, _D)
        + np.einsum("jkp,il->ijklp", e, _D)
    )
    return m.c8 * H


# --------------------------------------------------------------------------
# stress and energy


def apply_hooke(m, E, gradE):
    """Return ``S = C:E + H^T:gradE`` and ``P = H:E + G:gradE``."""
    E = np.asarray(E, dtype=float)
    gradE = np.asarray(gradE, dtype=float)
    S = np.einsum("ijkl,kl->ij", build_C(m), E)
    P = np.einsum("ijklpq,lpq->ijk", build_G(m), gradE)
    if m.c8 != 0.0:
        H = build_H(m)
        S = S + np.einsum("klpij,klp->ij", H, gradE)
        P = P + np.einsum("ijklp,lp->ijk", H, E)
    return StressState(S=S, P=P)


def energy(m, E, gradE):
    E = np.asarray(E, dtype=float)
    gradE = np.asarray(gradE, dtype=float)
    psi = np.einsum("ijkl,ij,kl->", build_C(m), E, E)
    psi += np.einsum("ijklpq,ijk,lpq->", build_G(m), gradE, gradE)
    if m.c8 != 0.0:
        psi += 2.0 * np.einsum("ijklp,ijk,lp->", build_H(m), gradE, E)
    return 0.5 * float(psi)


def hessian_24(m):
    """Quadratic-form matrix of :func:`energy` on an orthonormal basis of
    SymMat3 (6) + SymTri3 (18), in packed order."""

    Bs = sym_basis(orthonormal=True)
    Bt = symtri_basis(orthonormal=True)
    C, G = build_C(m), build_G(m)
    M = np.zeros((24, 24))
    M[:6, :6] = np.einsum("aij,ijkl,bkl->ab", Bs, C, Bs)
    M[6:, 6:] = np.einsum("aijk,ijklpq,blpq->ab", Bt, G, Bt)
    if m.c8 != 0.0:
        X = np.einsum("aijk,ijklp,blp->ab", Bt, build_H(m), Bs)
        M[6:, :6] = X
        M[:6, 6:] = X.T
    return 0.5 * (M + M.T)


# --------------------------------------------------------------------------
# gamma parameterization


def gammas(m):
    c2, c3, c5, c11, c15 = m.c2, m.c3, m.c5, m.c11, m.c15
    return GammaParams(
        gamma1=2.0 * (c11 + 2.0 * c15) + 4.0 * c2 + c3 + 4.0 * c5,
        gamma2=4.0 * (c11 + 2.0 * c15),
        gamma3=2.0 / 3.0 * (4.0 * c5 - 2.0 * c2 - 2.0 * c3),
        gamma4=8.0 / 9.0 * (3.0 * c11 - 3.0 * c15 - 4.0 * c2 + 2.0 * c3 + 2.0 * c5),
        gamma5=4.0 / 9.0 * (c11 - c15),
    )


# (P row, E column) strict components of the printed 5x5 blocks, 0-based
G1_ORDERINGS = (
    (((0, 0, 0), (0, 1, 1), (0, 2, 2), (1, 1, 0), (2, 2, 0)),
     ((0, 0, 0), (0, 1, 1), (0, 2, 2), (1, 1, 0), (2, 2, 0))),
    (((1, 1, 1), (0, 1, 0), (1, 2, 2), (0, 0, 1), (2, 2, 1)),
     ((1, 1, 1), (0, 1, 0), (1, 2, 2), (0, 0, 1), (2, 2, 1))),
    (((2, 2, 2), (0, 2, 0), (1, 2, 1), (0, 0, 2), (1, 1, 2)),
     ((2, 2, 2), (0, 2, 0), (1, 2, 1), (0, 0, 2), (1, 1, 2))),
)
G2_ORDERING = ((0, 1, 2), (0, 2, 1), (1, 2, 0))


def voigt_blocks(m):
    """Printed 5x5 ``G1`` and 3x3 ``G2`` blocks.

    Entries are the Hessian of ``psi`` with respect to the strict components
    ``E_ij,k`` (i <= j), which is what the printed matrices tabulate.
    """
    c2, c3, c5, c11, c15 = m.c2, m.c3, m.c5, m.c11, m.c15
    a = 2 * c2 + 4 * c5
    b = 2 * c2 + c3
    d = 4 * (c5 + c11 + c15)
    f = 2 * c2 + 4 * c15
    G1 = np.array([
        [4 * c2 + c3 + 4 * c5 + 2 * c11 + 4 * c15, a, a, b, b],
        [a, d, 4 * c5, f, 2 * c2],
        [a, 4 * c5, d, 2 * c2, f],
        [b, f, 2 * c2, c3 + 2 * c11, c3],
        [b, 2 * c2, f, c3, c3 + 2 * c11],
    ])
    G2 = 4.0 * np.array([[c11, c15, c15], [c15, c11, c15], [c15, c15, c11]])
    return G1, G2


def strict_hessian(G, rows, cols):
    """Contract ``G`` against unit strict-component perturbations."""
    out = np.zeros((len(rows), len(cols)))
    for a, (i, j, k) in enumerate(rows):
        A = np.zeros((3, 3, 3))
        A[i, j, k] = A[j, i, k] = 1.0
        for b, (l, p, q) in enumerate(cols):
            B = np.zeros((3, 3, 3))
            B[l, p, q] = B[p, l, q] = 1.0
            out[a, b] = np.einsum("ijk,ijklpq,lpq->", A, G, B)
    return out


def gamma_blocks(g):
    g1, g2, g3, g4, g5 = g.gamma1, g.gamma2, g.gamma3, g.gamma4, g.gamma5
    Gamma1 = np.array([
        [g1, 2 * g1 - g2, g3],
        [2 * g1 - g2, 4 * g1 + g2, 2 * g3],
        [g3, 2 * g3, g4],
    ])
    Gamma2 = g5 * np.array([[2.0, -1.0, -1.0], [-1.0, 2.0, -1.0], [-1.0, -1.0, 2.0]])
    return Gamma1, Gamma2


# --------------------------------------------------------------------------
# couple-stress special case


def sokolowski(mu, eta, ell, lam=0.0):
    """Moduli reproducing the couple-stress law with length ``ell`` and ratio ``eta``."""
    k = ell * ell * mu
    return MaterialParams(
        lam=lam, mu=mu,
        c2=k * eta, c3=-2.0 * k * eta, c5=-k * eta / 2.0,
        c11=k * (eta + 1.0), c15=-k * (eta + 1.0) / 2.0,
    )


def sokolowski_fit(m, rtol=1e-10):
    """Recover ``(eta, ell^2)`` if ``m`` lies on the couple-stress family.

    Returns ``None`` when the moduli are not of that form, or ``mu`` is zero.
    """
    k = m.c11 - m.c2
    scale = max(abs(v) for v in m.gradient_moduli) or 1.0
    if m.mu == 0.0 or k == 0.0:
        return None
    eta = m.c2 / k
    candidate = sokolowski(m.mu, eta, 1.0)
    fitted = candidate.gradient_moduli * (k / m.mu)
    if np.max(np.abs(fitted - m.gradient_moduli)) > rtol * scale:
        return None
    return {"mu": m.mu, "eta": eta, "ell2": k / m.mu}


# --------------------------------------------------------------------------
# coupled coordinates

COUPLED_NAMES = (
    "t111", "t122+t133", "h32-h23",
    "t222", "t233+t112", "h13-h31",
    "t333", "t223+t113", "h21-h12",
    "t122-t133", "t233-t112", "t223-t113",
    "h32+h23", "h13+h31", "h21+h12",
    "h11", "h22", "t123",
)


def coupled_coordinates(K):
    """The 18 scalar combinations of the decomposed tensor that block-
    diagonalize the isotropic gradient energy.

    Returns a dict with keys ``triples`` (3x3: one Gamma1 triple per row),
    ``gamma2_pairs`` (3,), ``gamma5_pairs`` (3,), ``hat_diag`` (3,) and
    ``t123``, plus ``vector`` (18,) ordered as :data:`COUPLED_NAMES`.
    """
    t, h = decompose(K)
    triples = np.array([
        [t[0, 0, 0], t[0, 1, 1] + t[0, 2, 2], h[2, 1] - h[1, 2]],
        [t[1, 1, 1], t[1, 2, 2] + t[0, 0, 1], h[0, 2] - h[2, 0]],
        [t[2, 2, 2], t[1, 1, 2] + t[0, 0, 2], h[1, 0] - h[0, 1]],
    ])
    g2 = np.array([t[0, 1, 1] - t[0, 2, 2], t[1, 2, 2] - t[0, 0, 1], t[1, 1, 2] - t[0, 0, 2]])
    g5 = np.array([h[2, 1] + h[1, 2], h[0, 2] + h[2, 0], h[1, 0] + h[0, 1]])
    diag = np.diag(h).copy()
    vec = np.concatenate([triples.ravel(), g2, g5, diag[:2], [t[0, 1, 2]]])
    return {
        "triples": triples,
        "gamma2_pairs": g2,
        "gamma5_pairs": g5,
        "hat_diag": diag,
        "t123": float(t[0, 1, 2]),
        "vector": vec,
    }


def _coupled_matrix():
    return np.array([coupled_coordinates(B)["vector"] for B in symtri_basis()]).T


_COUPLED = _coupled_matrix()
_COUPLED_INV = np.linalg.inv(_COUPLED)


def from_coupled_coordinates(vec):
    """Inverse of :func:`coupled_coordinates` (takes the 18-vector form)."""
    return unpack_symtri(_COUPLED_INV @ np.asarray(vec, dtype=float))


def coupled_hessian(m):
    """Hessian of the gradient energy in the coupled coordinates (18x18)."""
    B = symtri_basis()
    H = np.einsum("aijk,ijklpq,blpq->ab", B, build_G(m), B)
    return _COUPLED_INV.T @ H @ _COUPLED_INV
