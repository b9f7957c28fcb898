"""Positive-definiteness of the isotropic second-gradient energy.

Three independent characterizations of the gradient block are provided:
closed-form inequalities in the gamma moduli, the same inequalities in the
``c`` moduli, and the smallest eigenvalue of the assembled quadratic form.
The eigenvalue route is treated as ground truth.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .constitutive import build_G, gammas, hessian_24, sokolowski_fit
from .tensor_core import decompose, sym_skew, symtri_basis

#: Relative width of the band around a semidefinite boundary.
BOUNDARY_BAND = 1e-9


@dataclass(frozen=True)
class Check:
    ok: bool
    margins: dict


@dataclass
class StabilityReport:
    first_gradient_ok: bool
    gamma_ok: bool
    c_ok: bool | None
    spectral_ok: bool
    min_eigenvalue: float
    strain_min_eigenvalue: float
    marginal: bool
    couple_stress_ok: bool
    margins: dict = field(default_factory=dict)
    sokolowski: dict | None = None

    @property
    def definite(self):
        return self.first_gradient_ok and self.spectral_ok

    @property
    def status(self):
        if self.definite:
            return "definite"
        if self.marginal:
            return "marginal"
        return "indefinite"

    def to_dict(self):
        return {
            "status": self.status,
            "first_gradient_ok": self.first_gradient_ok,
            "gamma_ok": self.gamma_ok,
            "c_ok": self.c_ok,
            "spectral_ok": self.spectral_ok,
            "couple_stress_ok": self.couple_stress_ok,
            "marginal": self.marginal,
            "min_eigenvalue": self.min_eigenvalue,
            "strain_min_eigenvalue": self.strain_min_eigenvalue,
            "margins": self.margins,
            "sokolowski": self.sokolowski,
        }


def first_gradient_positivity(lam, mu):
    margins = {"mu": float(mu), "3lambda+2mu": float(3 * lam + 2 * mu)}
    return Check(ok=mu > 0 and 3 * lam + 2 * mu > 0, margins=margins)


def gamma_positivity(g):
    """Sylvester conditions on the gamma moduli.

    ``gamma1 > 0``, ``0 < gamma2 < 5 gamma1``,
    ``gamma4 > 5 gamma3^2 / (5 gamma1 - gamma2)``, ``gamma5 > 0``.
    """
    g1, g2, g3, g4, g5 = g.gamma1, g.gamma2, g.gamma3, g.gamma4, g.gamma5
    den = 5.0 * g1 - g2
    margins = {
        "gamma1": g1,
        "gamma2": g2,
        "5gamma1-gamma2": den,
        # sign-equivalent to the gamma4 bound when den > 0, without dividing
        "gamma4*(5gamma1-gamma2)-5gamma3^2": g4 * den - 5.0 * g3 * g3,
        "gamma5": g5,
    }
    ok = g1 > 0 and 0 < g2 and den > 0 and g4 * den > 5.0 * g3 * g3 and g5 > 0
    return Check(ok=bool(ok), margins=margins)


def c_positivity(m):
    """The gamma conditions restated in the ``c`` moduli.

    The third inequality ``5 c3 + 4 c11 > 2 c15`` makes the denominator
    ``4 c15 - 10 c3 - 8 c11`` of the ``c5`` bound strictly negative, so the
    bound is only evaluated once the first three hold.
    """
    if m.c8 != 0.0:
        raise ValueError("c-form positivity applies to c8 = 0 only")
    c2, c3, c5, c11, c15 = m.c2, m.c3, m.c5, m.c11, m.c15
    den = 4 * c15 - 10 * c3 - 8 * c11
    num = c3 * (3 * c11 + c15) + 2 * (
        c11 ** 2 - 5 * c2 ** 2 - 6 * c15 * c2 - 2 * c15 ** 2 + c11 * (2 * c2 + c15)
    )
    margins = {
        "c11": c11,
        "c15+c11/2": c15 + c11 / 2,
        "c11-c15": c11 - c15,
        "5c3+4c11-2c15": 5 * c3 + 4 * c11 - 2 * c15,
        # c5 > num/den with den < 0  <=>  c5*den - num < 0
        "num-c5*den": num - c5 * den,
    }
    ok = (
        c11 > 0
        and -c11 / 2 < c15 < c11
        and 5 * c3 + 4 * c11 > 2 * c15
        and den < 0
        and c5 * den < num
    )
    return Check(ok=bool(ok), margins=margins)


def _scale(m):
    return max(abs(v) for v in (*m.gradient_moduli, m.c8)) or 0.0


def spectral_positivity(m, tol=BOUNDARY_BAND):
    """Smallest eigenvalue of the gradient block of the energy Hessian.

    With ``c8 != 0`` definiteness is decided on the full coupled matrix after
    rescaling gradient coordinates by a characteristic length, which is a
    congruence and leaves the sign pattern intact.
    """
    M = hessian_24(m)
    lam_grad = np.linalg.eigvalsh(M[6:, 6:])[0]
    band = tol * _scale(m)
    if m.c8 == 0.0:
        ok = lam_grad > band
    else:
        strain_scale = max(abs(m.lam), abs(m.mu)) or 1.0
        ell = np.sqrt((_scale(m) or 1.0) / strain_scale)
        T = np.diag(np.r_[np.ones(6), np.full(18, 1.0 / ell)])
        full = np.linalg.eigvalsh(T @ M @ T)[0]
        ok = full > tol * strain_scale
    return Check(ok=bool(ok), margins={"min_eigenvalue": float(lam_grad), "band": band})


def couple_stress_hessian(m):
    """Gradient energy restricted to sym-skew strain gradients (8x8)."""
    devs = []
    for i in range(3):
        for j in range(3):
            if (i, j) == (2, 2):
                continue
            A = np.zeros((3, 3))
            A[i, j] = 1.0
            if i == j:
                A[2, 2] = -1.0
            devs.append(sym_skew(A))
    B = np.array(devs)
    # orthonormalize so eigenvalues are those of the restricted form
    flat = B.reshape(8, -1)
    q, _ = np.linalg.qr(flat.T)
    Bo = q.T.reshape(8, 3, 3, 3)
    return np.einsum("aijk,ijklpq,blpq->ab", Bo, build_G(m), Bo)


def report(m, tol=BOUNDARY_BAND):
    first = first_gradient_positivity(m.lam, m.mu)
    g = gammas(m)
    gam = gamma_positivity(g)
    c = c_positivity(m) if m.c8 == 0.0 else None
    spec = spectral_positivity(m, tol)
    lam_min = spec.margins["min_eigenvalue"]
    strain_min = float(np.linalg.eigvalsh(hessian_24(m)[:6, :6])[0])
    band = tol * _scale(m)
    cs_min = float(np.linalg.eigvalsh(couple_stress_hessian(m))[0])
    strain_band = tol * max(abs(m.lam), abs(m.mu))
    marginal = (
        not (first.ok and spec.ok)
        and strain_min >= -strain_band
        and lam_min >= -band
        and (abs(lam_min) <= band or abs(strain_min) <= strain_band)
    )
    is_soko = abs(g.gamma1) <= band and abs(g.gamma2) <= band and abs(g.gamma3) <= band
    return StabilityReport(
        first_gradient_ok=first.ok,
        gamma_ok=gam.ok,
        c_ok=None if c is None else c.ok,
        spectral_ok=spec.ok,
        min_eigenvalue=float(lam_min),
        strain_min_eigenvalue=strain_min,
        marginal=bool(marginal),
        couple_stress_ok=bool(cs_min > band),
        margins={
            "first_gradient": first.margins,
            "gamma": gam.margins,
            "c": None if c is None else c.margins,
            "couple_stress_min_eigenvalue": cs_min,
            "band": band,
        },
        sokolowski=sokolowski_fit(m) if is_soko else None,
    )
