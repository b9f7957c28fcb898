import numpy as np
import pytest

from gradhooke.kinematics import (
    KinematicsError,
    PlacementProbe,
    compatibility_A,
    curl_gradient_linear,
    extract_A,
    green_lagrange,
    polar,
    push_forward,
    rotation_gradient_pullback,
    strain_gradient_exact,
    strain_state,
)
from gradhooke.tensor_core import LEVI_CIVITA, decompose, random_orthogonal, unpack_fullsym

from conftest import random_symtri


def smooth_probes(rng, n):
    """Non-rigid quadratic placements with F near a random rotation-stretch."""
    out = []
    for s in range(n):
        Q = random_orthogonal(100 + s)
        A = 0.2 * rng.standard_normal((3, 3))
        F0 = Q @ (np.eye(3) + 0.5 * (A + A.T))
        C = 0.3 * rng.standard_normal((3, 3, 3))
        out.append(PlacementProbe.quadratic(C, F0))
    return out


class TestGreenLagrange:
    def test_reference_and_stretch(self):
        np.testing.assert_array_equal(green_lagrange(np.eye(3)), np.zeros((3, 3)))
        np.testing.assert_allclose(green_lagrange(2 * np.eye(3)), 1.5 * np.eye(3))

    def test_rotation_strain_free(self):
        for s in range(10):
            assert np.abs(green_lagrange(random_orthogonal(s))).max() < 1e-13

    def test_rejects_reflection(self):
        with pytest.raises(KinematicsError):
            green_lagrange(np.diag([1.0, 1.0, -1.0]))
        with pytest.raises(KinematicsError):
            green_lagrange(np.zeros((3, 3)))


class TestStrainState:
    def test_affine_has_no_gradient(self, rng):
        F0 = np.eye(3) + 0.3 * rng.standard_normal((3, 3))
        st = strain_state(PlacementProbe.affine(F0), rng.standard_normal(3))
        assert np.abs(st.gradE).max() < 1e-10

    def test_quadratic_matches_analytic(self, rng):
        for probe in smooth_probes(rng, 5):
            X = 0.3 * rng.standard_normal(3)
            st = strain_state(probe, X)
            exact = strain_gradient_exact(probe.F(X), probe.gradF(X))
            np.testing.assert_allclose(st.gradE, exact, atol=1e-9)

    def test_small_quadratic_is_sym_part(self):
        # chi = X + t C X X / 2: gradE -> t (C_ijk + C_jik)/2 at X = 0
        C = unpack_fullsym(np.arange(1.0, 11.0)) * 0.1
        C[0, 1, 2] += 0.3
        C[0, 2, 1] += 0.3
        t = 1e-6
        st = strain_state(PlacementProbe.quadratic(t * C), np.zeros(3), h=1e-3)
        np.testing.assert_allclose(st.gradE / t, 0.5 * (C + C.transpose(1, 0, 2)), atol=1e-9)

    def test_torsion_probe(self):
        theta = 0.01
        X = np.array([0.3, -0.2, 0.5])
        probe = PlacementProbe.torsion(theta)
        st = strain_state(probe, X)
        exact = strain_gradient_exact(probe.F(X), probe.gradF(X))
        np.testing.assert_allclose(st.gradE, exact, atol=1e-10)
        # linear part: eps_13,2 = -theta/2, eps_23,1 = theta/2
        assert abs(st.gradE[0, 2, 1] + theta / 2) < 1e-3 * theta
        assert abs(st.gradE[1, 2, 0] - theta / 2) < 1e-3 * theta

    def test_objectivity(self, rng):
        for probe, s in zip(smooth_probes(rng, 3), range(3)):
            Q = random_orthogonal(40 + s)
            moved = PlacementProbe(
                chi=lambda X, p=probe: Q @ p.chi(X),
                F=lambda X, p=probe: Q @ p.F(X),
                gradF=lambda X, p=probe: np.einsum("ab,bij->aij", Q, p.gradF(X)),
            )
            X = rng.standard_normal(3) * 0.2
            a, b = strain_state(probe, X), strain_state(moved, X)
            np.testing.assert_allclose(b.E, a.E, atol=1e-11)
            np.testing.assert_allclose(b.gradE, a.gradE, atol=1e-9)


class TestPolar:
    def test_identity_and_diagonal(self):
        p = polar(np.eye(3))
        np.testing.assert_allclose(p.R, np.eye(3), atol=1e-15)
        np.testing.assert_allclose(p.U, np.eye(3), atol=1e-15)
        p = polar(np.diag([2.0, 3.0, 4.0]))
        np.testing.assert_allclose(p.U, np.diag([2.0, 3.0, 4.0]), atol=1e-14)
        np.testing.assert_allclose(p.R, np.eye(3), atol=1e-14)

    def test_random_reconstruction(self, rng):
        for _ in range(50):
            F = rng.standard_normal((3, 3))
            if np.linalg.det(F) < 0:
                F[:, 0] *= -1
            p = polar(F)
            np.testing.assert_allclose(p.R @ p.U, F, atol=1e-11 * np.abs(F).max())
            np.testing.assert_allclose(p.R.T @ p.R, np.eye(3), atol=1e-12)
            assert np.linalg.eigvalsh(p.U)[0] > 0

    def test_rejects(self):
        with pytest.raises(KinematicsError):
            polar(-np.eye(3))


class TestCompatibility:
    def test_rigid(self):
        probe = PlacementProbe.affine(random_orthogonal(3), np.ones(3))
        X = np.array([0.1, 0.2, 0.3])
        assert np.abs(rotation_gradient_pullback(probe, X)).max() < 1e-9
        assert np.abs(compatibility_A(probe, X)).max() < 1e-9

    def test_W_skew(self, rng):
        for probe in smooth_probes(rng, 5):
            W = rotation_gradient_pullback(probe, 0.2 * rng.standard_normal(3))
            assert np.abs(W + W.transpose(1, 0, 2)).max() < 1e-9

    def test_closed_form_matches_extraction(self, rng):
        for probe in smooth_probes(rng, 6):
            X = 0.2 * rng.standard_normal(3)
            W = rotation_gradient_pullback(probe, X)
            A = compatibility_A(probe, X)
            np.testing.assert_allclose(A, extract_A(W), atol=1e-6)
            np.testing.assert_allclose(np.einsum("flm,mk->flk", LEVI_CIVITA, A), W, atol=1e-6)

    def test_torsion_probe(self):
        w = lambda x1, x2: 0.1 * x1 * x2 * (x1 + x2)  # noqa: E731
        dw = lambda x1, x2: 0.1 * np.array([2 * x1 * x2 + x2 ** 2, x1 ** 2 + 2 * x1 * x2])  # noqa: E731
        d2w = lambda x1, x2: 0.1 * np.array([[2 * x2, 2 * (x1 + x2)], [2 * (x1 + x2), 2 * x1]])  # noqa: E731
        probe = PlacementProbe.torsion(0.3, w, dw, d2w)
        for X in ([0.2, 0.1, 0.4], [-0.3, 0.5, 0.0], [0.0, 0.0, 1.0]):
            X = np.array(X)
            np.testing.assert_allclose(compatibility_A(probe, X), extract_A(rotation_gradient_pullback(probe, X)), atol=1e-6)


class TestPushForward:
    def test_identity(self, rng):
        S = rng.standard_normal((3, 3))
        S = S + S.T
        P = random_symtri(rng)
        Sig, Pi = push_forward(S, P, np.eye(3), np.zeros((3, 3, 3)))
        np.testing.assert_allclose(Sig, S, atol=0)
        np.testing.assert_allclose(Pi, P, atol=0)

    def test_dilation(self, rng):
        S = np.diag([1.0, 2.0, 3.0])
        c = 1.7
        Sig, Pi = push_forward(S, np.zeros((3, 3, 3)), c * np.eye(3), np.zeros((3, 3, 3)))
        np.testing.assert_allclose(Sig, S / c, rtol=1e-15)

    def test_pi_symmetric_and_full_sum(self, rng):
        S = rng.standard_normal((3, 3))
        S = S + S.T
        P = random_symtri(rng)
        F = np.eye(3) + 0.3 * rng.standard_normal((3, 3))
        G = rng.standard_normal((3, 3, 3))
        G = 0.5 * (G + G.transpose(0, 2, 1))
        Sig, Pi = push_forward(S, P, F, G)
        assert np.abs(Pi - Pi.transpose(1, 0, 2)).max() < 1e-13
        # explicit loops
        J = np.linalg.det(F)
        ref = np.zeros((3, 3))
        for a in range(3):
            for b in range(3):
                s = 0.0
                for i in range(3):
                    for j in range(3):
                        s += S[i, j] * F[a, i] * F[b, j]
                        for k in range(3):
                            s += P[i, j, k] * (F[a, j] * G[b, i, k] + G[a, i, k] * F[b, j])
                ref[a, b] = s / J
        np.testing.assert_allclose(Sig, ref, atol=1e-12)


class TestCurlGradient:
    def test_symmetric_coefficients(self):
        d2u = np.zeros((3, 3, 3))
        d2u[:] = unpack_fullsym(np.arange(10.0))
        np.testing.assert_allclose(curl_gradient_linear(d2u), 0, atol=1e-14)

    def test_traceless(self, rng):
        for _ in range(20):
            d2u = rng.standard_normal((3, 3, 3))
            d2u = 0.5 * (d2u + d2u.transpose(0, 2, 1))
            assert abs(np.trace(curl_gradient_linear(d2u))) < 1e-14

    def test_against_hat_slope(self, rng):
        # the linear part of hat(grad E) is -kappa / 2
        d2u = rng.standard_normal((3, 3, 3))
        d2u = 0.5 * (d2u + d2u.transpose(0, 2, 1))
        kappa = curl_gradient_linear(d2u)
        xi = 1e-6
        probe = PlacementProbe.quadratic(xi * d2u)
        st = strain_state(probe, np.zeros(3), h=1e-3)
        slope = decompose(st.gradE)[1] / xi
        np.testing.assert_allclose(kappa, -2.0 * slope, atol=1e-6)
