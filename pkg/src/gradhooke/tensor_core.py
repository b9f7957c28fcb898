"""Dense algebra for second- and third-order tensors in three dimensions.

Tensors are carried as plain ``numpy`` arrays of shape ``(3, 3)`` or
``(3, 3, 3)``.  The packed forms below are views used for serialization;
every contraction is carried out on the full index range.

Packed orderings
----------------
SymMat3   : (11, 22, 33, 23, 13, 12)
DevMat3   : (11, 22, 12, 13, 21, 23, 31, 32); the 33 entry is minus the trace
SymTri3   : pair (ij) in SymMat3 order, times k in (1, 2, 3)  -> 18 entries
FullSymTri3 : (111, 112, 113, 122, 123, 133, 222, 223, 233, 333)
"""

from __future__ import annotations

import itertools

import numpy as np

ALGEBRA_TOL = 1e-12
ROUNDTRIP_TOL = 1e-13

#: Levi-Civita alternator.
LEVI_CIVITA = np.zeros((3, 3, 3))
for _i, _j, _k in itertools.permutations(range(3)):
    LEVI_CIVITA[_i, _j, _k] = np.linalg.det(np.eye(3)[[_i, _j, _k]])
del _i, _j, _k

SYM_PAIRS = ((0, 0), (1, 1), (2, 2), (1, 2), (0, 2), (0, 1))
DEV_ENTRIES = ((0, 0), (1, 1), (0, 1), (0, 2), (1, 0), (1, 2), (2, 0), (2, 1))
FULLSYM_TRIPLES = tuple(itertools.combinations_with_replacement(range(3), 3))


class TensorError(ValueError):
    """Raised when an input tensor violates a structural precondition."""


# --------------------------------------------------------------------------
# packing


def pack_sym(a):
    a = np.asarray(a, dtype=float)
    return np.array([a[i, j] for i, j in SYM_PAIRS])


def unpack_sym(v):
    v = np.asarray(v, dtype=float)
    if v.shape != (6,):
        raise TensorError(f"SymMat3 needs 6 components, got shape {v.shape}")
    a = np.empty((3, 3))
    for n, (i, j) in enumerate(SYM_PAIRS):
        a[i, j] = a[j, i] = v[n]
    return a


def pack_dev(a):
    a = np.asarray(a, dtype=float)
    return np.array([a[i, j] for i, j in DEV_ENTRIES])


def unpack_dev(v):
    v = np.asarray(v, dtype=float)
    if v.shape != (8,):
        raise TensorError(f"DevMat3 needs 8 components, got shape {v.shape}")
    a = np.zeros((3, 3))
    for n, (i, j) in enumerate(DEV_ENTRIES):
        a[i, j] = v[n]
    a[2, 2] = -a[0, 0] - a[1, 1]
    return a


def pack_symtri(K):
    K = np.asarray(K, dtype=float)
    return np.array([K[i, j, k] for i, j in SYM_PAIRS for k in range(3)])


def unpack_symtri(v):
    v = np.asarray(v, dtype=float)
    if v.shape != (18,):
        raise TensorError(f"SymTri3 needs 18 components, got shape {v.shape}")
    K = np.empty((3, 3, 3))
    for n, (i, j) in enumerate(SYM_PAIRS):
        for k in range(3):
            K[i, j, k] = K[j, i, k] = v[3 * n + k]
    return K


def pack_fullsym(K):
    K = np.asarray(K, dtype=float)
    return np.array([K[t] for t in FULLSYM_TRIPLES])


def unpack_fullsym(v):
    v = np.asarray(v, dtype=float)
    if v.shape != (10,):
        raise TensorError(f"FullSymTri3 needs 10 components, got shape {v.shape}")
    K = np.empty((3, 3, 3))
    for n, t in enumerate(FULLSYM_TRIPLES):
        for p in itertools.permutations(t):
            K[p] = v[n]
    return K


def symtri_basis(orthonormal=False):
    """Return the 18 SymTri3 basis tensors in packed order.

    With ``orthonormal=True`` each element is scaled by ``1/sqrt(multiplicity)``
    so that :func:`inner` becomes the Euclidean product of coefficients.
    """
    out = []
    for i, j in SYM_PAIRS:
        for k in range(3):
            B = np.zeros((3, 3, 3))
            B[i, j, k] = B[j, i, k] = 1.0
            if orthonormal and i != j:
                B /= np.sqrt(2.0)
            out.append(B)
    return np.array(out)


def sym_basis(orthonormal=False):
    """Return the 6 SymMat3 basis tensors in packed order."""
    out = []
    for i, j in SYM_PAIRS:
        B = np.zeros((3, 3))
        B[i, j] = B[j, i] = 1.0
        if orthonormal and i != j:
            B /= np.sqrt(2.0)
        out.append(B)
    return np.array(out)


# --------------------------------------------------------------------------
# checks


def _scale(a):
    return max(1.0, float(np.max(np.abs(a)))) if np.size(a) else 1.0


def check_symtri(K, tol=ALGEBRA_TOL):
    """Validate a third-order array symmetric in its first two indices."""
    K = np.asarray(K, dtype=float)
    if K.shape != (3, 3, 3):
        raise TensorError(f"expected a (3, 3, 3) array, got {K.shape}")
    if np.max(np.abs(K - K.transpose(1, 0, 2))) > tol * _scale(K):
        raise TensorError("tensor is not symmetric in its first two indices")
    return K


def check_orthogonal(Q, tol=1e-10):
    Q = np.asarray(Q, dtype=float)
    if Q.shape != (3, 3):
        raise TensorError(f"expected a (3, 3) matrix, got {Q.shape}")
    if np.max(np.abs(Q.T @ Q - np.eye(3))) > tol:
        raise TensorError("matrix is not orthogonal")
    return Q


def is_fully_symmetric(K, tol=ALGEBRA_TOL):
    K = np.asarray(K, dtype=float)
    s = _scale(K)
    return all(
        np.max(np.abs(K - K.transpose(p))) <= tol * s
        for p in itertools.permutations(range(3))
    )


# --------------------------------------------------------------------------
# decomposition


def decompose(K):
    """Split ``K`` into its completely symmetric part and deviatoric generator.

    Parameters
    ----------
    K : ndarray, shape (3, 3, 3)
        Third-order tensor symmetric in its first two indices.

    Returns
    -------
    tilde : ndarray, shape (3, 3, 3)
        ``(K_ijk + K_jki + K_kij) / 3``, symmetric under all permutations.
    hat : ndarray, shape (3, 3)
        ``hat_li = eps_ljk K_ijk``, traceless.
    """
    K = check_symtri(K)
    tilde = (K + K.transpose(1, 2, 0) + K.transpose(2, 0, 1)) / 3.0
    hat = np.einsum("ljk,ijk->li", LEVI_CIVITA, K)
    return tilde, hat


def sym_skew(hat):
    """Third-order tensor ``(eps_jkl hat_li + eps_ikl hat_lj) / 3``."""
    hat = np.asarray(hat, dtype=float)
    return (
        np.einsum("jkl,li->ijk", LEVI_CIVITA, hat)
        + np.einsum("ikl,lj->ijk", LEVI_CIVITA, hat)
    ) / 3.0


def recompose(tilde, hat, tol=ALGEBRA_TOL):
    """Inverse of :func:`decompose`."""
    tilde = np.asarray(tilde, dtype=float)
    hat = np.asarray(hat, dtype=float)
    if not is_fully_symmetric(tilde, tol):
        raise TensorError("tilde part is not completely symmetric")
    if abs(np.trace(hat)) > tol * _scale(hat):
        raise TensorError(f"hat part is not traceless (trace={np.trace(hat):.3e})")
    return tilde + sym_skew(hat)


def inner(K, L):
    """Full 27-term contraction ``K_ijk L_ijk``."""
    K = np.asarray(K, dtype=float)
    L = np.asarray(L, dtype=float)
    total = 0.0
    for i, j, k in itertools.product(range(3), repeat=3):
        total += K[i, j, k] * L[i, j, k]
    return float(total)


def norm(K):
    return float(np.sqrt(inner(K, K)))


# --------------------------------------------------------------------------
# orthogonal group


def rotate(T, Q):
    """Apply ``T'_{ij..} = Q_hi Q_mj .. T_{hm..}`` to a tensor of any order."""
    T = np.asarray(T, dtype=float)
    Q = check_orthogonal(Q)
    out = T
    for axis in range(T.ndim):
        # contract the leading index of Q with the current axis, keep position
        out = np.moveaxis(np.tensordot(Q, out, axes=([0], [axis])), 0, axis)
    return out


def rotate3(K, Q):
    """``(rotate3 K)_ijk = Q_hi Q_mj Q_nk K_hmn`` by explicit summation."""
    K = np.asarray(K, dtype=float)
    Q = check_orthogonal(Q)
    out = np.zeros((3, 3, 3))
    idx = range(3)
    for i, j, k in itertools.product(idx, repeat=3):
        s = 0.0
        for h, m, n in itertools.product(idx, repeat=3):
            s += Q[h, i] * Q[m, j] * Q[n, k] * K[h, m, n]
        out[i, j, k] = s
    return out


def random_orthogonal(seed, proper=True):
    """Deterministic random orthogonal matrix with ``det = +1`` or ``-1``."""
    rng = np.random.default_rng(seed)
    q, r = np.linalg.qr(rng.standard_normal((3, 3)))
    q = q * np.sign(np.diag(r))
    if (np.linalg.det(q) > 0) != bool(proper):
        q[:, 0] = -q[:, 0]
    return q
