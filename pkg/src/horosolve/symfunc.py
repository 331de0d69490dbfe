"""Elementary symmetric polynomials of symmetric matrices and the two
degree-one curvature functionals built from them.

All matrix arguments are real symmetric arrays in an orthonormal frame.
Values of S_k are computed through a symmetric eigen-decomposition followed
by the stable product recurrence on characteristic-polynomial coefficients;
direct minor sums are kept only as test oracles elsewhere.
"""

from math import comb

import numpy as np

from .errors import EllipticityLossError

# Operator flavors: 'cm' solves with F = p_{n-k}^{1/(n-k)} (cone Gamma_{n-k}),
# 'wq' with F = (p_n/p_k)^{1/(n-k)} (cone Gamma_n).
CM = "cm"
WQ = "wq"

SYMMETRY_RTOL = 1e-14
CONE_TOL = 1e-12


def _check_symmetric(M):
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {M.shape}")
    scale = max(np.abs(M).max(), 1.0)
    if np.abs(M - M.T).max() > SYMMETRY_RTOL * scale * M.shape[0]:
        raise ValueError("matrix is not symmetric")
    return 0.5 * (M + M.T)


def elem_sym_values(lams):
    """All S_0..S_d of the entries along the last axis of ``lams``.

    Uses the recurrence that expands prod_i (x + lam_i) coefficient by
    coefficient, which is exact for diagonal input and avoids the
    cancellation of minor sums.
    """
    lams = np.asarray(lams, dtype=float)
    d = lams.shape[-1]
    e = np.zeros(lams.shape[:-1] + (d + 1,))
    e[..., 0] = 1.0
    for m in range(d):
        lam = lams[..., m]
        for k in range(min(m + 1, d), 0, -1):
            e[..., k] += lam * e[..., k - 1]
    return e


def _deleted_values(lams):
    """Table e_j(lam | i) with one entry removed: shape (..., d, d).

    Entry [..., i, j] is S_j of the eigenvalue list with lam_i deleted,
    j = 0..d-1.
    """
    lams = np.asarray(lams, dtype=float)
    d = lams.shape[-1]
    out = np.zeros(lams.shape[:-1] + (d, d))
    for i in range(d):
        rest = np.delete(lams, i, axis=-1)
        out[..., i, :] = elem_sym_values(rest)
    return out


def _doubly_deleted(lams, i, j):
    rest = np.delete(lams, (i, j), axis=-1)
    return elem_sym_values(rest)


def elem_sym(k, M, normalized=False):
    """S_k of the eigenvalues of M; S_0 = 1 and S_k = 0 outside 0..n.

    With ``normalized=True`` returns p_k = S_k / binom(n, k).
    """
    M = _check_symmetric(M)
    n = M.shape[0]
    if k < 0 or k > n:
        return 0.0
    if k == 0:
        return 1.0
    lams = np.linalg.eigvalsh(M)
    val = elem_sym_values(lams)[k]
    if normalized:
        val /= comb(n, k)
    return float(val)


def elem_sym_grad(k, M):
    """Derivative matrix S_k^{ij} = dS_k/dA_ij.

    Diagonal with entries S_{k-1}(lams | i) in the eigenbasis; rotated back
    to the input frame.
    """
    M = _check_symmetric(M)
    n = M.shape[0]
    if not 1 <= k <= n:
        raise ValueError(f"elem_sym_grad needs 1 <= k <= n, got k={k}, n={n}")
    lams, Q = np.linalg.eigh(M)
    deleted = _deleted_values(lams)
    diag = deleted[:, k - 1]
    return (Q * diag) @ Q.T


def elem_sym_hess(k, M):
    """Second-derivative array S_k^{ij,rs} as a 4-index tensor.

    In the eigenbasis the only nonzero components are
    (i,i,r,r) -> S_{k-2}(lams|ir) for i != r and
    (i,j,j,i) -> -S_{k-2}(lams|ij) for i != j;
    the result is rotated back to the input frame.
    """
    M = _check_symmetric(M)
    n = M.shape[0]
    if k < 2:
        raise ValueError(f"elem_sym_hess needs k >= 2, got k={k}")
    if k > n:
        raise ValueError(f"elem_sym_hess needs k <= n, got k={k}, n={n}")
    lams, Q = np.linalg.eigh(M)
    H = np.zeros((n, n, n, n))
    for i in range(n):
        for r in range(n):
            if i == r:
                continue
            s2 = _doubly_deleted(lams, i, r)[k - 2]
            H[i, i, r, r] = s2
            H[i, r, r, i] = -s2
    return np.einsum("ai,bj,cr,ds,ijrs->abcd", Q, Q, Q, Q, H, optimize=True)


def cone_membership(m, M, tol=CONE_TOL):
    """Whether M lies in the Garding cone Gamma_m, plus the margin min_i S_i.

    Membership demands p_i > tol for every 1 <= i <= m (strict, on the
    binomially normalized values); the returned margin is the smallest
    unnormalized S_i so boundary cases report 0 rather than hiding it.
    """
    M = _check_symmetric(M)
    n = M.shape[0]
    if not 1 <= m <= n:
        raise ValueError(f"cone index must satisfy 1 <= m <= n, got {m}")
    lams = np.linalg.eigvalsh(M)
    e = elem_sym_values(lams)
    svals = e[1 : m + 1]
    pvals = np.array([svals[i - 1] / comb(n, i) for i in range(1, m + 1)])
    return bool(np.all(pvals > tol)), float(svals.min())


def cone_margin_stack(m, mats, tol=CONE_TOL):
    """Vectorized cone check for a stack of frame matrices (N, d, d).

    Returns (ok, margins) where margins[i] = min_{1<=j<=m} S_j at node i and
    ok demands strict positivity of every normalized p_j.
    """
    mats = np.asarray(mats, dtype=float)
    n = mats.shape[-1]
    lams = np.linalg.eigvalsh(mats)
    e = elem_sym_values(lams)
    svals = e[..., 1 : m + 1]
    binoms = np.array([comb(n, i) for i in range(1, m + 1)])
    ok = bool(np.all(svals / binoms > tol))
    return ok, svals.min(axis=-1)


def _flavor_cone(spec):
    if spec.operator == CM:
        return spec.n - spec.k
    if spec.operator == WQ:
        return spec.n
    raise ValueError(f"unknown operator flavor {spec.operator!r}")


def curvature_functional_stack(spec, mats, tol=CONE_TOL):
    """F and F^{ij} for a stack of frame matrices (N, n, n).

    CM flavor: F = p_{n-k}^{1/(n-k)} on Gamma_{n-k};
    WQ flavor: F = (p_n/p_k)^{1/(n-k)} on Gamma_n.
    Both are homogeneous of degree one with F(I) = 1.  Raises
    EllipticityLossError (carrying the offending node and margin) when any
    matrix leaves the flavor's cone.
    """
    mats = np.asarray(mats, dtype=float)
    single = mats.ndim == 2
    if single:
        mats = mats[None]
    n, k = spec.n, spec.k
    if mats.shape[-1] != n:
        raise ValueError(f"matrix dimension {mats.shape[-1]} != problem n={n}")
    mcone = _flavor_cone(spec)

    lams, Q = np.linalg.eigh(mats)
    e = elem_sym_values(lams)
    binoms = np.array([comb(n, i) for i in range(n + 1)])
    pvals = e / binoms

    margins = pvals[..., 1 : mcone + 1].min(axis=-1)
    if np.any(margins <= tol):
        node = int(np.argmin(margins)) if not single else None
        raise EllipticityLossError(float(margins.min()), node=node, cone=mcone)

    deleted = _deleted_values(lams)
    r = n - k
    if spec.operator == CM:
        base = pvals[..., r]
        value = base ** (1.0 / r)
        # d p_r / dA in the eigenbasis, then chain rule for the 1/r power
        diag = deleted[..., r - 1] / comb(n, r)
        coef = (value / (r * base))[..., None] * diag
    else:
        ratio = pvals[..., n] / pvals[..., k]
        value = ratio ** (1.0 / r)
        dlog = deleted[..., n - 1] / e[..., n, None]
        if k >= 1:
            dlog = dlog - deleted[..., k - 1] / e[..., k, None]
        coef = (value / r)[..., None] * dlog
    grads = np.einsum("...ij,...j,...kj->...ik", Q, coef, Q)
    if single:
        return float(value[0]), grads[0]
    return value, grads


def curvature_functional(spec, M, tol=CONE_TOL):
    """F(M) and the derivative matrix F^{ij} for a single symmetric matrix."""
    M = _check_symmetric(M)
    return curvature_functional_stack(spec, M, tol=tol)
