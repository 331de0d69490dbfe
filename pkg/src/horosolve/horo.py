"""Horospherical geometry layer: the h-convexity tensor A[phi], the
associated scalar psi, the hyperboloid embedding, the shifted Weingarten
map, h-convexity margins and the shifted Minkowski integral identity.

Throughout, phi = exp(u) where u is the horospherical support function of a
body in hyperbolic space; strict h-convexity of the body is equivalent to
A[phi] > 0 on the sphere.
"""

from dataclasses import dataclass
from math import comb

import numpy as np

from . import sphere, symfunc
from .errors import InvalidBodyError, NotStrictlyHConvexError

EMBED_NORM_TOL = 1e-10
PSD_TOL = 1e-10
EVEN_BOUND_TOL = 1e-10
STRICT_TOL = 1e-14


def a_tensor(phi):
    """The tensor D^2 phi - (|D phi|^2 / 2 phi) sigma + ((phi - 1/phi)/2) sigma.

    Positive definiteness at every node is strict h-convexity of the body
    supported by log phi.
    """
    v = phi.values
    if np.any(v <= 0):
        raise ValueError("a_tensor needs a positive field")
    grid = phi.grid
    H = grid.apply_hess(v)
    g = grid.apply_grad(v)
    grad2 = np.einsum("na,na->n", g, g)
    scalar = -0.5 * grad2 / v + 0.5 * (v - 1.0 / v)
    A = H + scalar[:, None, None] * np.eye(grid.dim)
    return sphere.FrameField(grid, A)


def psi(phi):
    """The scalar |D phi|^2/(2 phi) + (phi + 1/phi)/2 = cosh of the radial
    distance of the embedded point; satisfies A = D^2 phi + (phi - psi) sigma."""
    v = phi.values
    if np.any(v <= 0):
        raise ValueError("psi needs a positive field")
    g = phi.grid.apply_grad(v)
    grad2 = np.einsum("na,na->n", g, g)
    vals = 0.5 * grad2 / v + 0.5 * (v + 1.0 / v)
    return sphere.ScalarField(phi.grid, vals, parity=phi.parity)


def support_shift(phi):
    """|D phi|^2/(2 phi) + (phi - 1/phi)/2, the hyperbolic support function
    of the body pulled back through the Gauss map (psi - 1/phi)."""
    v = phi.values
    g = phi.grid.apply_grad(v)
    grad2 = np.einsum("na,na->n", g, g)
    return 0.5 * grad2 / v + 0.5 * (v - 1.0 / v)


def _embedding_points(phi):
    """Hyperboloid points recovered from the support data.

    X = (phi/2)(-z, 1) + ((|D phi|^2 + 1)/(2 phi))(z, 1) - (D phi, 0), with
    D phi expressed as an ambient tangent vector.
    """
    grid = phi.grid
    v = phi.values
    g = grid.apply_grad(v)
    grad_amb = np.einsum("na,nad->nd", g, grid.frame)
    grad2 = np.einsum("na,na->n", g, g)
    z = grid.nodes
    a = 0.5 * v
    b = (grad2 + 1.0) / (2.0 * v)
    spatial = (b - a)[:, None] * z - grad_amb
    time = a + b
    return np.concatenate([spatial, time[:, None]], axis=1)


def minkowski_inner(X, Y):
    """Lorentzian inner product sum x_i y_i - x_last y_last (per row)."""
    return np.einsum("ni,ni->n", X[:, :-1], Y[:, :-1]) - X[:, -1] * Y[:, -1]


@dataclass
class HConvexBody:
    """Support data of an h-convex body: phi = exp(u) > 1, its tensor A and
    the recovered hyperboloid embedding."""

    phi: sphere.ScalarField
    u: sphere.ScalarField
    A: sphere.FrameField
    embedding: np.ndarray

    @property
    def grid(self):
        return self.phi.grid

    @property
    def margin(self):
        return float(np.linalg.eigvalsh(self.A.values).min())

    @property
    def is_strict(self):
        return self.margin > 0.0


def make_body(phi):
    """Validate support data and assemble an HConvexBody.

    Accepts weakly h-convex data (A >= 0); the degenerate point body
    phi == 1 is representable but rejected by operations requiring
    strictness.  Even bodies must satisfy the origin-symmetry bounds
    cosh(log phi_max) <= phi_min and |D log phi| < 1.
    """
    v = phi.values
    if np.any(v < 1.0 - EVEN_BOUND_TOL):
        node = int(np.argmin(v))
        raise InvalidBodyError(
            f"support ratio must satisfy phi >= 1, node {node} has {v[node]:.12g}"
        )
    A = a_tensor(phi)
    least = np.linalg.eigvalsh(A.values).min(axis=-1)
    if least.min() < -PSD_TOL * max(1.0, np.abs(A.values).max()):
        node = int(np.argmin(least))
        raise InvalidBodyError(
            f"A[phi] not positive semi-definite: eigenvalue {least.min():.3e} at node {node}"
        )
    X = _embedding_points(phi)
    defect = np.abs(minkowski_inner(X, X) + 1.0).max()
    if defect > EMBED_NORM_TOL:
        raise InvalidBodyError(f"embedding left the hyperboloid: defect {defect:.3e}")
    if phi.is_even:
        vmax, vmin = v.max(), v.min()
        if np.cosh(np.log(vmax)) > vmin + EVEN_BOUND_TOL:
            raise InvalidBodyError(
                f"even body violates cosh(log phi_max) <= phi_min: "
                f"{np.cosh(np.log(vmax)):.12g} > {vmin:.12g}"
            )
        g = phi.grid.apply_grad(v)
        dlog = np.sqrt(np.einsum("na,na->n", g, g)) / v
        if dlog.max() >= 1.0:
            node = int(np.argmax(dlog))
            raise InvalidBodyError(
                f"even body violates |D log phi| < 1 at node {node}: {dlog.max():.12g}"
            )
    u = sphere.ScalarField(phi.grid, np.log(v), parity=phi.parity)
    return HConvexBody(phi=phi, u=u, A=A, embedding=X)


def embed(body):
    """Per-node hyperboloid points of the body (x_last = cosh r = psi)."""
    return body.embedding


def shifted_weingarten(body):
    """The shifted Weingarten map W - I, the per-node inverse of phi * A.

    Eigenvalues are the shifted principal curvatures kappa_i - 1; strict
    h-convexity (A > 0) is required.
    """
    A = body.A.values
    v = body.phi.values
    least = np.linalg.eigvalsh(A).min(axis=-1)
    floor = STRICT_TOL * max(1.0, np.abs(A).max())
    if least.min() <= floor:
        node = int(np.argmin(least))
        raise NotStrictlyHConvexError(node, float(least[node]))
    W = np.linalg.inv(v[:, None, None] * A)
    return sphere.FrameField(body.grid, 0.5 * (W + np.swapaxes(W, -1, -2)))


def hconvex_margin(phi):
    """Smallest eigenvalue of A[phi] over all nodes; > 0 iff strictly h-convex."""
    A = a_tensor(phi)
    return float(np.linalg.eigvalsh(A.values).min())


@dataclass
class MinkowskiReport:
    """One level of the shifted Minkowski identity with both integrals."""

    level: int
    lhs: float
    rhs: float

    @property
    def residual(self):
        return abs(self.lhs - self.rhs) / max(abs(self.lhs), abs(self.rhs), 1e-30)


def minkowski_residual(body, level):
    """Quadrature residual of the shifted Minkowski identity at one level.

    Integrates phi^(l-n) p_{l+1}(A) against the sphere measure on the left
    and the shifted support factor times phi^(l-n) p_l(A) on the right,
    l = 0..n-1.
    """
    grid = body.grid
    n = grid.dim
    if not 0 <= level <= n - 1:
        raise ValueError(f"level must lie in 0..{n - 1}, got {level}")
    v = body.phi.values
    lams = np.linalg.eigvalsh(body.A.values)
    e = symfunc.elem_sym_values(lams)
    p_l = e[:, level] / comb(n, level)
    p_l1 = e[:, level + 1] / comb(n, level + 1)
    weight = v ** (level - n)
    lhs = grid.quad(weight * p_l1)
    rhs = grid.quad(support_shift(body.phi) * weight * p_l)
    return MinkowskiReport(level=level, lhs=lhs, rhs=rhs)
