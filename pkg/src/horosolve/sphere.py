"""Discretization of the unit circle and unit sphere with covariant
differential operators in an orthonormal frame.

The circle uses uniform periodic nodes with Fourier differentiation.  The
sphere uses Gauss-Legendre nodes in cos(theta) crossed with a uniform
longitude grid; longitudinal derivatives are Fourier-spectral and latitudinal
derivatives use polynomial collocation in x = cos(theta), applied separately
to even and odd longitudinal wavenumbers so that every derivative is exact
for band-limited fields.  The poles carry no nodes, so no coordinate
singularity is ever evaluated.

Differentiation operators are precomputed dense matrices attached to the
grid; storage grows like (N_theta * N_phi)^2, which keeps practical sphere
grids at or below roughly 32 x 64.
"""

from dataclasses import dataclass, field

import numpy as np

WEIGHT_RTOL = 1e-12
UNIT_NORM_TOL = 1e-14
EVEN_PARITY_RTOL = 1e-12

EVEN = "even"
GENERAL = "general"


def _fourier_diff_matrices(n):
    """Dense first/second periodic spectral differentiation matrices.

    Acts on values at theta_j = 2*pi*j/n.  The Nyquist mode is zeroed in the
    first derivative and kept with weight -(n/2)^2 in the second, the usual
    convention for even n.
    """
    eye = np.eye(n)
    freq = np.fft.fftfreq(n, d=1.0 / n)
    k1 = 1j * freq
    if n % 2 == 0:
        k1[n // 2] = 0.0
    k2 = -(freq**2)
    spectra = np.fft.fft(eye, axis=0)
    d1 = np.real(np.fft.ifft(k1[:, None] * spectra, axis=0))
    d2 = np.real(np.fft.ifft(k2[:, None] * spectra, axis=0))
    return d1, d2


def _parity_projectors(n):
    """Circulant projectors onto even / odd longitudinal wavenumbers."""
    eye = np.eye(n)
    freq = np.fft.fftfreq(n, d=1.0 / n).astype(int)
    mask = (freq % 2 == 0).astype(float)
    spectra = np.fft.fft(eye, axis=0)
    pe = np.real(np.fft.ifft(mask[:, None] * spectra, axis=0))
    return pe, np.eye(n) - pe


def _barycentric_diff_matrix(x):
    """Polynomial collocation differentiation matrix on nodes x.

    Barycentric weights are computed in log space to avoid underflow for
    larger node counts.
    """
    n = len(x)
    diff = x[:, None] - x[None, :]
    np.fill_diagonal(diff, 1.0)
    logw = -np.sum(np.log(np.abs(diff)), axis=1)
    sign = np.prod(np.sign(diff), axis=1)
    w = sign * np.exp(logw - logw.max())
    D = (w[None, :] / w[:, None]) / diff
    np.fill_diagonal(D, 0.0)
    np.fill_diagonal(D, -D.sum(axis=1))
    return D


@dataclass
class SphereGrid:
    """Quadrature nodes, weights, frames and differential operators on S^n.

    nodes are unit vectors in ambient (dim+1)-space, weights sum to the
    sphere area, frame[i] is an orthonormal tangent basis at node i and
    antipode is the involutive permutation sending each node to its
    antipodal partner.  All arrays are fixed after construction.
    """

    dim: int
    shape: tuple
    nodes: np.ndarray
    weights: np.ndarray
    frame: np.ndarray
    antipode: np.ndarray
    theta: np.ndarray = None
    phi: np.ndarray = None
    grad_ops: list = field(default_factory=list, repr=False)
    hess_ops: list = field(default_factory=list, repr=False)
    lap_op: np.ndarray = field(default=None, repr=False)

    @property
    def size(self):
        return self.nodes.shape[0]

    @property
    def area(self):
        return float(self.weights.sum())

    @property
    def even_reps(self):
        """Indices of one representative per antipodal pair."""
        idx = np.arange(self.size)
        return idx[idx < self.antipode]

    def apply_grad(self, values):
        return np.stack([op @ values for op in self.grad_ops], axis=-1)

    def apply_hess(self, values):
        d = self.dim
        out = np.empty((self.size, d, d))
        for a in range(d):
            for b in range(a, d):
                out[:, a, b] = self.hess_ops[a][b] @ values
                if a != b:
                    out[:, b, a] = out[:, a, b]
        return out

    def apply_lap(self, values):
        return self.lap_op @ values

    def quad(self, values):
        return float(self.weights @ values)

    def even_average(self, values):
        return 0.5 * (values + values[self.antipode])

    def restrict_even(self, matrix):
        """Restrict an operator matrix to the even subspace.

        Rows are sampled at pair representatives; columns are summed over
        both members of each pair, matching expansion of an even field from
        its representative values.
        """
        reps = self.even_reps
        return matrix[np.ix_(reps, reps)] + matrix[np.ix_(reps, self.antipode[reps])]

    def expand_even(self, rep_values):
        out = np.empty(self.size)
        reps = self.even_reps
        out[reps] = rep_values
        out[self.antipode[reps]] = rep_values
        return out


@dataclass
class ScalarField:
    """Nodal values of a function on a SphereGrid with a parity tag."""

    grid: SphereGrid
    values: np.ndarray
    parity: str = GENERAL

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (self.grid.size,):
            raise ValueError(
                f"values shape {self.values.shape} does not match grid size {self.grid.size}"
            )
        if self.parity not in (EVEN, GENERAL):
            raise ValueError(f"unknown parity tag {self.parity!r}")
        if self.parity == EVEN:
            scale = max(np.abs(self.values).max(), 1.0)
            gap = np.abs(self.values - self.values[self.grid.antipode]).max()
            if gap > EVEN_PARITY_RTOL * scale:
                raise ValueError(
                    f"field tagged even but antipodal values differ by {gap:.3e}"
                )

    @property
    def is_even(self):
        return self.parity == EVEN


@dataclass
class CovectorField:
    """Per-node gradient components in the node's orthonormal frame."""

    grid: SphereGrid
    values: np.ndarray  # (N, dim)


@dataclass
class FrameField:
    """Per-node symmetric matrix in the node's orthonormal frame."""

    grid: SphereGrid
    values: np.ndarray  # (N, dim, dim)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        sym_gap = np.abs(self.values - np.swapaxes(self.values, -1, -2)).max()
        scale = max(np.abs(self.values).max(), 1.0)
        if sym_gap > 1e-12 * scale:
            raise ValueError(f"frame field not symmetric: defect {sym_gap:.3e}")


def _build_circle(n):
    if n < 8 or n % 2 != 0:
        raise ValueError(f"circle grid needs an even node count >= 8, got {n}")
    theta = 2.0 * np.pi * np.arange(n) / n
    nodes = np.stack([np.cos(theta), np.sin(theta)], axis=1)
    weights = np.full(n, 2.0 * np.pi / n)
    frame = np.stack([-np.sin(theta), np.cos(theta)], axis=1)[:, None, :]
    antipode = (np.arange(n) + n // 2) % n

    d1, d2 = _fourier_diff_matrices(n)
    return SphereGrid(
        dim=1,
        shape=(n,),
        nodes=nodes,
        weights=weights,
        frame=frame,
        antipode=antipode,
        theta=theta,
        grad_ops=[d1],
        hess_ops=[[d2]],
        lap_op=d2,
    )


def _build_sphere(n_theta, n_phi):
    if n_theta < 8:
        raise ValueError(f"sphere grid needs n_theta >= 8, got {n_theta}")
    if n_phi < 8 or n_phi % 2 != 0:
        raise ValueError(
            f"sphere grid needs an even n_phi >= 8 for antipodal pairing, got {n_phi}"
        )
    x, wx = np.polynomial.legendre.leggauss(n_theta)
    theta = np.arccos(x)
    phi = 2.0 * np.pi * np.arange(n_phi) / n_phi
    sin_t = np.sqrt(1.0 - x**2)

    tt, pp = np.meshgrid(theta, phi, indexing="ij")
    st = np.sin(tt)
    nodes = np.stack(
        [st * np.cos(pp), st * np.sin(pp), np.cos(tt)], axis=-1
    ).reshape(-1, 3)
    weights = np.repeat(wx, n_phi) * (2.0 * np.pi / n_phi)

    e_theta = np.stack(
        [np.cos(tt) * np.cos(pp), np.cos(tt) * np.sin(pp), -np.sin(tt)], axis=-1
    )
    e_phi = np.stack([-np.sin(pp), np.cos(pp), np.zeros_like(pp)], axis=-1)
    frame = np.stack([e_theta, e_phi], axis=-2).reshape(-1, 2, 3)

    ii, jj = np.meshgrid(np.arange(n_theta), np.arange(n_phi), indexing="ij")
    anti = ((n_theta - 1 - ii) * n_phi + (jj + n_phi // 2) % n_phi).reshape(-1)

    # Latitudinal collocation: separate operators for even and odd
    # longitudinal wavenumbers, because odd modes carry a sin(theta)
    # prefactor on top of a polynomial in x = cos(theta).
    dx = _barycentric_diff_matrix(x)
    dx2 = dx @ dx
    s = np.diag(sin_t)
    s_inv = np.diag(1.0 / sin_t)
    c = np.diag(x)
    sin2 = np.diag(sin_t**2)
    t1_even = -s @ dx
    t2_even = -c @ dx + sin2 @ dx2
    t1_odd = (c - sin2 @ dx) @ s_inv
    t2_odd = s @ (-np.eye(n_theta) - 3.0 * c @ dx + sin2 @ dx2) @ s_inv

    pe, po = _parity_projectors(n_phi)
    c1, c2 = _fourier_diff_matrices(n_phi)

    d_theta = np.kron(t1_even, pe) + np.kron(t1_odd, po)
    d_theta2 = np.kron(t2_even, pe) + np.kron(t2_odd, po)
    d_phi = np.kron(np.eye(n_theta), c1)
    d_phi2 = np.kron(np.eye(n_theta), c2)

    sin_n = np.repeat(sin_t, n_phi)
    cos_n = np.repeat(x, n_phi)
    g1 = d_theta
    g2 = (1.0 / sin_n)[:, None] * d_phi
    h11 = d_theta2
    h12 = (1.0 / sin_n)[:, None] * (d_theta @ d_phi) - (cos_n / sin_n**2)[:, None] * d_phi
    h22 = (1.0 / sin_n**2)[:, None] * d_phi2 + (cos_n / sin_n)[:, None] * d_theta
    lap = h11 + h22

    return SphereGrid(
        dim=2,
        shape=(n_theta, n_phi),
        nodes=nodes,
        weights=weights,
        frame=frame,
        antipode=anti,
        theta=theta,
        phi=phi,
        grad_ops=[g1, g2],
        hess_ops=[[h11, h12], [h12, h22]],
        lap_op=lap,
    )


def build_grid(dim, resolution):
    """Build a circle (dim=1, resolution=N) or sphere (dim=2, (N_theta, N_phi))."""
    if dim == 1:
        if isinstance(resolution, (tuple, list)):
            (resolution,) = resolution
        grid = _build_circle(int(resolution))
        expected_area = 2.0 * np.pi
    elif dim == 2:
        n_theta, n_phi = resolution
        grid = _build_sphere(int(n_theta), int(n_phi))
        expected_area = 4.0 * np.pi
    else:
        raise ValueError(f"only dim 1 and 2 grids are supported, got dim={dim}")

    assert abs(grid.area - expected_area) <= WEIGHT_RTOL * expected_area
    assert np.all(grid.antipode[grid.antipode] == np.arange(grid.size))
    assert np.abs(np.linalg.norm(grid.nodes, axis=1) - 1.0).max() <= UNIT_NORM_TOL
    return grid


def grad(phi):
    """Covariant gradient components in the orthonormal frame."""
    return CovectorField(phi.grid, phi.grid.apply_grad(phi.values))


def hess(phi):
    """Covariant Hessian in the orthonormal frame."""
    return FrameField(phi.grid, phi.grid.apply_hess(phi.values))


def laplace(phi):
    """Laplace-Beltrami operator; equals the trace of hess."""
    return ScalarField(phi.grid, phi.grid.apply_lap(phi.values), parity=GENERAL)


def integrate(phi):
    """Quadrature integral over the sphere."""
    return phi.grid.quad(phi.values)


def even_project(phi):
    """Antipodal average (f(z)+f(-z))/2; idempotent, tags the result even."""
    return ScalarField(phi.grid, phi.grid.even_average(phi.values), parity=EVEN)


def constant_field(grid, value, parity=EVEN):
    return ScalarField(grid, np.full(grid.size, float(value)), parity=parity)


def field_from_ambient(grid, fn, parity=GENERAL):
    """Sample fn of the ambient coordinate arrays on the grid nodes."""
    coords = [grid.nodes[:, i] for i in range(grid.dim + 1)]
    return ScalarField(grid, np.asarray(fn(*coords), dtype=float), parity=parity)
