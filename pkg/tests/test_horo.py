"""Geometry-layer checks: A[phi], psi, embedding, Weingarten map, margins
and the shifted Minkowski identity."""

import numpy as np
import pytest
from numpy.testing import assert_allclose

from horosolve import horo, sphere
from horosolve.errors import InvalidBodyError, NotStrictlyHConvexError
from horosolve.horo import (
    a_tensor,
    hconvex_margin,
    make_body,
    minkowski_inner,
    minkowski_residual,
    psi,
    shifted_weingarten,
)
from horosolve.sphere import ScalarField, build_grid, constant_field, even_project


@pytest.fixture(scope="module")
def circle():
    return build_grid(1, 32)


@pytest.fixture(scope="module")
def s2():
    return build_grid(2, (12, 24))


def even_test_field(grid, amplitude=0.1, base=2.0):
    z = grid.nodes
    if grid.dim == 1:
        vals = base + amplitude * np.cos(2 * grid.theta)
    else:
        vals = base + amplitude * (z[:, 2] ** 2 - 1.0 / 3.0) + 0.3 * amplitude * z[:, 0] * z[:, 1]
    return ScalarField(grid, vals, parity=sphere.EVEN)


def test_a_tensor_constant(s2, circle):
    for g in (s2, circle):
        c = 1.8
        A = a_tensor(constant_field(g, c))
        expected = 0.5 * (c - 1.0 / c) * np.eye(g.dim)
        assert_allclose(A.values, np.broadcast_to(expected, A.values.shape), atol=1e-10)


def test_a_tensor_degenerate_unit(s2):
    A = a_tensor(constant_field(s2, 1.0))
    assert_allclose(A.values, 0.0, atol=1e-10)


def test_a_tensor_high_resolution_oracle():
    base = build_grid(1, 32)
    fine = build_grid(1, 128)
    phi_b = ScalarField(base, 2 + 0.1 * np.cos(2 * base.theta), parity=sphere.EVEN)
    phi_f = ScalarField(fine, 2 + 0.1 * np.cos(2 * fine.theta), parity=sphere.EVEN)
    A_b = a_tensor(phi_b).values[:, 0, 0]
    A_f = a_tensor(phi_f).values[:, 0, 0]
    # base nodes are every 4th fine node
    assert_allclose(A_b, A_f[::4], atol=1e-8)


def test_a_tensor_rejects_nonpositive(circle):
    with pytest.raises(ValueError):
        a_tensor(constant_field(circle, -1.0))


def test_psi_constant(circle):
    c = 2.5
    vals = psi(constant_field(circle, c)).values
    assert_allclose(vals, 0.5 * (c + 1.0 / c), atol=1e-12)
    assert_allclose(psi(constant_field(circle, 1.0)).values, 1.0, atol=1e-12)


def test_psi_algebraic_identity(s2):
    phi = even_test_field(s2)
    A = a_tensor(phi).values
    H = s2.apply_hess(phi.values)
    delta = (phi.values - psi(phi).values)[:, None, None] * np.eye(2)
    assert np.abs(A - (H + delta)).max() < 1e-10


def test_embedding_constant_sphere(s2):
    c = 2.0
    body = make_body(constant_field(s2, c))
    X = body.embedding
    assert_allclose(X[:, 3], 0.5 * (c + 1.0 / c), atol=1e-12)
    spatial = np.linalg.norm(X[:, :3], axis=1)
    assert_allclose(spatial, np.sinh(np.log(c)), atol=1e-12)
    assert np.abs(minkowski_inner(X, X) + 1).max() < 1e-10


def test_embedding_point_body(s2):
    body = make_body(constant_field(s2, 1.0))
    X = body.embedding
    assert_allclose(X[:, :3], 0.0, atol=1e-12)
    assert_allclose(X[:, 3], 1.0, atol=1e-12)


def test_embedding_norm_constraint(s2):
    phi = even_test_field(s2, amplitude=0.05, base=2.2)
    body = make_body(phi)
    assert np.abs(minkowski_inner(body.embedding, body.embedding) + 1).max() < 1e-10


def test_shifted_weingarten_constant(s2):
    c = 1.9
    body = make_body(constant_field(s2, c))
    W = shifted_weingarten(body).values
    expected = 2.0 / (c**2 - 1.0) * np.eye(2)
    assert_allclose(W, np.broadcast_to(expected, W.shape), atol=1e-10)
    kappa = np.linalg.eigvalsh(W) + 1.0
    assert_allclose(kappa, 1.0 / np.tanh(np.log(c)), atol=1e-12)


def test_shifted_weingarten_product_identity(s2):
    phi = even_test_field(s2, amplitude=0.05, base=2.2)
    body = make_body(phi)
    W = shifted_weingarten(body).values
    prod = np.einsum("nab,nbc->nac", W, body.phi.values[:, None, None] * body.A.values)
    assert np.abs(prod - np.eye(2)).max() < 1e-8


def test_shifted_weingarten_jacobian_identity(s2):
    phi = even_test_field(s2, amplitude=0.05, base=2.2)
    body = make_body(phi)
    W = shifted_weingarten(body).values
    det_A = np.linalg.det(body.A.values)
    p_n_W = np.linalg.det(W)
    lhs = 1.0 / det_A
    rhs = body.phi.values**2 * p_n_W
    assert_allclose(lhs, rhs, rtol=1e-8)


def test_shifted_weingarten_rejects_degenerate(s2):
    body = make_body(constant_field(s2, 1.0))
    with pytest.raises(NotStrictlyHConvexError):
        shifted_weingarten(body)


def test_hconvex_margin(s2):
    c = 1.7
    assert hconvex_margin(constant_field(s2, c)) == pytest.approx(0.5 * (c - 1 / c), abs=1e-10)
    assert hconvex_margin(constant_field(s2, 1.0)) == pytest.approx(0.0, abs=1e-10)


def test_minkowski_constant_closed_form(s2):
    c, n = 2.0, 2
    body = make_body(constant_field(s2, c))
    a = 0.5 * (c - 1.0 / c)
    for level in range(n):
        rep = minkowski_residual(body, level)
        closed = c ** (level - n) * a ** (level + 1) * 4 * np.pi
        assert rep.lhs == pytest.approx(closed, rel=1e-12)
        assert rep.rhs == pytest.approx(closed, rel=1e-12)
        assert rep.residual < 1e-13


def test_minkowski_point_body(s2):
    body = make_body(constant_field(s2, 1.0))
    rep = minkowski_residual(body, 0)
    assert rep.lhs == pytest.approx(0.0, abs=1e-12)
    assert rep.rhs == pytest.approx(0.0, abs=1e-12)


def test_minkowski_level_range(s2):
    body = make_body(constant_field(s2, 2.0))
    with pytest.raises(ValueError):
        minkowski_residual(body, 2)
    with pytest.raises(ValueError):
        minkowski_residual(body, -1)


def test_minkowski_nonconstant(s2):
    phi = even_test_field(s2, amplitude=0.05, base=2.2)
    body = make_body(phi)
    fine = build_grid(2, (24, 48))
    z = fine.nodes
    vals = 2.2 + 0.05 * (z[:, 2] ** 2 - 1 / 3) + 0.015 * z[:, 0] * z[:, 1]
    body_f = make_body(ScalarField(fine, vals, parity=sphere.EVEN))
    for level in range(2):
        rep = minkowski_residual(body, level)
        rep_f = minkowski_residual(body_f, level)
        assert rep.residual < 1e-6
        assert abs(rep.lhs - rep_f.lhs) < 1e-8 * max(1, abs(rep_f.lhs))


def test_upper_perturbation_matrix_inequality(s2):
    phi = even_test_field(s2, amplitude=0.08, base=2.0)
    eps = 0.3
    shifted = ScalarField(s2, phi.values + eps, parity=sphere.EVEN)
    gap = a_tensor(shifted).values - a_tensor(phi).values - 0.5 * eps * np.eye(2)
    assert np.linalg.eigvalsh(gap).min() > -1e-10


def test_codazzi_reduction_circle(circle):
    phi = ScalarField(circle, 2 + 0.2 * np.cos(2 * circle.theta), parity=sphere.EVEN)
    psi_vals = psi(phi).values
    dpsi = circle.apply_grad(psi_vals)[:, 0]
    dphi = circle.apply_grad(phi.values)[:, 0]
    A = a_tensor(phi).values[:, 0, 0]
    assert np.abs(dpsi - dphi * A / phi.values).max() < 1e-8


def test_codazzi_contracted_sphere(s2):
    phi = even_test_field(s2, amplitude=0.08, base=2.0)
    dpsi = s2.apply_grad(psi(phi).values)
    dphi = s2.apply_grad(phi.values)
    A = a_tensor(phi).values
    rhs = np.einsum("nab,nb->na", A, dphi) / phi.values[:, None]
    assert np.abs(dpsi - rhs).max() < 1e-8


def test_even_body_bound_enforced(s2):
    # a steep even field violating |D log phi| < 1 must be rejected
    z = s2.nodes
    vals = 1.05 + 3.0 * z[:, 2] ** 2
    phi = ScalarField(s2, vals, parity=sphere.EVEN)
    with pytest.raises(InvalidBodyError):
        make_body(phi)


def test_body_rejects_phi_below_one(s2):
    with pytest.raises(InvalidBodyError):
        make_body(constant_field(s2, 0.9))
