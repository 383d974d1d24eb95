"""Mesh, hat basis and interpolation tests."""

import numpy as np
import pytest

from rubberfront import (Mesh, build_mesh, graded_mesh, interpolate,
                         project_l2, uniform_mesh)
from rubberfront.mesh import HatBasis

GX, GW = np.polynomial.legendre.leggauss(5)


def _random_mesh(rng, n):
    interior = np.sort(rng.uniform(0.05, 0.95, size=n - 2))
    return Mesh(np.concatenate([[0.0], interior, [1.0]]))


def test_mesh_validation():
    with pytest.raises(ValueError):
        Mesh(np.array([0.0, 1.0]))
    with pytest.raises(ValueError):
        Mesh(np.array([0.0, 0.5, 0.9]))
    with pytest.raises(ValueError):
        Mesh(np.array([0.0, 0.6, 0.4, 1.0]))
    m = uniform_mesh(11)
    assert m.n == 11
    assert m.is_uniform
    assert m.k_max == pytest.approx(0.1)


def test_graded_mesh_ratio():
    m = graded_mesh(21, ratio=4.0)
    k = m.element_sizes
    assert k[-1] / k[0] == pytest.approx(4.0, rel=1e-10)
    assert not m.is_uniform


def test_build_mesh_dispatch():
    assert build_mesh(5).n == 5
    assert build_mesh([0.0, 0.3, 1.0]).n == 3
    assert build_mesh(("graded", 9, 2.0)).n == 9
    m = uniform_mesh(4)
    assert build_mesh(m) is m


def test_partition_of_unity():
    rng = np.random.default_rng(11)
    mesh = _random_mesh(rng, 17)
    basis = HatBasis(mesh)
    y = rng.uniform(0.0, 1.0, size=1000)
    total = sum(basis.phi(i, y) for i in range(mesh.n))
    dtotal = sum(basis.dphi(i, y) for i in range(mesh.n))
    assert np.max(np.abs(total - 1.0)) < 1e-13
    assert np.max(np.abs(dtotal)) < 1e-10


def test_hat_nodal_property():
    mesh = uniform_mesh(7)
    basis = HatBasis(mesh)
    for i in range(mesh.n):
        vals = basis.phi(i, mesh.nodes)
        expect = np.zeros(mesh.n)
        expect[i] = 1.0
        assert np.allclose(vals, expect)


def test_interpolation_idempotent_on_p1():
    rng = np.random.default_rng(5)
    mesh = _random_mesh(rng, 9)
    coeffs = rng.uniform(-1.0, 1.0, size=mesh.n)
    f = interpolate(lambda y: np.interp(y, mesh.nodes, coeffs), mesh)
    assert np.allclose(f.values, coeffs, atol=1e-14)
    # evaluating between nodes reproduces the piecewise-linear function
    y = rng.uniform(0.0, 1.0, size=100)
    assert np.allclose(f(y), np.interp(y, mesh.nodes, coeffs), atol=1e-14)


def _interp_errors(f, df, mesh):
    """L2 and H1-seminorm interpolation errors by 5-point Gauss per element."""
    I = interpolate(f, mesh)
    slopes = I.element_slopes()
    nodes = mesh.nodes
    l2 = 0.0
    h1 = 0.0
    for e in range(mesh.n - 1):
        a, b = nodes[e], nodes[e + 1]
        yq = 0.5 * (a + b) + 0.5 * (b - a) * GX
        wq = 0.5 * (b - a) * GW
        iq = I.values[e] + slopes[e] * (yq - a)
        l2 += np.sum(wq * (f(yq) - iq) ** 2)
        h1 += np.sum(wq * (df(yq) - slopes[e]) ** 2)
    return np.sqrt(l2), np.sqrt(h1)


def test_interpolation_rates_sin():
    f = lambda y: np.sin(np.pi * y)
    df = lambda y: np.pi * np.cos(np.pi * y)
    errs = np.array([_interp_errors(f, df, uniform_mesh(n)) for n in (11, 21, 41, 81)])
    orders_l2 = np.log2(errs[:-1, 0] / errs[1:, 0])
    orders_h1 = np.log2(errs[:-1, 1] / errs[1:, 1])
    assert np.mean(orders_l2) == pytest.approx(2.0, abs=0.1)
    assert np.mean(orders_h1) == pytest.approx(1.0, abs=0.1)


def test_l2_projection_reproduces_linears():
    rng = np.random.default_rng(2)
    mesh = _random_mesh(rng, 12)
    f = lambda y: 0.7 - 1.3 * y
    proj = project_l2(f, mesh)
    assert np.allclose(proj.values, f(mesh.nodes), atol=1e-12)


def test_l2_projection_close_to_interpolant():
    mesh = uniform_mesh(41)
    f = lambda y: np.sin(np.pi * y)
    proj = project_l2(f, mesh)
    interp = interpolate(f, mesh)
    # both are O(k^2) accurate, so their difference is O(k^2) small
    assert np.max(np.abs(proj.values - interp.values)) < 5.0 * (1.0 / 40.0) ** 2


def test_nodal_function_derivative():
    mesh = uniform_mesh(5)
    f = interpolate(lambda y: y**2, mesh)
    # slope on element [0.25, 0.5] is (0.25 - 0.0625)/0.25 = 0.75
    assert f.derivative(np.array([0.3]))[0] == pytest.approx(0.75)
    with pytest.raises(ValueError):
        f(np.array([1.2]))
