"""Norms, orders, the a posteriori estimator and small convergence studies."""

import numpy as np
import pytest
from dataclasses import replace

from rubberfront import (CoefficientFunction, DimensionlessParams,
                         InitialCondition, IntegratorConfig, aposteriori_estimate,
                         convergence_study, discrete_error, observed_orders,
                         solve, true_error_sq, uniform_mesh)
from rubberfront.error_analysis import NORM_KINDS
from tests.conftest import tame_params, tame_u0


@pytest.fixture(scope="module")
def tame_pair():
    params = tame_params(T=0.2)
    u0 = tame_u0()
    config = IntegratorConfig(rel_tol=1e-9, abs_tol=1e-11, n_records=50)
    coarse = solve(params, u0, uniform_mesh(9), config)
    ref = solve(params, u0, uniform_mesh(33), config)
    return coarse, ref


def test_identical_trajectories_zero(tame_pair):
    coarse, _ = tame_pair
    for norm in NORM_KINDS:
        assert discrete_error(coarse, coarse, norm) == 0.0


def test_errors_positive_and_finite(tame_pair):
    coarse, ref = tame_pair
    for norm in NORM_KINDS:
        e = discrete_error(coarse, ref, norm)
        assert np.isfinite(e) and e > 0.0


def test_constant_offset_closed_form(tame_pair):
    coarse, _ = tame_pair
    delta = 0.37
    shifted = replace(coarse, alphas=coarse.alphas + delta)
    n = coarse.mesh.n
    k = 1.0 / (n - 1)
    T = coarse.times[-1]
    # lumped weights: ||delta||^2 = k * n * delta^2 at each sample
    expect = delta * np.sqrt(T * k * n)
    assert discrete_error(shifted, coarse, "L2L2") == pytest.approx(expect, rel=1e-12)
    assert discrete_error(shifted, coarse, "LinfL2") == pytest.approx(
        delta * np.sqrt(k * n), rel=1e-12)
    # a constant offset has no H1 content and no front content
    assert discrete_error(shifted, coarse, "L2H1") == pytest.approx(0.0, abs=1e-13)
    assert discrete_error(shifted, coarse, "boundary_L2") == 0.0


def test_absolute_homogeneity(tame_pair):
    coarse, ref = tame_pair
    from rubberfront.error_analysis import _restrict
    base = discrete_error(coarse, ref, "L2L2")
    # scale the difference by c by scaling the coarse run toward the reference
    restricted = _restrict(ref, coarse.mesh)
    c = 0.25
    blended = replace(coarse, alphas=restricted + c * (coarse.alphas - restricted))
    assert discrete_error(blended, ref, "L2L2") == pytest.approx(c * base, rel=1e-12)


def test_misaligned_inputs_rejected(tame_pair):
    coarse, ref = tame_pair
    with pytest.raises(ValueError, match="identical times"):
        discrete_error(coarse, replace(ref, times=ref.times * 1.001), "L2L2")
    with pytest.raises(ValueError, match="uniform refinement"):
        # 9 nodes is not refined by 33 -> swap roles to break nesting
        from rubberfront.error_analysis import _restrict
        _restrict(coarse, ref.mesh)
    with pytest.raises(ValueError, match="unknown norm"):
        discrete_error(coarse, ref, "L3L3")


def test_observed_orders_synthetic():
    ks = np.array([0.1, 0.05, 0.025])
    orders = observed_orders(ks, 3.0 * ks**2)
    assert np.allclose(orders, 2.0, atol=1e-12)
    orders = observed_orders(ks, np.array([1.0, 0.0, 1.0]))
    assert np.isnan(orders[0]) and np.isnan(orders[1])


def test_estimator_zero_at_equilibrium():
    params = DimensionlessParams(
        Bi=10.0, A0=100.0, h0=0.5, T=0.5, H=2.5, m0=0.1,
        b_dimless=CoefficientFunction.constant(10.0),
        sigma_dimless=CoefficientFunction.constant(4.0))
    u0 = InitialCondition.constant(4.0)
    traj = solve(params, u0, uniform_mesh(9), IntegratorConfig(n_records=10))
    est = aposteriori_estimate(traj, u0)
    assert est["eta_total"] == pytest.approx(0.0, abs=1e-16)
    assert est["front_data_sq"] == 0.0


def test_estimator_positive_and_additive(tame_pair):
    coarse, _ = tame_pair
    est = aposteriori_estimate(coarse, tame_u0())
    assert est["eta_total"] > 0.0
    assert np.all(est["per_element"] >= 0.0)
    assert est["eta_total"] == pytest.approx(
        est["front_data_sq"] + est["per_element"].sum(), rel=1e-12)
    assert est["residual_part"] + est["data_part"] == pytest.approx(
        est["eta_total"], rel=1e-12)


def test_estimator_data_term_for_curved_u0(tame_pair):
    coarse, _ = tame_pair
    curved = InitialCondition(
        u0=lambda y: 0.3 + 0.0 * np.asarray(y) + 0.01 * np.asarray(y) ** 2,
        d2=lambda y: 0.02 * np.ones_like(np.asarray(y, dtype=float)))
    est = aposteriori_estimate(coarse, curved)
    # |u0''|^2 integrates to 0.02^2 over [0,1]; the weight is k^4 per element
    k = coarse.mesh.element_sizes[0]
    assert est["data_part"] == pytest.approx(k**4 * 0.02**2, rel=1e-10)


def test_convergence_study_small():
    params = tame_params(T=0.2)
    u0 = tame_u0()
    config = IntegratorConfig(rel_tol=1e-9, abs_tol=1e-11, n_records=50)
    rep = convergence_study(params, u0, Ns=(4, 8), ref_n=32, config=config)
    assert rep.Ns == (4, 8)
    for norm in NORM_KINDS:
        assert np.all(rep.errors[norm] >= 0.0)
        assert rep.errors[norm][1] < rep.errors[norm][0]
    assert np.all(rep.eta > 0.0)
    csv = rep.to_csv()
    assert csv.splitlines()[0].startswith("N,k,")
    assert len(csv.splitlines()) == 3
    svg = rep.to_svg()
    assert svg.startswith("<svg") and "slope 1" in svg


def test_convergence_study_rejects_bad_reference():
    params = tame_params(T=0.05)
    with pytest.raises(ValueError, match="multiple"):
        convergence_study(params, tame_u0(), Ns=(4, 6), ref_n=16)


def test_true_error_sq_composition(tame_pair):
    coarse, ref = tame_pair
    expect = (discrete_error(coarse, ref, "LinfL2") ** 2
              + discrete_error(coarse, ref, "L2H1") ** 2
              + discrete_error(coarse, ref, "boundary_L2") ** 2
              + discrete_error(coarse, ref, "boundary_deriv_L2") ** 2)
    assert true_error_sq(coarse, ref) == pytest.approx(expect, rel=1e-14)
