"""Scaling, validation and back-transform tests for the model layer."""

import numpy as np
import pytest

from rubberfront import (CoefficientFunction, InitialCondition, PhysicalParams,
                         PiecewiseLinear, back_transform, nondimensionalize,
                         preset, validate_assumptions)
from rubberfront._kernels import sigma_eval


def test_dense_preset_groups():
    # independent recomputation of the dimensionless groups from the raw
    # constants: Bi = beta*L/D, A0 = a0*m0*L/D, h0 = s0/L, T = Tf*D/L^2
    p, _ = preset("dense")
    dim = nondimensionalize(p)
    assert dim.Bi == pytest.approx(0.564 * 1.0 / 3.66e-4, rel=1e-14)
    assert dim.A0 == pytest.approx(500.0 * 0.1 * 1.0 / 3.66e-4, rel=1e-14)
    assert dim.h0 == pytest.approx(0.01, rel=1e-14)
    assert dim.T == pytest.approx(40.0 * 3.66e-4, rel=1e-14)
    assert dim.H == 2.5
    # sigma(s) = s/10 scaled: sigma_dimless(h) = sigma(h*L)/m0 = h
    hs = np.linspace(0.0, 1.0, 7)
    assert np.allclose(dim.sigma_dimless(hs), hs)
    # b = 1 g/mm^3 scaled by m0 = 0.1
    assert dim.b_dimless(0.0) == pytest.approx(10.0)


def test_foam_preset_groups():
    p, _ = preset("foam")
    dim = nondimensionalize(p)
    assert dim.A0 == pytest.approx(2000.0 * 0.1 / 3.66e-4, rel=1e-14)
    assert dim.sigma_dimless(0.5) == pytest.approx(0.5 / 5.0)


def test_scaling_consistency_random_params():
    rng = np.random.default_rng(7)
    for _ in range(20):
        D, beta, a0, s0, L, m0, Tf = rng.uniform(0.1, 3.0, size=7)
        s0 = 0.5 * s0 * L / 3.0  # keep s0 < L
        p = PhysicalParams(D=D, beta=beta, H=2.0, a0=a0, s0=s0, L=L, m0=m0,
                           Tf=Tf, sigma=CoefficientFunction.linear(0.3))
        dim = nondimensionalize(p)
        h = rng.uniform(0.0, 1.0)
        # sigma_dimless(h) must equal sigma(h*L)/m0
        assert dim.sigma_dimless(h) == pytest.approx(0.3 * h * L / m0, rel=1e-12)
        # time scaling: b_dimless(tau) = b(tau * L^2/D)/m0
        assert dim.T * L**2 / D == pytest.approx(Tf, rel=1e-12)


def test_piecewise_linear_boundary_scaling():
    b = PiecewiseLinear((0.0, 10.0, 40.0), (1.0, 2.0, 1.5))
    p = PhysicalParams(D=3.66e-4, beta=0.564, H=2.5, a0=500.0, s0=0.01,
                       L=1.0, m0=0.1, Tf=40.0, b=b,
                       sigma=CoefficientFunction.linear(0.1))
    dim = nondimensionalize(p)
    time_scale = 1.0 / 3.66e-4
    for t in (0.0, 5.0, 10.0, 25.0, 40.0):
        assert dim.b_dimless(t / time_scale) == pytest.approx(b(t) / 0.1, rel=1e-12)


def test_validation_accepts_presets():
    for name in ("dense", "foam"):
        p, u0 = preset(name)
        rep = validate_assumptions(p, u0)
        assert rep.ok, str(rep)


@pytest.mark.parametrize("override, failing_check", [
    ({"D": -1.0}, "positive-constants"),
    ({"a0": 0.0}, "positive-constants"),
    ({"s0": 1.5}, "initial-front-position"),
    ({"s0": 0.0}, "initial-front-position"),
])
def test_validation_rejects_bad_constants(override, failing_check):
    p, u0 = preset("dense")
    from dataclasses import replace
    rep = validate_assumptions(replace(p, **override), u0)
    assert not rep.ok
    assert failing_check in [name for name, _ in rep.failures()]


def test_validation_rejects_out_of_range_initial_data():
    p, _ = preset("dense")
    # upper admissible bound is b_high/(H*m0) = 1/(2.5*0.1) = 4
    rep = validate_assumptions(p, InitialCondition.constant(5.0))
    assert not rep.ok
    assert "initial-data-bounds" in [n for n, _ in rep.failures()]


def test_validation_cutoff_ramp_check():
    from dataclasses import replace
    p, u0 = preset("dense")
    bad = replace(p, sigma=CoefficientFunction.smooth_cutoff(0.05, ramp=0.005))
    rep = validate_assumptions(bad, u0)
    assert "front-resistance-ramp" in [n for n, _ in rep.failures()]
    good = replace(p, sigma=CoefficientFunction.smooth_cutoff(0.05, ramp=0.5))
    assert validate_assumptions(good, u0).ok


def test_coefficient_kinds_and_kernel_encoding():
    rng = np.random.default_rng(3)
    fns = [CoefficientFunction.constant(0.7),
           CoefficientFunction.linear(1.3),
           CoefficientFunction.smooth_cutoff(2.0, ramp=0.4)]
    for f in fns:
        kind, p0, p1 = f.kernel_encoding()
        for x in rng.uniform(-0.1, 1.2, size=30):
            assert sigma_eval(kind, p0, p1, x) == pytest.approx(
                float(f(max(x, 0.0) if f.kind == "smooth-cutoff" else x)), abs=1e-14)


def test_smooth_cutoff_is_monotone_with_plateau():
    f = CoefficientFunction.smooth_cutoff(1.5, ramp=0.3)
    xs = np.linspace(0.0, 1.0, 500)
    vals = f(xs)
    assert np.all(np.diff(vals) >= -1e-15)
    assert vals[0] == 0.0
    assert vals[-1] == pytest.approx(1.5)
    assert f(0.3) == pytest.approx(1.5)


def test_back_transform_round_trip(dense_runs):
    p, _ = preset("dense")
    traj = dense_runs[20]
    phys = back_transform(traj, p, n_x=101)
    # pick a mid-time sample and compare against direct interpolation
    i = len(phys.t) // 2
    s = phys.s[i]
    inside = phys.x <= s
    y = phys.x[inside] / s
    expect = p.m0 * np.interp(y, traj.mesh.nodes, traj.alphas[i])
    assert np.allclose(phys.m[i, inside], expect, atol=1e-14)
    assert np.all(np.isnan(phys.m[i, ~inside]))
    assert np.all(phys.outside[i, ~inside])
    # times and front come back in physical units
    assert phys.t[-1] == pytest.approx(traj.times[-1] / 3.66e-4, rel=1e-12)
    assert phys.s[-1] == pytest.approx(traj.hs[-1], rel=1e-12)  # L = 1 mm
