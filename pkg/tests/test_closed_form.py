import numpy as np
import pytest

from conftest import make_inputs, random_inputs
from vegahedge import (
    CostSpec,
    Trajectory,
    UnsupportedCostError,
    lambda_of,
    objective,
    plan_bucket_cancellation,
    plan_vega_hedge,
)

# direct evaluation of the closed forms, cross-checked against the
# transcription oracle and an independent exponential ODE solve
P1_Q_HALF = -0.269237174154
P1_Q_END = -0.351945726336
P2_Q_HALF = -0.556590558015
EXPOSURE_RATIO_END = 0.648054273664  # 1 / cosh(1)


def test_lambda_examples(flagship):
    assert lambda_of(flagship) == pytest.approx(1.0, abs=1e-15)
    near_one = make_inputs(rho=1.0 - 1e-9)
    assert lambda_of(near_one) < 1e-8
    scaled = make_inputs(gamma=8.0 * 3.7, costs=[CostSpec.quadratic(3.7)])
    assert lambda_of(scaled) == pytest.approx(1.0, rel=1e-12)


def test_lambda_requires_quadratic():
    power = make_inputs(costs=[CostSpec.power(1.0, 1.5)])
    with pytest.raises(UnsupportedCostError):
        lambda_of(power)
    with pytest.raises(UnsupportedCostError):
        plan_vega_hedge(power)
    with pytest.raises(UnsupportedCostError):
        plan_bucket_cancellation(power)


def test_plan_vega_hedge_flagship(flagship):
    tr = plan_vega_hedge(flagship, 512)
    assert tr.times[256] == 0.5
    assert tr.positions[0, 0] == 0.0
    assert tr.positions[256, 0] == pytest.approx(P1_Q_HALF, abs=1e-6)
    assert tr.positions[-1, 0] == pytest.approx(P1_Q_END, abs=1e-6)
    # transversality: terminal velocity vanishes
    assert abs(tr.velocities[-1, 0]) <= 1e-10 * np.max(np.abs(tr.velocities))


def test_plan_vega_hedge_already_hedged():
    inputs = make_inputs(q0=(-1.0,))
    tr = plan_vega_hedge(inputs, 64)
    np.testing.assert_array_equal(tr.positions, -np.ones_like(tr.positions))
    np.testing.assert_array_equal(tr.velocities, 0.0 * tr.velocities)


def test_plan_bucket_flagship(flagship):
    tr = plan_bucket_cancellation(flagship, 512)
    assert tr.positions[256, 0] == pytest.approx(P2_Q_HALF, abs=1e-6)
    assert abs(tr.positions[-1, 0] + 1.0) <= 1e-12 * 2.0


def test_plan_bucket_already_at_target():
    inputs = make_inputs(q0=(-1.0,))
    tr = plan_bucket_cancellation(inputs, 64)
    np.testing.assert_allclose(tr.positions, -1.0, atol=1e-14)


def test_bucket_terminal_pin_random():
    rng = np.random.default_rng(11)
    for n in (1, 3):
        inputs = random_inputs(rng, n)
        tr = plan_bucket_cancellation(inputs, 128)
        err = np.abs(tr.positions[-1] + inputs.target.v)
        assert np.all(err <= 1e-12 * (1.0 + np.abs(inputs.target.v)))
        np.testing.assert_array_equal(tr.positions[0], inputs.q0)


def test_exposure_decay(flagship):
    tr = plan_vega_hedge(flagship, 512)
    e = flagship.exposure_of(tr.positions)
    assert e[-1] / e[0] == pytest.approx(EXPOSURE_RATIO_END, abs=1e-6)
    ratio = np.cosh(1.0 - tr.times) / np.cosh(1.0)
    np.testing.assert_allclose(e, e[0] * ratio, atol=1e-10)


def test_velocities_match_position_derivative(flagship):
    for planner in (plan_vega_hedge, plan_bucket_cancellation):
        tr = planner(flagship, 512)
        h = tr.times[1] - tr.times[0]
        fd = (tr.positions[2:] - tr.positions[:-2]) / (2.0 * h)
        np.testing.assert_allclose(tr.velocities[1:-1], fd, atol=1e-5)


def test_objective_examples(flagship):
    times = np.linspace(0.0, 1.0, 101)
    hedged = Trajectory(times, np.full((101, 1), -1.0), np.zeros((101, 1)))
    assert objective(hedged, flagship) == pytest.approx(0.0, abs=1e-14)
    # static trajectory at q0: J = T * riskweight * e(q0)^2 exactly
    static = Trajectory(times, np.zeros((101, 1)), np.zeros((101, 1)))
    assert objective(static, flagship) == pytest.approx(1.0, rel=1e-12)
    # optimal beats the linear unwind
    plan = plan_vega_hedge(flagship, 512)
    lin = Trajectory(
        plan.times, -plan.times[:, None], np.full((513, 1), -1.0)
    )
    assert objective(plan, flagship) < objective(lin, flagship)
    assert objective(plan, flagship) == pytest.approx(np.tanh(1.0), abs=1e-9)


@pytest.mark.parametrize("planner", [plan_vega_hedge, plan_bucket_cancellation])
def test_optimality_against_bumps(flagship, planner):
    tr = planner(flagship, 512)
    base = objective(tr, flagship)
    t = tr.times
    h = t[1] - t[0]
    for freq, amp in ((1, 0.05), (2, 0.02), (3, 0.08)):
        if planner is plan_vega_hedge:
            bump = amp * np.sin(0.5 * freq * np.pi * t)  # vanishes at t=0 only
        else:
            bump = amp * np.sin(freq * np.pi * t)  # vanishes at both ends
        q = tr.positions + bump[:, None]
        v = tr.velocities + np.gradient(bump, h)[:, None]
        assert objective(Trajectory(t, q, v), flagship) >= base - 1e-8


def test_span_property():
    rng = np.random.default_rng(23)
    for n in (1, 2, 5):
        inputs = random_inputs(rng, n)
        eta = np.array([c.eta for c in inputs.costs])
        basket = inputs.vega_sv / eta
        unit = basket / np.linalg.norm(basket)
        tr1 = plan_vega_hedge(inputs, 64)
        dev1 = tr1.positions - inputs.q0
        tr2 = plan_bucket_cancellation(inputs, 64)
        frac = (tr2.times / inputs.horizon)[:, None]
        dev2 = tr2.positions - ((1.0 - frac) * inputs.q0 - frac * inputs.target.v)
        for dev in (dev1, dev2):
            orth = dev - np.outer(dev @ unit, unit)
            scale = np.max(np.abs(dev)) + 1e-30
            assert np.max(np.abs(orth)) <= 1e-10 * scale


def test_scale_invariance_no_view():
    rng = np.random.default_rng(3)
    base = random_inputs(rng, 2)
    base = make_inputs(
        gamma=base.gamma, rho=base.rho, xi=base.xi,
        vega_sv=base.vega_sv, target=base.target.v, q0=base.q0,
        costs=base.costs, horizon=base.horizon,
    )  # no view
    c = 4.2
    scaled = make_inputs(
        gamma=c * base.gamma, rho=base.rho, xi=base.xi,
        vega_sv=base.vega_sv, target=base.target.v, q0=base.q0,
        costs=[CostSpec.quadratic(c * k.eta) for k in base.costs],
        horizon=base.horizon,
    )
    for planner in (plan_vega_hedge, plan_bucket_cancellation):
        a = planner(base, 64)
        b = planner(scaled, 64)
        np.testing.assert_allclose(a.positions, b.positions, atol=1e-12, rtol=1e-12)


def test_small_curvature_branch_continuity():
    # trajectories on either side of the series threshold agree
    for planner in (plan_vega_hedge, plan_bucket_cancellation):
        lo = make_inputs(gamma=8.0 * (0.99e-4) ** 2, zeta=-0.3)
        hi = make_inputs(gamma=8.0 * (1.01e-4) ** 2, zeta=-0.3)
        a = planner(lo, 64)
        b = planner(hi, 64)
        np.testing.assert_allclose(a.positions, b.positions, atol=1e-8)


def test_small_curvature_view_limit():
    # lam = 1e-8 with a pure view round trip: matches -c t(T-t)/4 * Lam w
    inputs = make_inputs(gamma=8.0e-8, zeta=-0.3, q0=(-1.0,))
    tr = plan_bucket_cancellation(inputs, 256)
    t = tr.times
    view_term = tr.positions[:, 0] + 1.0
    limit = -0.3 * t * (1.0 - t) / 4.0
    mask = limit != 0.0
    rel = np.abs(view_term[mask] - limit[mask]) / np.abs(limit[mask])
    assert np.max(rel) < 1e-6


def test_large_curvature_no_overflow():
    inputs = make_inputs(gamma=8.0e6)  # lam = 1e6, sqrt(lam) T = 1000
    for planner in (plan_vega_hedge, plan_bucket_cancellation):
        tr = planner(inputs, 128)
        assert np.all(np.isfinite(tr.positions))
        assert np.all(np.isfinite(tr.velocities))
    e = inputs.exposure_of(plan_vega_hedge(inputs, 128).positions)
    assert abs(e[-1]) < 1e-10  # exposure fully crushed at these penalties


def test_degenerate_zero_vega():
    inputs = make_inputs(vega_sv=(0.0,), q0=(0.5,))
    tr = plan_vega_hedge(inputs, 64)
    np.testing.assert_array_equal(tr.positions, 0.5 * np.ones_like(tr.positions))
    tr2 = plan_bucket_cancellation(inputs, 64)
    lin = (1.0 - tr2.times) * 0.5 - tr2.times * 1.0
    np.testing.assert_allclose(tr2.positions[:, 0], lin, atol=1e-14)
