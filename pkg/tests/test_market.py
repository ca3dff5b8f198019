import numpy as np
import pytest

from vegahedge import (
    DomainError,
    SpotState,
    SvParams,
    frozen_view,
    simulate_paths,
    validate_params,
)


def heston(xi=0.3, rho=-0.7, kp=2.0, tp=0.04, kq=2.0, tq=0.04, mu=0.0):
    return SvParams(xi=xi, rho=rho, kappa_p=kp, theta_p=tp, kappa_q=kq, theta_q=tq, mu=mu)


def test_validation_examples():
    rep = validate_params(heston(xi=0.5, rho=0.0))
    assert rep.ok and any("Feller" in w for w in rep.warnings)  # 0.16 < 0.25
    rep2 = validate_params(heston(xi=0.3, rho=-0.7))
    assert rep2.ok and not rep2.warnings  # 0.16 > 0.09
    rep3 = validate_params(heston(xi=-1.0))
    assert not rep3.ok and any("vol-of-vol" in e for e in rep3.errors)
    rep4 = validate_params(heston(rho=1.0))
    assert not rep4.ok
    rep5 = validate_params(SvParams(xi=0.3, rho=0.0, kappa_p=-1.0, theta_p=0.04, kappa_q=2.0, theta_q=0.04))
    assert not rep5.ok


def test_frozen_view_examples():
    view = frozen_view(heston(mu=0.1), SpotState(100.0, 0.04))
    assert view.sharpe == pytest.approx(0.5, abs=1e-15)
    assert view.zeta == 0.0  # identical measures
    view2 = frozen_view(
        SvParams(xi=0.3, rho=0.0, kappa_p=1.0, theta_p=0.09, kappa_q=1.0, theta_q=0.04),
        SpotState(100.0, 0.04),
    )
    assert view2.zeta == pytest.approx(0.25, abs=1e-15)


def test_spot_state_validation():
    with pytest.raises(DomainError):
        SpotState(-1.0, 0.04)
    with pytest.raises(DomainError):
        SpotState(100.0, 0.0)


def test_simulation_determinism_and_extension():
    p = heston(mu=0.05)
    x = SpotState(100.0, 0.04)
    a = simulate_paths(p, x, "P", 1.0, 50, 500, seed=13)
    b = simulate_paths(p, x, "P", 1.0, 50, 500, seed=13)
    assert np.array_equal(a.spots, b.spots)
    assert np.array_equal(a.variances, b.variances)
    # adding paths never perturbs earlier paths
    c = simulate_paths(p, x, "P", 1.0, 50, 700, seed=13)
    assert np.array_equal(a.spots, c.spots[:500])
    # different seed differs
    d = simulate_paths(p, x, "P", 1.0, 50, 500, seed=14)
    assert not np.array_equal(a.spots, d.spots)


def test_variance_paths_nonnegative():
    # Feller strongly violated so truncation actually bites
    p = heston(xi=1.2, kp=0.5, tp=0.04, kq=0.5, tq=0.04)
    x = SpotState(100.0, 0.04)
    ps = simulate_paths(p, x, "Q", 2.0, 100, 2000, seed=1)
    assert np.all(ps.variances >= 0.0)
    assert np.all(ps.spots > 0.0)
    assert ps.times[0] == 0.0 and np.all(np.diff(ps.times) > 0)


def test_cir_mean_oracle():
    # sample mean of nu_T vs theta + (nu0 - theta) exp(-kappa T)
    p = heston(xi=0.25, kp=2.0, tp=0.04, kq=2.0, tq=0.04)
    x = SpotState(100.0, 0.09)
    ps = simulate_paths(p, x, "P", 5.0, 250, 20000, seed=42)
    nu_t = ps.variances[:, -1]
    exact = 0.04 + (0.09 - 0.04) * np.exp(-2.0 * 5.0)
    se = nu_t.std(ddof=1) / np.sqrt(len(nu_t))
    assert abs(nu_t.mean() - exact) < 3.0 * se


def test_q_measure_martingale():
    p = heston(mu=0.3)  # mu ignored under Q
    x = SpotState(100.0, 0.04)
    ps = simulate_paths(p, x, "Q", 1.0, 100, 50000, seed=7)
    s_t = ps.spots[:, -1]
    se = s_t.std(ddof=1) / np.sqrt(len(s_t))
    assert abs(s_t.mean() - 100.0) < 3.0 * se


def test_degenerate_constant_vol_limit():
    # xi ~ 0, kappa = 0: variance constant, spot is driftless GBM
    p = SvParams(xi=1e-12, rho=0.0, kappa_p=0.0, theta_p=0.04, kappa_q=0.0, theta_q=0.04, mu=0.0)
    x = SpotState(100.0, 0.04)
    ps = simulate_paths(p, x, "P", 1.0, 50, 100000, seed=3)
    assert np.max(np.abs(ps.variances - 0.04)) < 1e-6
    logret = np.log(ps.spots[:, -1] / 100.0)
    se = logret.std(ddof=1) / np.sqrt(len(logret))
    assert abs(logret.mean() - (-0.02)) < 3.0 * se


def test_simulation_rejects_bad_inputs():
    x = SpotState(100.0, 0.04)
    with pytest.raises(DomainError):
        simulate_paths(heston(xi=-1.0), x, "P", 1.0, 10, 10, seed=0)
    with pytest.raises(DomainError):
        simulate_paths(heston(), x, "R", 1.0, 10, 10, seed=0)
    with pytest.raises(DomainError):
        simulate_paths(heston(), x, "P", -1.0, 10, 10, seed=0)
