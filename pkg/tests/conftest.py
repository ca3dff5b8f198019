import numpy as np
import pytest

from vegahedge import CostSpec, HedgeInputs, MarketView, TargetVector


def make_inputs(
    gamma=8.0,
    rho=0.0,
    xi=1.0,
    sharpe=0.0,
    zeta=0.0,
    vega_sv=(1.0,),
    target=(1.0,),
    q0=(0.0,),
    costs=None,
    horizon=1.0,
):
    n = len(vega_sv)
    if costs is None:
        costs = [CostSpec.quadratic(1.0)] * n
    return HedgeInputs(
        gamma=gamma,
        rho=rho,
        xi=xi,
        view=MarketView(sharpe=sharpe, zeta=zeta),
        vega_sv=np.asarray(vega_sv, dtype=float),
        target=TargetVector(np.asarray(target, dtype=float)),
        q0=np.asarray(q0, dtype=float),
        costs=list(costs),
        horizon=horizon,
    )


@pytest.fixture
def flagship():
    """N=1, eta=1, w=1, target=1, q0=0, gamma=8, rho=0, xi=1, T=1, no view."""
    return make_inputs()


def random_inputs(rng, n):
    """Well-scaled random problem for property tests."""
    return make_inputs(
        gamma=float(rng.uniform(0.5, 20.0)),
        rho=float(rng.uniform(-0.9, 0.9)),
        xi=float(rng.uniform(0.2, 2.0)),
        sharpe=float(rng.uniform(-1.0, 1.0)),
        zeta=float(rng.uniform(-1.0, 1.0)),
        vega_sv=rng.uniform(0.2, 3.0, size=n),
        target=rng.uniform(-2.0, 2.0, size=n),
        q0=rng.uniform(-2.0, 2.0, size=n),
        costs=[CostSpec.quadratic(float(rng.uniform(0.3, 3.0))) for _ in range(n)],
        horizon=float(rng.uniform(0.25, 2.0)),
    )
