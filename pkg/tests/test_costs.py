import numpy as np
import pytest

from vegahedge import CostSpec, DomainError, cost, hamiltonian, hamiltonian_prime, marginal_cost


def test_quadratic_examples():
    c = CostSpec.quadratic(2.0)
    assert cost(c, 3.0) == 18.0
    assert cost(c, 0.0) == 0.0
    assert marginal_cost(CostSpec.quadratic(1.0), 1.0) == 2.0
    assert marginal_cost(c, 0.0) == 0.0
    assert hamiltonian(CostSpec.quadratic(1.0), 2.0) == 1.0
    assert hamiltonian(c, 0.0) == 0.0
    assert hamiltonian_prime(CostSpec.quadratic(1.0), 2.0) == 1.0
    assert hamiltonian_prime(c, 0.0) == 0.0


def test_power_examples():
    c = CostSpec.power(1.0, 1.5)
    assert cost(c, 4.0) == pytest.approx(8.0, abs=1e-12)
    assert cost(c, 0.0) == 0.0
    assert marginal_cost(c, 4.0) == pytest.approx(3.0, abs=1e-12)
    assert hamiltonian(c, 1.5) == pytest.approx(0.5, abs=1e-12)
    assert hamiltonian(c, 0.0) == 0.0
    assert hamiltonian_prime(c, 3.0) == pytest.approx(4.0, abs=1e-12)
    assert hamiltonian_prime(c, 0.0) == 0.0


def test_invalid_specs():
    with pytest.raises(DomainError):
        CostSpec.quadratic(0.0)
    with pytest.raises(DomainError):
        CostSpec.power(1.0, 1.0)
    with pytest.raises(DomainError):
        CostSpec("cubic", 1.0)


@pytest.mark.parametrize(
    "spec",
    [
        CostSpec.quadratic(1.0),
        CostSpec.quadratic(0.37),
        CostSpec.power(1.0, 1.5),
        CostSpec.power(2.4, 1.2),
        CostSpec.power(0.8, 3.0),
    ],
)
def test_fenchel_young_and_inversion(spec):
    rng = np.random.default_rng(7)
    v = np.concatenate([rng.uniform(-5.0, 5.0, 200), [0.0, 1e-6, -1e-6]])
    z = marginal_cost(spec, v)
    # Fenchel-Young equality at the optimum: H(L'(v)) + L(v) = v L'(v)
    lhs = hamiltonian(spec, z) + cost(spec, v)
    np.testing.assert_allclose(lhs, v * z, atol=1e-12, rtol=1e-12)
    # H' inverts L'
    np.testing.assert_allclose(hamiltonian_prime(spec, z), v, atol=1e-10, rtol=1e-10)


@pytest.mark.parametrize("spec", [CostSpec.quadratic(0.5), CostSpec.power(1.3, 1.7)])
def test_hamiltonian_shape(spec):
    z = np.linspace(-4.0, 4.0, 401)
    h = hamiltonian(spec, z)
    # even, zero at zero, convex (discrete second differences), H' increasing
    np.testing.assert_allclose(h, h[::-1], atol=1e-14)
    assert h[200] == 0.0
    assert np.all(np.diff(h, 2) > -1e-12)
    assert np.all(np.diff(hamiltonian_prime(spec, z)) > -1e-14)
