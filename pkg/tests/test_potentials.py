import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ringdft.errors import ConfigurationError, UsageError
from ringdft.grid import Profile, build_grid, centered_grid, discrete_delta, integrate
from ringdft.potentials import (
    BoxWell,
    ConstantEnvelope,
    Harmonic,
    Hartree,
    Linear,
    PotentialSpec,
    SinusoidalEnvelope,
    SoftenedCoulomb,
    TimeDrive,
    evaluate_energy,
    evaluate_field,
    hartree_kernel,
)


@pytest.fixture
def grid():
    return build_grid(100, 10.0, "periodic", origin=-5.0)


def _smooth_density(g, center=0.3, width=1.0):
    v = np.exp(-((g.nodes - center) ** 2) / (2 * width**2))
    return Profile(g, v / integrate(g, Profile(g, v)), "density")


def test_empty_functional(grid):
    n = _smooth_density(grid)
    assert evaluate_energy(PotentialSpec(), n) == 0.0
    np.testing.assert_array_equal(evaluate_field(PotentialSpec(), n).values, 0.0)


def test_point_mass_in_harmonic_well(grid):
    n = discrete_delta(grid, 2.0)
    assert evaluate_energy(PotentialSpec(Harmonic(1.0, 0.0)), n) == pytest.approx(2.0, rel=1e-12)


def test_hartree_self_pair_of_delta(grid):
    n = discrete_delta(grid, 0.0)
    assert evaluate_energy(PotentialSpec(hartree=Hartree(1.0, 1.0)), n) == pytest.approx(0.5, rel=1e-12)


def test_harmonic_field_is_density_independent(grid):
    spec = PotentialSpec(Harmonic())
    w1 = evaluate_field(spec, _smooth_density(grid)).values
    w2 = evaluate_field(spec, _smooth_density(grid, -1.0, 0.3)).values
    np.testing.assert_array_equal(w1, w2)
    np.testing.assert_allclose(w1, 0.5 * grid.nodes**2)


def test_hartree_field_of_delta():
    g = build_grid(81, 8.0, "dirichlet", origin=-4.0)
    r0 = g.nodes[30]
    w = evaluate_field(PotentialSpec(hartree=Hartree(1.0, 1.0)), discrete_delta(g, r0)).values
    np.testing.assert_allclose(w, 1.0 / np.sqrt((g.nodes - r0) ** 2 + 1.0), rtol=1e-13)


def test_sinusoidal_drive_vanishes_at_zero(grid):
    spec = PotentialSpec(Harmonic(), time_drive=TimeDrive(Linear(), SinusoidalEnvelope(2.0, 0.7)))
    n = _smooth_density(grid)
    np.testing.assert_allclose(evaluate_field(spec, n, 0.0).values, 0.5 * grid.nodes**2)
    t = 0.4
    np.testing.assert_allclose(evaluate_field(spec, n, t).values,
                               0.5 * grid.nodes**2 + 0.7 * np.sin(2.0 * t) * grid.nodes)


def test_constant_drive(grid):
    spec = PotentialSpec(time_drive=TimeDrive(Linear(2.0), ConstantEnvelope(0.5)))
    np.testing.assert_allclose(evaluate_field(spec, _smooth_density(grid), 3.0).values, grid.nodes)


def test_drive_requires_time(grid):
    spec = PotentialSpec(Harmonic(), time_drive=TimeDrive(Linear(), SinusoidalEnvelope(1.0, 1.0)))
    with pytest.raises(UsageError):
        evaluate_field(spec, _smooth_density(grid))


def test_external_shapes():
    x = np.array([-2.0, -0.4, 0.0, 0.4, 2.0])
    np.testing.assert_allclose(BoxWell(3.0, 1.0)(x), [0, -3, -3, -3, 0])
    np.testing.assert_allclose(SoftenedCoulomb(2.0, 1.0)(np.array([0.0])), [-2.0])
    np.testing.assert_allclose(Harmonic(2.0, 1.0)(np.array([3.0])), [4.0])


@pytest.mark.parametrize("make", [
    lambda: SoftenedCoulomb(1.0, 0.0),
    lambda: Hartree(1.0, -1.0),
    lambda: Harmonic(-1.0),
    lambda: BoxWell(1.0, 0.0),
])
def test_invalid_parameters(make):
    with pytest.raises(ConfigurationError):
        make()


def test_hartree_kernel_exactly_symmetric():
    for bc in ("periodic", "dirichlet"):
        g = build_grid(50, 7.0, bc)
        k = hartree_kernel(g, Hartree(1.0, 0.7))
        assert np.array_equal(k, k.T)


def test_periodic_hartree_uses_minimum_image():
    g = build_grid(20, 10.0, "periodic")
    k = hartree_kernel(g, Hartree(1.0, 1.0))
    # nodes 0 and 19 are one spacing apart across the boundary
    assert k[0, -1] == pytest.approx(1.0 / np.sqrt(0.5**2 + 1.0))


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**31 - 1), st.sampled_from(["periodic", "dirichlet"]))
def test_functional_derivative_consistency(seed, bc):
    rng = np.random.default_rng(seed)
    g = centered_grid(40, 8.0, bc)
    spec = PotentialSpec(SoftenedCoulomb(1.5, 0.8), Hartree(rng.uniform(0.1, 2.0), rng.uniform(0.3, 2.0)))
    n = _smooth_density(g, rng.uniform(-1, 1), rng.uniform(0.5, 2))
    dn = rng.normal(size=g.n_points)
    w = evaluate_field(spec, n).values
    directional = g.spacing * np.dot(w, dn)

    def central(eps):
        up = Profile(g, n.values + eps * dn, "field")
        down = Profile(g, n.values - eps * dn, "field")
        return (evaluate_energy(spec, up) - evaluate_energy(spec, down)) / (2 * eps)

    d4, d5 = central(1e-4), central(1e-5)
    richardson = (100 * d5 - d4) / 99
    scale = abs(directional) + 1e-12
    assert abs(d4 - d5) <= 1e-6 * scale
    assert abs(richardson - directional) <= 1e-6 * scale


def test_field_independent_of_density_without_hartree(grid):
    spec = PotentialSpec(BoxWell(2.0, 3.0), Hartree(0.0, 1.0))
    assert not spec.density_dependent
    a = evaluate_field(spec, _smooth_density(grid)).values
    b = evaluate_field(spec, _smooth_density(grid, 2.0, 0.5)).values
    np.testing.assert_array_equal(a, b)
