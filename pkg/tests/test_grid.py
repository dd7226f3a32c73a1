import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from ringdft.errors import ConfigurationError, GridMismatchError, UsageError
from ringdft.grid import (
    Profile,
    build_grid,
    centered_grid,
    discrete_delta,
    inner,
    integrate,
    laplacian_apply,
    laplacian_matrix,
    solve_tridiagonal,
)


def test_periodic_nodes():
    g = build_grid(4, 1.0, "periodic")
    np.testing.assert_allclose(g.nodes, [0.0, 0.25, 0.5, 0.75])
    assert g.spacing == 0.25


def test_dirichlet_nodes_exclude_walls():
    g = build_grid(3, 1.0, "dirichlet")
    np.testing.assert_allclose(g.nodes, [0.25, 0.5, 0.75])
    assert g.spacing == 0.25


def test_centered_grid_is_symmetric():
    g = centered_grid(101, 20.0)
    np.testing.assert_allclose(g.nodes, -g.nodes[::-1], atol=1e-13)


@pytest.mark.parametrize("n, length", [(2, 1.0), (0, 1.0), (10, 0.0), (10, -1.0), (3.5, 1.0)])
def test_bad_grid_parameters(n, length):
    with pytest.raises(ConfigurationError):
        build_grid(n, length, "periodic")


def test_unknown_boundary():
    with pytest.raises(ConfigurationError):
        build_grid(10, 1.0, "neumann")


def test_grid_invariants():
    for bc in ("periodic", "dirichlet"):
        g = build_grid(37, 3.0, bc)
        assert g.spacing > 0
        assert len(g.nodes) == 37
        assert np.all(np.diff(g.nodes) > 0)


def test_quadrature_of_one():
    g = build_grid(64, 10.0, "periodic")
    assert integrate(g, Profile(g, np.ones(64))) == pytest.approx(10.0, rel=1e-14)
    errs = []
    for n in (10, 100, 1000):
        g = build_grid(n, 10.0, "dirichlet")
        errs.append(abs(integrate(g, Profile(g, np.ones(n))) - 10.0))
    assert errs[0] > errs[1] > errs[2]


def test_integrate_examples():
    g = build_grid(50, 5.0, "periodic")
    assert integrate(g, Profile(g, np.full(50, 2.0))) == pytest.approx(10.0)
    g = build_grid(200, 10.0, "periodic")
    assert integrate(g, discrete_delta(g, 3.0)) == pytest.approx(1.0, rel=1e-14)


def test_profile_checks():
    g = build_grid(8, 1.0)
    with pytest.raises(GridMismatchError):
        Profile(g, np.ones(7))
    with pytest.raises(UsageError):
        Profile(g, -np.ones(8), "density")
    # rounding-level negatives are tolerated
    Profile(g, np.r_[np.ones(7), -1e-14], "density")
    other = build_grid(8, 2.0)
    with pytest.raises(GridMismatchError):
        integrate(other, Profile(g, np.ones(8)))
    with pytest.raises(GridMismatchError):
        laplacian_apply(other, Profile(g, np.ones(8)))


def test_profile_values_are_frozen():
    g = build_grid(8, 1.0)
    values = np.ones(8)
    p = Profile(g, values)
    values[0] = 5.0
    assert p.values[0] == 1.0
    with pytest.raises(ValueError):
        p.values[0] = 3.0


def test_laplacian_of_constant():
    g = build_grid(32, 2.0, "periodic")
    np.testing.assert_allclose(laplacian_apply(g, Profile(g, np.full(32, 3.0))).values, 0.0, atol=1e-10)


def test_laplacian_of_sine_converges_second_order():
    errs = []
    for n in (32, 64, 128):
        g = build_grid(n, 3.0, "periodic")
        k = 2 * np.pi / g.length
        p = Profile(g, np.sin(k * g.nodes))
        errs.append(np.max(np.abs(laplacian_apply(g, p).values + k**2 * p.values)))
    rates = np.log2(np.array(errs[:-1]) / np.array(errs[1:]))
    np.testing.assert_allclose(rates, 2.0, atol=0.02)


def test_laplacian_of_line_dirichlet_interior():
    g = build_grid(20, 1.0, "dirichlet")
    lap = laplacian_apply(g, Profile(g, 2.0 * g.nodes + 1.0)).values
    np.testing.assert_allclose(lap[1:-1], 0.0, atol=1e-9)
    assert abs(lap[0]) > 1.0 and abs(lap[-1]) > 1.0


def test_laplacian_matrix_matches_apply():
    for bc in ("periodic", "dirichlet"):
        g = build_grid(9, 1.3, bc)
        v = np.random.default_rng(0).normal(size=9)
        np.testing.assert_allclose(laplacian_matrix(g) @ v, laplacian_apply(g, Profile(g, v)).values)


vectors = arrays(np.float64, 24, elements=st.floats(-10, 10).filter(lambda v: v == 0 or abs(v) > 1e-100))


@settings(max_examples=50, deadline=None)
@given(vectors, vectors, st.floats(-5, 5), st.floats(-5, 5), st.sampled_from(["periodic", "dirichlet"]))
def test_laplacian_linear(p, q, a, b, bc):
    g = build_grid(24, 2.0, bc)
    lhs = laplacian_apply(g, Profile(g, a * p + b * q)).values
    rhs = a * laplacian_apply(g, Profile(g, p)).values + b * laplacian_apply(g, Profile(g, q)).values
    np.testing.assert_allclose(lhs, rhs, atol=1e-9 * (1 + np.abs(rhs).max()))


@settings(max_examples=50, deadline=None)
@given(vectors, vectors, st.sampled_from(["periodic", "dirichlet"]))
def test_laplacian_self_adjoint(p, q, bc):
    g = build_grid(24, 2.0, bc)
    P, Qp = Profile(g, p), Profile(g, q)
    a = inner(g, P, laplacian_apply(g, Qp))
    b = inner(g, laplacian_apply(g, P), Qp)
    scale = np.linalg.norm(p) * np.linalg.norm(q) / g.spacing
    assert abs(a - b) <= 1e-12 * scale or scale == 0


@settings(max_examples=50, deadline=None)
@given(arrays(np.float64, 16, elements=st.floats(0, 100)))
def test_integrate_positive(v):
    g = build_grid(16, 1.0)
    assert integrate(g, Profile(g, v, "density")) >= 0.0


@pytest.mark.parametrize("bc", ["periodic", "dirichlet"])
@pytest.mark.parametrize("dtype", [float, complex])
def test_solve_tridiagonal_matches_dense(bc, dtype):
    rng = np.random.default_rng(1)
    g = build_grid(17, 1.0, bc)
    diag = (3.0 + rng.random(17)).astype(dtype) + (0.5j if dtype is complex else 0)
    off = -0.7 + (0.2j if dtype is complex else 0)
    m = np.diag(diag) + off * (np.eye(17, k=1) + np.eye(17, k=-1))
    if bc == "periodic":
        m[0, -1] = m[-1, 0] = off
    rhs = rng.normal(size=(17, 5)).astype(dtype)
    np.testing.assert_allclose(solve_tridiagonal(g, diag, off, rhs), np.linalg.solve(m, rhs), atol=1e-12)
    np.testing.assert_allclose(solve_tridiagonal(g, diag, off, rhs[:, 0]), np.linalg.solve(m, rhs[:, 0]),
                               atol=1e-12)
