"""
Uniform one-dimensional grids, profiles and the second-order operators on them.

A :class:`Grid` is either periodic (nodes at ``origin + k*dr`` for
``k = 0..n-1``) or Dirichlet (interior nodes at ``origin + k*dr`` for
``k = 1..n``; the walls at ``origin`` and ``origin + length`` are not stored).
Quadrature is the rectangle rule, which keeps the finite-difference Laplacian
exactly self-adjoint under the discrete inner product.
"""

from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.linalg import solve_banded

from .errors import ConfigurationError, GridMismatchError, UsageError

PERIODIC = "periodic"
DIRICHLET = "dirichlet"
BOUNDARIES = (PERIODIC, DIRICHLET)

PROFILE_KINDS = ("density", "field", "orbital")

_DENSITY_NEGATIVITY_TOL = 1e-12


@dataclass(frozen=True)
class Grid:
    """Uniform 1D discretization of a box of size ``length``.

    ``length`` doubles as the volume ``V`` in every normalization.
    """

    n_points: int
    length: float
    boundary: str = PERIODIC
    origin: float = 0.0

    @cached_property
    def spacing(self):
        if self.boundary == PERIODIC:
            return self.length / self.n_points
        return self.length / (self.n_points + 1)

    @cached_property
    def nodes(self):
        k = np.arange(self.n_points) if self.boundary == PERIODIC else np.arange(1, self.n_points + 1)
        x = self.origin + k * self.spacing
        x.setflags(write=False)
        return x

    @property
    def volume(self):
        return self.length

    @property
    def periodic(self):
        return self.boundary == PERIODIC


def build_grid(n_points, length, boundary=PERIODIC, origin=0.0):
    """Construct a validated :class:`Grid`.

    Parameters
    ----------
    n_points : int
        Number of stored nodes, at least 3.
    length : float
        Box length (the 1D volume).
    boundary : {"periodic", "dirichlet"}
    origin : float, optional
        Left edge of the box. Use ``-length/2`` for a box centred on zero.

    Raises
    ------
    ConfigurationError
        On ``n_points < 3``, nonpositive ``length`` or an unknown boundary.
    """
    if isinstance(n_points, bool) or int(n_points) != n_points or n_points < 3:
        raise ConfigurationError(f"n_points must be an integer >= 3, got {n_points!r}", key="n_points")
    if not np.isfinite(length) or length <= 0:
        raise ConfigurationError(f"length must be positive, got {length!r}", key="length")
    if boundary not in BOUNDARIES:
        raise ConfigurationError(f"boundary must be one of {BOUNDARIES}, got {boundary!r}", key="boundary")
    if not np.isfinite(origin):
        raise ConfigurationError("origin must be finite", key="origin")
    return Grid(int(n_points), float(length), boundary, float(origin))


def centered_grid(n_points, length, boundary=DIRICHLET):
    """Grid on ``[-length/2, length/2]``."""
    return build_grid(n_points, length, boundary, origin=-0.5 * length)


class Profile:
    """Values of a density, field or orbital at every node of a grid.

    The value array is copied and frozen on construction.
    """

    __slots__ = ("grid", "values", "kind")

    def __init__(self, grid, values, kind="field"):
        if kind not in PROFILE_KINDS:
            raise UsageError(f"unknown profile kind {kind!r}")
        values = np.array(values, copy=True)
        if values.shape != (grid.n_points,):
            raise GridMismatchError(
                f"profile has shape {values.shape}, grid has {grid.n_points} nodes"
            )
        if kind != "orbital" and np.iscomplexobj(values):
            raise UsageError(f"{kind} profiles must be real")
        if kind == "density":
            scale = max(1.0, float(np.max(np.abs(values), initial=0.0)))
            if np.min(values, initial=0.0) < -_DENSITY_NEGATIVITY_TOL * scale:
                raise UsageError("density profile has negative values")
        values.setflags(write=False)
        self.grid = grid
        self.values = values
        self.kind = kind

    def __repr__(self):
        return f"Profile(kind={self.kind!r}, n_points={self.grid.n_points})"

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.values, dtype=dtype)

    def __len__(self):
        return self.grid.n_points


def _check(g, p):
    if p.grid != g:
        raise GridMismatchError("profile is defined on a different grid")


def second_difference(g, values):
    """Three-point second difference of ``values`` along axis 0.

    Works on 1D or 2D arrays (columns are evolved independently). Dirichlet
    grids use zero ghost values, periodic grids wrap around.
    """
    v = np.asarray(values)
    out = -2.0 * v
    if g.periodic:
        out += np.roll(v, 1, axis=0)
        out += np.roll(v, -1, axis=0)
    else:
        out[1:] += v[:-1]
        out[:-1] += v[1:]
    return out / g.spacing**2


def laplacian_apply(g, p):
    """Second-order finite-difference Laplacian of a profile."""
    _check(g, p)
    return Profile(g, second_difference(g, p.values), "orbital" if p.kind == "orbital" else "field")


def laplacian_matrix(g):
    """Dense matrix of the discrete Laplacian."""
    n = g.n_points
    lap = np.diag(np.full(n, -2.0)) + np.diag(np.ones(n - 1), 1) + np.diag(np.ones(n - 1), -1)
    if g.periodic:
        lap[0, -1] = lap[-1, 0] = 1.0
    return lap / g.spacing**2


def integrate(g, p):
    """Rectangle-rule integral ``dr * sum(values)``."""
    _check(g, p)
    return g.spacing * np.sum(p.values)


def inner(g, p, q):
    """Quadrature inner product ``<p, q>`` (conjugating ``p``)."""
    _check(g, p)
    _check(g, q)
    return g.spacing * np.vdot(p.values, q.values)


def discrete_delta(g, position, kind="density"):
    """Node-centred discrete delta ``1/dr`` at the node nearest ``position``."""
    values = np.zeros(g.n_points)
    values[np.argmin(np.abs(g.nodes - position))] = 1.0 / g.spacing
    return Profile(g, values, kind)


def solve_tridiagonal(g, diag, off, rhs):
    """Solve ``M x = rhs`` for the nearest-neighbour matrix ``M``.

    ``M`` carries ``diag`` on its diagonal and the scalar ``off`` on both
    off-diagonals, plus the two corner entries when ``g`` is periodic. This is
    the structure of every ``a + b * laplacian + diag(w)`` operator. ``rhs``
    may be 1D or 2D (one system per column), real or complex.
    """
    diag = np.asarray(diag)
    n = diag.shape[0]
    rhs = np.asarray(rhs)
    dtype = np.result_type(diag, off, rhs)
    if not g.periodic:
        ab = np.zeros((3, n), dtype=dtype)
        ab[0, 1:] = off
        ab[1] = diag
        ab[2, :-1] = off
        return solve_banded((1, 1), ab, rhs, check_finite=False)

    # Sherman-Morrison: fold both corners into a rank-one update.
    gamma = -diag[0]
    ab = np.zeros((3, n), dtype=dtype)
    ab[0, 1:] = off
    ab[1] = diag
    ab[1, 0] -= gamma
    ab[1, -1] -= off * off / gamma
    ab[2, :-1] = off
    u = np.zeros(n, dtype=dtype)
    u[0] = gamma
    u[-1] = off
    if rhs.ndim == 1:
        stacked = np.stack([rhs, u], axis=1)
        sol = solve_banded((1, 1), ab, stacked, check_finite=False)
        y, z = sol[:, 0], sol[:, 1]
    else:
        sol = solve_banded((1, 1), ab, np.concatenate([rhs, u[:, None]], axis=1), check_finite=False)
        y, z = sol[:, :-1], sol[:, -1]
    vz = z[0] + off / gamma * z[-1]
    vy = y[0] + off / gamma * y[-1]
    if rhs.ndim == 1:
        return y - z * (vy / (1.0 + vz))
    return y - np.outer(z, vy / (1.0 + vz))
