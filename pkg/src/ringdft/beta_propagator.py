"""
Thermal-contour propagator of the modified diffusion equation.

The propagator ``q(r0, r, beta)`` solves::

    dq/dbeta = (hbar^2 / 2m) d^2q/dr^2 - w(r) q,     q(r0, r, 0) = V delta(r - r0)

Every column (one per starting point ``r0``) is marched with Crank-Nicolson
steps sharing one tridiagonal operator. Closing the contour (taking the
diagonal) gives the single-particle partition function and the density.
"""

from dataclasses import dataclass, replace

import numpy as np

from . import _kernels
from .errors import ConfigurationError, DivergenceError, UsageError
from .grid import Grid, Profile, _check

_BLOWUP = 1e300


@dataclass(frozen=True)
class Constants:
    """Physical constants; ``k_B`` is absorbed, temperature enters only via ``beta``."""

    hbar: float = 1.0
    mass: float = 1.0
    beta: float = 1.0
    n_particles: float = 1

    def __post_init__(self):
        for name in ("hbar", "mass", "beta", "n_particles"):
            value = getattr(self, name)
            if isinstance(value, bool) or not np.isfinite(value) or value <= 0:
                raise ConfigurationError(f"{name} must be positive, got {value!r}", key=name)

    @property
    def diffusion(self):
        """Coefficient ``hbar^2 / 2m`` of the Laplacian."""
        return self.hbar**2 / (2.0 * self.mass)

    def with_beta(self, beta):
        return replace(self, beta=beta)


@dataclass(frozen=True, eq=False)
class PropagatorMatrix:
    """Dense kernel, ``entries[j, i] = q(r_j, r_i, beta_current)``."""

    grid: Grid
    beta_current: float
    entries: np.ndarray
    beta_steps: int = 0

    @property
    def diagonal(self):
        return np.diag(self.entries)


def initialize(g, c):
    """Discrete delta initial condition: ``V/dr`` on the diagonal."""
    entries = np.eye(g.n_points) * (g.volume / g.spacing)
    return PropagatorMatrix(g, 0.0, entries, 0)


def march_beta(p, w, c, n_steps):
    """Advance ``p`` from ``p.beta_current`` to ``c.beta`` in ``n_steps`` equal steps.

    The field ``w`` is held fixed over the march.

    Raises
    ------
    DivergenceError
        If any entry exceeds 1e300 in magnitude.
    """
    g = p.grid
    _check(g, w)
    if n_steps < 1:
        raise ConfigurationError("n_steps must be >= 1", key="n_steps")
    span = c.beta - p.beta_current
    if span <= 0:
        raise UsageError(f"target beta {c.beta} is not beyond current beta {p.beta_current}")
    h = span / n_steps
    d = c.diffusion / g.spacing**2
    wv = w.values
    # (1 + h/2 K) q_new = (1 - h/2 K) q_old,  K = -D lap + w
    rhs_diag = 1.0 - 0.5 * h * (2.0 * d + wv)
    rhs_off = 0.5 * h * d
    piv, z, ratio, denom = _kernels.factor(1.0 + 0.5 * h * (2.0 * d + wv), -rhs_off, g.periodic)
    q = np.array(p.entries, dtype=float, order="C")
    out = np.empty_like(q)
    for step in range(n_steps):
        biggest = _kernels.cn_step(q, rhs_diag, rhs_off, piv, -rhs_off, g.periodic, z, ratio, denom, out)
        if not biggest < _BLOWUP:
            raise DivergenceError(
                f"propagator diverged at step {step + 1} (dbeta={h:g})", step=step + 1
            )
        q, out = out, q
    return PropagatorMatrix(g, float(c.beta), q, p.beta_steps + n_steps)


def propagate(g, w, c, n_steps):
    """Convenience: initialize and march to ``c.beta``."""
    return march_beta(initialize(g, c), w, c, n_steps)


def partition_function(p):
    """``Q = (1/V) dr sum_i q(r_i, r_i)``."""
    g = p.grid
    return float(g.spacing * np.sum(p.diagonal) / g.volume)


def density_from_propagator(p, c):
    """Ring-closure density ``n(r) = (N/V) q(r, r) / Q``; integrates to ``N``."""
    g = p.grid
    Q = partition_function(p)
    if not Q > 0:
        raise DivergenceError(f"nonpositive partition function Q={Q!r}")
    n = (c.n_particles / g.volume) * p.diagonal / Q
    return Profile(g, n, "density")
