"""
Closed-form and brute-force references for the thermal propagator.

Nothing here reuses the Crank-Nicolson or spectral machinery: kernels are
evaluated from their analytic formulas, and the brute-force propagator builds
its own dense operator and exponentiates it through a full eigendecomposition.
:func:`cylinder_condition_check` is the exception; it calls the quantum solver
on purpose, to compare it against the Boltzmann density.
"""

from dataclasses import dataclass, replace
from typing import Callable, Optional

import numpy as np
from scipy.linalg import eigh

from . import potentials
from .beta_propagator import PropagatorMatrix
from .errors import ConfigurationError, UsageError
from .grid import Profile, _check

_IMAGE_TOL = 1e-16
_MAX_BRUTE_FORCE_POINTS = 512


@dataclass(frozen=True)
class OracleCase:
    name: str
    analytic_energies: Optional[np.ndarray] = None
    analytic_Q: Optional[Callable] = None
    analytic_density: Optional[Callable] = None
    kernel: Optional[Callable] = None

    def __post_init__(self):
        if all(v is None for v in (self.analytic_energies, self.analytic_Q,
                                   self.analytic_density, self.kernel)):
            raise ConfigurationError(f"oracle case {self.name!r} carries no analytic data")


def harmonic_case(omega=1.0, hbar=1.0, mass=1.0, levels=10):
    """Harmonic oscillator ``w = m omega^2 r^2 / 2`` centred at zero."""

    def Q(beta):
        return 1.0 / (2.0 * np.sinh(0.5 * beta * hbar * omega))

    def ground_density(r):
        a = mass * omega / hbar
        return np.sqrt(a / np.pi) * np.exp(-a * np.asarray(r) ** 2)

    return OracleCase(
        "harmonic",
        analytic_energies=hbar * omega * (np.arange(levels) + 0.5),
        analytic_Q=Q,
        analytic_density=ground_density,
    )


def harmonic_free_energy(beta, omega=1.0, hbar=1.0):
    """Exact single-oscillator free energy ``ln(2 sinh(beta hbar omega / 2)) / beta``."""
    return np.log(2.0 * np.sinh(0.5 * beta * hbar * omega)) / beta


def harmonic_thermal_variance(beta, omega=1.0, hbar=1.0, mass=1.0):
    """Variance of the closed-contour density ``(hbar / 2 m omega) coth(beta hbar omega / 2)``."""
    return hbar / (2 * mass * omega) / np.tanh(0.5 * beta * hbar * omega)


def box_levels(length, count, hbar=1.0, mass=1.0):
    k = np.pi * np.arange(1, count + 1) / length
    return hbar**2 * k**2 / (2 * mass)


def _gaussian(dx, kappa):
    return np.exp(-kappa * dx * dx)


def free_kernel(g, c, beta):
    """Continuum heat kernel of the zero-field problem, times ``V``.

    Periodic grids sum periodic images; Dirichlet grids use the alternating
    image series of the two walls. Images are added until every new term is
    below 1e-16.
    """
    if not beta > 0:
        raise UsageError("free_kernel needs beta > 0")
    x = g.nodes
    kappa = c.mass / (2.0 * c.hbar**2 * beta)
    pref = g.volume * np.sqrt(c.mass / (2.0 * np.pi * c.hbar**2 * beta))
    dx = x[None, :] - x[:, None]
    if g.periodic:
        total = _gaussian(dx, kappa)
        k = 1
        while True:
            term = _gaussian(dx + k * g.length, kappa) + _gaussian(dx - k * g.length, kappa)
            total += term
            if term.max() < _IMAGE_TOL:
                break
            k += 1
        return PropagatorMatrix(g, float(beta), pref * total, 0)

    mirrored = x[None, :] - (2.0 * g.origin - x[:, None])
    period = 2.0 * g.length
    total = _gaussian(dx, kappa) - _gaussian(mirrored, kappa)
    k = 1
    while True:
        term = (_gaussian(dx + k * period, kappa) + _gaussian(dx - k * period, kappa)
                - _gaussian(mirrored + k * period, kappa) - _gaussian(mirrored - k * period, kappa))
        total += term
        if np.abs(term).max() < _IMAGE_TOL:
            break
        k += 1
    return PropagatorMatrix(g, float(beta), pref * total, 0)


def mehler_kernel(g, c, omega, beta, center=0.0):
    """Whole-line harmonic-oscillator kernel (Mehler formula), times ``V``."""
    if not (omega > 0 and beta > 0):
        raise UsageError("mehler_kernel needs omega > 0 and beta > 0")
    x = g.nodes - center
    s = omega * c.hbar * beta
    sh, ch = np.sinh(s), np.cosh(s)
    r0 = x[:, None]
    r = x[None, :]
    pref = np.sqrt(c.mass * omega / (2.0 * np.pi * c.hbar * sh))
    expo = -c.mass * omega * ((r * r + r0 * r0) * ch - 2.0 * r * r0) / (2.0 * c.hbar * sh)
    return PropagatorMatrix(g, float(beta), g.volume * pref * np.exp(expo), 0)


def _dense_operator(g, w, c):
    n = g.n_points
    t = c.hbar**2 / (2.0 * c.mass * g.spacing**2)
    k = np.zeros((n, n))
    idx = np.arange(n)
    k[idx, idx] = 2.0 * t + w.values
    k[idx[:-1], idx[1:]] = -t
    k[idx[1:], idx[:-1]] = -t
    if g.periodic:
        k[0, n - 1] = k[n - 1, 0] = -t
    return k


def brute_force_propagator(g, w, c, beta):
    """``(V/dr) exp(-beta K)`` from the complete eigendecomposition of ``K``.

    Raises
    ------
    ConfigurationError
        If the grid has more than 512 nodes.
    """
    _check(g, w)
    if g.n_points > _MAX_BRUTE_FORCE_POINTS:
        raise ConfigurationError(
            f"brute_force_propagator is limited to {_MAX_BRUTE_FORCE_POINTS} nodes", key="n_points"
        )
    if beta < 0:
        raise UsageError("beta must be >= 0")
    energies, vecs = eigh(_dense_operator(g, w, c))
    expo = (vecs * np.exp(-beta * energies)) @ vecs.T
    return PropagatorMatrix(g, float(beta), (g.volume / g.spacing) * expo, 0)


def classical_density(g, w, c):
    """Boltzmann density ``N exp(-beta w) / int exp(-beta w) dr``."""
    _check(g, w)
    boltz = np.exp(-c.beta * (w.values - np.min(w.values)))
    return Profile(g, c.n_particles * boltz / (g.spacing * boltz.sum()), "density")


def _classical_scf(g, spec, c, mixing, tolerance, max_iterations):
    empty = Profile(g, np.zeros(g.n_points), "density")
    n = classical_density(g, potentials.evaluate_field(spec, empty, 0.0 if spec.time_drive else None), c)
    if not spec.density_dependent:
        return n
    for _ in range(max_iterations):
        out = classical_density(g, potentials.evaluate_field(spec, n, 0.0 if spec.time_drive else None), c)
        if g.spacing * np.abs(out.values - n.values).sum() / c.n_particles <= tolerance:
            return out
        n = Profile(g, (1 - mixing) * n.values + mixing * out.values, "density")
    return n


def cylinder_condition_check(g, spec, c, hbar_sequence, cfg=None):
    """L1 distance between quantum and Boltzmann densities for each ``hbar``.

    The quantum density comes from the diffusion route. As ``hbar`` shrinks at
    fixed ``beta`` and field, the contour collapses to a point and the thermal
    coordinate drops out; the distances should then decrease monotonically.
    """
    from .scf import DIFFUSION, SCFConfig, run_scf

    hbars = np.asarray(hbar_sequence, dtype=float)
    if np.any(hbars <= 0) or np.any(np.diff(hbars) >= 0):
        raise UsageError("hbar_sequence must be positive and strictly descending")
    cfg = SCFConfig(route=DIFFUSION) if cfg is None else cfg
    classical = _classical_scf(g, spec, c, cfg.mixing_fraction, cfg.residual_tolerance, cfg.max_iterations)
    distances = []
    for hbar in hbars:
        quantum = run_scf(g, spec, replace(c, hbar=float(hbar)), cfg).density
        distances.append(g.spacing * np.sum(np.abs(quantum.values - classical.values)))
    return np.array(distances)
