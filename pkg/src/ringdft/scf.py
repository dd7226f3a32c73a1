"""
Self-consistent field loop and free-energy evaluation.

One iteration maps a density to its field ``w = dU/dn`` and the field back to a
density, either by marching the thermal propagator (``diffusion``) or by
diagonalizing ``K`` and occupying levels (``spectral``). Densities are
combined by linear mixing.
"""

from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from . import beta_propagator as bp
from . import potentials, spectral
from .errors import ConfigurationError, DivergenceError, RingDFTError
from .grid import Profile

DIFFUSION = "diffusion"
SPECTRAL = "spectral"
BOTH = "both"
ROUTES = (DIFFUSION, SPECTRAL, BOTH)


@dataclass(frozen=True)
class SCFConfig:
    """Iteration settings.

    ``occupancy`` applies to the spectral route. The diffusion route produces
    closed-contour (Boltzmann) statistics, so ``diffusion`` and ``both`` accept
    only ``"boltzmann"``; ``None`` picks ``"boltzmann"`` for those routes and
    ``"finite_beta"`` for ``spectral``.
    """

    mixing_fraction: float = 0.3
    max_iterations: int = 200
    residual_tolerance: float = 1e-10
    route: str = SPECTRAL
    occupancy: Optional[str] = None
    n_eigs: Optional[int] = None
    beta_steps: int = 2000

    def __post_init__(self):
        if not 0 < self.mixing_fraction <= 1:
            raise ConfigurationError("mixing_fraction must lie in (0, 1]", key="mixing_fraction")
        if int(self.max_iterations) != self.max_iterations or self.max_iterations < 1:
            raise ConfigurationError("max_iterations must be a positive integer", key="max_iterations")
        if not self.residual_tolerance > 0:
            raise ConfigurationError("residual_tolerance must be positive", key="residual_tolerance")
        if self.route not in ROUTES:
            raise ConfigurationError(f"route must be one of {ROUTES}", key="route")
        if self.occupancy is not None and self.occupancy not in spectral.OCCUPANCY_MODES:
            raise ConfigurationError(
                f"occupancy must be one of {spectral.OCCUPANCY_MODES}", key="occupancy"
            )
        if self.route != SPECTRAL and self.occupancy not in (None, spectral.BOLTZMANN):
            raise ConfigurationError(
                f"route {self.route!r} yields Boltzmann statistics; occupancy must be 'boltzmann'",
                key="occupancy",
            )
        if int(self.beta_steps) != self.beta_steps or self.beta_steps < 1:
            raise ConfigurationError("beta_steps must be a positive integer", key="beta_steps")

    @property
    def occupancy_mode(self):
        if self.occupancy is not None:
            return self.occupancy
        return spectral.FINITE_BETA if self.route == SPECTRAL else spectral.BOLTZMANN


@dataclass
class SCFResult:
    density: Profile
    field: Profile
    free_energy: float
    partition_function: float
    iterations: int
    residual_history: List[float]
    converged: bool
    route_discrepancy: Optional[float] = None
    spectrum: Optional[spectral.Spectrum] = None
    occupancy: Optional[spectral.Occupancy] = None

    @property
    def mu(self):
        return None if self.occupancy is None else self.occupancy.mu


def free_energy(n, w, Q, spec, c):
    """``F = -(N/beta) ln Q - int w n dr + U[n]``.

    Raises
    ------
    DivergenceError
        If ``Q <= 0``.
    """
    if not Q > 0:
        raise DivergenceError(f"free energy needs Q > 0, got {Q!r}")
    g = n.grid
    wn = g.spacing * np.dot(w.values, n.values)
    return float(-(c.n_particles / c.beta) * np.log(Q) - wn + potentials.evaluate_energy(spec, n))


def uniform_density(g, c):
    values = np.full(g.n_points, c.n_particles / (g.spacing * g.n_points))
    return Profile(g, values, "density")


def diffusion_density(g, w, c, beta_steps):
    """Density and ``Q`` through the marched propagator."""
    p = bp.propagate(g, w, c, beta_steps)
    return bp.density_from_propagator(p, c), bp.partition_function(p)


def spectral_density(g, w, c, mode, n_eigs=None):
    """Density, ``Q``, spectrum and occupancy through diagonalization."""
    s = spectral.diagonalize(g, w, c, n_eigs)
    occ = spectral.solve_mu(s, c, mode)
    return spectral.density_from_spectrum(s, occ), spectral.partition_from_spectrum(s, c), s, occ


def relative_linf(a, b):
    """``max|a - b| / max|b|``."""
    a = np.asarray(a)
    b = np.asarray(b)
    return float(np.max(np.abs(a - b)) / np.max(np.abs(b)))


def run_scf(g, spec, c, cfg=SCFConfig(), initial_density=None):
    """Iterate density -> field -> density to a fixed point.

    The loop stops when the L1 change per particle, ``int |n' - n| dr / N``,
    drops to ``cfg.residual_tolerance``. When the field does not depend on the
    density the map is constant and a single undamped update reaches the fixed
    point, so mixing is skipped.

    Non-convergence is reported through ``converged=False``. Errors raised by
    the inner solvers carry the iteration index in ``iteration``.
    """
    mode = cfg.occupancy_mode
    alpha = cfg.mixing_fraction if spec.density_dependent else 1.0
    n = uniform_density(g, c) if initial_density is None else initial_density
    potentials.check_density(g, n)

    def density_map(dens, iteration):
        try:
            w = potentials.evaluate_field(spec, dens, 0.0 if spec.time_drive else None)
            if cfg.route == DIFFUSION:
                out, Q = diffusion_density(g, w, c, cfg.beta_steps)
                return w, out, Q, None, None
            out, Q, s, occ = spectral_density(g, w, c, mode, cfg.n_eigs)
            return w, out, Q, s, occ
        except RingDFTError as exc:
            if getattr(exc, "iteration", None) is None:
                exc.iteration = iteration
            raise

    w, out, Q, s, occ = density_map(n, 0)
    history = []
    converged = False
    for iteration in range(1, cfg.max_iterations + 1):
        n = Profile(g, (1.0 - alpha) * n.values + alpha * out.values, "density")
        w, out, Q, s, occ = density_map(n, iteration)
        residual = g.spacing * np.sum(np.abs(out.values - n.values)) / c.n_particles
        history.append(float(residual))
        if residual <= cfg.residual_tolerance:
            converged = True
            break

    discrepancy = None
    if cfg.route == BOTH:
        diff_n, _ = diffusion_density(g, w, c, cfg.beta_steps)
        discrepancy = relative_linf(diff_n.values, out.values)

    return SCFResult(
        density=n,
        field=w,
        free_energy=free_energy(n, w, Q, spec, c),
        partition_function=Q,
        iterations=len(history),
        residual_history=history,
        converged=converged,
        route_discrepancy=discrepancy,
        spectrum=s,
        occupancy=occ,
    )
