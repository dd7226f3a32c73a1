"""
Real-time propagation of Kohn-Sham orbitals with frozen occupations.

Orbitals obey ``i hbar dphi/dt = K(t) phi`` with ``K = -(hbar^2/2m) lap + w(r, t)``
and the density is ``n(r, t) = sum_i f_i |phi_i(r, t)|^2`` with the ``f_i`` of
the initial state. Steps are Crank-Nicolson (Cayley form), which is unitary
for any ``dt``. A density-dependent field is rebuilt from the instantaneous
density (adiabatic approximation) at the step midpoint.
"""

from dataclasses import dataclass, replace

import numpy as np

from . import potentials
from .errors import NumericalError, UsageError
from .grid import Grid, Profile, second_difference, solve_tridiagonal


@dataclass(frozen=True, eq=False)
class TDState:
    grid: Grid
    time: float
    orbitals: np.ndarray  # complex, shape (count, n_points)
    occupations: np.ndarray
    dt: float
    steps: int = 0


def init_from_spectrum(s, occ, dt, min_occupation=0.0):
    """Embed the occupied static orbitals as the ``t = 0`` state.

    Levels with occupation ``<= min_occupation`` are dropped; they do not
    contribute to the density.
    """
    if not dt > 0:
        raise UsageError(f"dt must be positive, got {dt!r}")
    occupations = np.asarray(occ.occupations, dtype=float)
    keep = occupations > min_occupation
    orbitals = np.asarray(s.orbitals[: len(occupations)][keep], dtype=complex)
    return TDState(s.grid, 0.0, orbitals, occupations[keep].copy(), float(dt))


def state_from_orbitals(g, orbitals, occupations, dt, time=0.0):
    """Build a state from explicit orbitals, renormalizing each to unit norm."""
    if not dt > 0:
        raise UsageError(f"dt must be positive, got {dt!r}")
    phi = np.atleast_2d(np.asarray(orbitals, dtype=complex))
    norms = np.sqrt(g.spacing * np.sum(np.abs(phi) ** 2, axis=1))
    return TDState(g, float(time), phi / norms[:, None], np.asarray(occupations, dtype=float), float(dt))


def density_at_time(state):
    """``n(r, t) = sum_i f_i |phi_i(r, t)|^2``."""
    if len(state.occupations) == 0:
        return Profile(state.grid, np.zeros(state.grid.n_points), "density")
    n = state.occupations @ (np.abs(state.orbitals) ** 2)
    return Profile(state.grid, n, "density")


def instantaneous_field(state, spec, t=None):
    t = state.time if t is None else t
    drive_t = t if spec.time_drive is not None else None
    return potentials.evaluate_field(spec, density_at_time(state), drive_t)


def _cayley(g, phi, w, c, dt):
    """One Crank-Nicolson step of ``phi`` (shape ``(count, n)``) under field ``w``."""
    a = 0.5j * dt / c.hbar
    d = c.diffusion
    wv = w.values
    cols = phi.T
    rhs = cols - a * (-d * second_difference(g, cols) + wv[:, None] * cols)
    diag = 1.0 + a * (2.0 * d / g.spacing**2 + wv)
    off = -a * d / g.spacing**2
    return solve_tridiagonal(g, diag, off, rhs).T


def step(state, spec, c):
    """Advance every orbital by ``state.dt``.

    The field is taken at ``t + dt/2``. With a Hartree term the midpoint
    density is first predicted by a half step under the field at ``t``.
    """
    g = state.grid
    dt = state.dt
    t_mid = state.time + 0.5 * dt
    if len(state.occupations) == 0:
        return replace(state, time=state.time + dt, steps=state.steps + 1)
    try:
        if spec.density_dependent:
            w_old = instantaneous_field(state, spec)
            half = replace(state, orbitals=_cayley(g, state.orbitals, w_old, c, 0.5 * dt))
            w_mid = instantaneous_field(half, spec, t_mid)
        else:
            w_mid = potentials.static_field(g, spec, t_mid if spec.time_drive else None)
        phi = _cayley(g, state.orbitals, w_mid, c, dt)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise NumericalError(f"Crank-Nicolson solve failed at step {state.steps + 1}: {exc}",
                             step=state.steps + 1) from exc
    if not np.all(np.isfinite(phi)):
        raise NumericalError(f"non-finite orbitals at step {state.steps + 1}", step=state.steps + 1)
    return replace(state, time=state.time + dt, orbitals=phi, steps=state.steps + 1)


def propagate(state, spec, c, n_steps):
    for _ in range(n_steps):
        state = step(state, spec, c)
    return state


def norms(state):
    return state.grid.spacing * np.sum(np.abs(state.orbitals) ** 2, axis=1)


def observables(state, spec, c):
    """Norm defect, energy ``sum_i f_i <phi_i|K|phi_i>`` and dipole ``int r n dr``."""
    g = state.grid
    n = density_at_time(state)
    if len(state.occupations) == 0:
        return {"norm_defect": 0.0, "energy": 0.0, "dipole": 0.0}
    w = instantaneous_field(state, spec)
    cols = state.orbitals.T
    k_phi = -c.diffusion * second_difference(g, cols) + w.values[:, None] * cols
    expect = g.spacing * np.sum(np.conj(cols) * k_phi, axis=0).real
    return {
        "norm_defect": float(np.max(np.abs(norms(state) - 1.0))),
        "energy": float(np.dot(state.occupations, expect)),
        "dipole": float(g.spacing * np.dot(g.nodes, n.values)),
    }


def trajectory(state, spec, c, n_steps, record_every=1):
    """Propagate and yield ``(state, observables)`` at ``t = 0`` and every ``record_every`` steps."""
    if record_every < 1:
        raise UsageError("record_every must be >= 1")
    yield state, observables(state, spec, c)
    for k in range(1, n_steps + 1):
        state = step(state, spec, c)
        if k % record_every == 0 or k == n_steps:
            yield state, observables(state, spec, c)
