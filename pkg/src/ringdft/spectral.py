"""
Eigen-decomposition route to the density.

The diffusion generator ``H = (hbar^2/2m) lap - w`` has eigenvalues that are the
negatives of the usual Kohn-Sham energies. Everything here works with
``K = -H = -(hbar^2/2m) lap + w`` and stores ``E_i`` so that bound states carry
the conventional sign; ``Spectrum.diffusion_eigenvalues`` gives back ``-E_i``.

Orbitals are normalized so that ``dr * sum |phi|^2 = 1``. With that choice the
density is ``n = sum_i f_i |phi_i|^2`` and carries no extra volume factor.
"""

from dataclasses import dataclass

import numpy as np
from scipy.linalg import LinAlgError, eigh
from scipy.special import expit

from .beta_propagator import PropagatorMatrix
from .errors import InsufficientSpectrumError, NumericalError, UsageError
from .grid import Grid, Profile, _check, laplacian_matrix

FINITE_BETA = "finite_beta"
ZERO_T = "zero_T"
BOLTZMANN = "boltzmann"
OCCUPANCY_MODES = (FINITE_BETA, ZERO_T, BOLTZMANN)

_TAIL_TOL = 1e-12
_KERNEL_TAIL_TOL = 1e-14
_BRACKET_WIDTH = 50.0
_COUNT_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class Spectrum:
    grid: Grid
    energies: np.ndarray
    orbitals: np.ndarray  # shape (count, n_points)

    @property
    def count(self):
        return len(self.energies)

    @property
    def complete(self):
        return self.count == self.grid.n_points

    @property
    def diffusion_eigenvalues(self):
        """Eigenvalues of the diffusion generator ``H = -K``."""
        return -self.energies

    def orbital(self, i):
        return Profile(self.grid, self.orbitals[i], "orbital")


@dataclass(frozen=True, eq=False)
class Occupancy:
    """Level occupations and chemical potential.

    ``boltzmann`` weights ``N exp(-beta E_i) / sum_j exp(-beta E_j)`` are the
    statistics of the closed-contour trace; they can exceed one for ``N > 1``.
    """

    mu: float
    occupations: np.ndarray
    target_count: float
    temperature_mode: str
    beta: float = None


def kohn_sham_matrix(g, w, c):
    """Dense ``K = -(hbar^2/2m) lap + diag(w)``."""
    return -c.diffusion * laplacian_matrix(g) + np.diag(w.values)


def diagonalize(g, w, c, n_eigs=None):
    """Lowest ``n_eigs`` eigenpairs of ``K``, orbitals quadrature-normalized.

    Each orbital's sign is fixed so that its largest-magnitude entry is
    positive, which makes the output reproducible.
    """
    _check(g, w)
    n = g.n_points
    n_eigs = n if n_eigs is None else int(n_eigs)
    if not 1 <= n_eigs <= n:
        raise UsageError(f"n_eigs must be in [1, {n}], got {n_eigs}")
    k = kohn_sham_matrix(g, w, c)
    try:
        if n_eigs == n:
            energies, vecs = eigh(k)
        else:
            energies, vecs = eigh(k, subset_by_index=(0, n_eigs - 1))
    except (LinAlgError, ValueError) as exc:
        raise NumericalError(f"eigensolver failed: {exc}", operator=k) from exc
    vecs = vecs.T / np.sqrt(g.spacing)
    pivot = np.argmax(np.abs(vecs), axis=1)
    signs = np.sign(vecs[np.arange(n_eigs), pivot])
    vecs *= signs[:, None]
    energies.setflags(write=False)
    vecs.setflags(write=False)
    return Spectrum(g, energies, vecs)


def fermi_dirac(energies, mu, beta):
    return expit(-beta * (np.asarray(energies) - mu))


def _boltzmann(s, c):
    x = -c.beta * (s.energies - s.energies[0])
    weights = np.exp(x)
    z = weights.sum()
    if not s.complete and weights[-1] / z >= _TAIL_TOL:
        raise InsufficientSpectrumError(
            f"Boltzmann tail {weights[-1] / z:.3e} at level {s.count}; retain more eigenpairs"
        )
    occ = c.n_particles * weights / z
    mu = s.energies[0] + np.log(c.n_particles / z) / c.beta
    return Occupancy(float(mu), occ, c.n_particles, BOLTZMANN, c.beta)


def _zero_temperature(s, c):
    n = c.n_particles
    if int(n) != n:
        raise UsageError(f"zero_T occupancy needs an integer particle number, got {n}")
    n = int(n)
    if n > s.count:
        raise InsufficientSpectrumError(f"{n} particles but only {s.count} levels retained")
    occ = np.zeros(s.count)
    occ[:n] = 1.0
    if n < s.count:
        mu = 0.5 * (s.energies[n - 1] + s.energies[n])
    else:
        mu = s.energies[-1]
    return Occupancy(float(mu), occ, float(n), ZERO_T, None)


def _fermi(s, c):
    beta, target = c.beta, c.n_particles
    if target > s.count:
        raise InsufficientSpectrumError(f"{target} particles but only {s.count} levels retained")
    e = s.energies
    lo = e[0] - _BRACKET_WIDTH / beta
    hi = e[-1] + _BRACKET_WIDTH / beta

    def excess(mu):
        return fermi_dirac(e, mu, beta).sum() - target

    mu = 0.5 * (lo + hi)
    for _ in range(400):
        mu = 0.5 * (lo + hi)
        d = excess(mu)
        if abs(d) <= _COUNT_TOL or hi - lo <= 4 * np.finfo(float).eps * max(1.0, abs(mu)):
            break
        if d > 0:
            hi = mu
        else:
            lo = mu
    occ = fermi_dirac(e, mu, beta)
    if not s.complete and occ[-1] >= _TAIL_TOL:
        raise InsufficientSpectrumError(
            f"Fermi tail {occ[-1]:.3e} at level {s.count}; retain more eigenpairs"
        )
    return Occupancy(float(mu), occ, target, FINITE_BETA, beta)


def solve_mu(s, c, mode=FINITE_BETA):
    """Occupations and chemical potential for ``c.n_particles`` particles.

    Parameters
    ----------
    mode : {"finite_beta", "zero_T", "boltzmann"}
        Fermi-Dirac at ``c.beta`` (``mu`` by bisection), the zero-temperature
        step, or closed-contour Boltzmann weights.

    Raises
    ------
    UsageError
        ``zero_T`` with a non-integer particle number.
    InsufficientSpectrumError
        The occupation of the highest retained level is not negligible.
    """
    if mode == FINITE_BETA:
        return _fermi(s, c)
    if mode == ZERO_T:
        return _zero_temperature(s, c)
    if mode == BOLTZMANN:
        return _boltzmann(s, c)
    raise UsageError(f"unknown occupancy mode {mode!r}; expected one of {OCCUPANCY_MODES}")


def density_from_spectrum(s, occ):
    """``n(r) = sum_i f_i |phi_i(r)|^2``."""
    n = occ.occupations @ (s.orbitals**2)
    return Profile(s.grid, n, "density")


def q_from_spectrum(s, c):
    """Propagator ``V sum_i phi_i(r0) phi_i(r) exp(-beta E_i)`` from eigenpairs.

    Raises
    ------
    InsufficientSpectrumError
        If the spectrum is truncated and ``exp(-beta (E_last - E_1)) >= 1e-14``.
    """
    g = s.grid
    e = s.energies
    if not s.complete and np.exp(-c.beta * (e[-1] - e[0])) >= _KERNEL_TAIL_TOL:
        raise InsufficientSpectrumError(
            f"truncated spectrum: exp(-beta (E_last - E_1)) = {np.exp(-c.beta * (e[-1] - e[0])):.3e}"
        )
    weights = np.exp(-c.beta * e)
    phi = s.orbitals
    entries = g.volume * (phi.T * weights) @ phi
    return PropagatorMatrix(g, float(c.beta), entries, 0)


def partition_from_spectrum(s, c):
    """``Q = sum_i exp(-beta E_i)`` over the retained levels."""
    return float(np.sum(np.exp(-c.beta * s.energies)))
