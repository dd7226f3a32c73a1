"""
Potential-energy functionals ``U[n]`` and their functional derivatives.

The functional is the sum of a linear external term and an optional mean-field
(Hartree) term built on the softened 1D Coulomb kernel ``1/sqrt(x^2 + a^2)``::

    U[n] = int v_ext n dr + (coupling/2) int int n(r) v_soft(r - r') n(r') dr dr'

The field is ``w = dU/dn``, optionally plus a time-dependent drive.
"""

from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Union

import numpy as np

from .errors import ConfigurationError, UsageError
from .grid import Grid, Profile, _check


@dataclass(frozen=True)
class Harmonic:
    k: float = 1.0
    center: float = 0.0

    def __post_init__(self):
        if not self.k > 0:
            raise ConfigurationError("harmonic k must be positive", key="k")

    def __call__(self, x):
        return 0.5 * self.k * (x - self.center) ** 2


@dataclass(frozen=True)
class BoxWell:
    """Square well of the given depth, ``-depth`` inside ``|x - center| < width/2``."""

    depth: float
    width: float
    center: float = 0.0

    def __post_init__(self):
        if not self.width > 0:
            raise ConfigurationError("box_well width must be positive", key="width")

    def __call__(self, x):
        return np.where(np.abs(x - self.center) < 0.5 * self.width, -self.depth, 0.0)


@dataclass(frozen=True)
class SoftenedCoulomb:
    """Attractive softened nucleus ``-charge / sqrt((x - center)^2 + softening^2)``."""

    charge: float
    softening: float = 1.0
    center: float = 0.0

    def __post_init__(self):
        if not self.softening > 0:
            raise ConfigurationError("softening must be positive", key="softening")

    def __call__(self, x):
        return -self.charge / np.sqrt((x - self.center) ** 2 + self.softening**2)


@dataclass(frozen=True)
class Linear:
    """Uniform force field ``slope * (x - center)``; the usual dipole drive profile."""

    slope: float = 1.0
    center: float = 0.0

    def __call__(self, x):
        return self.slope * (x - self.center)


External = Union[Harmonic, BoxWell, SoftenedCoulomb, Linear]


@dataclass(frozen=True)
class Hartree:
    coupling: float = 1.0
    softening: float = 1.0

    def __post_init__(self):
        if not self.softening > 0:
            raise ConfigurationError("hartree softening must be positive", key="softening")


@dataclass(frozen=True)
class ConstantEnvelope:
    amplitude: float = 1.0

    def __call__(self, t):
        return self.amplitude


@dataclass(frozen=True)
class SinusoidalEnvelope:
    frequency: float
    amplitude: float

    def __call__(self, t):
        return self.amplitude * np.sin(self.frequency * t)


@dataclass(frozen=True)
class TimeDrive:
    profile: External
    envelope: Union[ConstantEnvelope, SinusoidalEnvelope]


@dataclass(frozen=True)
class PotentialSpec:
    external: Optional[External] = None
    hartree: Optional[Hartree] = None
    time_drive: Optional[TimeDrive] = None

    @property
    def density_dependent(self):
        return self.hartree is not None and self.hartree.coupling != 0.0


@lru_cache(maxsize=8)
def _softened_kernel(g: Grid, softening):
    x = g.nodes
    d = x[:, None] - x[None, :]
    if g.periodic:
        # minimum-image separation keeps the kernel translation invariant
        d = d - g.length * np.round(d / g.length)
    kernel = 1.0 / np.sqrt(d * d + softening**2)
    kernel.setflags(write=False)
    return kernel


def hartree_kernel(g, hartree):
    """Symmetric matrix ``v_soft(r_i - r_j)``."""
    return _softened_kernel(g, float(hartree.softening))


def external_values(g, spec):
    if spec.external is None:
        return np.zeros(g.n_points)
    return np.asarray(spec.external(g.nodes), dtype=float) * np.ones(g.n_points)


def evaluate_energy(spec, n):
    """Value of ``U[n]``; the time drive does not contribute."""
    g = n.grid
    dr = g.spacing
    u = 0.0
    if spec.external is not None:
        u += dr * np.dot(external_values(g, spec), n.values)
    if spec.hartree is not None:
        kn = hartree_kernel(g, spec.hartree) @ n.values
        u += 0.5 * spec.hartree.coupling * dr * dr * np.dot(n.values, kn)
    return float(u)


def evaluate_field(spec, n, t=None):
    """Field ``w = dU/dn`` (plus the drive at time ``t`` when configured).

    Raises
    ------
    UsageError
        If the potential carries a time drive but no time is given.
    """
    g = n.grid
    w = external_values(g, spec)
    if spec.hartree is not None:
        w = w + spec.hartree.coupling * g.spacing * (hartree_kernel(g, spec.hartree) @ n.values)
    if spec.time_drive is not None:
        if t is None:
            raise UsageError("potential has a time drive; evaluate_field needs t")
        w = w + spec.time_drive.envelope(t) * spec.time_drive.profile(g.nodes)
    return Profile(g, w, "field")


def static_field(g, spec, t=None):
    """Field of a density-independent spec, evaluated without a density."""
    if spec.density_dependent:
        raise UsageError("potential depends on the density; pass a density to evaluate_field")
    return evaluate_field(spec, Profile(g, np.zeros(g.n_points), "density"), t)


def check_density(g, n):
    _check(g, n)
    if n.kind != "density":
        raise UsageError("expected a density profile")
