"""
TOML run configuration.

The schema, with defaults, is documented in ``docs/config.md``. Every table
rejects keys it does not know, so a typo fails loudly instead of silently
falling back to a default.
"""

from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from . import potentials as pot
from .beta_propagator import Constants
from .errors import ConfigurationError
from .grid import build_grid
from .scf import SPECTRAL, SCFConfig

MODES = ("static", "beta_sweep", "classical_limit", "dynamics", "validate")

_TOP_KEYS = {"mode", "output_dir", "grid", "constants", "potential", "scf", "dynamics",
             "beta_sweep", "classical_limit"}
_GRID_KEYS = {"n_points", "length", "boundary", "origin"}
_CONST_KEYS = {"hbar", "mass", "beta", "n_particles"}
_POT_KEYS = {"external", "hartree", "drive"}
_EXTERNAL_KEYS = {
    "none": set(),
    "harmonic": {"k", "center"},
    "box_well": {"depth", "width", "center"},
    "softened_coulomb": {"charge", "softening", "center"},
    "linear": {"slope", "center"},
}
_HARTREE_KEYS = {"coupling", "softening"}
_DRIVE_KEYS = {"envelope", "frequency", "amplitude", "profile"}
_SCF_KEYS = {"mixing_fraction", "max_iterations", "residual_tolerance", "route", "occupancy",
             "n_eigs", "beta_steps", "fail_on_nonconvergence"}
_DYN_KEYS = {"dt", "n_steps", "record_every", "displacement"}
_SWEEP_KEYS = {"betas"}
_CLASSICAL_KEYS = {"hbar_values"}


class ConfigParseError(ConfigurationError):
    """Malformed document or unknown key."""


@dataclass(frozen=True)
class DynamicsConfig:
    dt: float = 0.01
    n_steps: int = 1000
    record_every: int = 10
    displacement: float = 0.0


@dataclass(frozen=True)
class RunSpec:
    mode: str
    grid: object
    constants: Constants
    potential: pot.PotentialSpec
    scf: SCFConfig
    dynamics: DynamicsConfig = field(default_factory=DynamicsConfig)
    betas: Tuple[float, ...] = (0.5, 1.0, 2.0, 4.0)
    hbar_values: Tuple[float, ...] = (1.0, 0.5, 0.25, 0.125)
    fail_on_nonconvergence: bool = False
    output_dir: Optional[str] = None


def _table(doc, name, allowed, prefix=""):
    value = doc.get(name, {})
    path = f"{prefix}{name}"
    if not isinstance(value, dict):
        raise ConfigParseError(f"[{path}] must be a table", key=path)
    unknown = sorted(set(value) - allowed)
    if unknown:
        raise ConfigParseError(f"unknown key {unknown[0]!r} in [{path}]", key=f"{path}.{unknown[0]}")
    return value


def _number(table, key, path, default, positive=False, integer=False):
    value = table.get(key, default)
    full = f"{path}.{key}"
    if value is None:
        return None
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigurationError(f"{full} (key {key!r}) must be a number", key=full)
    if integer and int(value) != value:
        raise ConfigurationError(f"{full} (key {key!r}) must be an integer", key=full)
    if not np.isfinite(value):
        raise ConfigurationError(f"{full} (key {key!r}) must be finite", key=full)
    if positive and value <= 0:
        raise ConfigurationError(f"{full} (key {key!r}) must be positive, got {value}", key=full)
    return int(value) if integer else float(value)


def _rekey(exc, path):
    key = exc.key if exc.key is None or "." in str(exc.key) else f"{path}.{exc.key}"
    return ConfigurationError(f"{key}: {exc}", key=key)


def _external(table, path):
    if not table:
        return None
    kind = table.get("kind", "none")
    if kind not in _EXTERNAL_KEYS:
        raise ConfigurationError(f"{path}.kind must be one of {sorted(_EXTERNAL_KEYS)}", key=f"{path}.kind")
    unknown = sorted(set(table) - _EXTERNAL_KEYS[kind] - {"kind"})
    if unknown:
        raise ConfigParseError(f"unknown key {unknown[0]!r} in [{path}] for kind {kind!r}",
                               key=f"{path}.{unknown[0]}")
    p = {k: _number(table, k, path, None) for k in _EXTERNAL_KEYS[kind] if k in table}
    try:
        if kind == "none":
            return None
        if kind == "harmonic":
            return pot.Harmonic(**p)
        if kind == "box_well":
            for required in ("depth", "width"):
                if required not in p:
                    raise ConfigurationError(f"{path}.{required} is required", key=f"{path}.{required}")
            return pot.BoxWell(**p)
        if kind == "softened_coulomb":
            if "charge" not in p:
                raise ConfigurationError(f"{path}.charge is required", key=f"{path}.charge")
            return pot.SoftenedCoulomb(**p)
        return pot.Linear(**p)
    except ConfigurationError as exc:
        raise _rekey(exc, path) from None


def _potential(doc):
    table = _table(doc, "potential", _POT_KEYS)
    external = _external(_table(table, "external", set().union(*_EXTERNAL_KEYS.values(), {"kind"}),
                                "potential."), "potential.external")
    hartree = None
    if "hartree" in table:
        h = _table(table, "hartree", _HARTREE_KEYS, "potential.")
        try:
            hartree = pot.Hartree(_number(h, "coupling", "potential.hartree", 1.0),
                                  _number(h, "softening", "potential.hartree", 1.0))
        except ConfigurationError as exc:
            raise _rekey(exc, "potential.hartree") from None
    drive = None
    if "drive" in table:
        d = _table(table, "drive", _DRIVE_KEYS, "potential.")
        envelope = d.get("envelope", "constant")
        amplitude = _number(d, "amplitude", "potential.drive", 1.0)
        if envelope == "constant":
            env = pot.ConstantEnvelope(amplitude)
        elif envelope == "sinusoidal":
            env = pot.SinusoidalEnvelope(_number(d, "frequency", "potential.drive", 1.0), amplitude)
        else:
            raise ConfigurationError("potential.drive.envelope must be 'constant' or 'sinusoidal'",
                                     key="potential.drive.envelope")
        profile_table = d.get("profile", {"kind": "linear"})
        if not isinstance(profile_table, dict):
            raise ConfigParseError("[potential.drive.profile] must be a table", key="potential.drive.profile")
        profile = _external(profile_table, "potential.drive.profile")
        if profile is None:
            raise ConfigurationError("drive profile must not be 'none'", key="potential.drive.profile.kind")
        drive = pot.TimeDrive(profile, env)
    return pot.PotentialSpec(external, hartree, drive)


def parse_config(text):
    """Parse a TOML document into a validated :class:`RunSpec`.

    Raises
    ------
    ConfigParseError
        Malformed TOML (the message carries line and column) or unknown keys.
    ConfigurationError
        A value violating its constraint; ``key`` names the offending entry.
    """
    try:
        doc = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigParseError(f"parse error: {exc}") from None
    unknown = sorted(set(doc) - _TOP_KEYS)
    if unknown:
        raise ConfigParseError(f"unknown top-level key {unknown[0]!r}", key=unknown[0])
    mode = doc.get("mode", "static")
    if mode not in MODES:
        raise ConfigurationError(f"mode must be one of {MODES}, got {mode!r}", key="mode")

    gt = _table(doc, "grid", _GRID_KEYS)
    length = _number(gt, "length", "grid", 20.0, positive=True)
    boundary = gt.get("boundary", "dirichlet")
    origin = _number(gt, "origin", "grid", -0.5 * length)
    try:
        grid = build_grid(_number(gt, "n_points", "grid", 256, integer=True), length, boundary, origin)
    except ConfigurationError as exc:
        raise _rekey(exc, "grid") from None

    ct = _table(doc, "constants", _CONST_KEYS)
    constants = Constants(
        hbar=_number(ct, "hbar", "constants", 1.0, positive=True),
        mass=_number(ct, "mass", "constants", 1.0, positive=True),
        beta=_number(ct, "beta", "constants", 1.0, positive=True),
        n_particles=_number(ct, "n_particles", "constants", 1.0, positive=True),
    )

    potential = _potential(doc)

    st = _table(doc, "scf", _SCF_KEYS)
    try:
        scf = SCFConfig(
            mixing_fraction=_number(st, "mixing_fraction", "scf", 0.3),
            max_iterations=_number(st, "max_iterations", "scf", 200, integer=True),
            residual_tolerance=_number(st, "residual_tolerance", "scf", 1e-10),
            route=st.get("route", SPECTRAL),
            occupancy=st.get("occupancy"),
            n_eigs=_number(st, "n_eigs", "scf", None, positive=True, integer=True),
            beta_steps=_number(st, "beta_steps", "scf", 2000, integer=True),
        )
    except ConfigurationError as exc:
        raise _rekey(exc, "scf") from None
    if scf.n_eigs is not None and scf.n_eigs > grid.n_points:
        raise ConfigurationError("scf.n_eigs exceeds grid.n_points", key="scf.n_eigs")
    fail = st.get("fail_on_nonconvergence", False)
    if not isinstance(fail, bool):
        raise ConfigurationError("scf.fail_on_nonconvergence must be a boolean", key="scf.fail_on_nonconvergence")

    dt_ = _table(doc, "dynamics", _DYN_KEYS)
    dynamics = DynamicsConfig(
        dt=_number(dt_, "dt", "dynamics", 0.01, positive=True),
        n_steps=_number(dt_, "n_steps", "dynamics", 1000, positive=True, integer=True),
        record_every=_number(dt_, "record_every", "dynamics", 10, positive=True, integer=True),
        displacement=_number(dt_, "displacement", "dynamics", 0.0),
    )
    if mode == "dynamics" and scf.route != SPECTRAL:
        raise ConfigurationError("dynamics mode needs scf.route = 'spectral' (orbitals)", key="scf.route")

    sw = _table(doc, "beta_sweep", _SWEEP_KEYS)
    betas = _sequence(sw, "betas", "beta_sweep", RunSpec.betas)
    cl = _table(doc, "classical_limit", _CLASSICAL_KEYS)
    hbars = _sequence(cl, "hbar_values", "classical_limit", RunSpec.hbar_values)
    if any(b >= a for a, b in zip(hbars, hbars[1:])):
        raise ConfigurationError("classical_limit.hbar_values must be strictly descending",
                                 key="classical_limit.hbar_values")

    output_dir = doc.get("output_dir")
    if output_dir is not None and not isinstance(output_dir, str):
        raise ConfigurationError("output_dir must be a string", key="output_dir")
    return RunSpec(mode, grid, constants, potential, scf, dynamics, betas, hbars, fail, output_dir)


def _sequence(table, key, path, default):
    values = table.get(key, default)
    full = f"{path}.{key}"
    if not isinstance(values, (list, tuple)) or not values:
        raise ConfigurationError(f"{full} must be a non-empty list", key=full)
    out = []
    for v in values:
        if isinstance(v, bool) or not isinstance(v, (int, float)) or not v > 0 or not np.isfinite(v):
            raise ConfigurationError(f"{full} entries must be positive numbers", key=full)
        out.append(float(v))
    return tuple(out)
