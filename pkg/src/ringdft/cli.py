"""
Command-line front end.

    ringdft run CONFIG.toml [--out DIR]
    ringdft validate [--check NAME ...]

Exit codes: 0 success, 1 configuration error, 2 numerical failure,
3 non-convergence (static mode with ``scf.fail_on_nonconvergence = true``).
"""

import argparse
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import oracle, scf, spectral, tdks
from .config import RunSpec, parse_config
from .errors import ConfigurationError, NumericalError, RingDFTError
from .tdks import state_from_orbitals

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_NUMERICAL = 2
EXIT_NONCONVERGED = 3

_FLOAT = "%.16e"


class NonConvergenceError(RingDFTError):
    pass


class _Outputs:
    """Tracks files written by a run so a failed run leaves nothing behind."""

    def __init__(self, directory):
        self.directory = Path(directory)
        self.created_dir = not self.directory.exists()
        self.files = []

    def path(self, name):
        self.directory.mkdir(parents=True, exist_ok=True)
        p = self.directory / name
        self.files.append(p)
        return p

    def csv(self, name, header, columns, fmt=None):
        data = np.column_stack([np.asarray(col, dtype=float) for col in columns])
        np.savetxt(self.path(name), data, delimiter=",", header=",".join(header), comments="",
                   fmt=fmt or _FLOAT)

    def text(self, name, body):
        self.path(name).write_text(body)

    def discard(self):
        for p in self.files:
            p.unlink(missing_ok=True)
        if self.created_dir and self.directory.exists() and not any(self.directory.iterdir()):
            self.directory.rmdir()


def _static_solve(spec: RunSpec, constants=None):
    return scf.run_scf(spec.grid, spec.potential, constants or spec.constants, spec.scf)


def _spectrum_for_report(spec, res):
    if res.spectrum is not None:
        return res.spectrum, res.occupancy
    s = spectral.diagonalize(spec.grid, res.field, spec.constants)
    return s, spectral.solve_mu(s, spec.constants, spectral.BOLTZMANN)


def _report(spec, res):
    lines = [
        f"mode: {spec.mode}",
        f"grid: {spec.grid.n_points} points, length {spec.grid.length:g}, {spec.grid.boundary}",
        f"constants: hbar={spec.constants.hbar:g} mass={spec.constants.mass:g} "
        f"beta={spec.constants.beta:g} N={spec.constants.n_particles:g}",
        f"route: {spec.scf.route}, occupancy: {spec.scf.occupancy_mode}",
        f"converged: {res.converged} after {res.iterations} iterations",
        f"free energy F = -(N/beta) ln Q - int w n + U[n]: {res.free_energy:.12f}",
        f"single-particle partition function Q: {res.partition_function:.12f}",
    ]
    if res.mu is not None:
        lines.append(f"chemical potential mu: {res.mu:.12f}")
    if res.route_discrepancy is not None:
        lines.append(f"route discrepancy (rel Linf, diffusion vs spectral): {res.route_discrepancy:.3e}")
    lines.append("residual trace (L1 per particle):")
    lines.extend(f"  {k + 1:4d} {r:.6e}" for k, r in enumerate(res.residual_history))
    return "\n".join(lines) + "\n"


def _run_static(spec, out):
    res = _static_solve(spec)
    x = spec.grid.nodes
    out.csv("density.csv", ["r", "density"], [x, res.density.values])
    out.csv("field.csv", ["r", "field"], [x, res.field.values])
    s, occ = _spectrum_for_report(spec, res)
    out.csv("spectrum.csv", ["index", "energy", "occupation"],
            [np.arange(s.count), s.energies, occ.occupations], fmt=["%d", _FLOAT, _FLOAT])
    out.text("report.txt", _report(spec, res))
    if not res.converged and spec.fail_on_nonconvergence:
        raise NonConvergenceError(f"SCF did not converge in {res.iterations} iterations")


def _run_beta_sweep(spec, out):
    qs, fs = [], []
    for beta in spec.betas:
        res = _static_solve(spec, replace(spec.constants, beta=beta))
        qs.append(res.partition_function)
        fs.append(res.free_energy)
    out.csv("q_trace.csv", ["beta", "Q", "F"], [spec.betas, qs, fs])


def _run_classical_limit(spec, out):
    cfg = replace(spec.scf, route=scf.DIFFUSION, occupancy=None)
    d = oracle.cylinder_condition_check(spec.grid, spec.potential, spec.constants, spec.hbar_values, cfg)
    out.csv("cylinder.csv", ["hbar", "l1_distance"], [spec.hbar_values, d])


def _run_dynamics(spec, out):
    dyn = spec.dynamics
    res = _static_solve(spec)
    state = tdks.init_from_spectrum(res.spectrum, res.occupancy, dyn.dt)
    g = spec.grid
    if dyn.displacement:
        shifted = [np.interp(g.nodes - dyn.displacement, g.nodes, phi.real, left=0.0, right=0.0)
                   for phi in state.orbitals]
        state = state_from_orbitals(g, shifted, state.occupations, dyn.dt)
    rows, snaps = [], []
    for st, obs in tdks.trajectory(state, spec.potential, spec.constants, dyn.n_steps, dyn.record_every):
        rows.append((st.time, obs["norm_defect"], obs["energy"], obs["dipole"]))
        n = tdks.density_at_time(st).values
        snaps.append(np.column_stack([np.full(g.n_points, st.time), g.nodes, n]))
    rows = np.array(rows)
    out.csv("trajectory.csv", ["t", "norm_defect", "energy", "dipole"], rows.T)
    snaps = np.vstack(snaps)
    out.csv("density_snapshots.csv", ["t", "r", "density"], snaps.T)


def _run_validate(spec, out, names=None, stream=None):
    from .validation import run_checks

    results = run_checks(names, stream=sys.stdout if stream is None else stream)
    if not all(r.passed for r in results):
        raise NumericalError(f"{sum(not r.passed for r in results)} validation check(s) failed")


_RUNNERS = {
    "static": _run_static,
    "beta_sweep": _run_beta_sweep,
    "classical_limit": _run_classical_limit,
    "dynamics": _run_dynamics,
    "validate": _run_validate,
}


def run(spec, out_dir=None):
    """Execute a parsed run, writing artifacts to ``out_dir``.

    On failure every file written by this run is removed before the exception
    propagates.
    """
    out = _Outputs(out_dir or spec.output_dir or "ringdft_out")
    try:
        _RUNNERS[spec.mode](spec, out)
    except BaseException:
        out.discard()
        raise
    return out.files


def _error_line(code, exc):
    key = getattr(exc, "key", None) or "-"
    message = str(exc).replace("\n", " ")
    return f"ringdft: error code={code} kind={type(exc).__name__} key={key} message={message}"


def _exit_code(exc):
    if isinstance(exc, NonConvergenceError):
        return EXIT_NONCONVERGED
    if isinstance(exc, (ConfigurationError, OSError)):
        return EXIT_CONFIG
    if isinstance(exc, (NumericalError, RingDFTError, ArithmeticError)):
        return EXIT_NUMERICAL
    return EXIT_NUMERICAL


def main(argv=None):
    parser = argparse.ArgumentParser(prog="ringdft", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)
    p_run = sub.add_parser("run", help="execute a TOML run configuration")
    p_run.add_argument("config", type=Path)
    p_run.add_argument("--out", type=Path, default=None, help="output directory override")
    p_val = sub.add_parser("validate", help="run the built-in numerical checks")
    p_val.add_argument("--check", action="append", default=None, help="run only the named check")
    args = parser.parse_args(argv)

    try:
        if args.command == "validate":
            from .validation import CHECKS

            unknown = [n for n in args.check or [] if n not in CHECKS]
            if unknown:
                raise ConfigurationError(f"unknown check {unknown[0]!r}; known: {', '.join(CHECKS)}",
                                         key=unknown[0])
            _run_validate(None, None, args.check)
            return EXIT_OK
        try:
            text = args.config.read_text()
        except OSError as exc:
            raise ConfigurationError(f"cannot read {args.config}: {exc}") from None
        spec = parse_config(text)
        if spec.mode == "validate":
            _run_validate(spec, None)
        else:
            run(spec, args.out)
    except (RingDFTError, OSError, ArithmeticError) as exc:
        code = _exit_code(exc)
        print(_error_line(code, exc), file=sys.stderr)
        return code
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
