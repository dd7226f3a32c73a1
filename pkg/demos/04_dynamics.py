"""
Real-time orbitals: stationary states, a coherent state and a drive
===================================================================

Kohn-Sham orbitals are propagated with Crank-Nicolson steps and frozen
occupations. A converged static state should not move; a displaced Gaussian
in a harmonic trap should swing as x0 cos t without changing shape; a
sinusoidal drive pumps energy in while norms stay fixed.
"""

import numpy as np

from ringdft import Constants, PotentialSpec, centered_grid, scf, spectral, tdks
from ringdft.potentials import Harmonic, Hartree, Linear, SinusoidalEnvelope, TimeDrive, static_field

c = Constants()

# %%
# Thermal ensemble of the harmonic trap, propagated for 1000 steps.
g = centered_grid(256, 12.0)
spec = PotentialSpec(Harmonic(), Hartree(0.5, 1.0))
res = scf.run_scf(g, spec, Constants(beta=1.0, n_particles=2.0),
                  scf.SCFConfig(route=scf.SPECTRAL, occupancy=spectral.FINITE_BETA))
state = tdks.init_from_spectrum(res.spectrum, res.occupancy, 0.01, min_occupation=1e-16)
later = tdks.propagate(state, spec, c, 1000)
drift = np.max(np.abs(tdks.density_at_time(later).values - res.density.values))
print(f"{len(state.occupations)} orbitals; density drift after 1000 steps {drift:.1e}")

# %%
# Coherent state: the ground orbital displaced by x0 = 1, one period at
# dt = period / 2000.
g = centered_grid(2048, 12.0)
ho = PotentialSpec(Harmonic())
phi = np.exp(-0.5 * (g.nodes - 1.0) ** 2)
state = tdks.state_from_orbitals(g, [phi], [1.0], 2 * np.pi / 2000)
worst = 0.0
for st, obs in tdks.trajectory(state, ho, c, 2000, 250):
    worst = max(worst, abs(obs["dipole"] - np.cos(st.time)))
    print(f"t {st.time:6.3f}  <r> {obs['dipole']:+.6f}  x0 cos t {np.cos(st.time):+.6f}")
print(f"largest deviation over one period {worst:.1e}")

# %%
# Ground state under a resonant drive 0.05 sin(t) r.
g = centered_grid(256, 12.0)
s = spectral.diagonalize(g, static_field(g, ho), c, n_eigs=4)
state = tdks.init_from_spectrum(s, spectral.solve_mu(s, c, spectral.ZERO_T), 0.01)
driven = PotentialSpec(Harmonic(), time_drive=TimeDrive(Linear(), SinusoidalEnvelope(1.0, 0.05)))
for st, obs in tdks.trajectory(state, driven, c, 2000, 400):
    print(f"t {st.time:5.1f}  energy {obs['energy']:.6f}  norm defect {obs['norm_defect']:.1e}")
