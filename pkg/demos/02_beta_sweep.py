"""
Sweeping the thermal contour length
===================================

The contour length beta is the inverse temperature. Sweeping it shows the
partition function and free energy tracking their closed forms, and the
density collapsing onto the ground orbital as beta grows.
"""

import numpy as np

from ringdft import Constants, PotentialSpec, centered_grid, oracle, scf, spectral
from ringdft.potentials import Harmonic

g = centered_grid(1024, 20.0)
spec = PotentialSpec(Harmonic())
cfg = scf.SCFConfig(route=scf.SPECTRAL, occupancy=spectral.BOLTZMANN)

# %%
# One diagonalization serves every beta because the field does not depend on
# the density; run_scf is still used so the numbers are what the CLI reports.
print(" beta        Q      exact Q          F      exact F")
for beta in (0.5, 1.0, 2.0, 4.0, 8.0):
    res = scf.run_scf(g, spec, Constants(beta=beta), cfg)
    q_exact = oracle.harmonic_case().analytic_Q(beta)
    print(f"{beta:5.1f} {res.partition_function:8.5f} {q_exact:10.5f} "
          f"{res.free_energy:10.6f} {oracle.harmonic_free_energy(beta):12.6f}")

# %%
# Thermal width against the coth law, and the low-temperature limit.
ground = oracle.harmonic_case().analytic_density(g.nodes)
for beta in (1.0, 5.0, 50.0):
    res = scf.run_scf(g, spec, Constants(beta=beta), cfg)
    n = res.density.values
    var = g.spacing * np.dot(g.nodes**2, n)
    print(f"beta {beta:4.0f}: variance {var:.6f} (exact {oracle.harmonic_thermal_variance(beta):.6f}), "
          f"Linf distance to ground density {np.max(np.abs(n - ground)):.1e}")

# %%
# Fermi-Dirac occupations of the same levels for two fermions: the population
# of the third level shrinks as beta grows.
for beta in (1.0, 5.0, 50.0):
    c = Constants(beta=beta, n_particles=2.0)
    res = scf.run_scf(g, spec, c, scf.SCFConfig(route=scf.SPECTRAL, occupancy=spectral.FINITE_BETA))
    f = res.occupancy.occupations[:3]
    print(f"beta {beta:4.0f}: mu {res.mu:.4f}, f = " + ", ".join(f"{x:.3e}" for x in f))
