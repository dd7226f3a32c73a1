"""
Two routes to one thermal density
=================================

A particle in a harmonic trap at inverse temperature beta. The density is
computed twice: by marching the contour propagator through beta and closing
the ring, and by diagonalizing the Kohn-Sham operator and weighting its
levels. Then a Hartree term is switched on and the self-consistent loop does
real work.
"""

import numpy as np

from ringdft import Constants, PotentialSpec, centered_grid, oracle, scf, spectral
from ringdft.beta_propagator import density_from_propagator, partition_function, propagate
from ringdft.potentials import Harmonic, Hartree, static_field

g = centered_grid(512, 20.0)
c = Constants(beta=1.0)
w = static_field(g, PotentialSpec(Harmonic()))

# %%
# Diffusion route: 2000 Crank-Nicolson steps in beta, then take the diagonal.
p = propagate(g, w, c, 2000)
n_diff = density_from_propagator(p, c)
print(f"Q diffusion  {partition_function(p):.6f}   exact {oracle.harmonic_case().analytic_Q(1.0):.6f}")

# %%
# Spectral route with the same closed-contour (Boltzmann) statistics.
n_spec, q_spec, s, occ = scf.spectral_density(g, w, c, spectral.BOLTZMANN)
print(f"Q spectral   {q_spec:.6f}")
print(f"density rel Linf difference {scf.relative_linf(n_diff.values, n_spec.values):.2e}")

# %%
# The thermal density of an oscillator is Gaussian with a known variance.
var = g.spacing * np.dot(g.nodes**2, n_spec.values)
print(f"variance {var:.6f}   exact {oracle.harmonic_thermal_variance(1.0):.6f}")

# %%
# Free energy at self-consistency. With no density dependence the loop
# finishes in one undamped update.
res = scf.run_scf(g, PotentialSpec(Harmonic()), c, scf.SCFConfig(route=scf.BOTH))
print(f"F {res.free_energy:.6f}   exact {oracle.harmonic_free_energy(1.0):.6f}   "
      f"iterations {res.iterations}")

# %%
# Two particles with a softened Hartree repulsion, cold enough that only the
# lowest orbital is filled. Linear mixing at 0.3.
hartree = PotentialSpec(Harmonic(), Hartree(0.5, 1.0))
cold = Constants(beta=10.0, n_particles=2.0)
cfg = scf.SCFConfig(0.3, 200, 1e-8, scf.SPECTRAL, spectral.ZERO_T, n_eigs=10)
res = scf.run_scf(g, hartree, cold, cfg)
n = res.density.values
print(f"Hartree case: converged {res.converged} in {res.iterations} iterations, "
      f"F {res.free_energy:.10f}, parity defect {np.max(np.abs(n - n[::-1])):.1e}")
print("residuals every 10 iterations:", " ".join(f"{r:.1e}" for r in res.residual_history[::10]))
