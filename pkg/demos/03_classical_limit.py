"""
Shrinking hbar: the classical limit
===================================

At fixed beta and field the contours shrink as hbar goes to zero, the thermal
coordinate stops mattering, and the quantum density approaches the Boltzmann
density exp(-beta w). The L1 distance between the two measures how far away
the classical limit still is.
"""

from ringdft import Constants, PotentialSpec, centered_grid, oracle
from ringdft.potentials import Harmonic, Hartree
from ringdft.scf import DIFFUSION, SCFConfig

g = centered_grid(512, 12.0)
hbars = [1.0, 0.5, 0.25, 0.125]
cfg = SCFConfig(route=DIFFUSION, beta_steps=1000)

# %%
# Harmonic trap. The distance falls roughly fourfold per halving of hbar,
# the leading hbar^2 correction of the Wigner-Kirkwood expansion.
d = oracle.cylinder_condition_check(g, PotentialSpec(Harmonic()), Constants(), hbars, cfg)
for h, x in zip(hbars, d):
    print(f"harmonic  hbar {h:6.3f}  L1 {x:.3e}")

# %%
# The same with a Hartree term: both the quantum and the classical density are
# iterated to their own self-consistent fixed points before comparing. Every
# iteration is a full beta march, so a coarser grid keeps this quick.
coarse = centered_grid(160, 12.0)
spec = PotentialSpec(Harmonic(), Hartree(0.5, 1.0))
d = oracle.cylinder_condition_check(coarse, spec, Constants(n_particles=2.0), hbars,
                                    SCFConfig(route=DIFFUSION, beta_steps=400, residual_tolerance=1e-8))
for h, x in zip(hbars, d):
    print(f"hartree   hbar {h:6.3f}  L1 {x:.3e}")
