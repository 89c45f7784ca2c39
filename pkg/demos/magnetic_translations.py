import cmath
import math

import numpy as np

from nctorus import Flux, gaussian_field, lattice_displacement, displacement_apply
from nctorus import displacement_cocycle_residual, sine_bracket_residual
from nctorus import dual_commutation_residual, plaquette_phase
from nctorus.fields import plane_sample_grid

# Magnetic translations on the plane: displacements along the crystal
# lattice commute only up to the flux phase through the enclosed cell.
flux = Flux(2, 3)          # kappa = 2/3, so the plaquette phase is e^{4 pi i/3}
tau = 0.3 + 1.1j

f = gaussian_field(tau)
d1 = lattice_displacement(flux, tau, (1, 0))
d2 = lattice_displacement(flux, tau, (0, 1))
grid = plane_sample_grid(tau)

lhs = displacement_apply(d1, displacement_apply(d2, f)).evaluate(*grid)
rhs = displacement_apply(d2, displacement_apply(d1, f)).evaluate(*grid)
ratio = lhs / rhs
print("measured commutation phase:", complex(ratio.flat[0]))
print("expected e^{2 pi i kappa}  :", cmath.exp(2j * math.pi * flux.kappa))
print("phase spread over the grid:", float(np.max(np.abs(ratio - ratio.flat[0]))))

# The plaquette probe packages the same loop measurement.
phase, spread = plaquette_phase(flux, tau)
print("plaquette phase %s, spread %.3e" % (phase, spread))

# Composition of two displacements is a third, up to a half-cell phase;
# commutators close with sine coefficients.
print("cocycle residual:", displacement_cocycle_residual((1, 0), (0, 1), flux, tau))
print("sine bracket residual:", sine_bracket_residual((1, 1), (2, -1), flux, tau))

# Dual-lattice displacements commute with every crystal displacement --
# that is what makes them usable as a second, independent symmetry.
worst = 0.0
for m in ((1, 0), (0, 1), (1, 1)):
    for n in ((1, 0), (0, 1), (-1, 2)):
        worst = max(worst, dual_commutation_residual(m, n, flux, tau))
print("worst crystal/dual commutator:", worst)
