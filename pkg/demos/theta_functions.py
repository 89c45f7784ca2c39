"""
Level-K theta functions: certified truncation and modular behaviour
===================================================================

Evaluates the level-K theta family on the torus C/(Z + tau Z), checks
the two quasi-periodicity laws, and exercises the Dedekind-eta
normalization that turns theta quotients into characters.
"""

import numpy as np

from nctorus import (
    ThetaSpec,
    TruncationPolicy,
    character,
    dedekind_eta,
    orthogonality_residual,
    s_transform_residual,
    t_transform_residual,
    theta,
    truncation_bound,
)

tau = 0.25 + 1.3j
policy = TruncationPolicy(epsilon=1e-12)

# The series is summed over a certified window: n_max grows with the
# requested accuracy, the level, and how far z wanders off the real axis.
for level in (1, 3, 12):
    n_max = truncation_bound(level, 0.4 + 0.2j, tau, 1e-12)
    print("level %2d: n_max = %d terms for eps = 1e-12" % (level, n_max))

# Quasi-periodicity: z -> z+1 leaves the value alone, z -> z+tau costs
# an explicit exponential factor.
spec = ThetaSpec(level=3, residue=1)
z = np.array([0.11 + 0.07j, 0.73 + 0.52j, -0.2 + 0.9j])
base = theta(spec, z, tau, policy)
shift1 = theta(spec, z + 1.0, tau, policy)
factor = np.exp(-1j * np.pi * 3 * tau - 2j * np.pi * 3 * z)
shift2 = theta(spec, z + tau, tau, policy)
print("z+1 residual  :", float(np.max(np.abs(shift1 - base))))
# the z+tau factor is exponentially large, so compare relatively
print("z+tau residual:",
      float(np.max(np.abs(shift2 - factor * base) / np.abs(factor * base))))

# Eta never vanishes on the upper half-plane and carries weight 1/2.
print("eta(i)       =", dedekind_eta(1j))
print("eta(tau)     =", dedekind_eta(tau))

# Characters are theta/eta; the modular generators permute them up to
# the phases measured here (smaller is better, both should be ~1e-13).
# The clean T-law needs an even level, and odd levels are refused:
even = ThetaSpec(level=4, residue=1)
print("T-transform residual:", t_transform_residual(even, 0.3 + 0.1j, tau))
print("S-transform residual:", s_transform_residual(even, 0.3 + 0.1j, tau))
print("character value      :", character(even, 0.3 + 0.1j, tau))
try:
    t_transform_residual(spec, 0.3 + 0.1j, tau)
except Exception as exc:
    print("odd level refused:", exc)

# The level-K family is orthonormal in the residue index.
worst = max(orthogonality_residual(level) for level in range(1, 13))
print("orthogonality residual, levels 1..12:", worst)
np.testing.assert_array_less(worst, 1e-12)
