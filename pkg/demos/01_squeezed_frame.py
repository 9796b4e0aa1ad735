# %% [markdown]
# # The squeezed frame
#
# A squeeze S(zeta) maps a -> a cosh u - a^dag e^{i chi} sinh u.  Conjugating
# the Jaynes-Cummings Hamiltonian with a time-dependent squeeze gives a new
# Hamiltonian with the same operator content.  Its coefficients have closed
# forms, and we check them here against brute-force matrix exponentials.

# %%
import numpy as np

from sqjc import (CoefficientSet, Harmonic, SqueezeTrajectory, Truncation, build_transformed_hamiltonian,
                  numeric_transformed_hamiltonian, squeeze_operator, transform_coefficients)
from sqjc import hilbert

# %% [markdown]
# Bogoliubov check on the interior of a large Fock space.

# %%
tr = Truncation(120)
zeta = 0.6 * np.exp(0.4j)
S = squeeze_operator(zeta, tr)
a = hilbert.annihilation(tr)
lhs = (S.dag() @ a @ S).matrix
rhs = (np.cosh(abs(zeta)) * a - np.exp(1j * np.angle(zeta)) * np.sinh(abs(zeta)) * a.dag()).matrix
block = slice(tr.index("e", 0), tr.index("e", 20) + 1)
print("Bogoliubov deviation on n <= 20:", np.abs(lhs - rhs)[block, block].max())

# %% [markdown]
# A generic trajectory (both modulus and phase move) and generic schedules.

# %%
coeffs = CoefficientSet(omega=Harmonic(0.2, 1.1, offset=1.0), omega0=0.9,
                        gamma=Harmonic(0.1 + 0.05j, 0.6, offset=0.2), lam=0.03j)
traj = SqueezeTrajectory(Harmonic(0.2, 0.8, offset=0.5), Harmonic(0.7, 1.3, offset=0.2), mode="general")
t = 1.7
tc = transform_coefficients(coeffs, traj.zeta(t), traj.zeta_dot(t), t)
print(tc)

tr = Truncation(64)
closed = build_transformed_hamiltonian(tc, 0.9, tr)
numeric = numeric_transformed_hamiltonian(coeffs, traj.zeta, t, 1e-5, tr)
print("closed form vs oracle:", hilbert.interior_deviation(closed, numeric, tr))

# %% [markdown]
# The alternative quadratic coefficient (the grouping without zeta*) is
# decisively rejected by the same comparison.

# %%
wrong = transform_coefficients(coeffs, traj.zeta(t), traj.zeta_dot(t), t, a_form="printed")
print("alternative form vs oracle:",
      hilbert.interior_deviation(build_transformed_hamiltonian(wrong, 0.9, tr), numeric, tr))
