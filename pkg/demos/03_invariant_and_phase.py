# %% [markdown]
# # Invariant and phases in the rotating-wave frame
#
# Each block {|e,m>, |g,m+1>} carries a 2x2 problem.  The invariant is a unit
# Bloch vector n(t) obeying dn/dt = B x n; its eigenstates, dressed with the
# right phase, solve the Schrodinger equation.

# %%
import numpy as np

from sqjc import SolutionSpec, SubspaceLabel, Truncation, assemble_rwa_solution, build_rwa_hamiltonian
from sqjc import Harmonic, solve_auxiliary_angles
from sqjc.invariant import lvn_residual, schrodinger_residual

Omega = Harmonic(0.2, 0.9, offset=1.1)
omega0 = lambda t: 1.0  # noqa: E731
g = Harmonic(0.15, 0.5, offset=0.25 + 0.1j)
tr = Truncation(8)
t = np.linspace(0, 8, 81)
ang = solve_auxiliary_angles(Omega, omega0, g, 1, t, theta0=1.2, phi0=-0.4)

print("unit norm drift:", np.abs(np.linalg.norm(ang.bloch, axis=1) - 1).max())
print("LvN residual:", max(lvn_residual(ang, s, tr) for s in t[1:-1:5]))

# %% [markdown]
# The phase has two parts: the dressed-state energy and a geometric
# connection term.  Dropping the second one breaks the solution as soon as
# the Bloch vector moves.

# %%
H = lambda s: build_rwa_hamiltonian(Omega, omega0, g, s, tr)  # noqa: E731
for connection in (True, False):
    spec = SolutionSpec(SubspaceLabel(1, 1), ang, connection=connection)
    psi = lambda s: assemble_rwa_solution(spec, s, tr)  # noqa: E731
    worst = max(schrodinger_residual(psi, H, s) for s in (2.0, 4.0, 6.0))
    print(f"connection={connection}: Schrodinger residual {worst:.2e}")
