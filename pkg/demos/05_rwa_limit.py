# %% [markdown]
# # No squeezing: the rotating-wave limit
#
# With u0 = 0 the squeeze is the identity, lambda vanishes and the full
# solution must coincide with the rotating-wave one.  Superposing the two
# invariant branches recovers Rabi flopping at 2 sqrt(m+1) |g|.

# %%
import numpy as np

from sqjc import (CoefficientSet, SolutionSpec, SqueezedFrame, SubspaceLabel, Truncation, assemble_full_solution,
                  assemble_rwa_solution, solve_auxiliary_angles, solve_constraints_forward)
from sqjc import hilbert

traj, lam = solve_constraints_forward(1.0, 0.2, 0.0)
frame = SqueezedFrame(CoefficientSet(1.0, 1.0, 0.2, lam), traj)
tr = Truncation(12)
t = np.linspace(0, 20, 201)
ang = solve_auxiliary_angles(frame.Omega, frame.omega0, frame.g, 1, t)
spec = SolutionSpec(SubspaceLabel(1, 1), ang)
same = all(np.array_equal(assemble_full_solution(spec, frame, s, tr).vector,
                          assemble_rwa_solution(spec, s, tr).vector) for s in t)
print("identical to the rotating-wave solution:", same)

# %%
m, g = 1, 0.2
up, _ = hilbert.number_spinor(m, tr)
specs = [SolutionSpec(SubspaceLabel(m, s), ang) for s in (1, -1)]
c = [np.conj(hilbert.inner(assemble_rwa_solution(sp, 0.0, tr), up)) for sp in specs]
pe = np.array([abs(hilbert.inner(up, c[0] * assemble_rwa_solution(specs[0], s, tr)
                                 + c[1] * assemble_rwa_solution(specs[1], s, tr))) ** 2 for s in t])
rabi = 2 * np.sqrt(m + 1) * g
print("max |P_e - cos^2(rabi t / 2)|:", np.abs(pe - np.cos(rabi * t / 2) ** 2).max())
