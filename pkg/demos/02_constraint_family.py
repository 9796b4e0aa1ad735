# %% [markdown]
# # Choosing the squeeze so the frame is Jaynes-Cummings again
#
# Holding |zeta| fixed and letting its phase rotate at -2 omega removes the
# a^2 term and the energy offset.  The counter-rotating coupling lambda that
# this frame can absorb is then fixed by gamma.

# %%
import math

import numpy as np

from sqjc import CoefficientSet, Constant, Harmonic, SqueezedFrame, solve_constraints_forward, verify_constraints
from sqjc.squeezing import InfeasibleConstraintError

omega = Harmonic(0.3, 0.7, offset=1.0)
gamma = Harmonic(0.1 + 0.05j, 1.3, offset=0.2)
u0 = math.atanh(0.3)
traj, lam = solve_constraints_forward(omega, gamma, u0, chi0=0.4)
frame = SqueezedFrame(CoefficientSet(omega, 1.0, gamma, lam), traj)

# %%
t = np.linspace(0, 10, 1000)
res = np.array([[abs(tc.A), abs(tc.Lambda), abs(tc.C), abs(tc.Omega - omega(s))]
                for s, tc in ((s, frame.transformed(s)) for s in t)])
print("max |A|, |Lambda|, |C|, |Omega - omega|:", res.max(axis=0))
print("|lambda / gamma| on the grid:", np.unique(np.round(np.abs(lam(t) / gamma(t)), 12)))

# %% [markdown]
# Going the other way: start from a given lambda and ask whether some
# squeeze absorbs it.  A lambda that does not rotate at the required rate
# leaves an a^2 term behind.  A lambda larger than gamma cannot be absorbed.

# %%
grid = np.linspace(0, 10, 501)
print(verify_constraints(CoefficientSet(1.0, 1.0, 0.2, 0.06), grid).summary())
try:
    verify_constraints(CoefficientSet(1.0, 1.0, 0.2, 0.25), grid)
except InfeasibleConstraintError as exc:
    print("infeasible:", exc)

# %% [markdown]
# With omega = 0 no rotation is needed, so a constant lambda is compatible.

# %%
print(verify_constraints(CoefficientSet(0.0, 0.0, Constant(0.2), 0.06), grid).summary())
