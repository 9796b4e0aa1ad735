"""Invariant-based exact solutions of the rotating-wave model.

The operator ``N' = a^dag a + |e><e|`` commutes with the rotating-wave
Hamiltonian, so the dynamics splits into two-dimensional blocks spanned by
``(|e, m>, |g, m+1>)``.  Inside block ``m`` the invariant

    I(t) = -(sin th / sqrt(m+1)) [exp(-i ph) a^dag s- + exp(i ph) a s+] + cos th sz

is a Bloch vector ``n = (-sin th cos ph, -sin th sin ph, cos th)`` obeying
``dn/dt = B x n`` with ``B = (-2 sqrt(m+1) Re g, 2 sqrt(m+1) Im g, Omega - omega0)``.
The vector is integrated in Cartesian form, which avoids the ``cot th`` pole
of the angle equations.

Solutions are ``exp(-i phase) V(t) |spinor>`` where ``V`` diagonalises
``I``.  The phase rate is the energy of the dressed state minus the
connection term ``<V^dag i dV/dt>`` (``sigma * dph/dt * sin^2(th/2)``).  The
connection term vanishes when the Bloch vector is stationary, which is the
case for the default initial angles on resonance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.integrate import solve_ivp

from . import hilbert
from .hilbert import QOperator, QState, Truncation
from .model import build_rwa_hamiltonian
from .squeezing import SqueezedFrame, squeeze_operator

__all__ = [
    "SubspaceLabel",
    "AuxiliaryAngles",
    "SolutionSpec",
    "SolverError",
    "ConstraintViolation",
    "n_prime_operator",
    "solve_auxiliary_angles",
    "invariant_operator",
    "v_transformation",
    "phase_integrand",
    "connection_rate",
    "assemble_rwa_solution",
    "assemble_full_solution",
    "spinor_block",
    "lvn_residual",
    "schrodinger_residual",
]


class SolverError(RuntimeError):
    """The auxiliary-angle integration did not reach its tolerance."""


class ConstraintViolation(ValueError):
    """The squeezing trajectory does not remove the quadratic or
    counter-rotating terms, so the exact-solution formula does not apply."""


@dataclass(frozen=True)
class SubspaceLabel:
    m: int
    sigma: int

    def __post_init__(self):
        if self.m < 0:
            raise ValueError(f"m must be >= 0, got {self.m}")
        if self.sigma not in (1, -1):
            raise ValueError(f"sigma must be +1 or -1, got {self.sigma}")


def n_prime_operator(trunc: Truncation) -> QOperator:
    """``diag(a a^dag, a^dag a)`` in qubit-major order.

    Built as ``a^dag a + |e><e|`` so that the top Fock level keeps its
    untruncated eigenvalue ``n_max + 1``.
    """
    n = np.arange(trunc.fock_dim, dtype=float)
    return QOperator(trunc, np.diag(np.concatenate([n + 1, n])))


def spinor_block(op, m: int, trunc: Truncation) -> np.ndarray:
    """2x2 matrix of ``op`` on ``(|e, m>, |g, m+1>)``."""
    idx = [trunc.index("e", m), trunc.index("g", m + 1)]
    mat = op.matrix if isinstance(op, QOperator) else np.asarray(op)
    return mat[np.ix_(idx, idx)]


def _field_vector(Omega, omega0, g, m):
    c = 2 * math.sqrt(m + 1)
    g = complex(g)
    return np.array([-c * g.real, c * g.imag, float(np.real(Omega)) - float(np.real(omega0))])


def _bloch(theta, phi):
    s = math.sin(theta)
    return np.array([-s * math.cos(phi), -s * math.sin(phi), math.cos(theta)])


def _beta(theta, phi, m):
    return -theta * np.exp(-1j * phi) / (2 * math.sqrt(m + 1))


def _continue_angles(n, theta_prev, phi_prev):
    """Angles for Bloch vector ``n`` chosen so that ``beta`` stays continuous.

    ``(th, ph)``, ``(-th, ph + pi)`` and ``2 pi`` shifts of ``th`` give the
    same invariant but different ``V``; picking the one nearest to the
    previous angles keeps ``V(t)`` continuous through the poles.
    """
    nz = min(1.0, max(-1.0, float(n[2])))
    th0 = math.acos(nz)
    if math.hypot(n[0], n[1]) > 0:
        ph0 = math.atan2(-n[1], -n[0])
    else:
        ph0 = phi_prev
    ref = theta_prev * np.exp(-1j * phi_prev)
    best = None
    for sign, shift in ((1, 0.0), (-1, math.pi)):
        th = sign * th0
        th += 2 * math.pi * round((theta_prev - th) / (2 * math.pi))
        ph = ph0 + shift
        ph += 2 * math.pi * round((phi_prev - ph) / (2 * math.pi))
        cost = abs(th * np.exp(-1j * ph) - ref)
        if best is None or cost < best[0] - 1e-15:
            best = (cost, th, ph)
    return best[1], best[2]


@dataclass(frozen=True, eq=False)
class AuxiliaryAngles:
    """Bloch-vector trajectory of the invariant in block ``m``.

    Holds the grid values plus the dense ODE solution for off-grid times.
    The accumulated integrals ``int Omega``, ``int B.n`` and the connection
    integral ``int dph/dt sin^2(th/2)`` ride along as extra ODE components.
    """

    m: int
    t_grid: np.ndarray
    bloch: np.ndarray
    theta: np.ndarray
    phi: np.ndarray
    integrals: np.ndarray
    Omega: Callable = field(repr=False)
    omega0: Callable = field(repr=False)
    g: Callable = field(repr=False)
    _dense: Callable = field(repr=False, default=None)

    @property
    def t_start(self) -> float:
        return float(self.t_grid[0])

    @property
    def t_end(self) -> float:
        return float(self.t_grid[-1])

    def _check(self, t):
        slack = 1e-12 * max(1.0, abs(self.t_end))
        if not self.t_start - slack <= t <= self.t_end + slack:
            raise ValueError(f"t={t} outside the integrated range [{self.t_start}, {self.t_end}]")

    def _state(self, t):
        self._check(t)
        k = int(np.searchsorted(self.t_grid, t))
        if k < len(self.t_grid) and self.t_grid[k] == t:
            return np.concatenate([self.bloch[k], self.integrals[k]]), k
        return self._dense(t), max(k - 1, 0)

    def bloch_at(self, t) -> np.ndarray:
        y, _ = self._state(t)
        return y[:3] / np.linalg.norm(y[:3])

    def angles_at(self, t) -> tuple[float, float]:
        y, k = self._state(t)
        if self.t_grid[k] == t:
            return float(self.theta[k]), float(self.phi[k])
        return _continue_angles(y[:3] / np.linalg.norm(y[:3]), self.theta[k], self.phi[k])

    def phase(self, t, sigma: int, connection: bool = True) -> float:
        """``int_{t_start}^t`` of the phase rate for eigenvalue ``sigma``."""
        y, _ = self._state(t)
        i_omega, i_b, i_conn = y[3:6]
        out = (self.m + 0.5) * i_omega - 0.5 * sigma * i_b
        if connection:
            out -= sigma * i_conn
        return float(out)

    def invariant(self, t, trunc: Truncation) -> QOperator:
        th, ph = self.angles_at(t)
        return invariant_operator(th, ph, self.m, trunc)

    def v(self, t, trunc: Truncation) -> QOperator:
        th, ph = self.angles_at(t)
        return v_transformation(th, ph, self.m, trunc)


def solve_auxiliary_angles(Omega, omega0, g, m: int, t_grid, theta0: float = math.pi / 2,
                           phi0: float = 0.0, rtol: float = 1e-10, atol: float = 1e-12,
                           norm_tol: float = 1e-9) -> AuxiliaryAngles:
    """Integrate the invariant's Bloch vector for the rotating-wave model.

    ``Omega``, ``omega0`` and ``g`` are callables of time (the squeezed-frame
    coefficients).  Uses the 8th-order Dormand-Prince scheme.  ``theta0 = pi``
    sits on the gauge singularity of ``V`` and is rejected.
    """
    if m < 0:
        raise ValueError(f"m must be >= 0, got {m}")
    t_grid = np.asarray(t_grid, dtype=float)
    if t_grid.ndim != 1 or t_grid.size < 2 or np.any(np.diff(t_grid) <= 0):
        raise ValueError("t_grid must be strictly increasing with at least two points")
    if abs(math.cos(theta0) + 1) < 1e-12:
        raise ValueError("theta0 = pi is a coordinate singularity of V; perturb it")

    def rhs(t, y):
        n = y[:3]
        om = float(np.real(Omega(t)))
        b = _field_vector(om, omega0(t), g(t), m)
        dn = np.cross(b, n)
        conn = (n[0] * dn[1] - n[1] * dn[0]) / (2 * (1 + n[2]))
        return np.concatenate([dn, [om, b @ n, conn]])

    y0 = np.concatenate([_bloch(theta0, phi0), np.zeros(3)])
    sol = solve_ivp(rhs, (t_grid[0], t_grid[-1]), y0, method="DOP853", t_eval=t_grid,
                    dense_output=True, rtol=rtol, atol=atol)
    if not sol.success:
        raise SolverError(f"auxiliary-angle integration failed: {sol.message}")
    y = sol.y.T
    drift = float(np.max(np.abs(np.linalg.norm(y[:, :3], axis=1) - 1)))
    if drift > norm_tol:
        raise SolverError(f"Bloch vector norm drift {drift:.3e} exceeds {norm_tol:.1e}")

    theta = np.empty(len(t_grid))
    phi = np.empty(len(t_grid))
    theta[0], phi[0] = theta0, phi0
    for k in range(1, len(t_grid)):
        theta[k], phi[k] = _continue_angles(y[k, :3], theta[k - 1], phi[k - 1])
    for arr in (theta, phi, t_grid):
        arr.setflags(write=False)
    bloch, integrals = y[:, :3].copy(), y[:, 3:].copy()
    bloch.setflags(write=False)
    integrals.setflags(write=False)
    return AuxiliaryAngles(m=m, t_grid=t_grid, bloch=bloch, theta=theta, phi=phi,
                           integrals=integrals, Omega=Omega, omega0=omega0, g=g,
                           _dense=sol.sol)


def _check_label(m, trunc):
    if m < 0 or m + 1 > trunc.n_max:
        raise ValueError(f"block m={m} needs m+1 <= n_max={trunc.n_max}")


def invariant_operator(theta: float, phi: float, m: int, trunc: Truncation) -> QOperator:
    """The invariant for block ``m`` at angles ``(theta, phi)``."""
    _check_label(m, trunc)
    a, ad = hilbert.annihilation(trunc), hilbert.creation(trunc)
    sp, sm = hilbert.pauli("plus", trunc), hilbert.pauli("minus", trunc)
    coupling = np.exp(-1j * phi) * (ad @ sm) + np.exp(1j * phi) * (a @ sp)
    return (-math.sin(theta) / math.sqrt(m + 1)) * coupling + math.cos(theta) * hilbert.pauli("z", trunc)


def v_transformation(theta: float, phi: float, m: int, trunc: Truncation) -> QOperator:
    """``V = exp(beta a^dag s- - beta* a s+)`` with ``beta = -theta exp(-i phi) / (2 sqrt(m+1))``."""
    _check_label(m, trunc)
    beta = _beta(theta, phi, m)
    a, ad = hilbert.annihilation(trunc), hilbert.creation(trunc)
    sp, sm = hilbert.pauli("plus", trunc), hilbert.pauli("minus", trunc)
    return hilbert.expm(beta * (ad @ sm) - np.conj(beta) * (a @ sp))


def phase_integrand(t, angles: AuxiliaryAngles, Omega, omega0, g, label: SubspaceLabel) -> float:
    """Energy of the dressed state,

    ``(m + 1/2) Omega - (sigma/2) {sqrt(m+1) [g e^{i ph} + c.c.] sin th + (Omega - omega0) cos th}``.

    This omits the connection term; see :func:`connection_rate`.
    """
    th, ph = angles.angles_at(t)
    om, om0, gv = float(np.real(Omega(t))), float(np.real(omega0(t))), complex(g(t))
    m = label.m
    coupling = 2 * (gv * np.exp(1j * ph)).real
    return float((m + 0.5) * om - 0.5 * label.sigma * (
        math.sqrt(m + 1) * coupling * math.sin(th) + (om - om0) * math.cos(th)))


def connection_rate(t, angles: AuxiliaryAngles, Omega, omega0, g, label: SubspaceLabel) -> float:
    """``<sigma| V^dag i dV/dt |sigma> = sigma * dph/dt * sin^2(th/2)``."""
    n = angles.bloch_at(t)
    dn = np.cross(_field_vector(Omega(t), omega0(t), g(t), label.m), n)
    return float(label.sigma * (n[0] * dn[1] - n[1] * dn[0]) / (2 * (1 + n[2])))


@dataclass(frozen=True, eq=False)
class SolutionSpec:
    """One exact solution branch: block ``m``, invariant eigenvalue ``sigma``.

    With ``connection=False`` the phase uses the dressed-state energy alone,
    which is exact only while the Bloch vector is stationary.
    """

    label: SubspaceLabel
    angles: AuxiliaryAngles
    connection: bool = True

    def __post_init__(self):
        if self.label.m != self.angles.m:
            raise ValueError("label and angles refer to different blocks")

    def phase(self, t) -> float:
        return self.angles.phase(t, self.label.sigma, self.connection)


def _spinor(label: SubspaceLabel, trunc: Truncation) -> QState:
    upper, lower = hilbert.number_spinor(label.m, trunc)
    return upper if label.sigma == 1 else lower


def assemble_rwa_solution(spec: SolutionSpec, t: float, trunc: Truncation) -> QState:
    """``exp(-i phase(t)) V(t) |spinor>`` solving the rotating-wave model."""
    psi = spec.angles.v(t, trunc) @ _spinor(spec.label, trunc)
    return psi * np.exp(-1j * spec.phase(t))


def assemble_full_solution(spec: SolutionSpec, frame: SqueezedFrame, t: float,
                           trunc: Truncation, tol: float = 1e-8) -> QState:
    """Exact non-RWA state ``exp(-i [int C + phase]) S(zeta(t)) V(t) |spinor>``.

    Refuses (:class:`ConstraintViolation`) when the squeezing trajectory
    leaves ``|A|`` or ``|Lambda|`` above ``tol`` at ``t``.
    """
    tc = frame.transformed(t)
    if abs(tc.A) > tol or abs(tc.Lambda) > tol:
        raise ConstraintViolation(
            f"constraints violated at t={t}: |A|={abs(tc.A):.3e}, |Lambda|={abs(tc.Lambda):.3e} "
            f"(tol {tol:.1e})")
    psi = spec.angles.v(t, trunc) @ _spinor(spec.label, trunc)
    psi = squeeze_operator(frame.trajectory.zeta(t), trunc) @ psi
    total = frame.C_integral(spec.angles.t_start, t) + spec.phase(t)
    return psi * np.exp(-1j * total)


def lvn_residual(angles: AuxiliaryAngles, t: float, trunc: Truncation, h: float = 1e-5) -> float:
    """Spectral norm on block ``m`` of ``dI/dt + i [H_rwa, I]``.

    ``dI/dt`` is a central difference of the invariant built from the
    solved angles; ``H_rwa`` is rebuilt from the coefficient callables.
    """
    m = angles.m
    dI = (spinor_block(angles.invariant(t + h, trunc), m, trunc)
          - spinor_block(angles.invariant(t - h, trunc), m, trunc)) / (2 * h)
    H = spinor_block(build_rwa_hamiltonian(angles.Omega, angles.omega0, angles.g, t, trunc), m, trunc)
    I = spinor_block(angles.invariant(t, trunc), m, trunc)
    return float(np.linalg.norm(dI + 1j * (H @ I - I @ H), 2))


def schrodinger_residual(psi_fn: Callable[[float], QState], H_fn: Callable[[float], QOperator],
                         t: float, h: float = 1e-3) -> float:
    """``|| i dpsi/dt - H psi ||`` with a fourth-order central difference."""
    v = {k: psi_fn(t + k * h).vector for k in (-2, -1, 1, 2)}
    dpsi = (-v[2] + 8 * v[1] - 8 * v[-1] + v[-2]) / (12 * h)
    return float(np.linalg.norm(1j * dpsi - H_fn(t).matrix @ psi_fn(t).vector))
