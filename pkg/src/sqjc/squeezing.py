"""Squeezing transformation of the non-RWA model.

Conventions: ``S(zeta) = exp(zeta* a^2 / 2 - zeta a^dag^2 / 2)`` with
``zeta = u exp(i chi)``, so ``S^dag a S = a cosh u - exp(i chi) a^dag sinh u``.
The squeezed-frame Hamiltonian is ``S^dag H S - i S^dag dS/dt``.

Removing the ``a^2`` terms (``A = 0``) and the counter-rotating coupling
(``Lambda = 0``) fixes the squeezing trajectory.  Writing ``A`` in polar form,

    A = exp(-i chi) * [-(sinh 2u / 2) (omega + chi'/2) - i u'/2],

so ``A = 0`` forces ``u' = 0`` and ``chi' = -2 omega``, while ``Lambda = 0``
is the algebraic relation ``lam = gamma exp(-i chi) tanh u``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path
from typing import Callable

import numpy as np
from scipy.integrate import quad

from . import hilbert
from .hilbert import QOperator, Truncation
from .model import TransformedCoefficients
from .schedules import CoefficientSet, Constant, FunctionSchedule, Schedule, Tabulated, as_schedule

__all__ = [
    "MAX_SQUEEZE",
    "TruncationWarning",
    "InfeasibleConstraintError",
    "SqueezeTrajectory",
    "SqueezedFrame",
    "ConstraintReport",
    "squeeze_operator",
    "transform_coefficients",
    "numeric_transformed_hamiltonian",
    "solve_constraints_forward",
    "verify_constraints",
]

MAX_SQUEEZE = 3.0
# below this argument the removable singularities switch to Taylor series
_SERIES_CUTOFF = 1e-4
# sinh(x) - x cancels catastrophically well above 1e-4; the 4-term series
# is accurate to round-off up to 0.1
_CUBE_SERIES_CUTOFF = 0.1


class TruncationWarning(UserWarning):
    """The Fock cutoff is too small for the requested squeezing."""


class InfeasibleConstraintError(ValueError):
    """No squeezing parameter can remove the counter-rotating term."""


def _sinhc(x: float) -> float:
    """sinh(x)/x"""
    if abs(x) < _SERIES_CUTOFF:
        x2 = x * x
        return 1 + x2 / 6 + x2 * x2 / 120 + x2 ** 3 / 5040
    return math.sinh(x) / x


def _coshm1_sq(x: float) -> float:
    """(cosh(x) - 1)/x**2"""
    if abs(x) < _SERIES_CUTOFF:
        x2 = x * x
        return 0.5 + x2 / 24 + x2 * x2 / 720 + x2 ** 3 / 40320
    return 2 * math.sinh(x / 2) ** 2 / (x * x)


def _sinhm_cube(x: float) -> float:
    """(sinh(x) - x)/x**3"""
    if abs(x) < _CUBE_SERIES_CUTOFF:
        x2 = x * x
        return 1 / 6 + x2 / 120 + x2 * x2 / 5040 + x2 ** 3 / 362880
    return (math.sinh(x) - x) / x ** 3


@lru_cache(maxsize=16)
def _fock_generator_parts(n_max: int) -> tuple[np.ndarray, np.ndarray]:
    a = hilbert.annihilation(Truncation(n_max), embed=False)
    a2 = a @ a
    return a2, a2.conj().T


def _squeeze_fock(zeta: complex, n_max: int) -> np.ndarray:
    a2, ad2 = _fock_generator_parts(n_max)
    return hilbert.expm(0.5 * (np.conj(zeta) * a2 - zeta * ad2))


def squeeze_operator(zeta: complex, trunc: Truncation) -> QOperator:
    """``S(zeta)`` on the truncated space (identity on the qubit).

    Only ``|zeta| <= MAX_SQUEEZE`` is accepted; beyond that the truncation
    error dominates at any practical cutoff.
    """
    if abs(zeta) > MAX_SQUEEZE:
        raise ValueError(f"|zeta|={abs(zeta):.3g} exceeds the supported range {MAX_SQUEEZE}")
    return hilbert.embed_fock(_squeeze_fock(complex(zeta), trunc.n_max), trunc)


@dataclass(frozen=True, eq=False)
class SqueezeTrajectory:
    """Squeezing parameter ``zeta(t) = u(t) exp(i chi(t))``.

    ``modulus`` and ``phase`` are real schedules for ``u`` and ``chi``;
    ``mode`` records how the trajectory was obtained.
    """

    modulus: Schedule
    phase: Schedule
    mode: str = "general"

    def u(self, t):
        return np.real(self.modulus(t))

    def chi(self, t):
        return np.real(self.phase(t))

    def zeta(self, t) -> complex:
        return self.u(t) * np.exp(1j * self.chi(t))

    def zeta_dot(self, t) -> complex:
        u = self.u(t)
        du = np.real(self.modulus.derivative(t))
        dchi = np.real(self.phase.derivative(t))
        return (du + 1j * u * dchi) * np.exp(1j * self.chi(t))

    @classmethod
    def forward(cls, omega: Schedule, u0: float, chi0: float = 0.0, t0: float = 0.0):
        """Constant modulus ``u0`` and ``chi(t) = chi0 - 2 * int_{t0}^t omega``."""
        if u0 < 0:
            raise ValueError(f"u0 must be >= 0, got {u0}")
        omega = as_schedule(omega)

        def chi(t):
            if np.ndim(t):
                return np.array([chi(s) for s in np.ravel(t)]).reshape(np.shape(t))
            return chi0 - 2 * np.real(omega.integral(t0, t))

        phase = FunctionSchedule(chi, lambda t: -2 * np.real(omega(t)), real=True, label="chi")
        return cls(Constant(float(u0)), phase, mode="forward")

    @classmethod
    def tabulated(cls, t_grid, u_values, chi_values):
        return cls(Tabulated(t_grid, u_values), Tabulated(t_grid, chi_values), mode="verify")

    @classmethod
    def constant(cls, zeta: complex = 0.0):
        return cls(Constant(abs(zeta)), Constant(float(np.angle(zeta))), mode="constant")


def transform_coefficients(coeffs: CoefficientSet, zeta: complex, zeta_dot: complex, t: float,
                           a_form: str = "corrected") -> TransformedCoefficients:
    """Closed-form squeezed-frame coefficients ``(Omega, C, A, g, Lambda)``.

    ``a_form='printed'`` reproduces an ``A`` expression whose second term lacks
    the ``zeta*`` factor; it exists only so tests can check that the matrix
    oracle rejects it.
    """
    omega, _, gamma, lam = coeffs.at(t)
    zeta, zeta_dot = complex(zeta), complex(zeta_dot)
    zc = zeta.conjugate()
    u = abs(zeta)
    r = 2 * u
    # i * (zeta' zeta* - zeta'* zeta), always real
    w = -2 * (zeta_dot * zc).imag
    f2 = _coshm1_sq(r)
    cosh_r_m1 = 2 * math.sinh(u) ** 2

    Omega = omega * math.cosh(r) - w * f2
    C = 0.5 * omega * cosh_r_m1 - 0.5 * w * f2
    if a_form == "corrected":
        A = -omega * zc * _sinhc(r) + w * zc * _sinhm_cube(r) - 0.5j * zeta_dot.conjugate()
    elif a_form == "printed":
        ratio = w / (r * r) if r > 0 else 0.0
        A = zc * _sinhc(r) * (ratio - omega) - ratio - 0.5j * zeta_dot.conjugate()
    else:
        raise ValueError(f"unknown a_form {a_form!r}")
    g = gamma * math.cosh(u) - lam * zeta * _sinhc(u)
    Lambda = lam * math.cosh(u) - gamma * zc * _sinhc(u)
    return TransformedCoefficients(Omega=float(Omega), C=float(C), A=complex(A), g=complex(g),
                                   Lambda=complex(Lambda))


def _oracle_padding(n_interior: int, n_max: int, u_max: float) -> int:
    # squeezing spreads |n> over roughly n * exp(2u) photons
    need = 2.0 * (n_interior + 10) * math.exp(2 * u_max)
    return max(n_max, 16 * math.ceil(need / 16))


def numeric_transformed_hamiltonian(coeffs: CoefficientSet, zeta_fn: Callable[[float], complex],
                                    t: float, dt: float, trunc: Truncation,
                                    n_interior: int | None = None) -> QOperator:
    """Matrix oracle for the squeezed-frame Hamiltonian.

    Computes ``S^dag H S - i S^dag dS/dt`` with ``dS/dt`` from a five-point
    (fourth-order) central difference of matrix exponentials.  The
    three-point stencil leaves an ``O(dt^2)`` error that the ``a^2`` matrix
    elements amplify by roughly ``n^2`` on the interior block.  The Fock space is padded internally
    so that entries with photon index ``<= n_interior`` (default
    ``n_max // 2``) are free of truncation artefacts; entries outside that
    block are not certified.
    """
    if not 1e-7 <= dt <= 1e-3:
        raise ValueError(f"dt={dt} outside the supported range [1e-7, 1e-3]")
    if n_interior is None:
        n_interior = trunc.n_max // 2
    zetas = [complex(zeta_fn(t + k * dt)) for k in (-2, -1, 0, 1, 2)]
    u_max = max(abs(z) for z in zetas)
    if u_max > MAX_SQUEEZE:
        raise ValueError(f"|zeta|={u_max:.3g} exceeds the supported range {MAX_SQUEEZE}")
    pad = _oracle_padding(n_interior, trunc.n_max, u_max)
    if pad > 2048:
        warnings.warn(f"oracle padding capped at 2048 (wanted {pad})", TruncationWarning,
                      stacklevel=2)
        pad = 2048

    s_m2, s_m1, s_0, s_p1, s_p2 = (_squeeze_fock(z, pad) for z in zetas)
    edge = np.max(np.abs(s_0[-4:, :n_interior + 1]))
    if edge > 1e-8:
        warnings.warn(f"squeezed interior states reach the Fock cutoff (edge amplitude {edge:.2e})",
                      TruncationWarning, stacklevel=2)

    a = hilbert.annihilation(Truncation(pad), embed=False)
    ad = a.conj().T
    s_dag = s_0.conj().T
    keep = slice(0, trunc.fock_dim)
    t_a = (s_dag @ a @ s_0)[keep, keep]
    t_ad = (s_dag @ ad @ s_0)[keep, keep]
    t_n = (s_dag @ (ad @ a) @ s_0)[keep, keep]
    s_dot = (8 * (s_p1 - s_m1) - (s_p2 - s_m2)) / (12 * dt)
    drift = (-1j * s_dag @ s_dot)[keep, keep]

    omega, omega0, gamma, lam = coeffs.at(t)
    q = hilbert._QUBIT
    h = (np.kron(q["i"], omega * t_n + drift)
         + 0.5 * omega0 * np.kron(q["z"], np.eye(trunc.fock_dim))
         + np.kron(q["minus"], gamma * t_ad + lam * t_a)
         + np.kron(q["plus"], np.conj(gamma) * t_a + np.conj(lam) * t_ad))
    return QOperator(trunc, h)


@dataclass(frozen=True, eq=False)
class SqueezedFrame:
    """The model seen through a squeezing trajectory.

    Gives the squeezed-frame coefficients as functions of time; when the
    trajectory satisfies both constraints, ``Omega``, ``omega0`` and ``g``
    define the rotating-wave model solved by the invariant machinery.
    """

    coeffs: CoefficientSet
    trajectory: SqueezeTrajectory
    a_form: str = "corrected"

    def transformed(self, t) -> TransformedCoefficients:
        tr = self.trajectory
        return transform_coefficients(self.coeffs, tr.zeta(t), tr.zeta_dot(t), t, self.a_form)

    def Omega(self, t) -> float:
        return self.transformed(t).Omega

    def omega0(self, t) -> float:
        return float(np.real(self.coeffs.omega0(t)))

    def g(self, t) -> complex:
        return self.transformed(t).g

    def C(self, t) -> float:
        return self.transformed(t).C

    def C_integral(self, a: float, b: float) -> float:
        if a == b:
            return 0.0
        return quad(self.C, a, b, epsabs=1e-14, epsrel=1e-12, limit=200)[0]


def solve_constraints_forward(omega, gamma, u0: float, chi0: float = 0.0, t0: float = 0.0):
    """Choose ``zeta`` first, then derive the counter-rotating coupling.

    Returns ``(trajectory, lam)`` with ``u = u0`` constant,
    ``chi(t) = chi0 - 2 int omega`` and
    ``lam(t) = gamma(t) exp(-i chi(t)) tanh(u0)``.  Together these make ``A``
    and ``Lambda`` vanish identically.
    """
    gamma = as_schedule(gamma)
    omega = as_schedule(omega)
    traj = SqueezeTrajectory.forward(omega, u0, chi0, t0)
    th = math.tanh(u0)

    def lam(t):
        return th * gamma(t) * np.exp(-1j * traj.chi(t))

    def lam_dot(t):
        return th * np.exp(-1j * traj.chi(t)) * (gamma.derivative(t) + 2j * np.real(omega(t)) * gamma(t))

    return traj, FunctionSchedule(lam, lam_dot, real=False, label="lambda_forward")


@dataclass(frozen=True, eq=False)
class ConstraintReport:
    """Pointwise residuals of the two constraints along a time grid."""

    t: np.ndarray
    abs_A: np.ndarray
    abs_Lambda: np.ndarray
    u: np.ndarray
    chi: np.ndarray
    chi_dot_plus_2omega: np.ndarray

    @property
    def max_abs_A(self) -> float:
        return float(np.max(self.abs_A))

    @property
    def max_abs_Lambda(self) -> float:
        return float(np.max(self.abs_Lambda))

    @property
    def u_spread(self) -> float:
        return float(np.ptp(self.u))

    @property
    def max_phase_mismatch(self) -> float:
        return float(np.max(np.abs(self.chi_dot_plus_2omega)))

    def passed(self, tol: float = 1e-8) -> bool:
        return self.max_abs_A < tol and self.max_abs_Lambda < tol

    def summary(self) -> str:
        return (f"max|A|={self.max_abs_A:.3e} max|Lambda|={self.max_abs_Lambda:.3e} "
                f"u spread={self.u_spread:.3e} max|chi'+2omega|={self.max_phase_mismatch:.3e}")

    def to_csv(self, path) -> Path:
        from .io import write_csv

        cols = {"t": self.t, "abs_A": self.abs_A, "abs_Lambda": self.abs_Lambda, "u": self.u,
                "chi": self.chi, "chi_dot_plus_2omega": self.chi_dot_plus_2omega}
        return write_csv(path, cols)


def verify_constraints(coeffs: CoefficientSet, t_grid) -> ConstraintReport:
    """Test whether a given model admits the squeezing reduction.

    ``Lambda = 0`` fixes ``u = artanh|lam/gamma|`` and ``chi = -arg(lam/gamma)``
    pointwise; the resulting trajectory is splined, differentiated and fed
    back into ``A``.  A model is exactly reducible only if ``max |A|``
    vanishes, which requires ``u`` constant and ``chi' = -2 omega``.
    """
    t_grid = np.asarray(t_grid, dtype=float)
    gam = np.array([complex(coeffs.gamma(s)) for s in t_grid])
    lam = np.array([complex(coeffs.lam(s)) for s in t_grid])
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(gam != 0, lam / gam, np.inf)
    bad = ~(np.abs(ratio) < 1)
    if np.any(bad):
        i = int(np.argmax(bad))
        raise InfeasibleConstraintError(
            f"|lambda| >= |gamma| at t={t_grid[i]:.6g} (|lambda/gamma|={abs(ratio[i]):.6g}); "
            "no squeezing parameter removes the counter-rotating term"
        )
    u = np.arctanh(np.abs(ratio))
    chi = -np.unwrap(np.angle(ratio))
    traj = SqueezeTrajectory.tabulated(t_grid, u, chi)
    frame = SqueezedFrame(coeffs, traj)
    tcs = [frame.transformed(s) for s in t_grid]
    omega = np.array([float(np.real(coeffs.omega(s))) for s in t_grid])
    chi_dot = np.real(traj.phase.derivative(t_grid))
    return ConstraintReport(
        t=t_grid,
        abs_A=np.array([abs(tc.A) for tc in tcs]),
        abs_Lambda=np.array([abs(tc.Lambda) for tc in tcs]),
        u=u,
        chi=chi,
        chi_dot_plus_2omega=chi_dot + 2 * omega,
    )
