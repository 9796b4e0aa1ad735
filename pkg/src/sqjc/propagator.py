"""Brute-force propagation of the time-dependent Schroedinger equation.

Second-order exponential midpoint rule,

    psi_{k+1} = exp(-i H(t_k + dt/2) dt) psi_k,

with each step exponential taken from an eigendecomposition of the Hermitian
midpoint Hamiltonian, so every step is unitary to round-off.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
import scipy.linalg

from . import hilbert
from .hilbert import QOperator, QState, Truncation

__all__ = [
    "Trajectory",
    "ConvergenceReport",
    "PropagationError",
    "propagate",
    "propagate_many",
    "convergence_check",
    "observables",
]


class PropagationError(RuntimeError):
    pass


@dataclass(frozen=True, eq=False)
class Trajectory:
    """States on a time grid.  ``states[k]`` is the amplitude vector at ``t_grid[k]``."""

    trunc: Truncation
    t_grid: np.ndarray
    states: np.ndarray
    dt: float
    order: int = 2

    def __len__(self):
        return len(self.t_grid)

    def state(self, k: int) -> QState:
        return QState(self.trunc, self.states[k])

    @property
    def final(self) -> QState:
        return self.state(-1)

    def norm_drift(self) -> float:
        return float(np.max(np.abs(np.linalg.norm(self.states, axis=1) - 1)))


def _step_unitary(h: np.ndarray, dt: float) -> np.ndarray:
    evals, evecs = scipy.linalg.eigh(h, driver="evd")
    return (evecs * np.exp(-1j * dt * evals)) @ evecs.conj().T


def _evolve(H_fn, vecs: np.ndarray, t_grid: np.ndarray, dt: float, norm_tol: float):
    """Propagate the columns of ``vecs``; returns array ``(len(t_grid), dim, k)``."""
    out = np.empty((len(t_grid),) + vecs.shape, dtype=complex)
    out[0] = vecs
    psi = vecs
    for k in range(len(t_grid) - 1):
        t0, t1 = t_grid[k], t_grid[k + 1]
        n_sub = max(1, math.ceil((t1 - t0) / dt - 1e-9))
        h = (t1 - t0) / n_sub
        for j in range(n_sub):
            mid = t0 + (j + 0.5) * h
            H = H_fn(mid)
            H = H.matrix if isinstance(H, QOperator) else np.asarray(H)
            psi = _step_unitary(H, h) @ psi
        if not np.all(np.isfinite(psi)):
            raise PropagationError(f"non-finite amplitudes after grid step {k + 1} (t={t1})")
        out[k + 1] = psi
    drift = np.max(np.abs(np.linalg.norm(out, axis=1) - 1))
    if drift > norm_tol:
        raise PropagationError(f"norm drift {drift:.3e} exceeds {norm_tol:.1e}")
    return out


def _prepare(t_grid, dt):
    t_grid = np.asarray(t_grid, dtype=float)
    if t_grid.ndim != 1 or t_grid.size < 2 or np.any(np.diff(t_grid) <= 0):
        raise ValueError("t_grid must be strictly increasing with at least two points")
    spacing = float(np.min(np.diff(t_grid)))
    if dt is None:
        dt = spacing / 20
    if dt <= 0:
        raise ValueError(f"dt must be positive, got {dt}")
    if dt > spacing * (1 + 1e-12):
        raise ValueError(f"dt={dt} exceeds the grid spacing {spacing}")
    return t_grid, float(dt)


def propagate_many(H_fn: Callable[[float], QOperator], states: Sequence[QState], t_grid,
                   dt: float | None = None, norm_tol: float = 1e-8) -> list[Trajectory]:
    """Propagate several initial states with shared step unitaries."""
    t_grid, dt = _prepare(t_grid, dt)
    trunc = states[0].trunc
    for s in states:
        if s.trunc != trunc:
            raise ValueError("initial states live on different truncations")
        if abs(s.norm() - 1) > 1e-12:
            raise ValueError(f"initial state must be normalised (norm {s.norm():.15g})")
    vecs = np.stack([s.vector for s in states], axis=1)
    out = _evolve(H_fn, vecs, t_grid, dt, norm_tol)
    t_grid.setflags(write=False)
    return [Trajectory(trunc, t_grid, np.ascontiguousarray(out[:, :, j]), dt) for j in range(len(states))]


def propagate(H_fn: Callable[[float], QOperator], psi0: QState, t_grid,
              dt: float | None = None, norm_tol: float = 1e-8) -> Trajectory:
    """Integrate ``i dpsi/dt = H(t) psi`` from ``t_grid[0]``.

    ``dt`` defaults to a twentieth of the grid spacing and may not exceed it;
    each grid interval is split into equal sub-steps no longer than ``dt``.
    """
    return propagate_many(H_fn, [psi0], t_grid, dt, norm_tol)[0]


@dataclass(frozen=True)
class ConvergenceReport:
    dt: float
    distance: float
    distance_half: float
    ratio: float
    tol: float
    passed: bool

    def summary(self) -> str:
        return (f"dt={self.dt:.3g} |psi(dt)-psi(dt/2)|={self.distance:.3e} "
                f"ratio={self.ratio:.3f} -> {'PASS' if self.passed else 'FAIL'}")


def convergence_check(H_fn, psi0: QState, t_end: float, dt: float, t_start: float = 0.0,
                      tol: float = 1e-4, ratio_window=(3.2, 4.8)) -> ConvergenceReport:
    """Step-halving test of the propagator on ``[t_start, t_end]``.

    Runs at ``dt``, ``dt/2`` and ``dt/4``.  ``distance`` is the endpoint gap
    between the first two runs; the ratio of successive gaps should be close
    to 4 for a second-order method.  Passes when ``distance < 4 * tol`` and the
    ratio lies in ``ratio_window`` (an exactly reproduced endpoint also passes).
    """
    if dt > t_end - t_start:
        raise ValueError(f"dt={dt} exceeds the interval length {t_end - t_start}")
    grid = np.array([t_start, t_end])
    finals = [_evolve(H_fn, psi0.vector[:, None], grid, d, 1e-8)[-1, :, 0]
              for d in (dt, dt / 2, dt / 4)]
    d1 = float(np.linalg.norm(finals[0] - finals[1]))
    d2 = float(np.linalg.norm(finals[1] - finals[2]))
    exact = d1 <= 1e-13
    ratio = d1 / d2 if d2 > 0 else (math.nan if exact else math.inf)
    ok = d1 < 4 * tol and (exact or ratio_window[0] <= ratio <= ratio_window[1])
    return ConvergenceReport(dt=dt, distance=d1, distance_half=d2, ratio=ratio, tol=tol, passed=ok)


def observables(traj: Trajectory) -> dict[str, np.ndarray]:
    """Atomic inversion, photon number and norm along a trajectory."""
    trunc = traj.trunc
    d = trunc.fock_dim
    prob = np.abs(traj.states) ** 2
    n = np.arange(d)
    sz = prob[:, :d].sum(axis=1) - prob[:, d:].sum(axis=1)
    nph = prob[:, :d] @ n + prob[:, d:] @ n
    norm = np.sqrt(prob.sum(axis=1))
    return {"sigma_z": sz / norm ** 2, "n_photon": nph / norm ** 2, "norm": norm}


def state_observables(psi: QState) -> tuple[float, float]:
    """``(<sigma_z>, <a^dag a>)`` for a single state."""
    sz = hilbert.expectation(hilbert.pauli("z", psi.trunc), psi).real
    nph = hilbert.expectation(hilbert.number(psi.trunc), psi).real
    return sz, nph
