"""Hamiltonians of the driven atom-field model.

Three builders, all returning Hermitian :class:`~sqjc.hilbert.QOperator` values
at a single time:

* the full model with counter-rotating coupling ``lam``,
* the squeezed-frame model with quadratic terms ``A a^2 + A* a^dag^2`` and a
  scalar shift ``C``,
* the rotating-wave model.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .hilbert import QOperator, Truncation, annihilation, creation, identity, number, pauli
from .schedules import CoefficientSet

__all__ = [
    "TransformedCoefficients",
    "build_full_hamiltonian",
    "build_rwa_hamiltonian",
    "build_transformed_hamiltonian",
]


@dataclass(frozen=True)
class TransformedCoefficients:
    """Coefficients of the Hamiltonian in the squeezed frame at one time.

    ``Omega`` multiplies ``a^dag a``, ``A`` multiplies ``a^2``, ``g`` the
    rotating coupling ``a^dag sigma_-``, ``Lambda`` the counter-rotating
    coupling ``a sigma_-`` and ``C`` is a c-number shift.
    """

    Omega: float
    C: float
    A: complex
    g: complex
    Lambda: complex


@lru_cache(maxsize=32)
def _ops(trunc: Truncation) -> dict[str, np.ndarray]:
    a, ad = annihilation(trunc), creation(trunc)
    sp, sm = pauli("plus", trunc), pauli("minus", trunc)
    ops = {
        "n": number(trunc).matrix,
        "sz": pauli("z", trunc).matrix,
        "ad_sm": (ad @ sm).matrix,
        "a_sp": (a @ sp).matrix,
        "a_sm": (a @ sm).matrix,
        "ad_sp": (ad @ sp).matrix,
        "a2": (a @ a).matrix,
        "ad2": (ad @ ad).matrix,
        "eye": identity(trunc).matrix,
    }
    for m in ops.values():
        m.setflags(write=False)
    return ops


def _at(x, t):
    return x(t) if callable(x) else x


def _rwa_matrix(ops, Omega, omega0, g):
    g = complex(g)
    return (Omega * ops["n"] + 0.5 * omega0 * ops["sz"]
            + g * ops["ad_sm"] + np.conj(g) * ops["a_sp"])


def build_full_hamiltonian(coeffs: CoefficientSet, t: float, trunc: Truncation) -> QOperator:
    """Non-RWA Hamiltonian at time ``t``:

    ``omega a^dag a + omega0/2 sz + gamma a^dag s- + gamma* a s+ + lam a s- + lam* a^dag s+``
    """
    omega, omega0, gamma, lam = coeffs.at(t)
    ops = _ops(trunc)
    h = _rwa_matrix(ops, omega, omega0, gamma)
    h = h + lam * ops["a_sm"] + np.conj(lam) * ops["ad_sp"]
    return QOperator(trunc, h)


def build_rwa_hamiltonian(Omega, omega0, g, t: float, trunc: Truncation) -> QOperator:
    """Rotating-wave Hamiltonian ``Omega a^dag a + omega0/2 sz + g a^dag s- + g* a s+``.

    ``Omega``, ``omega0`` and ``g`` may be numbers or callables of time.
    """
    Omega = _at(Omega, t)
    if np.iscomplexobj(Omega) and abs(np.imag(Omega)) > 1e-10 * max(1.0, abs(Omega)):
        raise ValueError(f"Omega must be real, got {Omega}")
    omega0 = float(np.real(_at(omega0, t)))
    return QOperator(trunc, _rwa_matrix(_ops(trunc), float(np.real(Omega)), omega0, _at(g, t)))


def build_transformed_hamiltonian(tc: TransformedCoefficients, omega0: float,
                                  trunc: Truncation) -> QOperator:
    """Squeezed-frame Hamiltonian including the quadratic terms and shift ``C``."""
    ops = _ops(trunc)
    h = _rwa_matrix(ops, tc.Omega, float(np.real(omega0)), tc.g)
    h = (h + tc.A * ops["a2"] + np.conj(tc.A) * ops["ad2"]
         + tc.Lambda * ops["a_sm"] + np.conj(tc.Lambda) * ops["ad_sp"]
         + tc.C * ops["eye"])
    return QOperator(trunc, h)
