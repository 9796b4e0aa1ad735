"""Time-dependent coefficient functions (units with hbar = 1).

Every schedule supports evaluation, an analytic (or spline) derivative, an
exact definite integral and complex conjugation.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from numpy.polynomial import polynomial as P
from scipy.integrate import quad
from scipy.interpolate import CubicSpline

__all__ = [
    "Schedule",
    "Constant",
    "Harmonic",
    "Polynomial",
    "Tabulated",
    "FunctionSchedule",
    "CoefficientSet",
    "as_schedule",
    "ScheduleDomainError",
]


class ScheduleDomainError(ValueError):
    """Raised when a schedule is evaluated outside its domain."""


class Schedule:
    """Base class.  Subclasses implement ``_value`` and ``_deriv``."""

    def eval(self, t) -> complex:
        self._check_domain(t)
        return self._value(t)

    def derivative(self, t) -> complex:
        self._check_domain(t)
        return self._deriv(t)

    def __call__(self, t):
        return self.eval(t)

    def integral(self, a: float, b: float) -> complex:
        """Definite integral over ``[a, b]``."""
        self._check_domain(a)
        self._check_domain(b)
        return self._integral(a, b)

    def conjugate(self) -> "Schedule":
        raise NotImplementedError

    @property
    def is_real(self) -> bool:
        raise NotImplementedError

    def _check_domain(self, t):
        pass

    def _integral(self, a, b):
        re = quad(lambda s: np.real(self._value(s)), a, b, epsabs=0, epsrel=1e-12, limit=200)[0]
        im = quad(lambda s: np.imag(self._value(s)), a, b, epsabs=0, epsrel=1e-12, limit=200)[0]
        return complex(re, im)


@dataclass(frozen=True)
class Constant(Schedule):
    value: complex

    def _value(self, t):
        return complex(self.value) + 0 * np.asarray(t)

    def _deriv(self, t):
        return 0j + 0 * np.asarray(t)

    def _integral(self, a, b):
        return complex(self.value) * (b - a)

    def conjugate(self):
        return Constant(np.conj(complex(self.value)))

    @property
    def is_real(self):
        return complex(self.value).imag == 0


@dataclass(frozen=True)
class Harmonic(Schedule):
    """``amplitude * cos(frequency * t + phase) + offset``.

    ``frequency`` and ``phase`` are real; ``amplitude`` and ``offset`` may be
    complex.
    """

    amplitude: complex
    frequency: float
    phase: float = 0.0
    offset: complex = 0.0

    def __post_init__(self):
        if np.iscomplexobj(self.frequency) or np.iscomplexobj(self.phase):
            raise ValueError("Harmonic frequency and phase must be real")

    def _value(self, t):
        return complex(self.amplitude) * np.cos(self.frequency * t + self.phase) + complex(self.offset)

    def _deriv(self, t):
        return -complex(self.amplitude) * self.frequency * np.sin(self.frequency * t + self.phase)

    def _integral(self, a, b):
        w, p = self.frequency, self.phase
        if w == 0:
            osc = complex(self.amplitude) * np.cos(p) * (b - a)
        else:
            osc = complex(self.amplitude) * (np.sin(w * b + p) - np.sin(w * a + p)) / w
        return osc + complex(self.offset) * (b - a)

    def conjugate(self):
        return Harmonic(np.conj(complex(self.amplitude)), self.frequency, self.phase,
                        np.conj(complex(self.offset)))

    @property
    def is_real(self):
        return complex(self.amplitude).imag == 0 and complex(self.offset).imag == 0


@dataclass(frozen=True)
class Polynomial(Schedule):
    """``sum_k coefficients[k] * t**k`` (ascending powers)."""

    coefficients: tuple

    def __init__(self, *coefficients):
        if len(coefficients) == 1 and isinstance(coefficients[0], (list, tuple, np.ndarray)):
            coefficients = tuple(coefficients[0])
        if not coefficients:
            raise ValueError("Polynomial needs at least one coefficient")
        object.__setattr__(self, "coefficients", tuple(complex(c) for c in coefficients))

    def _value(self, t):
        return P.polyval(t, self.coefficients)

    def _deriv(self, t):
        return P.polyval(t, P.polyder(self.coefficients)) if len(self.coefficients) > 1 else 0j * t

    def _integral(self, a, b):
        anti = P.polyint(self.coefficients)
        return complex(P.polyval(b, anti) - P.polyval(a, anti))

    def conjugate(self):
        return Polynomial(*np.conj(self.coefficients))

    @property
    def is_real(self):
        return all(c.imag == 0 for c in self.coefficients)


@dataclass(frozen=True, eq=False)
class Tabulated(Schedule):
    """Cubic-spline interpolant through ``(times, values)``.

    No extrapolation: evaluating outside ``[times[0], times[-1]]`` raises.
    The default ``bc_type='not-a-knot'`` keeps fourth-order accuracy up to the
    end knots.
    """

    times: np.ndarray
    values: np.ndarray
    bc_type: str = "not-a-knot"
    _spline: CubicSpline = field(init=False, repr=False)

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        values = np.asarray(self.values, dtype=complex)
        if times.ndim != 1 or times.shape != values.shape or times.size < 4:
            raise ValueError("Tabulated needs matching 1-D times/values with at least 4 knots")
        if np.any(np.diff(times) <= 0):
            raise ValueError("Tabulated knot times must be strictly increasing")
        times.setflags(write=False)
        values.setflags(write=False)
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "_spline", CubicSpline(times, values, bc_type=self.bc_type))

    def _check_domain(self, t):
        t = np.asarray(t)
        lo, hi = self.times[0], self.times[-1]
        # tolerate round-off at the end knots
        slack = 1e-12 * max(1.0, abs(lo), abs(hi))
        if np.any(t < lo - slack) or np.any(t > hi + slack):
            raise ScheduleDomainError(f"t={t} outside tabulated range [{lo}, {hi}]")

    def _value(self, t):
        return self._spline(t)

    def _deriv(self, t):
        return self._spline(t, 1)

    def _integral(self, a, b):
        return complex(self._spline.integrate(a, b))

    def conjugate(self):
        return Tabulated(self.times, np.conj(self.values), self.bc_type)

    @property
    def is_real(self):
        return bool(np.all(self.values.imag == 0))


@dataclass(frozen=True, eq=False)
class FunctionSchedule(Schedule):
    """Schedule backed by callables, used for derived quantities such as the
    forward-designed counter-rotating coupling."""

    value_fn: Callable
    derivative_fn: Callable
    real: bool = False
    label: str = "function"

    def _value(self, t):
        return self.value_fn(t)

    def _deriv(self, t):
        return self.derivative_fn(t)

    def conjugate(self):
        v, d = self.value_fn, self.derivative_fn
        return FunctionSchedule(lambda t: np.conj(v(t)), lambda t: np.conj(d(t)),
                                self.real, f"conj({self.label})")

    @property
    def is_real(self):
        return self.real


def as_schedule(x) -> Schedule:
    """Promote numbers to :class:`Constant`; pass schedules through."""
    if isinstance(x, Schedule):
        return x
    if isinstance(x, (int, float, complex, np.number)) and not isinstance(x, bool):
        return Constant(complex(x))
    raise TypeError(f"cannot interpret {x!r} as a schedule")


@dataclass(frozen=True)
class CoefficientSet:
    """The four schedules of the non-RWA model: field frequency ``omega``,
    atomic frequency ``omega0``, rotating coupling ``gamma`` and
    counter-rotating coupling ``lam``."""

    omega: Schedule
    omega0: Schedule
    gamma: Schedule
    lam: Schedule

    def __init__(self, omega, omega0, gamma, lam=0.0):
        omega, omega0 = as_schedule(omega), as_schedule(omega0)
        for name, s in (("omega", omega), ("omega0", omega0)):
            if not s.is_real:
                raise ValueError(f"{name} must be real-valued (Hermiticity of the Hamiltonian)")
        object.__setattr__(self, "omega", omega)
        object.__setattr__(self, "omega0", omega0)
        object.__setattr__(self, "gamma", as_schedule(gamma))
        object.__setattr__(self, "lam", as_schedule(lam))

    def at(self, t) -> tuple[float, float, complex, complex]:
        """``(omega, omega0, gamma, lam)`` evaluated at ``t``."""
        return (float(np.real(self.omega(t))), float(np.real(self.omega0(t))),
                complex(self.gamma(t)), complex(self.lam(t)))

    def replace(self, **kw) -> "CoefficientSet":
        d = dict(omega=self.omega, omega0=self.omega0, gamma=self.gamma, lam=self.lam)
        d.update(kw)
        return CoefficientSet(**d)

    def items(self) -> Sequence[tuple[str, Schedule]]:
        return [("omega", self.omega), ("omega0", self.omega0),
                ("gamma", self.gamma), ("lambda", self.lam)]
