"""Dense linear algebra on the truncated qubit x Fock space.

Basis ordering is qubit-major: index ``q * (n_max + 1) + n`` where ``q = 0`` is
the excited state ``|e>`` and ``q = 1`` the ground state ``|g>``.  With this
ordering every operator that is block diagonal in the qubit index is literally
a 2x2 block matrix of Fock-space matrices.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.linalg

__all__ = [
    "Truncation",
    "QOperator",
    "QState",
    "annihilation",
    "creation",
    "number",
    "pauli",
    "identity",
    "embed_fock",
    "basis_state",
    "number_spinor",
    "expm",
    "adjoint",
    "commutator",
    "apply",
    "inner",
    "expectation",
    "operator_norm",
    "interior_deviation",
]

# log of the largest finite double, with a little headroom
_EXP_LIMIT = 700.0


@dataclass(frozen=True)
class Truncation:
    """Photon-number cutoff of the bosonic mode."""

    n_max: int

    def __post_init__(self):
        if int(self.n_max) != self.n_max or self.n_max < 1:
            raise ValueError(f"n_max must be an integer >= 1, got {self.n_max!r}")

    @property
    def fock_dim(self) -> int:
        return self.n_max + 1

    @property
    def dim(self) -> int:
        return 2 * (self.n_max + 1)

    def index(self, qubit: str, n: int) -> int:
        """Flat index of ``|qubit, n>`` with ``qubit`` in ``{'e', 'g'}``."""
        if qubit not in ("e", "g"):
            raise ValueError(f"qubit label must be 'e' or 'g', got {qubit!r}")
        if not 0 <= n <= self.n_max:
            raise IndexError(f"photon number {n} outside 0..{self.n_max}")
        return (0 if qubit == "e" else 1) * self.fock_dim + n


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, dtype=complex)
    arr.setflags(write=False)
    return arr


class QOperator:
    """Immutable dense operator on the truncated qubit x Fock space."""

    __slots__ = ("trunc", "matrix")

    def __init__(self, trunc: Truncation, matrix):
        m = _frozen(matrix)
        if m.shape != (trunc.dim, trunc.dim):
            raise ValueError(
                f"operator shape {m.shape} inconsistent with n_max={trunc.n_max} "
                f"(expected {(trunc.dim, trunc.dim)})"
            )
        object.__setattr__(self, "trunc", trunc)
        object.__setattr__(self, "matrix", m)

    def __setattr__(self, name, value):
        raise AttributeError("QOperator is immutable")

    def _check(self, other: "QOperator"):
        if other.trunc != self.trunc:
            raise ValueError("operators live on different truncations")

    def __add__(self, other):
        if isinstance(other, QOperator):
            self._check(other)
            return QOperator(self.trunc, self.matrix + other.matrix)
        return NotImplemented

    def __sub__(self, other):
        if isinstance(other, QOperator):
            self._check(other)
            return QOperator(self.trunc, self.matrix - other.matrix)
        return NotImplemented

    def __neg__(self):
        return QOperator(self.trunc, -self.matrix)

    def __mul__(self, scalar):
        if np.isscalar(scalar):
            return QOperator(self.trunc, scalar * self.matrix)
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        if np.isscalar(scalar):
            return QOperator(self.trunc, self.matrix / scalar)
        return NotImplemented

    def __matmul__(self, other):
        if isinstance(other, QOperator):
            self._check(other)
            return QOperator(self.trunc, self.matrix @ other.matrix)
        if isinstance(other, QState):
            if other.trunc != self.trunc:
                raise ValueError("operator and state live on different truncations")
            return QState(self.trunc, self.matrix @ other.vector)
        return NotImplemented

    def dag(self) -> "QOperator":
        return QOperator(self.trunc, self.matrix.conj().T)

    def element(self, bra: tuple[str, int], ket: tuple[str, int]) -> complex:
        """Matrix element ``<bra|op|ket>`` with labels like ``('e', 0)``."""
        return complex(self.matrix[self.trunc.index(*bra), self.trunc.index(*ket)])

    def fock_block(self, bra_qubit: str, ket_qubit: str) -> np.ndarray:
        d = self.trunc.fock_dim
        i = 0 if bra_qubit == "e" else 1
        j = 0 if ket_qubit == "e" else 1
        return self.matrix[i * d:(i + 1) * d, j * d:(j + 1) * d]

    def is_hermitian(self, atol: float = 1e-12) -> bool:
        return bool(np.max(np.abs(self.matrix - self.matrix.conj().T), initial=0.0) < atol)

    def __repr__(self):
        return f"QOperator(n_max={self.trunc.n_max}, dim={self.trunc.dim})"


class QState:
    """Immutable state vector on the truncated qubit x Fock space."""

    __slots__ = ("trunc", "vector")

    def __init__(self, trunc: Truncation, vector):
        v = _frozen(vector)
        if v.shape != (trunc.dim,):
            raise ValueError(f"state length {v.shape} inconsistent with n_max={trunc.n_max}")
        object.__setattr__(self, "trunc", trunc)
        object.__setattr__(self, "vector", v)

    def __setattr__(self, name, value):
        raise AttributeError("QState is immutable")

    def __add__(self, other):
        if isinstance(other, QState):
            if other.trunc != self.trunc:
                raise ValueError("states live on different truncations")
            return QState(self.trunc, self.vector + other.vector)
        return NotImplemented

    def __sub__(self, other):
        if isinstance(other, QState):
            if other.trunc != self.trunc:
                raise ValueError("states live on different truncations")
            return QState(self.trunc, self.vector - other.vector)
        return NotImplemented

    def __mul__(self, scalar):
        if np.isscalar(scalar):
            return QState(self.trunc, scalar * self.vector)
        return NotImplemented

    __rmul__ = __mul__

    def norm(self) -> float:
        return float(np.linalg.norm(self.vector))

    def amplitude(self, qubit: str, n: int) -> complex:
        return complex(self.vector[self.trunc.index(qubit, n)])

    def populations(self) -> np.ndarray:
        """Probabilities reshaped to ``(2, n_max + 1)``: rows are ``e``, ``g``."""
        return (np.abs(self.vector) ** 2).reshape(2, self.trunc.fock_dim)

    def __repr__(self):
        return f"QState(n_max={self.trunc.n_max}, norm={self.norm():.6g})"


@lru_cache(maxsize=64)
def _fock_a(n_max: int) -> np.ndarray:
    a = np.diag(np.sqrt(np.arange(1, n_max + 1, dtype=float)), 1).astype(complex)
    a.setflags(write=False)
    return a


_QUBIT = {
    "z": np.array([[1, 0], [0, -1]], dtype=complex),
    # |e><g| and |g><e| with e first
    "plus": np.array([[0, 1], [0, 0]], dtype=complex),
    "minus": np.array([[0, 0], [1, 0]], dtype=complex),
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "e": np.array([[1, 0], [0, 0]], dtype=complex),
    "g": np.array([[0, 0], [0, 1]], dtype=complex),
    "i": np.eye(2, dtype=complex),
}


def embed_fock(fock: np.ndarray, trunc: Truncation, qubit: str = "i") -> QOperator:
    """Tensor a Fock-space matrix with a qubit operator (identity by default)."""
    fock = np.asarray(fock)
    if fock.shape != (trunc.fock_dim, trunc.fock_dim):
        raise ValueError(f"Fock matrix shape {fock.shape} does not match n_max={trunc.n_max}")
    return QOperator(trunc, np.kron(_QUBIT[qubit], fock))


def annihilation(trunc: Truncation, embed: bool = True):
    """Photon annihilation operator ``a`` with ``<n-1|a|n> = sqrt(n)``.

    With ``embed=False`` the bare ``(n_max+1)``-square Fock matrix is returned.
    """
    a = _fock_a(trunc.n_max)
    return embed_fock(a, trunc) if embed else a.copy()


def creation(trunc: Truncation, embed: bool = True):
    ad = _fock_a(trunc.n_max).conj().T
    return embed_fock(ad, trunc) if embed else ad.copy()


def number(trunc: Truncation, embed: bool = True):
    n = np.diag(np.arange(trunc.fock_dim, dtype=complex))
    return embed_fock(n, trunc) if embed else n


def pauli(which: str, trunc: Truncation) -> QOperator:
    """Qubit operator tensored with the Fock identity.

    ``which`` is one of ``'z'``, ``'plus'``, ``'minus'`` (also ``'x'``, ``'y'``).
    """
    if which not in ("z", "plus", "minus", "x", "y"):
        raise ValueError(f"unknown Pauli operator {which!r}")
    return QOperator(trunc, np.kron(_QUBIT[which], np.eye(trunc.fock_dim)))


def identity(trunc: Truncation) -> QOperator:
    return QOperator(trunc, np.eye(trunc.dim))


def basis_state(qubit: str, n: int, trunc: Truncation) -> QState:
    v = np.zeros(trunc.dim, dtype=complex)
    v[trunc.index(qubit, n)] = 1.0
    return QState(trunc, v)


def number_spinor(m: int, trunc: Truncation) -> tuple[QState, QState]:
    """The pair ``(|e, m>, |g, m+1>)`` spanning the ``N' = m+1`` subspace."""
    if m < 0 or m + 1 > trunc.n_max:
        raise ValueError(f"spinor label m={m} needs 0 <= m and m+1 <= n_max={trunc.n_max}")
    return basis_state("e", m, trunc), basis_state("g", m + 1, trunc)


def _expm_matrix(mat: np.ndarray) -> np.ndarray:
    if not np.all(np.isfinite(mat)):
        raise ValueError("expm: non-finite matrix entries")
    herm = (mat + mat.conj().T) / 2
    # ||exp(A)|| <= exp(lambda_max(herm(A)))
    growth = float(np.max(np.linalg.eigvalsh(herm))) if mat.size else 0.0
    if growth > _EXP_LIMIT:
        raise OverflowError(
            f"expm: logarithmic norm {growth:.3g} exceeds the representable range"
        )
    return scipy.linalg.expm(mat)


def expm(op):
    """Matrix exponential (scaling and squaring with Pade approximants).

    Accepts a :class:`QOperator` or a bare square array and returns the same
    kind.  Raises :class:`OverflowError` when the result would overflow.
    """
    if isinstance(op, QOperator):
        return QOperator(op.trunc, _expm_matrix(op.matrix))
    return _expm_matrix(np.asarray(op, dtype=complex))


def adjoint(op: QOperator) -> QOperator:
    return op.dag()


def commutator(a: QOperator, b: QOperator) -> QOperator:
    return a @ b - b @ a


def apply(op: QOperator, state: QState) -> QState:
    return op @ state


def inner(bra: QState, ket: QState) -> complex:
    """``<bra|ket>``, antilinear in the first argument."""
    if bra.trunc != ket.trunc:
        raise ValueError("states live on different truncations")
    return complex(np.vdot(bra.vector, ket.vector))


def expectation(op: QOperator, state: QState) -> complex:
    return inner(state, op @ state)


def operator_norm(op) -> float:
    """Spectral norm (largest singular value)."""
    mat = op.matrix if isinstance(op, QOperator) else np.asarray(op)
    return float(np.linalg.norm(mat, 2))


def interior_indices(trunc: Truncation, n_interior: int | None = None) -> np.ndarray:
    """Flat indices whose photon number is at most ``n_interior`` (default n_max // 2)."""
    if n_interior is None:
        n_interior = trunc.n_max // 2
    n = np.arange(n_interior + 1)
    return np.concatenate([n, trunc.fock_dim + n])


def interior_deviation(a, b, trunc: Truncation, n_interior: int | None = None) -> float:
    """Largest entry-wise difference restricted to the low-photon block."""
    ma = a.matrix if isinstance(a, QOperator) else np.asarray(a)
    mb = b.matrix if isinstance(b, QOperator) else np.asarray(b)
    idx = interior_indices(trunc, n_interior)
    return float(np.max(np.abs((ma - mb)[np.ix_(idx, idx)])))
