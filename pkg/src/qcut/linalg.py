"""Dense complex linear algebra for small multi-qubit systems.

Operators are stored as dense ``2^n x 2^n`` complex matrices, superoperators
as ``4^n x 4^n`` matrices in the normalized Pauli basis (Pauli transfer
matrices, PTMs).  The Pauli basis ordering is lexicographic over ``(I, X, Y,
Z)`` per qubit with qubit 0 as the most significant index, matching the
standard Kronecker-product convention, so PTMs of tensor-product maps are
Kronecker products of the factor PTMs with no permutation bookkeeping.

Everything here is desk-scale by design: state vectors are capped at 14
qubits and superoperators at 7 qubits (4^7 = 16384).
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

#: tolerance for structural checks (unitarity, PTM realness, POVM completeness)
ATOL_STRUCT = 1e-10
#: tolerance for round-trip identities (vectorize/devectorize)
ATOL_ROUNDTRIP = 1e-12

MAX_STATE_QUBITS = 14
_SUPEROP_QUBIT_LIMIT = 7


class QcutError(Exception):
    """Base class for errors raised by qcut."""


class DimensionError(QcutError):
    """Operands have incompatible or invalid dimensions."""


class SizeCapError(QcutError):
    """An operation would exceed the configured dense-size cap."""


def max_superop_qubits() -> int:
    """Dense superoperator qubit cap, overridable via ``QCUT_MAX_QUBITS``.

    The override is clamped to the hard limit of 7 qubits (a 16384 x 16384
    PTM); invalid values raise :class:`SizeCapError`.
    """
    raw = os.environ.get("QCUT_MAX_QUBITS")
    if raw is None:
        return _SUPEROP_QUBIT_LIMIT
    try:
        value = int(raw)
    except ValueError as exc:
        raise SizeCapError(f"QCUT_MAX_QUBITS must be an integer, got {raw!r}") from exc
    if value < 1:
        raise SizeCapError(f"QCUT_MAX_QUBITS must be >= 1, got {value}")
    return min(value, _SUPEROP_QUBIT_LIMIT)


def _is_power_of_two(d: int) -> bool:
    return d > 0 and (d & (d - 1)) == 0


class Operator:
    """Dense complex operator on ``n`` qubits.

    Immutable after construction.  With ``unitary=True`` the constructor
    verifies ``U^dag U = I`` to ``ATOL_STRUCT``.
    """

    __slots__ = ("mat",)

    def __init__(self, mat, *, unitary: bool = False):
        arr = np.array(mat, dtype=complex)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise DimensionError(f"operator must be square, got shape {arr.shape}")
        d = arr.shape[0]
        if not _is_power_of_two(d):
            raise DimensionError(f"operator dimension must be a power of two, got {d}")
        if d > 2**MAX_STATE_QUBITS:
            raise SizeCapError(f"operator dimension {d} exceeds cap 2^{MAX_STATE_QUBITS}")
        if unitary:
            dev = np.max(np.abs(arr.conj().T @ arr - np.eye(d)))
            if dev > ATOL_STRUCT:
                raise DimensionError(f"matrix is not unitary: max|U^dag U - I| = {dev:.3e}")
        arr.setflags(write=False)
        object.__setattr__(self, "mat", arr)

    def __setattr__(self, name, value):
        raise AttributeError("Operator is immutable")

    @property
    def dim(self) -> int:
        return self.mat.shape[0]

    @property
    def n_qubits(self) -> int:
        return self.dim.bit_length() - 1

    def dag(self) -> "Operator":
        return Operator(self.mat.conj().T)

    def __matmul__(self, other: "Operator") -> "Operator":
        if self.dim != other.dim:
            raise DimensionError(f"dim mismatch: {self.dim} vs {other.dim}")
        return Operator(self.mat @ other.mat)

    def __add__(self, other: "Operator") -> "Operator":
        if self.dim != other.dim:
            raise DimensionError(f"dim mismatch: {self.dim} vs {other.dim}")
        return Operator(self.mat + other.mat)

    def __sub__(self, other: "Operator") -> "Operator":
        if self.dim != other.dim:
            raise DimensionError(f"dim mismatch: {self.dim} vs {other.dim}")
        return Operator(self.mat - other.mat)

    def __mul__(self, scalar) -> "Operator":
        return Operator(self.mat * scalar)

    __rmul__ = __mul__

    def trace(self) -> complex:
        return complex(np.trace(self.mat))

    def close_to(self, other: "Operator", atol: float = ATOL_STRUCT) -> bool:
        return self.dim == other.dim and np.max(np.abs(self.mat - other.mat)) <= atol

    def __repr__(self) -> str:
        return f"Operator(n={self.n_qubits})"


# single-qubit Paulis and the normalized basis tensor (4, 2, 2)
PAULI_I = np.eye(2, dtype=complex)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULI_LETTERS = "IXYZ"
_PAULIS = {"I": PAULI_I, "X": PAULI_X, "Y": PAULI_Y, "Z": PAULI_Z}
_PB = np.stack([PAULI_I, PAULI_X, PAULI_Y, PAULI_Z]) / np.sqrt(2.0)


@dataclass(frozen=True)
class PauliString:
    """A tensor product of single-qubit Paulis, e.g. ``PauliString("XIZ")``."""

    letters: str

    def __post_init__(self):
        if len(self.letters) < 1:
            raise DimensionError("Pauli string must have length >= 1")
        bad = set(self.letters) - set(PAULI_LETTERS)
        if bad:
            raise DimensionError(f"invalid Pauli letters: {sorted(bad)}")

    @property
    def n_qubits(self) -> int:
        return len(self.letters)

    def to_operator(self) -> Operator:
        mat = np.array([[1.0 + 0j]])
        for letter in self.letters:
            mat = np.kron(mat, _PAULIS[letter])
        return Operator(mat)


def pauli_string_index(letters: str) -> int:
    """Index of a Pauli string in the lexicographic (I, X, Y, Z) ordering."""
    idx = 0
    for letter in letters:
        idx = 4 * idx + PAULI_LETTERS.index(letter)
    return idx


def kron(a: Operator, b: Operator) -> Operator:
    """Kronecker product with ``a`` as the high-order (subsystem-A) factor."""
    if a.dim * b.dim > 2**MAX_STATE_QUBITS:
        raise SizeCapError(
            f"kron result dimension {a.dim * b.dim} exceeds cap 2^{MAX_STATE_QUBITS}"
        )
    return Operator(np.kron(a.mat, b.mat))


def hs_inner(a: Operator, b: Operator) -> complex:
    """Hilbert-Schmidt inner product ``Tr(a^dag b)``."""
    if a.dim != b.dim:
        raise DimensionError(f"dim mismatch: {a.dim} vs {b.dim}")
    return complex(np.vdot(a.mat, b.mat))


def partial_trace(a: Operator, keep: Iterable[int]) -> Operator:
    """Trace out all qubits not in ``keep`` (qubit 0 is the leftmost factor)."""
    n = a.n_qubits
    keep = sorted(set(keep))
    for q in keep:
        if not 0 <= q < n:
            raise DimensionError(f"keep index {q} out of range for {n} qubits")
    drop = [q for q in range(n) if q not in keep]
    t = a.mat.reshape((2,) * n + (2,) * n)
    for q in reversed(drop):
        t = np.trace(t, axis1=q, axis2=q + (t.ndim // 2))
    d = 2 ** len(keep)
    return Operator(t.reshape(d, d))


def _pauli_coeffs_batch(mats: np.ndarray) -> np.ndarray:
    """Coefficients ``Tr(Pbar_i A)`` for a batch of matrices, shape (B, 4^n)."""
    b, d, _ = mats.shape
    n = d.bit_length() - 1
    t = mats.reshape((b,) + (2,) * (2 * n))
    for k in range(n):
        # axes: (B,) + (4,)*k + rows + cols; row of qubit k at 1+k, col at 1+n
        t = np.tensordot(t, _PB, axes=([1 + k, 1 + n], [2, 1]))
        t = np.moveaxis(t, -1, 1 + k)
    return t.reshape(b, 4**n)


def _pauli_mats_batch(coeffs: np.ndarray) -> np.ndarray:
    """Inverse of :func:`_pauli_coeffs_batch`: (B, 4^n) -> (B, 2^n, 2^n)."""
    b = coeffs.shape[0]
    n = (coeffs.shape[1].bit_length() - 1) // 2
    t = coeffs.reshape((b,) + (4,) * n)
    for _ in range(n):
        t = np.tensordot(t, _PB, axes=([1], [0]))
    perm = [0] + [1 + 2 * i for i in range(n)] + [2 + 2 * i for i in range(n)]
    return np.transpose(t, perm).reshape(b, 2**n, 2**n)


def vectorize(a: Operator) -> np.ndarray:
    """Expansion coefficients of ``a`` in the normalized Pauli basis."""
    return _pauli_coeffs_batch(a.mat[None, :, :])[0]


def devectorize(coeffs: np.ndarray) -> Operator:
    """Inverse of :func:`vectorize`."""
    coeffs = np.asarray(coeffs, dtype=complex)
    d2 = coeffs.shape[0]
    n = (d2.bit_length() - 1) // 2
    if 4**n != d2:
        raise DimensionError(f"coefficient vector length {d2} is not a power of 4")
    return Operator(_pauli_mats_batch(coeffs[None, :])[0])


@lru_cache(maxsize=None)
def _basis_cached(n: int) -> np.ndarray:
    if n == 1:
        out = _PB.copy()
    else:
        lo = _basis_cached(n - 1)
        out = np.einsum("iab,jcd->ijacbd", _PB, lo).reshape(
            4**n, 2**n, 2**n
        )
    out.setflags(write=False)
    return out


def pauli_basis_matrices(n: int) -> np.ndarray:
    """All ``4^n`` normalized Pauli-string matrices, shape (4^n, 2^n, 2^n)."""
    if n < 1:
        raise DimensionError(f"need n >= 1, got {n}")
    if n > _SUPEROP_QUBIT_LIMIT:
        raise SizeCapError(f"Pauli basis for n={n} exceeds the superoperator cap")
    return _basis_cached(n)


@dataclass(frozen=True)
class Superoperator:
    """A linear map on operators, stored as its PTM in the normalized Pauli basis."""

    n: int
    matrix: np.ndarray

    def __post_init__(self):
        mat = np.asarray(self.matrix, dtype=complex)
        if mat.shape != (4**self.n, 4**self.n):
            raise DimensionError(
                f"superoperator for n={self.n} must be {4**self.n} x {4**self.n}, "
                f"got {mat.shape}"
            )
        mat.setflags(write=False)
        object.__setattr__(self, "matrix", mat)

    def __matmul__(self, other: "Superoperator") -> "Superoperator":
        if self.n != other.n:
            raise DimensionError(f"qubit count mismatch: {self.n} vs {other.n}")
        return Superoperator(self.n, self.matrix @ other.matrix)

    def kron_with(self, other: "Superoperator") -> "Superoperator":
        return Superoperator(self.n + other.n, np.kron(self.matrix, other.matrix))

    def apply_to(self, a: Operator) -> Operator:
        return devectorize(self.matrix @ vectorize(a))

    def max_abs_diff(self, other: "Superoperator") -> float:
        if self.n != other.n:
            raise DimensionError(f"qubit count mismatch: {self.n} vs {other.n}")
        return float(np.max(np.abs(self.matrix - other.matrix)))

    def is_real(self, atol: float = ATOL_STRUCT) -> bool:
        return float(np.max(np.abs(self.matrix.imag))) <= atol

    def has_unit_corner(self, atol: float = ATOL_STRUCT) -> bool:
        """True when the first row is (1, 0, ..., 0): a trace-preserving map."""
        first = self.matrix[0].copy()
        first[0] -= 1.0
        return float(np.max(np.abs(first))) <= atol


def identity_superoperator(n: int) -> Superoperator:
    _check_superop_size(n)
    return Superoperator(n, np.eye(4**n, dtype=complex))


def _check_superop_size(n: int):
    cap = max_superop_qubits()
    if n > cap:
        raise SizeCapError(f"superoperator on {n} qubits exceeds the cap of {cap}")


def ptm_of_unitary(u: Operator, *, check: bool = True) -> Superoperator:
    """PTM of the channel ``rho -> U rho U^dag``."""
    n = u.n_qubits
    _check_superop_size(n)
    if check:
        dev = np.max(np.abs(u.mat.conj().T @ u.mat - np.eye(u.dim)))
        if dev > ATOL_STRUCT:
            raise DimensionError(f"input is not unitary: max|U^dag U - I| = {dev:.3e}")
    basis = pauli_basis_matrices(n)
    rotated = np.einsum("ab,nbc,dc->nad", u.mat, basis, u.mat.conj(), optimize=True)
    coeffs = _pauli_coeffs_batch(rotated)  # row j = vectorize(U Pbar_j U^dag)
    return Superoperator(n, coeffs.T.copy())


def ptm_of_map(apply_batch, n: int) -> Superoperator:
    """PTM of an arbitrary linear map given its batched action on matrices.

    ``apply_batch`` maps an array of shape (B, 2^n, 2^n) to the array of
    images, same shape.
    """
    _check_superop_size(n)
    images = apply_batch(pauli_basis_matrices(n).copy())
    coeffs = _pauli_coeffs_batch(images)
    return Superoperator(n, coeffs.T.copy())


# ---------------------------------------------------------------------------
# Pauli eigenbasis (single-qubit stabilizer states)
# ---------------------------------------------------------------------------

KET_0 = np.array([1, 0], dtype=complex)
KET_1 = np.array([0, 1], dtype=complex)
KET_PLUS = np.array([1, 1], dtype=complex) / np.sqrt(2)
KET_MINUS = np.array([1, -1], dtype=complex) / np.sqrt(2)
KET_PLUS_I = np.array([1, 1j], dtype=complex) / np.sqrt(2)
KET_MINUS_I = np.array([1, -1j], dtype=complex) / np.sqrt(2)


def projector(ket: np.ndarray) -> Operator:
    return Operator(np.outer(ket, ket.conj()))


@lru_cache(maxsize=1)
def pauli_eigenbasis() -> dict:
    """Table mapping (P, mu) to (sign, rank-1 projector).

    For X, Y, Z these are the +1/-1 eigenstate pairs; the identity row reuses
    the Y eigenstates with both signs +1 (the conventional choice for the
    freedom in expanding the identity).
    """
    return {
        ("I", 0): (1, projector(KET_PLUS_I)),
        ("I", 1): (1, projector(KET_MINUS_I)),
        ("X", 0): (1, projector(KET_PLUS)),
        ("X", 1): (-1, projector(KET_MINUS)),
        ("Y", 0): (1, projector(KET_PLUS_I)),
        ("Y", 1): (-1, projector(KET_MINUS_I)),
        ("Z", 0): (1, projector(KET_0)),
        ("Z", 1): (-1, projector(KET_1)),
    }


# ---------------------------------------------------------------------------
# Qubit-subset helpers on raw matrices (used by the channel executor)
# ---------------------------------------------------------------------------


def embed_matrix(a: np.ndarray, qubits: Sequence[int], n: int) -> np.ndarray:
    """Embed an operator acting on ``qubits`` into the full ``n``-qubit space."""
    qubits = list(qubits)
    k = len(qubits)
    if a.shape != (2**k, 2**k):
        raise DimensionError(f"operator shape {a.shape} does not match {k} qubits")
    rest = [q for q in range(n) if q not in qubits]
    full = np.kron(a, np.eye(2 ** (n - k), dtype=complex))
    order = qubits + rest  # qubit occupying axis j of `full`
    axes = [0] * n
    for j, q in enumerate(order):
        axes[q] = j
    t = full.reshape((2,) * (2 * n))
    t = np.transpose(t, axes + [n + ax for ax in axes])
    return t.reshape(2**n, 2**n)
