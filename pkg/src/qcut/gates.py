"""Common gate and state constructors used across the cut library."""

from __future__ import annotations

import numpy as np

from .linalg import DimensionError, Operator


def identity(n: int = 1) -> Operator:
    return Operator(np.eye(2**n, dtype=complex))


def rz(theta: float) -> Operator:
    return Operator(np.diag([np.exp(-1j * theta / 2), np.exp(1j * theta / 2)]))


def rzz(theta: float) -> Operator:
    """Two-qubit rotation ``exp(-i theta/2 Z (x) Z)``."""
    return multi_z_rotation(2, theta)


def multi_z_rotation(n: int, theta: float) -> Operator:
    """``exp(-i theta/2 Z^(x)n)``: diagonal with phase set by bit parity."""
    parity = np.array([bin(k).count("1") % 2 for k in range(2**n)])
    phases = np.exp(-1j * (theta / 2) * (-1.0) ** parity)
    return Operator(np.diag(phases))


def mcz(n: int) -> Operator:
    """Multi-controlled Z: ``diag(1, ..., 1, -1)``. ``mcz(1)`` is Z."""
    return mcp(n, np.pi)


def mcp(n: int, theta: float) -> Operator:
    """Multi-controlled phase: ``diag(1, ..., 1, e^{i theta})``."""
    if n < 1:
        raise DimensionError(f"need n >= 1, got {n}")
    diag = np.ones(2**n, dtype=complex)
    diag[-1] = np.exp(1j * theta)
    return Operator(np.diag(diag))


def hadamard() -> Operator:
    return Operator(np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2))


def cnot() -> Operator:
    return Operator(
        np.array(
            [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
        )
    )


def cphase(theta: float) -> Operator:
    return mcp(2, theta)


def controlled(u: Operator) -> Operator:
    """Add one control qubit (high-order factor) to ``u``."""
    d = u.dim
    out = np.eye(2 * d, dtype=complex)
    out[d:, d:] = u.mat
    return Operator(out)


def cnot_on(n: int, control: int, target: int) -> Operator:
    """CNOT embedded in an ``n``-qubit register."""
    if control == target or not (0 <= control < n and 0 <= target < n):
        raise DimensionError(f"bad CNOT wiring ({control}->{target}) on {n} qubits")
    d = 2**n
    mat = np.zeros((d, d), dtype=complex)
    for x in range(d):
        bits = [(x >> (n - 1 - q)) & 1 for q in range(n)]
        if bits[control]:
            bits[target] ^= 1
        y = 0
        for b in bits:
            y = (y << 1) | b
        mat[y, x] = 1.0
    return Operator(mat)


def basis_state(bits: str) -> Operator:
    """Computational-basis density matrix for a bitstring like ``"110"``."""
    if not bits or set(bits) - {"0", "1"}:
        raise DimensionError(f"invalid bitstring {bits!r}")
    idx = int(bits, 2)
    d = 2 ** len(bits)
    mat = np.zeros((d, d), dtype=complex)
    mat[idx, idx] = 1.0
    return Operator(mat)
