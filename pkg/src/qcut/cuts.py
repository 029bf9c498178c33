"""Quasiprobability decompositions of cut gates and wires.

A :class:`Decomposition` is a list of weighted terms ``(q, F)`` whose
superoperators sum to a target channel: ``E = sum_nu q_nu F_nu``.  Each term
factors into maps acting on contiguous register blocks, so the two sides of a
cut can be executed independently.  The 1-norm ``gamma = sum |q_nu|`` sets
the sampling overhead ``gamma^2`` of Monte-Carlo reconstruction.

Built-in decompositions:

* :func:`wire_cut_ncc` -- single-qubit identity, 8 measure-and-prepare terms,
  ``gamma = 4``, no classical communication;
* :func:`wire_cut_cc` -- single-qubit identity with one grouped
  measure-and-reprepare term (classical communication), ``gamma = 3``;
* :func:`mcz_decomposition` -- multi-controlled Z across an (m, m') split,
  ``gamma = 3`` for any split;
* :func:`rzz_decomposition_a` / :func:`rzz_decomposition_b` -- two-qubit ZZ
  rotation, ``gamma = 3`` resp. ``gamma = 1 + 2|sin(theta)|``;
* :func:`multi_z_rotation_decomposition` -- ``exp(-i theta/2 Z^n)`` via local
  CNOT ladders around the two-qubit cut;
* :func:`controlled_sequence_decomposition` -- a sequence of single-qubit
  controlled unitaries sharing one control, ``gamma = 3``.
"""

from __future__ import annotations

import numpy as np

from . import channels as ch
from . import gates
from .linalg import (
    DimensionError,
    Operator,
    SizeCapError,
    Superoperator,
    embed_matrix,
    identity_superoperator,
    max_superop_qubits,
    pauli_eigenbasis,
    projector,
    KET_0,
    KET_1,
    ptm_of_unitary,
)

#: reconstruction tolerance: sum of term PTMs vs. the target channel
ATOL_RECONSTRUCT = 1e-9

#: dense verification cap for the multi-register builders
MAX_CUT_QUBITS = 6


class DecompositionTerm:
    """One weighted product term ``q * (F_1 (x) F_2 (x) ...)``.

    ``factors`` act on contiguous qubit blocks, high-order first; each factor
    must cover a whole number of the parent decomposition's registers.
    ``needs_cc`` marks terms whose execution needs a measurement outcome
    communicated across the cut.
    """

    def __init__(self, q: float, factors, label: str, needs_cc: bool = False):
        self.q = float(q)
        self.factors = tuple(factors)
        self.label = str(label)
        self.needs_cc = bool(needs_cc)
        if not self.factors:
            raise DimensionError(f"term {label!r} has no factors")
        self._ptm = None

    @property
    def n_qubits(self) -> int:
        return sum(f.n_qubits for f in self.factors)

    def is_cptp(self) -> bool:
        return all(f.is_cptp() for f in self.factors)

    def to_superoperator(self) -> Superoperator:
        """Unweighted PTM of the term's tensor-product map."""
        if self._ptm is None:
            ptm = self.factors[0].to_superoperator()
            for f in self.factors[1:]:
                ptm = ptm.kron_with(f.to_superoperator())
            self._ptm = ptm
        return self._ptm

    def __repr__(self):
        return f"DecompositionTerm(q={self.q:+.6g}, label={self.label!r})"


class Decomposition:
    """A named quasiprobability decomposition with its target channel."""

    def __init__(self, name: str, partition, terms, target: Superoperator):
        self.name = str(name)
        self.partition = tuple(int(s) for s in partition)
        self.terms = tuple(terms)
        self.target = target
        if not self.terms:
            raise DimensionError("decomposition needs at least one term")
        if any(s < 1 for s in self.partition):
            raise DimensionError(f"register sizes must be >= 1, got {self.partition}")
        n = sum(self.partition)
        if target.n != n:
            raise DimensionError(
                f"target acts on {target.n} qubits, partition covers {n}"
            )
        boundaries = set(np.cumsum(self.partition).tolist())
        for t in self.terms:
            if t.n_qubits != n:
                raise DimensionError(
                    f"term {t.label!r} covers {t.n_qubits} qubits, expected {n}"
                )
            edge = 0
            for f in t.factors:
                edge += f.n_qubits
                if edge != n and edge not in boundaries:
                    raise DimensionError(
                        f"term {t.label!r} splits a register at qubit {edge}"
                    )

    @property
    def n_qubits(self) -> int:
        return sum(self.partition)

    def one_norm(self) -> float:
        return float(sum(abs(t.q) for t in self.terms))

    def sum_q(self) -> float:
        return float(sum(t.q for t in self.terms))

    def sampling_probabilities(self) -> np.ndarray:
        gamma = self.one_norm()
        return np.array([abs(t.q) / gamma for t in self.terms])

    def reconstruct(self) -> Superoperator:
        total = np.zeros_like(self.target.matrix)
        for t in self.terms:
            total = total + t.q * t.to_superoperator().matrix
        return Superoperator(self.target.n, total)

    def verify(self, atol: float = ATOL_RECONSTRUCT) -> dict:
        deviation = self.reconstruct().max_abs_diff(self.target)
        return {
            "name": self.name,
            "n_terms": len(self.terms),
            "one_norm": self.one_norm(),
            "sum_q": self.sum_q(),
            "max_abs_deviation": float(deviation),
            "passed": bool(deviation <= atol),
        }

    def describe(self) -> str:
        """Structured text summary (used by the CLI)."""
        lines = [
            f"decomposition: {self.name}",
            f"partition: {list(self.partition)}",
            f"gamma: {self.one_norm():.12g}",
            f"terms: {len(self.terms)}",
        ]
        for t in self.terms:
            lines.append(
                f"  q={t.q:+.12g}  cptp={'yes' if t.is_cptp() else 'no'}  "
                f"cc={'yes' if t.needs_cc else 'no'}  {t.label}"
            )
        return "\n".join(lines)

    def __repr__(self):
        return (
            f"Decomposition({self.name!r}, partition={self.partition}, "
            f"terms={len(self.terms)}, gamma={self.one_norm():.6g})"
        )


def _check_cut_size(n: int):
    if n > MAX_CUT_QUBITS:
        raise SizeCapError(
            f"decomposition on {n} qubits exceeds the verification cap of "
            f"{MAX_CUT_QUBITS}"
        )
    if n > max_superop_qubits():
        raise SizeCapError(
            f"decomposition on {n} qubits exceeds the dense cap of "
            f"{max_superop_qubits()}"
        )


# ---------------------------------------------------------------------------
# Wire cuts
# ---------------------------------------------------------------------------


def wire_cut_ncc() -> Decomposition:
    """Single-qubit identity as eight fixed-preparation measure-and-prepare
    maps with coefficients ``a/2``; ``gamma = 4``, no communication."""
    table = pauli_eigenbasis()
    terms = []
    for p in "IXYZ":
        for mu in (0, 1):
            a, _ = table[(p, mu)]
            terms.append(
                DecompositionTerm(
                    a / 2, [ch.pauli_measure_prepare(p, mu)], f"E_{p}{mu}"
                )
            )
    return Decomposition("wire_ncc", (1,), terms, identity_superoperator(1))


def wire_cut_cc(cc_basis: str = "Y") -> Decomposition:
    """Single-qubit identity with one grouped CPTP term; ``gamma = 3``.

    ``cc_basis`` picks the Pauli whose measure-and-reprepare channel absorbs
    the identity expansion and carries the classical communication; the other
    two Paulis keep their fixed-preparation terms with ``q = +-1/2``.
    """
    if cc_basis not in "XYZ" or len(cc_basis) != 1:
        raise DimensionError(f"cc_basis must be X, Y or Z, got {cc_basis!r}")
    terms = [
        DecompositionTerm(
            1.0, [ch.grouped_pauli_map(cc_basis)], f"E_{cc_basis}", needs_cc=True
        )
    ]
    table = pauli_eigenbasis()
    for p in "XYZ":
        if p == cc_basis:
            continue
        for mu in (0, 1):
            a, _ = table[(p, mu)]
            terms.append(
                DecompositionTerm(
                    a / 2, [ch.pauli_measure_prepare(p, mu)], f"E_{p}{mu}"
                )
            )
    return Decomposition(
        f"wire_cc[{cc_basis}]", (1,), terms, identity_superoperator(1)
    )


# ---------------------------------------------------------------------------
# MCZ gate cut
# ---------------------------------------------------------------------------


def mcz_decomposition(m: int, m_prime: int) -> Decomposition:
    """Multi-controlled Z on ``m + m'`` qubits cut into local maps; ``gamma = 3``."""
    if m < 1 or m_prime < 1:
        raise DimensionError(f"need m, m' >= 1, got ({m}, {m_prime})")
    n = m + m_prime
    _check_cut_size(n)
    terms = []
    for sign in (+1, -1):
        u = ch.UnitaryChannel(gates.mcp(m, sign * np.pi / 2))
        v = ch.UnitaryChannel(gates.mcp(m_prime, sign * np.pi / 2))
        terms.append(
            DecompositionTerm(
                0.5, [u, v], f"MCP({sign:+d}pi/2) x MCP({sign:+d}pi/2)"
            )
        )
    ident_m = ch.UnitaryChannel(gates.identity(m))
    ident_mp = ch.UnitaryChannel(gates.identity(m_prime))
    mx_m = ch.mcz_mx_map(m)
    mx_mp = ch.mcz_mx_map(m_prime)
    terms.append(DecompositionTerm(0.5, [mx_m, ident_mp], "E_MCZ-MX x I"))
    terms.append(
        DecompositionTerm(
            -0.5, [mx_m, ch.UnitaryChannel(gates.mcz(m_prime))], "E_MCZ-MX x MCZ"
        )
    )
    terms.append(DecompositionTerm(0.5, [ident_m, mx_mp], "I x E_MCZ-MX"))
    terms.append(
        DecompositionTerm(
            -0.5, [ch.UnitaryChannel(gates.mcz(m)), mx_mp], "MCZ x E_MCZ-MX"
        )
    )
    return Decomposition(
        f"mcz[{m},{m_prime}]", (m, m_prime), terms, ptm_of_unitary(gates.mcz(n))
    )


# ---------------------------------------------------------------------------
# ZZ-rotation cuts
# ---------------------------------------------------------------------------


def _rz_channel(theta: float) -> ch.UnitaryChannel:
    return ch.UnitaryChannel(gates.rz(theta))


def rzz_decomposition_a(theta: float) -> Decomposition:
    """Ancilla-based cut of ``R_ZZ(theta)``; ``gamma = 3`` for every angle.

    Terms with an exactly zero coefficient are dropped.
    """
    theta = float(theta)
    my = ch.rzz_my_map(theta)
    ez = ch.signed_z_map()
    ident = ch.UnitaryChannel(gates.identity(1))
    raw = [
        (0.5 * (1 + np.cos(theta)), [ident, ident], "I x I"),
        (0.5 * (1 - np.cos(theta)), [_rz_channel(np.pi), _rz_channel(np.pi)],
         "RZ(pi) x RZ(pi)"),
        (0.5, [_rz_channel(np.pi / 2), my], "RZ(+pi/2) x E_RZZ-MY"),
        (-0.5, [_rz_channel(-np.pi / 2), my], "RZ(-pi/2) x E_RZZ-MY"),
        (0.5, [ez, _rz_channel(theta)], "EbarZ x RZ(+theta)"),
        (-0.5, [ez, _rz_channel(-theta)], "EbarZ x RZ(-theta)"),
    ]
    terms = [DecompositionTerm(q, f, lab) for q, f, lab in raw if q != 0.0]
    return Decomposition(
        f"rzz_a[{theta:.12g}]", (1, 1), terms, ptm_of_unitary(gates.rzz(theta))
    )


def rzz_decomposition_b(theta: float) -> Decomposition:
    """Ancilla-free cut of ``R_ZZ(theta)``; ``gamma = 1 + 2|sin(theta)|``.

    Obtained by folding the sine of the rotation angle into the coefficients,
    so all remaining maps are angle-independent.  Zero-coefficient terms are
    dropped (at ``theta = 0`` only ``I x I`` survives).
    """
    theta = float(theta)
    s = np.sin(theta)
    ez = ch.signed_z_map()
    ident = ch.UnitaryChannel(gates.identity(1))
    raw = [
        (0.5 * (1 + np.cos(theta)), [ident, ident], "I x I"),
        (0.5 * (1 - np.cos(theta)), [_rz_channel(np.pi), _rz_channel(np.pi)],
         "RZ(pi) x RZ(pi)"),
        (0.5 * s, [_rz_channel(np.pi / 2), ez], "RZ(+pi/2) x EbarZ"),
        (-0.5 * s, [_rz_channel(-np.pi / 2), ez], "RZ(-pi/2) x EbarZ"),
        (0.5 * s, [ez, _rz_channel(np.pi / 2)], "EbarZ x RZ(+pi/2)"),
        (-0.5 * s, [ez, _rz_channel(-np.pi / 2)], "EbarZ x RZ(-pi/2)"),
    ]
    terms = [DecompositionTerm(q, f, lab) for q, f, lab in raw if q != 0.0]
    return Decomposition(
        f"rzz_b[{theta:.12g}]", (1, 1), terms, ptm_of_unitary(gates.rzz(theta))
    )


# ---------------------------------------------------------------------------
# Multi-qubit Z rotation
# ---------------------------------------------------------------------------


def _ladder(size: int, wire: int) -> Operator:
    """CNOT ladder folding the register's parity onto qubit ``wire``."""
    mat = np.eye(2**size, dtype=complex)
    for q in range(size):
        if q != wire:
            mat = gates.cnot_on(size, q, wire).mat @ mat
    return Operator(mat)


def _conjugate_factor(factor, size: int, wire: int):
    """Lift a single-qubit factor on ``wire`` to the register and conjugate it
    by the parity ladder.  Size-1 registers return the factor unchanged."""
    if size == 1:
        return factor
    ladder = _ladder(size, wire)
    if isinstance(factor, ch.UnitaryChannel):
        lifted = embed_matrix(factor.u.mat, [wire], size)
        return ch.UnitaryChannel(
            Operator(ladder.mat.conj().T @ lifted @ ladder.mat)
        )
    if isinstance(factor, ch.SignedMeasurePrepare):
        # EbarZ conjugated by the ladder: signed projective Kraus map
        terms = []
        for sign, ket in ((1, KET_0), (-1, KET_1)):
            proj = embed_matrix(projector(ket).mat, [wire], size)
            terms.append(
                (sign, Operator(ladder.mat.conj().T @ proj @ ladder.mat))
            )
        return ch.SignedKraus(terms)
    raise DimensionError(f"cannot conjugate factor {factor!r}")


def multi_z_rotation_decomposition(m: int, m_prime: int, theta: float) -> Decomposition:
    """Cut of ``exp(-i theta/2 Z^(m+m'))`` across the (m, m') boundary.

    Local CNOT ladders fold each register's parity onto the qubit adjacent to
    the cut, reducing the gate to a two-qubit ZZ rotation; every term of the
    two-qubit protocol is conjugated register-locally, so
    ``gamma = 1 + 2|sin(theta)|`` is unchanged.  For ``(1, 1)`` the ladders
    are empty and this reduces to the two-qubit decomposition itself.
    """
    if m < 1 or m_prime < 1:
        raise DimensionError(f"need m, m' >= 1, got ({m}, {m_prime})")
    n = m + m_prime
    _check_cut_size(n)
    base = rzz_decomposition_b(theta)
    terms = []
    for t in base.terms:
        up = _conjugate_factor(t.factors[0], m, m - 1)
        low = _conjugate_factor(t.factors[1], m_prime, 0)
        terms.append(DecompositionTerm(t.q, [up, low], t.label, t.needs_cc))
    target = ptm_of_unitary(gates.multi_z_rotation(n, theta))
    return Decomposition(
        f"multi_z[{m},{m_prime},{theta:.12g}]", (m, m_prime), terms, target
    )


# ---------------------------------------------------------------------------
# Controlled-unitary sequences
# ---------------------------------------------------------------------------


def controlled_sequence_decomposition(ops, n_targets: int) -> Decomposition:
    """Cut separating the shared control qubit from the ``n_targets`` targets.

    ``ops`` is a list of ``(target-qubits, unitary)`` pairs applied in order,
    all controlled on the same qubit; ``gamma = 3``.  The CPTP term realizes
    the whole sequence with an ancilla as control plus outcome-conditioned
    ``R_Z(+-pi/2)`` feedback on the control qubit; its communication is
    internal to the joint map, so no term is flagged as needing communication
    across the cut.
    """
    n = 1 + n_targets
    _check_cut_size(n)
    mx = ch.e_v_mx_map(ops, n_targets)
    mz = ch.e_v_mz_map(ops, n_targets)
    ident = ch.UnitaryChannel(gates.identity(1))
    terms = [
        DecompositionTerm(1.0, [ch.e_rzv_map(ops, n_targets)], "E_RZV"),
        DecompositionTerm(0.5, [ident, mx], "I x E_V-MX"),
        DecompositionTerm(-0.5, [_rz_channel(np.pi), mx], "RZ(pi) x E_V-MX"),
        DecompositionTerm(1.0, [ch.signed_z_map(), mz], "EbarZ x E_V-MZ"),
    ]
    target = ptm_of_unitary(ch.controlled_sequence_unitary(ops, n_targets))
    return Decomposition(
        f"controlled_sequence[M={len(tuple(ops))}]", (1, n_targets), terms, target
    )
