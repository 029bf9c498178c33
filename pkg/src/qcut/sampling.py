"""Monte-Carlo quasiprobability sampling of cut circuits.

The estimator follows the standard sign-tracking protocol: a term ``nu`` is
drawn with probability ``p_nu = |q_nu| / gamma``, its maps are executed
physically (measure-and-prepare outcomes and ancilla measurements sampled
from Born probabilities, with the ``+-1`` branch signs recorded classically),
the observable eigenvalue ``lambda`` is sampled projectively, and the shot
contributes ``y = gamma * sign(q_nu) * (product of branch signs) * lambda``.
The mean of ``y`` is an unbiased estimate of ``<O>`` with single-shot
variance at most ``gamma^2 - <O>^2``.

Because every map is a small dense object, the full discrete distribution of
``y`` for each term can be enumerated exactly; sampling then reduces to
categorical draws from those distributions, which makes multi-million-shot
runs cheap while remaining shot-for-shot faithful to the physical protocol
(:func:`execute_term` implements the sequential single-shot version used to
cross-check the enumeration).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import channels as ch
from .linalg import (
    ATOL_STRUCT,
    DimensionError,
    Operator,
    QcutError,
    vectorize,
    ptm_of_unitary,
)
from .cuts import Decomposition, DecompositionTerm

#: slack on the |eigenvalue| <= 1 observable bound
EIGENVALUE_SLACK = 1e-12

#: probabilities this close to 0 are treated as exactly 0 (rounding guard)
PROB_FLOOR = 1e-14


class UnsupportedTermError(QcutError):
    """A decomposition term contains a map with no physical realization
    (a signed Kraus map given without an ancilla circuit)."""


@dataclass(frozen=True)
class ExperimentSpec:
    """A cut-circuit sampling experiment.

    All per-register lists follow the decomposition's partition order.
    ``pre_unitaries``/``post_unitaries`` model local circuits before and
    after the cut channel; ``observable`` is a product observable with
    per-register eigenvalues in ``[-1, 1]``.
    """

    decomposition: Decomposition
    initial_state: tuple
    observable: tuple
    shots: int
    seed: int
    pre_unitaries: Optional[tuple] = None
    post_unitaries: Optional[tuple] = None

    def __post_init__(self):
        part = self.decomposition.partition
        object.__setattr__(self, "initial_state", tuple(self.initial_state))
        object.__setattr__(self, "observable", tuple(self.observable))
        for name in ("pre_unitaries", "post_unitaries"):
            val = getattr(self, name)
            if val is not None:
                object.__setattr__(self, name, tuple(val))
        if self.shots < 1:
            raise DimensionError(f"shots must be >= 1, got {self.shots}")
        int(self.seed)
        for label, ops in (
            ("initial_state", self.initial_state),
            ("observable", self.observable),
            ("pre_unitaries", self.pre_unitaries),
            ("post_unitaries", self.post_unitaries),
        ):
            if ops is None:
                continue
            if len(ops) != len(part):
                raise DimensionError(
                    f"{label} has {len(ops)} entries for {len(part)} registers"
                )
            for reg, (op, size) in enumerate(zip(ops, part)):
                if op.n_qubits != size:
                    raise DimensionError(
                        f"{label}[{reg}] acts on {op.n_qubits} qubits, "
                        f"register has {size}"
                    )
        for reg, rho in enumerate(self.initial_state):
            if abs(rho.trace() - 1) > ATOL_STRUCT:
                raise DimensionError(f"initial_state[{reg}] must have unit trace")
            if np.linalg.eigvalsh(rho.mat).min() < -ATOL_STRUCT:
                raise DimensionError(f"initial_state[{reg}] must be PSD")
        for reg, obs in enumerate(self.observable):
            if np.max(np.abs(obs.mat - obs.mat.conj().T)) > ATOL_STRUCT:
                raise DimensionError(f"observable[{reg}] must be Hermitian")
            lam = np.linalg.eigvalsh(obs.mat)
            if np.max(np.abs(lam)) > 1 + EIGENVALUE_SLACK:
                raise DimensionError(
                    f"observable[{reg}] eigenvalues exceed [-1, 1] "
                    f"(max |lambda| = {np.max(np.abs(lam)):.6g})"
                )


@dataclass(frozen=True)
class SamplingReport:
    estimate: float
    standard_error: float
    shots: int
    gamma: float
    exact_value: float
    per_term_shots: tuple
    seed: int
    single_shot_variance: float
    batch_means: tuple = ()

    def to_dict(self) -> dict:
        return {
            "estimate": self.estimate,
            "standard_error": self.standard_error,
            "shots": self.shots,
            "gamma": self.gamma,
            "exact_value": self.exact_value,
            "per_term_shots": list(self.per_term_shots),
            "seed": self.seed,
            "single_shot_variance": self.single_shot_variance,
            "batch_means": list(self.batch_means),
        }


# ---------------------------------------------------------------------------
# Term-block plumbing
# ---------------------------------------------------------------------------


def _blocks_of_term(spec: ExperimentSpec, term: DecompositionTerm) -> list:
    """Group the experiment's per-register data by the term's factor layout.

    Returns one entry per factor: (factor, rho_block, obs_block) with the
    pre-unitary already applied to the block state and the post-unitary
    absorbed into the block observable (Heisenberg picture).
    """
    part = spec.decomposition.partition
    edges = np.cumsum((0,) + part)
    blocks = []
    start = 0
    for factor in term.factors:
        stop = start + factor.n_qubits
        regs = [r for r in range(len(part)) if edges[r] >= start and edges[r + 1] <= stop]
        rho = np.array([[1.0 + 0j]])
        obs = np.array([[1.0 + 0j]])
        for r in regs:
            rho_r = spec.initial_state[r].mat
            obs_r = spec.observable[r].mat
            if spec.pre_unitaries is not None:
                u = spec.pre_unitaries[r].mat
                rho_r = u @ rho_r @ u.conj().T
            if spec.post_unitaries is not None:
                u = spec.post_unitaries[r].mat
                obs_r = u.conj().T @ obs_r @ u
            rho = np.kron(rho, rho_r)
            obs = np.kron(obs, obs_r)
        blocks.append((factor, rho, obs))
        start = stop
    return blocks


def _factor_branches(factor, rho: np.ndarray) -> list:
    """All outcome branches of one factor on a block state.

    Returns (probability, sign, post-state) triples; probabilities sum to 1
    for a unit-trace input.
    """
    if isinstance(factor, ch.UnitaryChannel):
        u = factor.u.mat
        return [(1.0, 1, u @ rho @ u.conj().T)]
    if isinstance(factor, ch.SignedMeasurePrepare):
        out = []
        for a, e, prep in factor.terms:
            p = float(np.real(np.einsum("ij,ji->", e.mat, rho)))
            if p > PROB_FLOOR:
                out.append((p, a, prep.mat))
        return out
    if isinstance(factor, ch.AncillaCircuit):
        out = []
        for outcome in (0, 1):
            branch = factor.branch_batch(rho[None, :, :], outcome)[0]
            p = float(np.real(np.trace(branch)))
            if p > PROB_FLOOR:
                out.append((p, factor.outcome_signs[outcome], branch / p))
        return out
    raise UnsupportedTermError(
        f"factor {factor!r} has no physical realization for sampling"
    )


def _eigen_distribution(obs: np.ndarray, rho: np.ndarray) -> tuple:
    """Projective measurement of ``obs`` on ``rho``: (eigenvalues, probabilities)."""
    lam, vecs = np.linalg.eigh(obs)
    probs = np.real(np.einsum("ia,ij,ja->a", vecs.conj(), rho, vecs))
    probs = np.clip(probs, 0.0, None)
    return lam, probs / probs.sum()


def _block_value_distribution(factor, rho, obs, track_signs: bool) -> tuple:
    """Discrete distribution of ``sign * lambda`` for one block."""
    values = []
    probs = []
    for p_branch, sign, state in _factor_branches(factor, rho):
        if not track_signs:
            sign = 1
        lam, p_lam = _eigen_distribution(obs, state)
        values.append(sign * lam)
        probs.append(p_branch * p_lam)
    values = np.concatenate(values)
    probs = np.concatenate(probs)
    keep = probs > PROB_FLOOR
    return values[keep], probs[keep] / probs[keep].sum()


def term_value_distributions(
    spec: ExperimentSpec, term: DecompositionTerm, track_signs: bool = True
) -> list:
    """Per-block distributions of the signed observable sample for one term."""
    return [
        _block_value_distribution(factor, rho, obs, track_signs)
        for factor, rho, obs in _blocks_of_term(spec, term)
    ]


# ---------------------------------------------------------------------------
# Single-shot physical executor (sequential oracle)
# ---------------------------------------------------------------------------


def execute_term(term: DecompositionTerm, spec: ExperimentSpec, rng) -> tuple:
    """Physically simulate one shot of one term: sample each factor's
    measurement branch, then the observable eigenvalue per block.

    Returns ``(sign, lam)`` with ``sign`` the product of branch signs and
    ``lam`` the product of sampled per-block eigenvalues.
    """
    sign = 1
    lam_total = 1.0
    for factor, rho, obs in _blocks_of_term(spec, term):
        branches = _factor_branches(factor, rho)
        probs = np.array([b[0] for b in branches])
        k = int(rng.choice(len(branches), p=probs / probs.sum()))
        p, s, state = branches[k]
        sign *= s
        lam, p_lam = _eigen_distribution(obs, state)
        lam_total *= float(lam[int(rng.choice(len(lam), p=p_lam))])
    return sign, lam_total


# ---------------------------------------------------------------------------
# Expectation values
# ---------------------------------------------------------------------------


def exact_expectation(spec: ExperimentSpec) -> float:
    """Dense-superoperator expectation of the cut channel on this experiment."""
    rho = np.array([[1.0 + 0j]])
    obs = np.array([[1.0 + 0j]])
    for r in range(len(spec.decomposition.partition)):
        rho_r = spec.initial_state[r].mat
        obs_r = spec.observable[r].mat
        if spec.pre_unitaries is not None:
            u = spec.pre_unitaries[r].mat
            rho_r = u @ rho_r @ u.conj().T
        if spec.post_unitaries is not None:
            u = spec.post_unitaries[r].mat
            obs_r = u.conj().T @ obs_r @ u
        rho = np.kron(rho, rho_r)
        obs = np.kron(obs, obs_r)
    out = spec.decomposition.reconstruct().matrix @ vectorize(Operator(rho))
    return float(np.real(np.vdot(vectorize(Operator(obs)), out)))


def _sample_categorical(values, probs, count, rng) -> np.ndarray:
    edges = np.cumsum(probs)
    edges[-1] = 1.0
    idx = np.searchsorted(edges, rng.random(count), side="right")
    return values[np.minimum(idx, len(values) - 1)]


def run(
    spec: ExperimentSpec,
    track_signs: bool = True,
    n_batches: int = 0,
) -> SamplingReport:
    """Run the sampling experiment; deterministic given ``(spec, seed)``.

    With ``track_signs=False`` the classical branch signs are discarded,
    which biases the estimator for any decomposition containing a non-CPTP
    term (used to demonstrate why the sign bookkeeping is required).
    ``n_batches > 0`` additionally records contiguous shot-batch means.
    """
    deco = spec.decomposition
    gamma = deco.one_norm()
    p_terms = spec.decomposition.sampling_probabilities()
    rng = np.random.Generator(np.random.Philox(int(spec.seed)))
    counts = rng.multinomial(spec.shots, p_terms)

    samples = np.empty(spec.shots, dtype=float)
    pos = 0
    for term, count in zip(deco.terms, counts):
        if count == 0:
            continue
        y = np.full(count, gamma * np.sign(term.q))
        for values, probs in term_value_distributions(spec, term, track_signs):
            y *= _sample_categorical(values, probs, count, rng)
        samples[pos : pos + count] = y
        pos += count
    # restore i.i.d. shot order (term draws and branch draws commute)
    samples = samples[rng.permutation(spec.shots)]

    estimate = float(np.mean(samples))
    variance = float(np.var(samples, ddof=1)) if spec.shots > 1 else 0.0
    stderr = float(np.sqrt(variance / spec.shots))
    batch_means = ()
    if n_batches > 0:
        batch_means = tuple(
            float(np.mean(chunk)) for chunk in np.array_split(samples, n_batches)
        )
    return SamplingReport(
        estimate=estimate,
        standard_error=stderr,
        shots=spec.shots,
        gamma=gamma,
        exact_value=exact_expectation(spec),
        per_term_shots=tuple(int(c) for c in counts),
        seed=int(spec.seed),
        single_shot_variance=variance,
        batch_means=batch_means,
    )
