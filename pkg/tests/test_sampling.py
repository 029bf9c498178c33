import numpy as np
import pytest

from qcut import gates
from qcut.cuts import (
    controlled_sequence_decomposition,
    mcz_decomposition,
    multi_z_rotation_decomposition,
    rzz_decomposition_b,
    wire_cut_cc,
    wire_cut_ncc,
)
from qcut.linalg import Operator, PauliString, QcutError
from qcut.sampling import (
    ExperimentSpec,
    UnsupportedTermError,
    exact_expectation,
    execute_term,
    run,
)

X = Operator(np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex))


def plus_state(n):
    d = 2**n
    return Operator(np.full((d, d), 1.0 / d, dtype=complex))


def spec_for(deco, state_bits, obs, shots=200_000, seed=0):
    states, observables, pos = [], [], 0
    for s in deco.partition:
        if state_bits == "plus":
            states.append(plus_state(s))
        else:
            states.append(gates.basis_state(state_bits[pos : pos + s]))
        observables.append(PauliString(obs[pos : pos + s]).to_operator())
        pos += s
    return ExperimentSpec(
        decomposition=deco,
        initial_state=tuple(states),
        observable=tuple(observables),
        shots=shots,
        seed=seed,
    )


def exact_direct(deco, spec):
    """Independent oracle: apply the target superoperator to the joint state."""
    rho = Operator(np.array([[1.0 + 0j]]))
    obs = Operator(np.array([[1.0 + 0j]]))
    for s, o in zip(spec.initial_state, spec.observable):
        rho = Operator(np.kron(rho.mat, s.mat))
        obs = Operator(np.kron(obs.mat, o.mat))
    out = deco.target.apply_to(rho)
    return float(np.real(np.trace(obs.mat @ out.mat)))


CASES = [
    (wire_cut_cc(), "1", "Z", -1.0),
    (wire_cut_ncc(), "plus", "X", 1.0),
    (mcz_decomposition(2, 1), "plus", "XXX", None),
    (rzz_decomposition_b(np.pi / 2), "plus", "XX", None),
    (multi_z_rotation_decomposition(1, 1, 0.8), "plus", "XI", None),
]


@pytest.mark.parametrize("deco,state,obs,known", CASES)
def test_exact_expectation_matches_direct_oracle(deco, state, obs, known):
    spec = spec_for(deco, state, obs, shots=1000)
    value = exact_expectation(spec)
    assert value == pytest.approx(exact_direct(deco, spec), abs=1e-10)
    if known is not None:
        assert value == pytest.approx(known, abs=1e-10)


@pytest.mark.parametrize("deco,state,obs,known", CASES)
def test_run_unbiased_within_5_sigma(deco, state, obs, known):
    spec = spec_for(deco, state, obs, shots=200_000, seed=5)
    report = run(spec)
    exact = exact_expectation(spec)
    assert abs(report.estimate - exact) < 5 * report.standard_error + 1e-12
    # [KNOWN] true single-shot variance is bounded by gamma^2 - <O>^2; the
    # empirical variance gets statistical slack ~ Var * sqrt(2 / shots)
    slack = 5 * report.gamma**2 * np.sqrt(2 / spec.shots)
    assert report.single_shot_variance <= report.gamma**2 - exact**2 + slack
    assert report.gamma == pytest.approx(deco.one_norm())
    assert sum(report.per_term_shots) == spec.shots


def test_controlled_sequence_sampling():
    theta = np.pi / 5
    ops = [((0,), X), ((1,), Operator(np.diag([1.0, np.exp(1j * theta)])))]
    deco = controlled_sequence_decomposition(ops, 2)
    spec = spec_for(deco, "plus", "XXI", shots=200_000, seed=9)
    report = run(spec)
    exact = exact_expectation(spec)
    assert abs(report.estimate - exact) < 5 * report.standard_error + 1e-12


def test_determinism_identical_reports():
    spec = spec_for(rzz_decomposition_b(1.0), "plus", "XX", shots=50_000, seed=123)
    r1 = run(spec, n_batches=5)
    r2 = run(spec, n_batches=5)
    assert r1.to_dict() == r2.to_dict()
    r3 = run(spec_for(rzz_decomposition_b(1.0), "plus", "XX", shots=50_000, seed=124))
    assert r3.estimate != r1.estimate


def test_sign_tracking_matters():
    # dropping the classically-tracked signs produces a biased estimator
    spec = spec_for(wire_cut_cc(), "1", "Z", shots=300_000, seed=2)
    signed = run(spec)
    unsigned = run(spec, track_signs=False)
    assert abs(signed.estimate - (-1.0)) < 5 * signed.standard_error
    assert abs(unsigned.estimate - (-1.0)) > 10 * unsigned.standard_error


def test_execute_term_oracle_agrees_with_vectorized_run():
    # sequential single-shot oracle: per-term means weighted by q * gamma signs
    deco = rzz_decomposition_b(np.pi / 2)
    spec = spec_for(deco, "plus", "XX", shots=1, seed=0)
    rng = np.random.default_rng(42)
    gamma = deco.one_norm()
    total = 0.0
    shots_per_term = 4000
    for term in deco.terms:
        acc = 0.0
        for _ in range(shots_per_term):
            sign, lam = execute_term(term, spec, rng)
            acc += sign * lam
        total += np.sign(term.q) * gamma * (abs(term.q) / gamma) * acc / shots_per_term
    assert total == pytest.approx(exact_expectation(spec), abs=0.1)


def test_batch_means():
    spec = spec_for(wire_cut_cc(), "0", "Z", shots=10_000, seed=8)
    report = run(spec, n_batches=4)
    assert len(report.batch_means) == 4
    assert np.mean(report.batch_means) == pytest.approx(report.estimate, abs=1e-9)


def test_report_to_dict_is_json_plain():
    import json

    spec = spec_for(wire_cut_ncc(), "0", "Z", shots=1000, seed=1)
    payload = json.dumps(run(spec, n_batches=2).to_dict(), sort_keys=True)
    assert "estimate" in payload


def test_multi_z_large_register_unsupported_terms():
    # conjugated signed-Z factors are exact-math objects without a sampling
    # realization; the sampler refuses rather than silently mis-sampling
    deco = multi_z_rotation_decomposition(2, 2, 0.8)
    spec = spec_for(deco, "0000", "ZZZZ", shots=10, seed=0)
    with pytest.raises(UnsupportedTermError):
        run(spec)
    # exact verification still works
    assert deco.verify()["passed"]


def test_spec_validation():
    deco = wire_cut_ncc()
    with pytest.raises(QcutError):
        spec_for(deco, "0", "Z", shots=0)
    with pytest.raises(QcutError):
        ExperimentSpec(
            decomposition=deco,
            initial_state=(gates.basis_state("0"),),
            observable=(2.0 * PauliString("Z").to_operator(),),  # eigenvalues > 1
            shots=10,
            seed=0,
        )
    with pytest.raises(QcutError):
        ExperimentSpec(
            decomposition=deco,
            initial_state=(gates.basis_state("00"),),  # wrong register size
            observable=(PauliString("ZZ").to_operator(),),
            shots=10,
            seed=0,
        )
