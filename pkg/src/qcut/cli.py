"""Command-line front end: ``qcut verify|sample|norms|zx-check``.

Exit codes: 0 success, 1 check failure, 2 usage/config error.  All numeric
output is printed with 12 significant digits; JSON reports are emitted with
sorted keys so identical inputs produce byte-identical files.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys

import numpy as np

from . import cuts, gates, sampling, zx
from .linalg import Operator, PauliString, QcutError
from .zx import parse_angle


def _fmt(x) -> str:
    return f"{float(x):.12g}"


class ConfigError(QcutError):
    """Invalid experiment configuration (reported with the offending field)."""


# ---------------------------------------------------------------------------
# Config parsing
# ---------------------------------------------------------------------------

_GATE_TABLE = {
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "z": np.diag([1.0, -1.0]).astype(complex),
    "h": np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2),
    "s": np.diag([1.0, 1j]),
}


def _require_fields(obj: dict, where: str, required, optional=()):
    unknown = set(obj) - set(required) - set(optional)
    if unknown:
        raise ConfigError(f"{where}: unknown fields {sorted(unknown)}")
    missing = [f for f in required if f not in obj]
    if missing:
        raise ConfigError(f"{where}: missing fields {missing}")


def _parse_theta(value, where: str) -> float:
    try:
        if isinstance(value, str):
            return parse_angle(value)
        return float(value)
    except (QcutError, TypeError, ValueError):
        raise ConfigError(f"{where}: cannot parse angle {value!r}") from None


def _parse_controlled_op(entry, where: str):
    if not isinstance(entry, dict):
        raise ConfigError(f"{where}: each controlled op must be an object")
    _require_fields(entry, where, ["targets", "gate"], ["theta", "matrix"])
    targets = tuple(int(t) for t in entry["targets"])
    gate = entry["gate"]
    if gate in _GATE_TABLE:
        mat = _GATE_TABLE[gate]
    elif gate == "rz":
        mat = gates.rz(_parse_theta(entry.get("theta", 0), where)).mat
    elif gate == "phase":
        mat = np.diag([1.0, np.exp(1j * _parse_theta(entry.get("theta", 0), where))])
    elif gate == "matrix":
        if "matrix" not in entry:
            raise ConfigError(f"{where}: gate 'matrix' needs a 'matrix' field")
        mat = _parse_matrix(entry["matrix"], where)
    else:
        raise ConfigError(f"{where}: unknown gate {gate!r}")
    if mat.shape != (2 ** len(targets),) * 2:
        raise ConfigError(
            f"{where}: gate {gate!r} does not match {len(targets)} target qubits"
        )
    return targets, Operator(mat)


def _parse_matrix(data, where: str) -> np.ndarray:
    def cell(v):
        if isinstance(v, (int, float)):
            return complex(v)
        if isinstance(v, (list, tuple)) and len(v) == 2:
            return complex(float(v[0]), float(v[1]))
        raise ConfigError(f"{where}: matrix entries must be numbers or [re, im]")

    try:
        return np.array([[cell(v) for v in row] for row in data], dtype=complex)
    except (TypeError, ValueError):
        raise ConfigError(f"{where}: malformed matrix") from None


def build_decomposition(selector: dict) -> cuts.Decomposition:
    _require_fields(
        selector,
        "decomposition",
        ["name"],
        ["m", "m_prime", "theta", "cc_basis", "controlled_ops", "n_targets"],
    )
    name = selector["name"]
    if name == "wire_ncc":
        return cuts.wire_cut_ncc()
    if name == "wire_cc":
        return cuts.wire_cut_cc(selector.get("cc_basis", "Y"))
    if name == "mcz":
        for f in ("m", "m_prime"):
            if f not in selector:
                raise ConfigError(f"decomposition: mcz requires field {f!r}")
        return cuts.mcz_decomposition(int(selector["m"]), int(selector["m_prime"]))
    if name in ("rzz_a", "rzz_b"):
        if "theta" not in selector:
            raise ConfigError(f"decomposition: {name} requires field 'theta'")
        theta = _parse_theta(selector["theta"], "decomposition.theta")
        build = cuts.rzz_decomposition_a if name == "rzz_a" else cuts.rzz_decomposition_b
        return build(theta)
    if name == "multi_z":
        for f in ("m", "m_prime", "theta"):
            if f not in selector:
                raise ConfigError(f"decomposition: multi_z requires field {f!r}")
        return cuts.multi_z_rotation_decomposition(
            int(selector["m"]),
            int(selector["m_prime"]),
            _parse_theta(selector["theta"], "decomposition.theta"),
        )
    if name == "controlled_sequence":
        for f in ("controlled_ops", "n_targets"):
            if f not in selector:
                raise ConfigError(
                    f"decomposition: controlled_sequence requires field {f!r}"
                )
        ops = [
            _parse_controlled_op(e, f"decomposition.controlled_ops[{k}]")
            for k, e in enumerate(selector["controlled_ops"])
        ]
        return cuts.controlled_sequence_decomposition(ops, int(selector["n_targets"]))
    raise ConfigError(f"decomposition: unknown name {name!r}")


def _state_for_register(spec, size: int, where: str) -> Operator:
    if isinstance(spec, str):
        if spec == "zeros":
            return gates.basis_state("0" * size)
        if spec == "plus":
            mat = np.full((2**size, 2**size), 1.0 / 2**size, dtype=complex)
            return Operator(mat)
        if set(spec) <= {"0", "1"}:
            if len(spec) != size:
                raise ConfigError(f"{where}: bitstring length != register size {size}")
            return gates.basis_state(spec)
        raise ConfigError(f"{where}: unknown state {spec!r}")
    raise ConfigError(f"{where}: expected a state string")


def build_experiment(config: dict, seed=None) -> sampling.ExperimentSpec:
    _require_fields(
        config,
        "config",
        ["decomposition", "initial_state", "observable", "shots"],
        ["seed", "output", "batch_csv", "n_batches"],
    )
    deco = build_decomposition(config["decomposition"])
    part = deco.partition
    n = sum(part)

    state_spec = config["initial_state"]
    states = []
    if isinstance(state_spec, str):
        if state_spec in ("zeros", "plus"):
            states = [_state_for_register(state_spec, s, "initial_state") for s in part]
        else:
            if len(state_spec) != n:
                raise ConfigError(
                    f"initial_state: bitstring length {len(state_spec)} != {n} qubits"
                )
            pos = 0
            for s in part:
                states.append(gates.basis_state(state_spec[pos : pos + s]))
                pos += s
    elif isinstance(state_spec, list):
        if len(state_spec) != n:
            raise ConfigError(
                f"initial_state: need one single-qubit density matrix per qubit ({n})"
            )
        qubit_states = [
            Operator(_parse_matrix(m, f"initial_state[{k}]"))
            for k, m in enumerate(state_spec)
        ]
        pos = 0
        for s in part:
            mat = np.array([[1.0 + 0j]])
            for q in range(pos, pos + s):
                mat = np.kron(mat, qubit_states[q].mat)
            states.append(Operator(mat))
            pos += s
    else:
        raise ConfigError("initial_state: expected a string or a list of matrices")

    obs_spec = config["observable"]
    if not isinstance(obs_spec, str) or len(obs_spec) != n:
        raise ConfigError(f"observable: expected a Pauli string of length {n}")
    try:
        observables = []
        pos = 0
        for s in part:
            observables.append(PauliString(obs_spec[pos : pos + s]).to_operator())
            pos += s
    except QcutError as exc:
        raise ConfigError(f"observable: {exc}") from None

    shots = config["shots"]
    if not isinstance(shots, int) or shots < 1:
        raise ConfigError(f"shots: must be a positive integer, got {shots!r}")
    if seed is None:
        seed = config.get("seed")
    if seed is None:
        raise ConfigError("seed: required (pass --seed or set it in the config)")
    try:
        return sampling.ExperimentSpec(
            decomposition=deco,
            initial_state=states,
            observable=observables,
            shots=shots,
            seed=int(seed),
        )
    except QcutError as exc:
        raise ConfigError(str(exc)) from None


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

_THETA_GRID = ("0", "pi/6", "pi/4", "pi/2", "1.234", "pi")


def _verification_suite():
    yield cuts.wire_cut_ncc()
    for basis in "YXZ":
        yield cuts.wire_cut_cc(basis)
    for m in range(1, 5):
        for mp in range(1, 6 - m):
            yield cuts.mcz_decomposition(m, mp)
    for text in _THETA_GRID:
        theta = parse_angle(text)
        yield cuts.rzz_decomposition_a(theta)
        yield cuts.rzz_decomposition_b(theta)
    for m, mp in ((2, 1), (1, 2), (2, 2)):
        yield cuts.multi_z_rotation_decomposition(m, mp, parse_angle("pi/4"))
    x_gate = Operator(_GATE_TABLE["x"])
    for theta in (parse_angle("pi/5"), parse_angle("pi/2")):
        ops = [((0,), x_gate), ((1,), Operator(np.diag([1, np.exp(1j * theta)])))]
        yield cuts.controlled_sequence_decomposition(ops, 2)


def cmd_verify(args) -> int:
    if args.all:
        decos = list(_verification_suite())
    else:
        if not args.deco:
            raise ConfigError("verify: pass --all or --deco NAME")
        selector = {"name": args.deco}
        for field, value in (
            ("m", args.m),
            ("m_prime", args.mprime),
            ("theta", args.theta),
            ("cc_basis", args.cc_basis),
        ):
            if value is not None:
                selector[field] = value
        decos = [build_decomposition(selector)]
    failed = 0
    for deco in decos:
        report = deco.verify()
        status = "PASS" if report["passed"] else "FAIL"
        print(
            f"{deco.name}: gamma = {_fmt(report['one_norm'])}, "
            f"max|delta| = {_fmt(report['max_abs_deviation'])}  [{status}]"
        )
        failed += not report["passed"]
    print(f"{len(decos) - failed}/{len(decos)} decompositions verified")
    return 1 if failed else 0


def cmd_sample(args) -> int:
    with open(args.config) as fh:
        try:
            config = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config: invalid JSON ({exc})") from None
    spec = build_experiment(config, seed=args.seed)
    n_batches = int(config.get("n_batches", 0))
    report = sampling.run(spec, n_batches=n_batches)
    print(
        f"estimate = {_fmt(report.estimate)} +/- {_fmt(report.standard_error)}  "
        f"(exact = {_fmt(report.exact_value)}, gamma = {_fmt(report.gamma)}, "
        f"shots = {report.shots}, seed = {report.seed})"
    )
    out_path = args.output or config.get("output")
    if out_path:
        payload = json.dumps(report.to_dict(), sort_keys=True, indent=2) + "\n"
        with open(out_path, "w") as fh:
            fh.write(payload)
        print(f"report written to {out_path}")
    csv_path = args.batch_csv or config.get("batch_csv")
    if csv_path:
        if not report.batch_means:
            raise ConfigError("batch_csv: set n_batches > 0 in the config")
        with open(csv_path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["batch_index", "partial_mean"])
            for k, mean in enumerate(report.batch_means):
                writer.writerow([k, _fmt(mean)])
        print(f"batch means written to {csv_path}")
    return 0


def _norms_catalog():
    yield cuts.wire_cut_ncc(), "-"
    for basis in "YXZ":
        yield cuts.wire_cut_cc(basis), f"cc_basis={basis}"
    for m, mp in ((1, 1), (2, 1), (2, 2), (3, 2), (3, 3)):
        yield cuts.mcz_decomposition(m, mp), f"m={m},m'={mp}"
    for text in _THETA_GRID:
        yield cuts.rzz_decomposition_a(parse_angle(text)), f"theta={text}"
    for text in _THETA_GRID:
        yield cuts.rzz_decomposition_b(parse_angle(text)), f"theta={text}"
    yield cuts.multi_z_rotation_decomposition(2, 1, parse_angle("pi/2")), (
        "m=2,m'=1,theta=pi/2"
    )
    x_gate = Operator(_GATE_TABLE["x"])
    ops = [((0,), x_gate), ((1,), Operator(np.diag([1, np.exp(1j * np.pi / 5)])))]
    yield cuts.controlled_sequence_decomposition(ops, 2), "CNOT;phase(pi/5)"


def cmd_norms(args) -> int:
    rows = [["name", "parameters", "gamma", "terms", "needs_cc"]]
    for deco, params in _norms_catalog():
        base = deco.name.split("[")[0]
        cc = sum(t.needs_cc for t in deco.terms)
        rows.append([base, params, _fmt(deco.one_norm()), str(len(deco.terms)), str(cc)])
    writer = csv.writer(args.csv and open(args.csv, "w", newline="") or sys.stdout)
    writer.writerows(rows)
    return 0


def _zx_builtin(args) -> int:
    name = args.builtin
    failures = 0

    def check(label, ok, detail=""):
        nonlocal failures
        print(f"{label}: {'PASS' if ok else 'FAIL'}{detail}")
        failures += not ok

    theta = parse_angle(args.theta) if args.theta else np.pi / 2
    if name in ("cnot-variants", "all"):
        for variant in zx.CNOT_VARIANTS:
            dev = np.max(np.abs(zx.contract(zx.cnot_diagram(variant)) - gates.cnot().mat))
            check(f"cnot[{variant}]", dev <= zx.RULE_ATOL, f"  max|delta| = {_fmt(dev)}")
    if name in ("states", "all"):
        for kind, phase, ket in (
            ("z", 0.0, np.array([1, 1]) / np.sqrt(2)),
            ("z", np.pi, np.array([1, -1]) / np.sqrt(2)),
            ("x", 0.0, np.array([1, 0])),
            ("x", np.pi, np.array([0, 1])),
        ):
            vec = zx.contract(zx.state_diagram(kind, phase)).ravel()
            dev = np.max(np.abs(vec - np.sqrt(2) * ket))
            check(
                f"state[{kind},{_fmt(phase)}]", dev <= zx.RULE_ATOL,
                f"  max|delta| = {_fmt(dev)}",
            )
    if name in ("mcz", "all"):
        n = args.n or 3
        dev = np.max(np.abs(zx.contract(zx.mcz_diagram(n)) - gates.mcz(n).mat))
        check(f"mcz[{n}]", dev <= zx.RULE_ATOL, f"  max|delta| = {_fmt(dev)}")
    if name in ("mcp", "all"):
        n = args.n or 2
        dev = np.max(np.abs(zx.contract(zx.mcp_diagram(n, theta)) - gates.mcp(n, theta).mat))
        check(f"mcp[{n},{_fmt(theta)}]", dev <= zx.RULE_ATOL, f"  max|delta| = {_fmt(dev)}")
    if name in ("rzz", "all"):
        dev = np.max(np.abs(zx.contract(zx.rzz_diagram(theta)) - gates.rzz(theta).mat))
        check(f"rzz[{_fmt(theta)}]", dev <= zx.RULE_ATOL, f"  max|delta| = {_fmt(dev)}")
    if name in ("mcz-fusion", "all"):
        n = args.n or 4
        m = args.m or n // 2
        rep = zx.verify_rule(zx.mcz_diagram(n), zx.split_mcz_three_hboxes(n, m))
        check(
            f"mcz-fusion[n={n},m={m}]", rep["equal"],
            f"  max|delta| = {_fmt(rep['max_abs_deviation'])}",
        )
    if name in ("rules", "all"):
        for rule_name, fn in zx.BUILTIN_RULES.items():
            rep = zx.verify_rule(*fn())
            check(
                f"rule[{rule_name}]", rep["equal"],
                f"  max|delta| = {_fmt(rep['max_abs_deviation'])}",
            )
    if failures == 0 and name not in (
        "cnot-variants", "states", "mcz", "mcp", "rzz", "mcz-fusion", "rules", "all"
    ):
        raise ConfigError(f"zx-check: unknown builtin {name!r}")
    return 1 if failures else 0


def cmd_zx_check(args) -> int:
    if args.builtin:
        return _zx_builtin(args)
    if not args.files:
        raise ConfigError("zx-check: pass --builtin NAME or one/two diagram files")
    diagrams = []
    for path in args.files:
        with open(path) as fh:
            diagrams.append(zx.parse_diagram(fh.read()))
    if len(diagrams) == 1:
        mat = zx.contract(diagrams[0])
        print(f"shape: {mat.shape[0]} x {mat.shape[1]}")
        for row in mat:
            print("  ".join(f"{v.real:+.12g}{v.imag:+.12g}j" for v in row))
        return 0
    if len(diagrams) == 2:
        rep = zx.verify_rule(diagrams[0], diagrams[1], up_to_scalar=args.up_to_scalar)
        print(f"max|delta| = {_fmt(rep['max_abs_deviation'])}")
        if args.up_to_scalar:
            ratio = rep["scalar_ratio"]
            print(
                f"scalar ratio = {ratio.real:+.12g}{ratio.imag:+.12g}j, "
                f"residual = {_fmt(rep['scalar_residual'])}"
            )
            return 0 if rep["equal_up_to_scalar"] else 1
        return 0 if rep["equal"] else 1
    raise ConfigError("zx-check: at most two diagram files")


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qcut", description="Quasiprobability circuit-cutting toolkit"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", help="verify decomposition reconstructions")
    p.add_argument("--all", action="store_true", help="run the full built-in suite")
    p.add_argument("--deco", help="decomposition name (wire_ncc, wire_cc, mcz, ...)")
    p.add_argument("--m", type=int)
    p.add_argument("--mprime", type=int)
    p.add_argument("--theta", help="angle, e.g. pi/4")
    p.add_argument("--cc-basis", dest="cc_basis", choices=["X", "Y", "Z"])
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("sample", help="run a sampling experiment from a JSON config")
    p.add_argument("--config", required=True)
    p.add_argument("--seed", type=int, help="overrides the config's seed")
    p.add_argument("--output", help="JSON report path (overrides config)")
    p.add_argument("--batch-csv", dest="batch_csv", help="CSV of shot-batch means")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("norms", help="print the 1-norm catalog as CSV")
    p.add_argument("--csv", help="write to a file instead of stdout")
    p.set_defaults(func=cmd_norms)

    p = sub.add_parser("zx-check", help="contract/compare ZX diagrams")
    p.add_argument("files", nargs="*", help="diagram file(s) in the text format")
    p.add_argument(
        "--builtin",
        help="cnot-variants | states | mcz | mcp | rzz | mcz-fusion | rules | all",
    )
    p.add_argument("--n", type=int)
    p.add_argument("--m", type=int)
    p.add_argument("--theta")
    p.add_argument("--up-to-scalar", dest="up_to_scalar", action="store_true")
    p.set_defaults(func=cmd_zx_check)
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, zx.ZXError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except QcutError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
