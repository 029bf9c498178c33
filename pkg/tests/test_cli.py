import csv
import json

import pytest

from qcut.cli import build_decomposition, build_experiment, main


def write_config(tmp_path, **overrides):
    config = {
        "decomposition": {"name": "rzz_b", "theta": "pi/2"},
        "initial_state": "plus",
        "observable": "XX",
        "shots": 20_000,
        "seed": 7,
    }
    config.update(overrides)
    path = tmp_path / "config.json"
    path.write_text(json.dumps(config))
    return path


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------


def test_verify_single(capsys):
    assert main(["verify", "--deco", "mcz", "--m", "2", "--mprime", "1"]) == 0
    out = capsys.readouterr().out
    assert "PASS" in out and "gamma = 3" in out


def test_verify_theta_angle_syntax(capsys):
    assert main(["verify", "--deco", "rzz_b", "--theta", "pi/6"]) == 0
    assert "PASS" in capsys.readouterr().out


def test_verify_unknown_deco_exits_2(capsys):
    assert main(["verify", "--deco", "nope"]) == 2
    assert "error" in capsys.readouterr().err


def test_verify_missing_required_field_exits_2(capsys):
    assert main(["verify", "--deco", "mcz"]) == 2


def test_usage_error_exits_2():
    with pytest.raises(SystemExit) as err:
        main(["bogus"])
    assert err.value.code == 2


# ---------------------------------------------------------------------------
# sample
# ---------------------------------------------------------------------------


def test_sample_writes_deterministic_report(tmp_path, capsys):
    config = write_config(tmp_path)
    out1, out2 = tmp_path / "r1.json", tmp_path / "r2.json"
    assert main(["sample", "--config", str(config), "--output", str(out1)]) == 0
    assert main(["sample", "--config", str(config), "--output", str(out2)]) == 0
    assert out1.read_bytes() == out2.read_bytes()
    report = json.loads(out1.read_text())
    assert report["seed"] == 7 and report["shots"] == 20_000
    assert abs(report["estimate"] - 1.0) < 5 * report["standard_error"]


def test_sample_seed_flag_overrides_config(tmp_path):
    config = write_config(tmp_path)
    out1, out2 = tmp_path / "r1.json", tmp_path / "r2.json"
    main(["sample", "--config", str(config), "--output", str(out1)])
    main(["sample", "--config", str(config), "--seed", "8", "--output", str(out2)])
    assert json.loads(out2.read_text())["seed"] == 8
    assert out1.read_bytes() != out2.read_bytes()


def test_sample_requires_seed(tmp_path, capsys):
    config = write_config(tmp_path)
    data = json.loads(config.read_text())
    del data["seed"]
    config.write_text(json.dumps(data))
    assert main(["sample", "--config", str(config)]) == 2
    assert "seed" in capsys.readouterr().err


def test_sample_rejects_unknown_field(tmp_path, capsys):
    config = write_config(tmp_path, typo_field=1)
    assert main(["sample", "--config", str(config)]) == 2
    assert "typo_field" in capsys.readouterr().err


def test_sample_rejects_bad_observable(tmp_path, capsys):
    config = write_config(tmp_path, observable="XQ")
    assert main(["sample", "--config", str(config)]) == 2
    assert "observable" in capsys.readouterr().err


def test_sample_batch_csv(tmp_path, capsys):
    config = write_config(tmp_path, n_batches=4)
    csv_path = tmp_path / "batches.csv"
    assert main(
        ["sample", "--config", str(config), "--batch-csv", str(csv_path)]
    ) == 0
    rows = list(csv.reader(csv_path.open()))
    assert rows[0] == ["batch_index", "partial_mean"]
    assert len(rows) == 5


def test_sample_bitstring_and_density_matrix_states(tmp_path):
    config = write_config(tmp_path, initial_state="10", observable="ZZ")
    assert main(["sample", "--config", str(config)]) == 0
    plus = [[0.5, [0.5, 0.0]], [[0.5, 0.0], 0.5]]
    config = write_config(tmp_path, initial_state=[plus, plus], observable="XX")
    assert main(["sample", "--config", str(config)]) == 0


def test_sample_controlled_sequence_config(tmp_path):
    config = write_config(
        tmp_path,
        decomposition={
            "name": "controlled_sequence",
            "n_targets": 2,
            "controlled_ops": [
                {"targets": [0], "gate": "x"},
                {"targets": [1], "gate": "phase", "theta": "pi/5"},
            ],
        },
        initial_state="plus",
        observable="XXI",
    )
    assert main(["sample", "--config", str(config)]) == 0


# ---------------------------------------------------------------------------
# norms
# ---------------------------------------------------------------------------


def test_norms_csv_schema(tmp_path):
    out = tmp_path / "norms.csv"
    assert main(["norms", "--csv", str(out)]) == 0
    rows = list(csv.reader(out.open()))
    assert rows[0] == ["name", "parameters", "gamma", "terms", "needs_cc"]
    assert all(len(r) == 5 for r in rows)
    by_name = {}
    for name, params, gamma, *_ in rows[1:]:
        by_name.setdefault(name, []).append((params, float(gamma)))
    assert ("-", 4.0) in by_name["wire_ncc"]
    assert all(g == 3.0 for _, g in by_name["mcz"])
    assert ("theta=pi/6", 2.0) in by_name["rzz_b"]


# ---------------------------------------------------------------------------
# zx-check
# ---------------------------------------------------------------------------


def test_zx_check_builtin_all(capsys):
    assert main(["zx-check", "--builtin", "all"]) == 0
    out = capsys.readouterr().out
    assert "FAIL" not in out
    for token in ("cnot[spiders]", "mcz-fusion", "rule[spider-fusion]"):
        assert token in out


def test_zx_check_unknown_builtin(capsys):
    assert main(["zx-check", "--builtin", "frobnicate"]) == 2


def test_zx_check_file_pair(tmp_path, capsys):
    lhs = tmp_path / "lhs.zx"
    rhs = tmp_path / "rhs.zx"
    lhs.write_text(
        "node in input\nnode s z pi\nnode out output\nedge in s\nedge s out\n"
    )
    rhs.write_text(
        "node in input\nnode a z pi/2\nnode b z pi/2\nnode out output\n"
        "edge in a\nedge a b\nedge b out\n"
    )
    assert main(["zx-check", str(lhs), str(rhs)]) == 0
    rhs.write_text(
        "node in input\nnode a z pi/2\nnode out output\nedge in a\nedge a out\n"
    )
    assert main(["zx-check", str(lhs), str(rhs)]) == 1


def test_zx_check_single_file_contracts(tmp_path, capsys):
    path = tmp_path / "d.zx"
    path.write_text(
        "node in input\nnode s z 0\nnode out output\nedge in s\nedge s out\n"
    )
    assert main(["zx-check", str(path)]) == 0
    assert "shape: 2 x 2" in capsys.readouterr().out


def test_zx_check_parse_error_exits_2(tmp_path, capsys):
    path = tmp_path / "bad.zx"
    path.write_text("frobnicate\n")
    assert main(["zx-check", str(path)]) == 2
    assert "line 1" in capsys.readouterr().err


# ---------------------------------------------------------------------------
# config helpers
# ---------------------------------------------------------------------------


def test_build_decomposition_names():
    for selector, expected_gamma in (
        ({"name": "wire_ncc"}, 4.0),
        ({"name": "wire_cc", "cc_basis": "X"}, 3.0),
        ({"name": "mcz", "m": 1, "m_prime": 2}, 3.0),
        ({"name": "rzz_a", "theta": "pi/4"}, 3.0),
        ({"name": "multi_z", "m": 2, "m_prime": 1, "theta": "pi/2"}, 3.0),
    ):
        assert build_decomposition(selector).one_norm() == pytest.approx(expected_gamma)


def test_build_experiment_shape_checks(tmp_path):
    from qcut.cli import ConfigError

    config = {
        "decomposition": {"name": "wire_ncc"},
        "initial_state": "00",
        "observable": "Z",
        "shots": 10,
        "seed": 1,
    }
    with pytest.raises(ConfigError):
        build_experiment(config)
