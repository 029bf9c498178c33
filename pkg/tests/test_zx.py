import numpy as np
import pytest

from qcut import gates, zx
from qcut.zx import (
    BUILTIN_RULES,
    CNOT_VARIANTS,
    ZXDiagram,
    ZXError,
    cap_diagram,
    cnot_diagram,
    compose,
    contract,
    contract_operator,
    cup_diagram,
    effect_diagram,
    hbox_tensor,
    insert_cut_fragment,
    mcp_diagram,
    mcz_diagram,
    parse_angle,
    parse_diagram,
    rzz_diagram,
    spider_tensor,
    split_mcz_three_hboxes,
    state_diagram,
    swap_diagram,
    tensor,
    verify_rule,
    wire_cut_fragments,
    wire_diagram,
)

SQ2 = np.sqrt(2)


# ---------------------------------------------------------------------------
# generators
# ---------------------------------------------------------------------------


def test_z_spider_tensor():
    # [TRIVIAL] 1 at all-0, e^{i alpha} at all-1, else 0
    t = spider_tensor("z", 0.7, 3)
    assert t[0, 0, 0] == pytest.approx(1.0)
    assert t[1, 1, 1] == pytest.approx(np.exp(0.7j))
    assert t[0, 1, 0] == 0 and t[1, 1, 0] == 0


def test_x_spider_is_hadamard_conjugated_z():
    h = gates.hadamard().mat
    z = spider_tensor("z", 1.1, 2)
    x = spider_tensor("x", 1.1, 2)
    assert np.allclose(x, h @ z @ h, atol=1e-12)


def test_arity0_spiders_and_hbox():
    assert spider_tensor("z", 0.4, 0) == pytest.approx(1 + np.exp(0.4j))
    assert hbox_tensor(0.3 + 0.1j, 0) == pytest.approx(0.3 + 0.1j)


def test_hbox_tensor():
    # [TRIVIAL] label at all-1, 1 elsewhere; arity-2 label -1 = sqrt(2) H
    t = hbox_tensor(-1.0, 2)
    assert np.allclose(t, SQ2 * gates.hadamard().mat, atol=1e-12)
    t3 = hbox_tensor(2.0j, 3)
    assert t3[1, 1, 1] == 2.0j and t3[0, 1, 1] == 1.0


# ---------------------------------------------------------------------------
# contraction
# ---------------------------------------------------------------------------


def test_contract_wire_and_swap():
    assert np.allclose(contract(wire_diagram(2)), np.eye(4), atol=1e-12)
    swap = np.eye(4)[[0, 2, 1, 3]]
    assert np.allclose(contract(swap_diagram()), swap, atol=1e-12)


def test_contract_states_and_effects():
    # [DERIVED] Z-spider states are sqrt(2) |+/-_phase>
    plus = contract(state_diagram("z", 0.0)).ravel()
    assert np.allclose(plus, [1, 1], atol=1e-12)
    one = contract(state_diagram("x", np.pi)).ravel()
    assert np.allclose(one, SQ2 * np.array([0, 1]), atol=1e-12)
    bra = contract(effect_diagram("z", np.pi / 2)).ravel()
    # effect is the phase-conjugate row vector <0| + e^{i phi} <1|
    assert np.allclose(bra, [1, np.exp(1j * np.pi / 2)], atol=1e-12)


def test_cup_cap_snake():
    # [DERIVED] snake identity: (cap x wire) . (wire x cup) = wire
    left = tensor(cap_diagram(), wire_diagram(1))
    right = tensor(wire_diagram(1), cup_diagram())
    snake = compose(right, left)
    assert np.allclose(contract(snake), np.eye(2), atol=1e-12)


@pytest.mark.parametrize("variant", CNOT_VARIANTS)
def test_cnot_variants(variant):
    assert np.allclose(contract(cnot_diagram(variant)), gates.cnot().mat, atol=1e-10)


def test_mcz_and_mcp_diagrams():
    for n in (1, 2, 3, 4):
        assert np.allclose(contract(mcz_diagram(n)), gates.mcz(n).mat, atol=1e-10)
    theta = 1.234
    for n in (1, 2, 3):
        assert np.allclose(
            contract(mcp_diagram(n, theta)), gates.mcp(n, theta).mat, atol=1e-10
        )


def test_rzz_diagram_exact_including_global_phase():
    for theta in (0.0, np.pi / 6, np.pi / 2, 1.234, np.pi):
        assert np.allclose(contract(rzz_diagram(theta)), gates.rzz(theta).mat, atol=1e-10)


def test_contract_operator_requires_square():
    with pytest.raises(ZXError):
        contract_operator(state_diagram("z", 0.0))


def test_scalar_subdiagram_absorbed():
    d = wire_diagram(1)
    lone = d.add_z(np.pi / 3)  # arity-0 spider contributes 1 + e^{i pi/3}
    assert d.degree(lone) == 0
    assert np.allclose(contract(d), (1 + np.exp(1j * np.pi / 3)) * np.eye(2), atol=1e-12)


def test_compose_and_tensor_match_matrix_algebra():
    d1, d2 = cnot_diagram(), rzz_diagram(0.8)
    assert np.allclose(
        contract(compose(d1, d2)), contract(d2) @ contract(d1), atol=1e-10
    )
    assert np.allclose(
        contract(tensor(state_diagram("x", np.pi), state_diagram("x", 0.0))).ravel(),
        np.kron(SQ2 * np.array([0, 1]), SQ2 * np.array([1, 0])),
        atol=1e-12,
    )


def test_dangling_and_self_loop_errors():
    d = ZXDiagram()
    a = d.add_z()
    with pytest.raises(ZXError):
        d.add_edge(a, a)
    d2 = wire_diagram(1)
    extra = d2.add_input()
    b = d2.add_z()
    d2.add_edge(extra, b)
    d2.add_edge(b, d2.add_output())
    assert contract(d2).shape == (4, 4)


# ---------------------------------------------------------------------------
# rules
# ---------------------------------------------------------------------------


def test_builtin_rules_hold_exactly():
    for name, build in BUILTIN_RULES.items():
        report = verify_rule(*build())
        assert report["equal"], f"{name}: {report['max_abs_deviation']}"


def test_verify_rule_detects_scalar_mismatch():
    lhs = wire_diagram(1)
    rhs = wire_diagram(1)
    rhs.multiply_scalar(2.0)
    report = verify_rule(lhs, rhs)
    assert not report["equal"]
    report = verify_rule(lhs, rhs, up_to_scalar=True)
    assert report["equal_up_to_scalar"]
    assert report["scalar_ratio"] == pytest.approx(2.0)


def test_verify_rule_rejects_shape_mismatch():
    with pytest.raises(ZXError):
        verify_rule(wire_diagram(1), wire_diagram(2))


def test_mcz_three_hbox_split():
    # [KNOWN] three H-boxes with label -1 and scalar 1/2 reproduce MCZ
    for n, m in ((2, 1), (3, 1), (3, 2), (4, 2), (5, 3)):
        split = split_mcz_three_hboxes(n, m)
        report = verify_rule(mcz_diagram(n), split)
        assert report["equal"], (n, m, report["max_abs_deviation"])
        assert split.cut_edge is not None


# ---------------------------------------------------------------------------
# wire-cut fragments
# ---------------------------------------------------------------------------


@pytest.mark.parametrize("basis", ["Y", "X", "Z"])
def test_wire_cut_fragments_resolve_identity(basis):
    # [KNOWN] summing weight * (fragment inserted on a bare wire), with each
    # fragment conjugate-paired on bra/ket sides, reproduces the identity
    # channel; gamma = 3 with classical communication.
    frags = wire_cut_fragments(basis)
    assert len(frags) == 10
    total = np.zeros((4, 4))
    base = wire_diagram(1)
    edge = base.edges[0]
    for frag in frags:
        ket = contract(insert_cut_fragment(base, edge, frag))
        mat = np.real(np.einsum("ab,cd->acbd", ket, ket.conj()).reshape(4, 4))
        total = total + frag.weight * mat
    ident = np.eye(4)
    assert np.max(np.abs(total - ident)) < 1e-10
    # each measurement outcome of a q-term appears as its own fragment, so
    # gamma = sum |q| = sum |weight| / 2
    assert sum(abs(f.weight) for f in frags) / 2 == pytest.approx(3.0)
    assert sum(f.needs_cc for f in frags) == 2


# ---------------------------------------------------------------------------
# text format
# ---------------------------------------------------------------------------


def test_parse_angle():
    assert parse_angle("pi/2") == pytest.approx(np.pi / 2)
    assert parse_angle("-3pi/4") == pytest.approx(-3 * np.pi / 4)
    assert parse_angle("2*pi/3") == pytest.approx(2 * np.pi / 3)
    assert parse_angle("0.25") == pytest.approx(0.25)
    with pytest.raises(ZXError):
        parse_angle("pie")


def test_parse_diagram_roundtrip():
    text = """
    # Z(pi) on a single wire
    node in input
    node s z pi
    node out output
    edge in s
    edge s out
    scalar 1/2
    """
    d = parse_diagram(text)
    assert np.allclose(contract(d), 0.5 * np.diag([1.0, -1.0]), atol=1e-12)


def test_parse_diagram_errors_are_line_anchored():
    with pytest.raises(ZXError, match="line 2"):
        parse_diagram("node a z\nnode a x\n")
    with pytest.raises(ZXError, match="line 1"):
        parse_diagram("edge a b\n")
    with pytest.raises(ZXError, match="line 1"):
        parse_diagram("frobnicate\n")
