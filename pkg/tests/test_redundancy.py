from collections import Counter
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fmrforge import (
    Cube,
    GateInstance,
    Netlist,
    ValidationError,
    apply_insertion,
    check_equivalence,
    compute_fmr,
    evaluate_faulty,
    flatten_hypothetical,
    identify_redundant_products,
    plan_insertion,
)
from fmrforge.circuit import bits_str
from fmrforge.redundancy import FindingStatus

from netgen import random_netlist

NA, NN = "Not applicable", "Not necessary"
# expected label per input vector 0000..1111 for the single J fault
FIG1A_LABELS = [NA, NA, NA, NN, NA, "BD", "BC", NN, NA, "AD", "AC", NN, NN, NN, NN, NN]


def gates(net):
    return sorted(net.to_document()["gates"], key=lambda g: g["id"])


def insert(net, lib, texts, capacity=2):
    plan = plan_insertion(net, [Cube.parse(t, net.inputs) for t in texts], lib, capacity=capacity)
    return plan, apply_insertion(net, plan)


def test_identify_fig1a_labels(fig1a):
    findings, products = identify_redundant_products(fig1a)
    assert [f.label(fig1a.inputs) for f in findings] == FIG1A_LABELS
    assert [p.render(fig1a.inputs) for p in products] == ["BD", "BC", "AD", "AC"]
    counts = Counter(f.status for f in findings)
    assert counts == {FindingStatus.NOT_APPLICABLE: 5, FindingStatus.NOT_NECESSARY: 7, FindingStatus.IDENTIFIED: 4}


def test_identified_products_imply_output(fig1a):
    findings, _ = identify_redundant_products(fig1a)
    for f in findings:
        if f.status is FindingStatus.IDENTIFIED:
            assert f.golden and not f.faulty
            assert f.product.contains(int(bits_str(f.vector), 2))


def test_identify_without_fault_sites(lib):
    net = Netlist("and", ("A", "B"), ("V",), (GateInstance("g", "AND2", ("A", "B"), "V"),), dict(lib.cells))
    assert identify_redundant_products(net) == ([], [])


def test_identify_unknown_output(fig1a):
    with pytest.raises(KeyError):
        identify_redundant_products(fig1a, "W")


def test_insert_two_products_reproduces_fig3a(fig1a, nets, lib):
    plan, net = insert(fig1a, lib, ["AD", "BC"])
    assert plan.mode == "splice" and plan.splice_point == ("g2", 4)
    assert [g.cell for g in plan.new_gates] == ["AO221"]
    assert gates(net) == gates(nets["fig3a"])
    assert check_equivalence(net, nets["fig3a"])
    assert compute_fmr(net).fmr_exact == Fraction(30, 48)


def test_insert_four_products_reproduces_fig3b(fig1a, nets, lib):
    plan, net = insert(fig1a, lib, ["AD", "BC", "AC", "BD"])
    assert plan.chain == ("red0", "red1")
    assert gates(net) == gates(nets["fig3b"])
    assert compute_fmr(net).fmr_exact == Fraction(76, 112)


def test_empty_plan_is_identity(fig1a, lib):
    plan, net = insert(fig1a, lib, [])
    assert plan.is_empty and plan.mode == "none"
    assert net is fig1a


def test_odd_product_count_pads_last_gate(fig1a, lib):
    plan, net = insert(fig1a, lib, ["AD", "BC", "AC"])
    assert len(plan.chain) == 2
    assert check_equivalence(fig1a, net)


def test_wrap_mode_when_no_direct_pin(lib):
    # V = AND2(J, C) with J = OR2(A, B): no direct pin on the output gate
    net = Netlist(
        "w", ("A", "B", "C"), ("V",),
        (GateInstance("g1", "OR2", ("A", "B"), "J"), GateInstance("g2", "AND2", ("J", "C"), "V")),
        dict(lib.cells),
    )
    findings, products = identify_redundant_products(net)
    plan = plan_insertion(net, products, lib)
    assert plan.mode == "wrap"
    out = apply_insertion(net, plan)
    assert out.m == net.m + len(plan.new_gates)
    assert out.driver["V"].id == plan.chain[-1]
    assert check_equivalence(net, out)


def test_negative_and_wide_products(lib):
    # V = A·~B·C·D + J, J = AND2(C, D) kept simple so the onset needs wide cubes
    net = Netlist(
        "neg", ("A", "B", "C", "D"), ("V",),
        (
            GateInstance("g0", "INV", ("B",), "Bn"),
            GateInstance("g1", "AND3", ("A", "Bn", "C"), "J"),
            GateInstance("g2", "AND2", ("J", "D"), "V"),
        ),
        dict(lib.cells),
    )
    cube = Cube.parse("A·~B·C·D", net.inputs)
    plan = plan_insertion(net, [cube], lib)
    cells = [g.cell for g in plan.new_gates]
    assert "INV" in cells and any(c.startswith("AND") for c in cells)
    out = apply_insertion(net, plan)
    assert check_equivalence(net, out)
    v = int("1011", 2)
    for mask in range(1, 1 << out.m):
        assert evaluate_faulty(out, v, mask) == (True,) or any(
            (mask >> (out.m - 1 - i)) & 1 for i, n in enumerate(out.internal_nodes) if n.startswith("r")
        )


def test_carry_cell_must_exist(fig1a, lib):
    with pytest.raises(ValidationError, match="no cell with 5"):
        insert(fig1a, lib, ["AD"], capacity=5)


def test_universal_cube_on_constant_output(lib):
    net = Netlist(
        "one", ("A", "B"), ("V",),
        (GateInstance("g1", "INV", ("A",), "An"), GateInstance("g2", "OR2", ("A", "An"), "V")),
        dict(lib.cells),
    )
    _, products = identify_redundant_products(net)
    assert products == [Cube.universal(2)]
    out = apply_insertion(net, plan_insertion(net, products, lib))
    assert check_equivalence(net, out)
    assert_insertion_safe(net, lib)


def test_insertion_rejects_non_implicants(fig1a, lib):
    with pytest.raises(ValidationError, match="fault-free function"):
        insert(fig1a, lib, ["A"])


# -- flattening ---------------------------------------------------------------


def test_flatten_keep_j_is_fig2a(fig1a, nets):
    flat = flatten_hypothetical(fig1a, keep_nodes=["J"])
    assert compute_fmr(flat).fmr_exact == Fraction(11, 16)
    assert (flat.n, flat.m) == (4, 1)
    assert check_equivalence(flat, nets["fig2a"])
    hyp = flat.cells[flat.driver["V"].cell]
    assert hyp.hypothetical and len(hyp.sop) == 7


def test_flatten_keep_nothing_is_ideal(fig1a):
    flat = flatten_hypothetical(fig1a)
    r = compute_fmr(flat)
    assert (flat.m, r.fmr_exact, r.denominator) == (0, 1, 0)


def test_flatten_keep_all_nodes(nets):
    net = nets["fig3a"]
    flat = flatten_hypothetical(net, keep_nodes=net.internal_nodes)
    assert flat.m == 2 and check_equivalence(flat, net)
    assert compute_fmr(flat).fmr_exact > compute_fmr(net).fmr_exact


def test_flatten_rejects_node_outside_the_onset(fig1b):
    # N1 = AB + C + D is 1 on vector 0001 where V is 0
    with pytest.raises(ValueError, match="cannot feed"):
        flatten_hypothetical(fig1b, keep_nodes=["N1"])


def test_flatten_unknown_node(fig1a):
    with pytest.raises(KeyError):
        flatten_hypothetical(fig1a, keep_nodes=["Q"])


def test_flatten_rejects_unrelated_node(lib):
    net = Netlist(
        "x", ("A", "B"), ("V",),
        (GateInstance("g1", "XOR2", ("A", "B"), "J"), GateInstance("g2", "AND2", ("J", "A"), "V")),
        dict(lib.cells),
    )
    with pytest.raises(ValueError, match="cannot feed"):
        flatten_hypothetical(net, keep_nodes=["J"])


# -- equivalence --------------------------------------------------------------


def test_check_equivalence(nets, lib):
    assert check_equivalence(nets["fig1a"], nets["fig1b"])
    assert check_equivalence(nets["fig1a"], nets["fig3b"])
    and2 = Netlist(
        "and", ("A", "B", "C", "D"), ("V",), (GateInstance("g", "AND2", ("A", "B"), "V"),), dict(lib.cells)
    )
    assert not check_equivalence(nets["fig1a"], and2)
    short = Netlist("s", ("A", "B"), ("V",), (GateInstance("g", "AND2", ("A", "B"), "V"),), dict(lib.cells))
    with pytest.raises(ValueError):
        check_equivalence(nets["fig1a"], short)


def test_equivalence_ignores_input_order(lib):
    a = Netlist("a", ("A", "B"), ("V",), (GateInstance("g", "AND2", ("A", "B"), "V"),), dict(lib.cells))
    b = Netlist("b", ("B", "A"), ("V",), (GateInstance("g", "AND2", ("A", "B"), "V"),), dict(lib.cells))
    assert check_equivalence(a, b)


# -- randomized safety ----------------------------------------------------------


def assert_insertion_safe(net, lib):
    """Identification then insertion keeps the function and masks every targeted fault."""
    for po in net.outputs:
        findings, products = identify_redundant_products(net, po)
        out = apply_insertion(net, plan_insertion(net, products, lib, output=po), verify=False)
        assert check_equivalence(net, out)
        o = out.outputs.index(po)
        for f in findings:
            if f.status is not FindingStatus.IDENTIFIED:
                continue
            mask = [n == f.node for n in out.internal_nodes]
            assert evaluate_faulty(out, f.vector, mask)[o] == f.golden, (po, bits_str(f.vector), f.node)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_insertion_safety_property(lib, seed):
    assert_insertion_safe(random_netlist(lib, np.random.default_rng(seed), max_nm=12), lib)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from([1, 2]))
def test_insertion_safety_any_capacity(lib, seed, capacity):
    net = random_netlist(lib, np.random.default_rng(seed), max_nm=10, two_outputs=False)
    _, products = identify_redundant_products(net)
    out = apply_insertion(net, plan_insertion(net, products, lib, capacity=capacity), verify=False)
    assert check_equivalence(net, out)
