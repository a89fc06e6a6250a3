from collections import Counter
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fmrforge import (
    CapExceededError,
    GateInstance,
    Netlist,
    RowState,
    compute_fmr,
    enumerate_faults,
    estimate_fmr_mc,
    evaluate,
    evaluate_faulty,
    load_netlist,
    single_fault_errors,
)
from fmrforge.circuit import bits_str
from fmrforge.faults import FaultKind

from netgen import random_netlist


def naive_k(net):
    """Scalar double loop over vectors and nonzero masks."""
    k = 0
    for v in range(1 << net.n):
        golden = evaluate(net, v)[1]
        for f in range(1, 1 << net.m):
            k += evaluate_faulty(net, v, f) == golden
    return k


# fig1b, one block per vector: fault-free (N1, N2), then the faulty rows as
# (N1, N2, V, state).
FIG1B_ROWS = {
    "0000": ((0, 0), [(0, 1, 0, "C"), (1, 0, 0, "C"), (1, 1, 1, "E")]),
    "0001": ((1, 0), [(0, 0, 0, "C"), (0, 1, 0, "C"), (1, 1, 1, "E")]),
    "0010": ((1, 0), [(0, 0, 0, "C"), (0, 1, 0, "C"), (1, 1, 1, "E")]),
    "0100": ((0, 1), [(0, 0, 0, "C"), (1, 0, 0, "C"), (1, 1, 1, "E")]),
    "1000": ((0, 1), [(0, 0, 0, "C"), (1, 0, 0, "C"), (1, 1, 1, "E")]),
}
for _v in ("0011", "0101", "0110", "0111", "1001", "1010", "1011", "1100", "1101", "1110", "1111"):
    FIG1B_ROWS[_v] = ((1, 1), [(0, 0, 0, "E"), (0, 1, 0, "E"), (1, 0, 0, "E")])

# fig1a single-fault state of V per vector (C = masked, E = exposed)
FIG1A_STATES = dict(zip(
    ["0000", "0001", "0010", "0011", "0100", "0101", "0110", "0111",
     "1000", "1001", "1010", "1011", "1100", "1101", "1110", "1111"],
    "EEECEEECEEECCCCC",
))


def test_fig1a_row_counts(fig1a):
    rows = list(enumerate_faults(fig1a))
    assert len(rows) == 32
    assert Counter(r.state for r in rows) == {RowState.ACTUAL: 16, RowState.CORRECT: 7, RowState.ERROR: 9}


def test_fig1a_rows_match_expected_states(fig1a):
    faulty = [r for r in enumerate_faults(fig1a) if r.state is not RowState.ACTUAL]
    assert {bits_str(r.vector): r.state.value[0] for r in faulty} == FIG1A_STATES


def test_fig1b_row_counts(fig1b):
    rows = list(enumerate_faults(fig1b))
    assert len(rows) == 64
    assert Counter(r.state for r in rows) == {RowState.ACTUAL: 16, RowState.CORRECT: 10, RowState.ERROR: 38}


def test_fig1b_rows_match_expected_blocks(fig1b):
    rows = list(enumerate_faults(fig1b))
    for r in rows:
        golden, faulty = FIG1B_ROWS[bits_str(r.vector)]
        if r.state is RowState.ACTUAL:
            assert tuple(map(int, r.node_values)) == golden
            continue
        match = [t for t in faulty if (t[0], t[1]) == tuple(map(int, r.node_values))]
        assert len(match) == 1, bits_str(r.vector)
        _, _, v, state = match[0]
        assert int(r.outputs[0]) == v
        assert r.state.value[0] == state


def test_row_order_is_vector_major_mask_minor(fig1b):
    rows = list(enumerate_faults(fig1b))
    keys = [(bits_str(r.vector), bits_str(r.mask)) for r in rows]
    assert keys == sorted(keys)
    assert keys[:4] == [("0000", "00"), ("0000", "01"), ("0000", "10"), ("0000", "11")]


def test_fault_kinds_follow_local_values(fig1b):
    row = next(r for r in enumerate_faults(fig1b) if bits_str(r.vector) == "0001" and bits_str(r.mask) == "11")
    # fault-free N1=1, N2=0: both flipped
    assert row.fault_kinds == (("N1", FaultKind.FALL), ("N2", FaultKind.RISE))
    actual = next(r for r in enumerate_faults(fig1b) if r.state is RowState.ACTUAL)
    assert actual.fault_kinds == ()


def test_m0_netlist_enumerates_actual_only(lib):
    net = Netlist("and", ("A", "B"), ("V",), (GateInstance("g", "AND2", ("A", "B"), "V"),), dict(lib.cells))
    rows = list(enumerate_faults(net))
    assert len(rows) == 4 and all(r.state is RowState.ACTUAL for r in rows)
    report = compute_fmr(net)
    assert report.fmr_exact == 1 and report.k == 0 and report.denominator == 0
    assert single_fault_errors(net) == []


@pytest.mark.parametrize(
    "name, k, d, decimal",
    [
        ("fig1a", 7, 16, 0.4375),
        ("fig1b", 10, 48, 0.2083),
        ("fig2a", 11, 16, 0.6875),
        ("fig3a", 30, 48, 0.625),
        ("fig3b", 76, 112, 0.6786),
        ("fig4a", 22, 48, 0.4583),
        ("fig4b", 76, 112, 0.6786),
    ],
)
def test_bundled_fmr(nets, name, k, d, decimal):
    r = compute_fmr(nets[name])
    assert (r.k, r.denominator) == (k, d)
    assert r.fmr_exact == Fraction(k, d)
    assert r.fmr_decimal == decimal
    assert r.denominator == 2 ** (r.n + r.m) - 2 ** r.n
    assert naive_k(nets[name]) == k


def test_double_inverter_has_zero_fmr(lib):
    net = Netlist(
        "buf", ("A",), ("V",),
        (GateInstance("g1", "INV", ("A",), "X"), GateInstance("g2", "INV", ("X",), "V")),
        dict(lib.cells),
    )
    r = compute_fmr(net)
    assert (r.n, r.m, r.k, r.fmr_exact) == (1, 1, 0, 0)


def test_per_vector_counts(fig1a):
    r = compute_fmr(fig1a)
    assert sum(c for c, _ in r.per_vector) == r.k
    assert all(c + e == 1 for c, e in r.per_vector)
    doc = r.to_document()
    assert doc["fmr_exact"] == "7/16" and doc["fmr"] == 0.4375


def test_single_fault_errors_fig1a(fig1a):
    errs = single_fault_errors(fig1a)
    rises = {bits_str(e.vector) for e in errs if e.kind is FaultKind.RISE}
    falls = {bits_str(e.vector) for e in errs if e.kind is FaultKind.FALL}
    assert rises == {"0000", "0001", "0010", "0100", "1000"}
    assert falls == {"0101", "0110", "1001", "1010"}
    assert "1100" not in rises | falls
    assert all(e.node == "J" for e in errs)


def test_single_fault_order_vector_major(fig1b):
    errs = single_fault_errors(fig1b)
    keys = [(bits_str(e.vector), fig1b.internal_nodes.index(e.node)) for e in errs]
    assert keys == sorted(keys)


def test_cap_exceeded(fig1b, monkeypatch):
    with pytest.raises(CapExceededError, match="Monte Carlo"):
        compute_fmr(fig1b, cap=5)
    with pytest.raises(CapExceededError):
        list(enumerate_faults(fig1b, cap=5))
    monkeypatch.setenv("FMRFORGE_CAP", "5")
    with pytest.raises(CapExceededError):
        compute_fmr(fig1b)


def test_chunked_engine_matches_single_pass(lib, monkeypatch):
    import fmrforge.faults as faults

    net = random_netlist(lib, np.random.default_rng(11), max_nm=14, n=7)
    whole = compute_fmr(net)
    rows = list(enumerate_faults(net))
    monkeypatch.setattr(faults, "_CHUNK_PATTERNS", 64)
    assert compute_fmr(net) == whole
    assert compute_fmr(net, workers=4) == whole
    assert list(enumerate_faults(net)) == rows


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_fmr_matches_naive_oracle(lib, seed):
    net = random_netlist(lib, np.random.default_rng(seed), max_nm=10)
    assert compute_fmr(net).k == naive_k(net)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_fmr_invariant_under_renaming_and_reordering(lib, seed):
    rng = np.random.default_rng(seed)
    net = random_netlist(lib, rng, max_nm=10)
    doc = net.to_document()
    rename = {name: f"z_{name}" for name in net.net_order}
    doc["inputs"] = [rename[x] for x in doc["inputs"]]
    doc["outputs"] = [rename[x] for x in doc["outputs"]]
    for g in doc["gates"]:
        g["inputs"] = [rename[x] for x in g["inputs"]]
        g["output"] = rename[g["output"]]
    doc["gates"] = [doc["gates"][i] for i in rng.permutation(len(doc["gates"]))]
    other = load_netlist(doc, lib)
    assert compute_fmr(other).fmr_exact == compute_fmr(net).fmr_exact


def test_enumeration_totals_property(lib):
    rng = np.random.default_rng(5)
    for _ in range(20):
        net = random_netlist(lib, rng, max_nm=9)
        rows = list(enumerate_faults(net))
        assert len(rows) == 2 ** (net.n + net.m)
        assert sum(r.state is RowState.ACTUAL for r in rows) == 2**net.n
        assert sum(r.state is RowState.CORRECT for r in rows) == compute_fmr(net).k
        for r in rows:
            assert (r.state is RowState.ACTUAL) == (not any(r.mask))


# -- Monte Carlo ---------------------------------------------------------------


def test_mc_fig1a_close_to_exact(fig1a):
    est = estimate_fmr_mc(fig1a, 100_000, seed=7)
    assert est.ci95_low <= 0.4375 <= est.ci95_high
    assert est.ci95_high - est.ci95_low < 0.01
    assert est.ci95_low <= est.estimate <= est.ci95_high


def test_mc_single_sample(fig1a):
    est = estimate_fmr_mc(fig1a, 1, seed=0)
    assert est.estimate in (0.0, 1.0)
    assert 0.0 <= est.ci95_low <= est.estimate <= est.ci95_high <= 1.0


def test_mc_fig3b(nets):
    est = estimate_fmr_mc(nets["fig3b"], 200_000, seed=1)
    assert est.ci95_low <= 76 / 112 <= est.ci95_high


def test_mc_parallelism_invariant(nets):
    a = estimate_fmr_mc(nets["fig3b"], 150_000, seed=42)
    b = estimate_fmr_mc(nets["fig3b"], 150_000, seed=42, workers=3)
    assert a == b


def test_mc_requires_fault_sites(lib):
    net = Netlist("and", ("A", "B"), ("V",), (GateInstance("g", "AND2", ("A", "B"), "V"),), dict(lib.cells))
    with pytest.raises(ValueError):
        estimate_fmr_mc(net, 10, 0)
