"""Redundant product identification, library-legal insertion and flattening.

Only the "output should be 1 but reads 0" error polarity is hardened: adding a
product ``p`` that implies the output function leaves the fault-free function
unchanged (``f + p = f``) and forces the output to 1 on every vector where
``p`` holds, which masks single-node faults there.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .circuit import (
    Cell,
    CellLibrary,
    GateInstance,
    Literal,
    Netlist,
    bits_str,
    exhaustive_input_words,
    index_bit_words,
    simulate,
    unpack_bits,
)
from .errors import ValidationError
from .faults import FaultKind, single_fault_outcomes
from .twolevel import Cube, minimal_cover, netlist_truth_table, prime_implicants


class FindingStatus(enum.Enum):
    NOT_APPLICABLE = "Not applicable"
    NOT_NECESSARY = "Not necessary"
    IDENTIFIED = "Identified"


@dataclass(frozen=True)
class RedundancyFinding:
    vector: tuple[bool, ...]
    node: str
    kind: FaultKind
    golden: bool
    faulty: bool
    status: FindingStatus
    product: Cube | None = None

    def label(self, names: Sequence[str]) -> str:
        if self.status is FindingStatus.IDENTIFIED:
            return self.product.render(names)
        return self.status.value


def _pick_output(net: Netlist, output: str | None) -> str:
    if output is None:
        if len(net.outputs) != 1:
            raise ValueError("netlist has several outputs; name the one to analyse")
        return net.outputs[0]
    if output not in net.outputs:
        raise KeyError(f"unknown primary output {output!r}")
    return output


def identify_redundant_products(net: Netlist, output: str | None = None, cap: int | None = None):
    """Classify every single-node fault and pick a covering prime for each 1→0 output error.

    Returns ``(findings, products)`` where ``products`` are the distinct
    identified cubes in first-occurrence order.
    """
    output = _pick_output(net, output)
    o = net.outputs.index(output)
    findings: list[RedundancyFinding] = []
    products: list[Cube] = []
    if net.m == 0:
        return findings, products
    primes = prime_implicants(netlist_truth_table(net, output))
    for r in single_fault_outcomes(net, cap):
        golden, faulty = r.golden[o], r.faulty[o]
        product = None
        if golden == faulty:
            status = FindingStatus.NOT_NECESSARY
        elif not golden:
            status = FindingStatus.NOT_APPLICABLE
        else:
            v = int(bits_str(r.vector), 2)
            # primes are sorted fewest-literals-then-lexicographic
            product = next((p for p in primes if p.contains(v)), None)
            if product is None:
                raise RuntimeError(f"no prime implicant covers onset vector {bits_str(r.vector)}")
            status = FindingStatus.IDENTIFIED
            if product not in products:
                products.append(product)
        findings.append(RedundancyFinding(r.vector, r.node, r.kind, golden, faulty, status, product))
    return findings, products


# ---------------------------------------------------------------------------
# insertion planning


@dataclass(frozen=True)
class InsertionPlan:
    """Gates to add and how to splice them in.

    ``mode`` is ``"splice"`` (chain placed between an internal node and a
    direct pin of the output gate) or ``"wrap"`` (chain appended after the
    output gate, whose old output becomes internal), or ``"none"``.
    """

    output: str
    products: tuple[Cube, ...]
    new_gates: tuple[GateInstance, ...]
    chain: tuple[str, ...]  # ids of the carry gates, in chain order
    splice_point: tuple[str, int] | None
    mode: str
    rewired_gate: GateInstance | None
    cells: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def is_empty(self) -> bool:
        return not self.new_gates


def _direct_pin(cell: Cell) -> int | None:
    """Index of a pin ``d`` with ``cell = d + rest`` (non-inverted), else None."""
    if cell.invert_output:
        return None
    for cube in cell.sop:
        if len(cube) == 1 and cube[0].positive:
            return cell.pins.index(cube[0].pin)
    return None


def _carry_shape(cell: Cell):
    """``(capacity, product width)`` if the cell is ``sum of AND-k cubes + direct pin``."""
    if cell.invert_output or cell.hypothetical:
        return None
    singles = [c for c in cell.sop if len(c) == 1]
    products = [c for c in cell.sop if len(c) != 1]
    if len(singles) != 1 or not products:
        return None
    widths = {len(c) for c in products}
    if len(widths) != 1:
        return None
    used = [l.pin for c in cell.sop for l in c]
    if any(not l.positive for c in cell.sop for l in c):
        return None
    if sorted(used) != sorted(cell.pins):
        return None
    return len(products), widths.pop()


def _and_cells(lib: CellLibrary) -> dict[int, Cell]:
    out: dict[int, Cell] = {}
    for cell in lib:
        if cell.invert_output or cell.hypothetical or len(cell.sop) != 1:
            continue
        cube = cell.sop[0]
        if len(cube) == cell.arity and cell.arity >= 2 and all(l.positive for l in cube):
            if cell.arity not in out or (cell.area, cell.name) < (out[cell.arity].area, out[cell.arity].name):
                out[cell.arity] = cell
    return out


def _inverter(lib: CellLibrary) -> Cell | None:
    cands = [
        c for c in lib
        if c.arity == 1 and c.sop == ((Literal(c.pins[0], False),),) and not c.invert_output
        or c.arity == 1 and c.sop == ((Literal(c.pins[0], True),),) and c.invert_output
    ]
    return min(cands, key=lambda c: (c.area, c.name)) if cands else None


class _Namer:
    def __init__(self, net: Netlist):
        self.ids = {g.id for g in net.gates}
        self.nets = set(net.inputs) | set(net.outputs) | {g.output_net for g in net.gates}
        self.i = 0

    def net(self) -> str:
        i = 0
        while f"w{i}" in self.nets:
            i += 1
        self.nets.add(f"w{i}")
        return f"w{i}"

    def next(self) -> tuple[str, str]:
        while f"red{self.i}" in self.ids or f"r{self.i}" in self.nets:
            self.i += 1
        gid, out = f"red{self.i}", f"r{self.i}"
        self.ids.add(gid)
        self.nets.add(out)
        self.i += 1
        return gid, out


def plan_insertion(
    net: Netlist,
    products: Sequence[Cube],
    lib: CellLibrary,
    capacity: int = 2,
    output: str | None = None,
) -> InsertionPlan:
    """Plan a carry-through chain that ORs ``products`` into the output cone.

    Each chain gate absorbs up to ``capacity`` products plus the previous
    chain value on its direct pin.  Products wider than the carry cell's AND
    width are built from library AND cells; negative literals use an inverter.
    """
    output = _pick_output(net, output)
    products = tuple(products)
    if not products:
        return InsertionPlan(output, (), (), (), None, "none", None)
    if capacity < 1:
        raise ValueError("capacity must be >= 1")
    for p in products:
        if p.n != net.n:
            raise ValueError("product arity does not match the netlist inputs")
    # a constant-1 output identifies the universal cube; realize it as x + ~x
    slots = []
    for p in products:
        if p.num_literals == 0:
            top = 1 << (net.n - 1)
            slots += [Cube(net.n, top, top), Cube(net.n, top, 0)]
        else:
            slots.append(p)

    shaped = [(c, _carry_shape(c)) for c in lib]
    carry = sorted(
        (c for c, s in shaped if s is not None and s[0] == capacity), key=lambda c: (c.area, c.name)
    )
    if not carry:
        raise ValidationError(
            f"library {lib.name} has no cell with {capacity} AND products plus one direct input"
        )
    cell = carry[0]
    _, width = _carry_shape(cell)
    direct = _direct_pin(cell)
    product_cubes = [c for c in cell.sop if len(c) != 1]

    namer = _Namer(net)
    new_gates: list[GateInstance] = []
    used_cells: dict[str, Cell] = {cell.name: cell}
    inverted: dict[int, str] = {}

    def literal_net(var: int, positive: bool) -> str:
        if positive:
            return net.inputs[var]
        if var not in inverted:
            inv = _inverter(lib)
            if inv is None:
                raise ValidationError(f"library {lib.name} has no inverter for negative literals")
            gid, out = namer.next()
            new_gates.append(GateInstance(gid, inv.name, (net.inputs[var],), out))
            used_cells[inv.name] = inv
            inverted[var] = out
        return inverted[var]

    ands = _and_cells(lib)

    def and_tree(nets: list[str]) -> str:
        if not ands:
            raise ValidationError(f"product of {len(nets)} literals needs AND cells, none in {lib.name}")
        widest = max(ands)
        while len(nets) > 1:
            take = min(widest, len(nets))
            group, nets = nets[:take], nets[take:]
            k = min(a for a in ands if a >= len(group))
            acell = ands[k]
            ins = group + [group[-1]] * (k - len(group))
            gid, out = namer.next()
            new_gates.append(GateInstance(gid, acell.name, tuple(ins), out))
            used_cells[acell.name] = acell
            nets = nets + [out]
        return nets[0]

    def slot_nets(p: Cube) -> list[str]:
        nets = [literal_net(v, pos) for v, pos in p.literals()]
        if len(nets) > width:
            nets = [and_tree(nets)]
        return nets + [nets[-1]] * (width - len(nets))

    po_gate = net.driver[output]
    po_cell = net.cells[po_gate.cell]
    pin = _direct_pin(po_cell)
    internal = set(net.internal_nodes)
    if pin is not None and po_gate.input_nets[pin] in internal:
        mode = "splice"
        carry_in = po_gate.input_nets[pin]
        splice_point = (po_gate.id, pin)
    else:
        mode = "wrap"
        splice_point = None
        carry_in = wrapped = namer.net()

    groups = [slots[i : i + capacity] for i in range(0, len(slots), capacity)]
    chain = []
    for gi, group in enumerate(groups):
        padded = list(group) + [group[-1]] * (capacity - len(group))
        pin_net: dict[str, str] = {cell.pins[direct]: carry_in}
        for cube, p in zip(product_cubes, padded):
            for lit, n_ in zip(cube, slot_nets(p)):
                pin_net[lit.pin] = n_
        last = gi == len(groups) - 1
        gid, out = namer.next()
        if mode == "wrap" and last:
            out = output
        new_gates.append(GateInstance(gid, cell.name, tuple(pin_net[p] for p in cell.pins), out))
        chain.append(gid)
        carry_in = out

    if mode == "splice":
        ins = list(po_gate.input_nets)
        ins[pin] = carry_in
        rewired = GateInstance(po_gate.id, po_gate.cell, tuple(ins), po_gate.output_net)
    else:
        rewired = GateInstance(po_gate.id, po_gate.cell, po_gate.input_nets, wrapped)
    return InsertionPlan(
        output, products, tuple(new_gates), tuple(chain), splice_point, mode, rewired, used_cells
    )


def apply_insertion(net: Netlist, plan: InsertionPlan, verify: bool = True) -> Netlist:
    """Materialize ``plan``; the fault-free function of every output is re-checked."""
    if plan.is_empty:
        return net
    gates = [plan.rewired_gate if g.id == plan.rewired_gate.id else g for g in net.gates]
    gates.extend(plan.new_gates)
    cells = dict(net.cells)
    cells.update(plan.cells)
    try:
        out = Netlist(net.name + "+red", net.inputs, net.outputs, tuple(gates), cells)
    except ValidationError as exc:
        raise ValidationError(f"insertion produced an invalid netlist: {exc}") from None
    if verify and net.n <= 16 and not check_equivalence(net, out):
        raise ValidationError("insertion changed the fault-free function")
    return out


# ---------------------------------------------------------------------------
# flattening and equivalence


def _node_function(net: Netlist, node: str) -> np.ndarray:
    values = simulate(net, exhaustive_input_words(net))
    return unpack_bits(values[net.net_index[node]], 1 << net.n)


def flatten_hypothetical(net: Netlist, output: str | None = None, keep_nodes: Sequence[str] = ()) -> Netlist:
    """Replace the output's cone by one hypothetical complex cell.

    The cell computes the minimum SOP cover of the output over primary inputs,
    plus one direct term per kept internal node (which keeps its driving cone).
    A kept node ``u`` enters as ``u`` if it implies the output, otherwise as
    ``~u`` if its complement does; anything else would alter the function.
    """
    output = _pick_output(net, output)
    keep = list(dict.fromkeys(keep_nodes))
    unknown = [u for u in keep if u not in net.internal_nodes]
    if unknown:
        raise KeyError(f"not internal nodes of {net.name}: {unknown}")
    tt = netlist_truth_table(net, output)
    cover = minimal_cover(tt)
    onset = np.zeros(1 << net.n, dtype=bool)
    onset[list(tt.onset)] = True

    support = sorted({v for c in cover for v, _ in c.literals()})
    pins = [net.inputs[v] for v in support] + keep
    sop = [tuple(Literal(net.inputs[v], pos) for v, pos in c.literals()) for c in cover]
    for u in keep:
        fu = _node_function(net, u)
        if not (fu & ~onset).any():
            sop.append((Literal(u, True),))
        elif not (~fu & ~onset).any():
            sop.append((Literal(u, False),))
        else:
            raise ValueError(f"node {u} cannot feed the flattened {output} without changing its function")

    name = f"HYP_{output}"
    i = 1
    while name in net.cells:
        name = f"HYP_{output}_{i}"
        i += 1
    cell = Cell(name=name, pins=tuple(pins), sop=tuple(sop), hypothetical=True)

    po_gate = net.driver[output]
    others = [o for o in net.outputs if o != output]
    retained = net.fanin_cone(keep + others) - {po_gate.id}
    hyp_gate = GateInstance(po_gate.id, name, tuple(pins), output)
    gates = [g for g in net.gates if g.id in retained] + [hyp_gate]
    cells = dict(net.cells)
    cells[name] = cell
    out = Netlist(net.name + "+flat", net.inputs, net.outputs, tuple(gates), cells)
    if net.n <= 16 and not check_equivalence(net, out):
        raise ValidationError("flattening changed the fault-free function")
    return out


def check_equivalence(a: Netlist, b: Netlist) -> bool:
    """Exhaustive fault-free comparison; inputs and outputs are matched by name."""
    if set(a.inputs) != set(b.inputs) or set(a.outputs) != set(b.outputs):
        raise ValueError("netlists have different primary inputs or outputs")
    if a.n > 16:
        raise ValueError("exhaustive equivalence supports at most 16 inputs")
    total = 1 << a.n
    pos = {name: i for i, name in enumerate(a.inputs)}
    va = simulate(a, exhaustive_input_words(a))
    vb = simulate(b, [index_bit_words(a.n - 1 - pos[name], 0, total) for name in b.inputs])
    for o in a.outputs:
        if not np.array_equal(
            unpack_bits(va[a.net_index[o]], total), unpack_bits(vb[b.net_index[o]], total)
        ):
            return False
    return True
