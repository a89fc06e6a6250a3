"""Cell libraries and cell-mapped combinational netlists.

A :class:`Cell` is a two-level sum-of-products over its input pins with an
optional output inversion.  A :class:`Netlist` is a DAG of gate instances over
named nets.  Gate outputs that are not primary outputs are the *internal
nodes*: the only fault sites the analysis models.

Two evaluation paths exist and are deliberately independent:

* scalar (:func:`evaluate`, :func:`evaluate_faulty`) walks the gates in
  topological order with plain Python booleans;
* bit-parallel (:func:`simulate`, :func:`evaluate_block`) packs one simulation
  per bit of ``uint64`` words and is what the enumeration engine uses.
"""

from __future__ import annotations

import heapq
import json
import warnings
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import ParseError, ValidationError

WORD_BITS = 64
ALL_ONES = np.uint64(0xFFFF_FFFF_FFFF_FFFF)

# Word patterns for pattern-index bits 0..5 inside one 64-bit word.
_LOW_BIT_WORDS = tuple(
    np.uint64(sum(1 << p for p in range(64) if (p >> b) & 1)) for b in range(6)
)


@dataclass(frozen=True)
class Literal:
    pin: str
    positive: bool = True

    @classmethod
    def parse(cls, text: str) -> "Literal":
        text = text.strip()
        if text.startswith("~"):
            return cls(text[1:].strip(), False)
        return cls(text, True)

    def __str__(self):
        return self.pin if self.positive else "~" + self.pin


@dataclass(frozen=True)
class Cell:
    """A library cell: ``invert(OR of AND-cubes over pins)``.

    An empty ``sop`` is constant 0; a single empty cube is constant 1.
    """

    name: str
    pins: tuple[str, ...]
    sop: tuple[tuple[Literal, ...], ...]
    invert_output: bool = False
    area: float = 1.0
    delay: float = 1.0
    power_weight: float = 1.0
    hypothetical: bool = False

    def __post_init__(self):
        if len(set(self.pins)) != len(self.pins):
            raise ValidationError(f"cell {self.name}: duplicate pin names")
        declared = set(self.pins)
        for cube in self.sop:
            for lit in cube:
                if lit.pin not in declared:
                    raise ValidationError(
                        f"cell {self.name}: literal {lit} references undeclared pin {lit.pin!r}"
                    )
        if any(len(c) == 0 for c in self.sop) and len(self.sop) != 1:
            raise ValidationError(
                f"cell {self.name}: an empty cube is only allowed as the single universal cube"
            )
        for attr in ("area", "delay", "power_weight"):
            if getattr(self, attr) < 0:
                raise ValidationError(f"cell {self.name}: {attr} must be nonnegative")

    @property
    def arity(self) -> int:
        return len(self.pins)

    @property
    def is_constant(self) -> bool:
        return not self.sop or self.sop == ((),)

    @cached_property
    def _indexed_sop(self):
        index = {p: i for i, p in enumerate(self.pins)}
        return tuple(tuple((index[l.pin], l.positive) for l in cube) for cube in self.sop)

    def evaluate(self, values: Sequence[bool]) -> bool:
        """Evaluate on one pin assignment (ordered like ``pins``)."""
        out = any(all(values[i] == pos for i, pos in cube) for cube in self._indexed_sop)
        return out != self.invert_output

    def evaluate_words(self, inputs: Sequence[np.ndarray], shape=None) -> np.ndarray:
        """Bit-parallel evaluation over packed ``uint64`` word arrays."""
        if shape is None:
            shape = inputs[0].shape
        acc = np.zeros(shape, dtype=np.uint64)
        for cube in self._indexed_sop:
            term = np.full(shape, ALL_ONES, dtype=np.uint64)
            for i, pos in cube:
                term &= inputs[i] if pos else ~inputs[i]
            acc |= term
        if self.invert_output:
            acc = ~acc
        return acc

    def to_document(self) -> dict:
        doc = {
            "name": self.name,
            "pins": list(self.pins),
            "sop": [[str(l) for l in cube] for cube in self.sop],
            "invert": self.invert_output,
            "area": self.area,
            "delay": self.delay,
            "power_weight": self.power_weight,
        }
        if self.hypothetical:
            doc["hypothetical"] = True
        return doc


@dataclass(frozen=True)
class CellLibrary:
    name: str
    cells: Mapping[str, Cell]

    def __getitem__(self, name: str) -> Cell:
        return self.cells[name]

    def __contains__(self, name) -> bool:
        return name in self.cells

    def __iter__(self):
        return iter(self.cells.values())

    def to_document(self) -> dict:
        return {"name": self.name, "cells": [c.to_document() for c in self.cells.values()]}


@dataclass(frozen=True)
class GateInstance:
    id: str
    cell: str
    input_nets: tuple[str, ...]
    output_net: str


def _cell_from_document(doc, locus: str) -> Cell:
    if not isinstance(doc, dict):
        raise ParseError("cell entry must be an object", locus)
    try:
        name = doc["name"]
        pins = doc["pins"]
        sop = doc["sop"]
    except KeyError as exc:
        raise ParseError(f"missing field {exc.args[0]!r}", locus) from None
    if not isinstance(name, str) or not name:
        raise ParseError("cell name must be a nonempty string", f"{locus}.name")
    if not isinstance(pins, list) or not all(isinstance(p, str) for p in pins):
        raise ParseError("pins must be a list of strings", f"{locus}.pins")
    if not isinstance(sop, list) or not all(isinstance(c, list) for c in sop):
        raise ParseError("sop must be a list of literal lists", f"{locus}.sop")
    cubes = []
    for ci, cube in enumerate(sop):
        lits = []
        for li, lit in enumerate(cube):
            if not isinstance(lit, str):
                raise ParseError("literal must be a string", f"{locus}.sop[{ci}][{li}]")
            lits.append(Literal.parse(lit))
        cubes.append(tuple(lits))
    kwargs = {}
    for key, attr in (("area", "area"), ("delay", "delay"), ("power_weight", "power_weight")):
        if key in doc:
            if not isinstance(doc[key], (int, float)) or isinstance(doc[key], bool):
                raise ParseError(f"{key} must be a number", f"{locus}.{key}")
            kwargs[attr] = float(doc[key])
    invert = doc.get("invert", False)
    if not isinstance(invert, bool):
        raise ParseError("invert must be a boolean", f"{locus}.invert")
    try:
        cell = Cell(
            name=name,
            pins=tuple(pins),
            sop=tuple(cubes),
            invert_output=invert,
            hypothetical=bool(doc.get("hypothetical", False)),
            **kwargs,
        )
    except ValidationError as exc:
        raise ParseError(str(exc), locus) from None
    if cell.is_constant:
        warnings.warn(f"cell {name} is a constant function", stacklevel=3)
    return cell


def _load_json(text, what: str):
    if isinstance(text, (dict, list)):
        return text
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON in {what}: {exc.msg}", f"line {exc.lineno}") from None


def load_library(text) -> CellLibrary:
    """Parse a library JSON document (string or already-decoded dict)."""
    doc = _load_json(text, "library")
    if not isinstance(doc, dict):
        raise ParseError("library document must be an object", "$")
    if not isinstance(doc.get("cells"), list):
        raise ParseError("missing or malformed 'cells' list", "$.cells")
    cells: dict[str, Cell] = {}
    for i, entry in enumerate(doc["cells"]):
        cell = _cell_from_document(entry, f"$.cells[{i}]")
        if cell.name in cells:
            raise ParseError(f"duplicate cell name {cell.name!r}", f"$.cells[{i}].name")
        cells[cell.name] = cell
    return CellLibrary(name=str(doc.get("name", "library")), cells=cells)


@dataclass(frozen=True)
class Netlist:
    """A validated, immutable cell-mapped combinational netlist.

    ``cells`` holds the definition of every cell the gates instantiate, so a
    netlist stays evaluable on its own (hypothetical cells included).
    """

    name: str
    inputs: tuple[str, ...]
    outputs: tuple[str, ...]
    gates: tuple[GateInstance, ...]
    cells: Mapping[str, Cell] = field(repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "inputs", tuple(self.inputs))
        object.__setattr__(self, "outputs", tuple(self.outputs))
        object.__setattr__(self, "gates", tuple(self.gates))
        self._validate()

    def _validate(self):
        if len(set(self.inputs)) != len(self.inputs):
            raise ValidationError("duplicate primary input names")
        if len(set(self.outputs)) != len(self.outputs):
            raise ValidationError("duplicate primary output names")
        ids = set()
        driver: dict[str, str] = {net: "<input>" for net in self.inputs}
        for g in self.gates:
            if g.id in ids:
                raise ValidationError(f"duplicate gate id {g.id!r}")
            ids.add(g.id)
            cell = self.cells.get(g.cell)
            if cell is None:
                raise ValidationError(f"gate {g.id}: unknown cell {g.cell!r}")
            if len(g.input_nets) != cell.arity:
                raise ValidationError(
                    f"gate {g.id}: cell {g.cell} takes {cell.arity} inputs, got {len(g.input_nets)}"
                )
            if g.output_net in driver:
                raise ValidationError(
                    f"net {g.output_net!r} has multiple drivers ({driver[g.output_net]} and {g.id})"
                )
            driver[g.output_net] = g.id
        for g in self.gates:
            for net in g.input_nets:
                if net not in driver:
                    raise ValidationError(f"gate {g.id}: input net {net!r} is undriven")
        for po in self.outputs:
            if po not in driver:
                raise ValidationError(f"primary output {po!r} is undriven")
            if driver[po] == "<input>":
                raise ValidationError(f"primary output {po!r} must be driven by a gate")
        # topological order, ties broken by gate id
        by_out = {g.output_net: g for g in self.gates}
        indegree = {}
        fanout: dict[str, list[GateInstance]] = {}
        for g in self.gates:
            deps = {n for n in g.input_nets if n in by_out}
            indegree[g.id] = len(deps)
            for n in deps:
                fanout.setdefault(n, []).append(g)
        heap = [g.id for g in self.gates if indegree[g.id] == 0]
        heapq.heapify(heap)
        by_id = {g.id: g for g in self.gates}
        order = []
        while heap:
            gid = heapq.heappop(heap)
            g = by_id[gid]
            order.append(g)
            for succ in fanout.get(g.output_net, ()):
                indegree[succ.id] -= 1
                if indegree[succ.id] == 0:
                    heapq.heappush(heap, succ.id)
        if len(order) != len(self.gates):
            stuck = sorted(gid for gid, d in indegree.items() if d > 0)
            raise ValidationError(f"combinational cycle through gates {stuck}")
        po = set(self.outputs)
        object.__setattr__(self, "topo_gates", tuple(order))
        object.__setattr__(
            self, "internal_nodes", tuple(g.output_net for g in order if g.output_net not in po)
        )
        object.__setattr__(self, "driver", {g.output_net: g for g in self.gates})

    @property
    def n(self) -> int:
        return len(self.inputs)

    @property
    def m(self) -> int:
        return len(self.internal_nodes)

    @cached_property
    def net_order(self) -> tuple[str, ...]:
        """Primary inputs followed by gate outputs in topological order."""
        return self.inputs + tuple(g.output_net for g in self.topo_gates)

    @cached_property
    def net_index(self) -> dict[str, int]:
        return {net: i for i, net in enumerate(self.net_order)}

    @cached_property
    def _program(self):
        idx = self.net_index
        node_slot = {net: j for j, net in enumerate(self.internal_nodes)}
        return tuple(
            (
                self.cells[g.cell],
                tuple(idx[n] for n in g.input_nets),
                idx[g.output_net],
                node_slot.get(g.output_net, -1),
            )
            for g in self.topo_gates
        )

    def cell_of(self, gate: GateInstance) -> Cell:
        return self.cells[gate.cell]

    def fanin_cone(self, nets: Iterable[str]) -> set[str]:
        """Ids of all gates in the transitive fan-in of ``nets``."""
        seen: set[str] = set()
        stack = [n for n in nets if n in self.driver]
        while stack:
            g = self.driver[stack.pop()]
            if g.id in seen:
                continue
            seen.add(g.id)
            stack.extend(n for n in g.input_nets if n in self.driver)
        return seen

    def to_document(self) -> dict:
        doc = {
            "name": self.name,
            "inputs": list(self.inputs),
            "outputs": list(self.outputs),
            "gates": [],
        }
        hypo = []
        for g in self.gates:
            entry = {"id": g.id, "cell": g.cell, "inputs": list(g.input_nets), "output": g.output_net}
            cell = self.cells[g.cell]
            if cell.hypothetical:
                entry["hypothetical"] = True
                if cell not in hypo:
                    hypo.append(cell)
            doc["gates"].append(entry)
        if hypo:
            doc["cells"] = [c.to_document() for c in hypo]
        return doc

    def to_json(self) -> str:
        return json.dumps(self.to_document(), indent=2) + "\n"


def load_netlist(text, lib: CellLibrary) -> Netlist:
    """Parse and validate a netlist JSON document against ``lib``.

    An optional ``cells`` list in the document declares extra (typically
    hypothetical) cells local to this netlist.
    """
    doc = _load_json(text, "netlist")
    if not isinstance(doc, dict):
        raise ParseError("netlist document must be an object", "$")
    for key in ("inputs", "outputs", "gates"):
        if not isinstance(doc.get(key), list):
            raise ParseError(f"missing or malformed {key!r} list", f"$.{key}")
    for key in ("inputs", "outputs"):
        for i, net in enumerate(doc[key]):
            if not isinstance(net, str) or not net:
                raise ParseError("net names must be nonempty strings", f"$.{key}[{i}]")
    cells = dict(lib.cells)
    for i, entry in enumerate(doc.get("cells", [])):
        cell = _cell_from_document(entry, f"$.cells[{i}]")
        if cell.name in cells and cells[cell.name] != cell:
            raise ParseError(f"local cell {cell.name!r} conflicts with the library", f"$.cells[{i}]")
        cells[cell.name] = cell
    gates = []
    for i, g in enumerate(doc["gates"]):
        locus = f"$.gates[{i}]"
        if not isinstance(g, dict):
            raise ParseError("gate entry must be an object", locus)
        try:
            gid, cell, ins, out = g["id"], g["cell"], g["inputs"], g["output"]
        except KeyError as exc:
            raise ParseError(f"missing field {exc.args[0]!r}", locus) from None
        if not isinstance(ins, list) or not all(isinstance(x, str) for x in ins):
            raise ParseError("inputs must be a list of net names", f"{locus}.inputs")
        if not all(isinstance(x, str) for x in (gid, cell, out)):
            raise ParseError("id, cell and output must be strings", locus)
        gates.append(GateInstance(gid, cell, tuple(ins), out))
    return Netlist(
        name=str(doc.get("name", "netlist")),
        inputs=tuple(doc["inputs"]),
        outputs=tuple(doc["outputs"]),
        gates=tuple(gates),
        cells=cells,
    )


def as_bits(x, width: int) -> tuple[bool, ...]:
    """Coerce ``"0101"``, a 0/1 sequence, or an MSB-first integer to a bit tuple."""
    if isinstance(x, str):
        if len(x) != width or set(x) - {"0", "1"}:
            raise ValueError(f"expected a {width}-character 0/1 string, got {x!r}")
        return tuple(c == "1" for c in x)
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        if not 0 <= x < (1 << width):
            raise ValueError(f"{x} does not fit in {width} bits")
        return tuple(bool((int(x) >> (width - 1 - i)) & 1) for i in range(width))
    bits = tuple(bool(b) for b in x)
    if len(bits) != width:
        raise ValueError(f"expected {width} bits, got {len(bits)}")
    return bits


def bits_str(bits: Iterable[bool]) -> str:
    return "".join("1" if b else "0" for b in bits)


def _run_scalar(net: Netlist, x, mask):
    xs = as_bits(x, net.n)
    flips = as_bits(mask, net.m) if mask is not None else (False,) * net.m
    values = dict(zip(net.inputs, xs))
    slot = {node: j for j, node in enumerate(net.internal_nodes)}
    for g in net.topo_gates:
        v = net.cells[g.cell].evaluate([values[i] for i in g.input_nets])
        j = slot.get(g.output_net)
        if j is not None and flips[j]:
            v = not v
        values[g.output_net] = v
    return values


def evaluate(net: Netlist, x) -> tuple[tuple[bool, ...], tuple[bool, ...]]:
    """Fault-free scalar evaluation: ``(internal node values, output values)``."""
    values = _run_scalar(net, x, None)
    return (
        tuple(values[u] for u in net.internal_nodes),
        tuple(values[o] for o in net.outputs),
    )


def evaluate_faulty(net: Netlist, x, f) -> tuple[bool, ...]:
    """Scalar evaluation with internal node ``j`` XOR-flipped where ``f[j]`` is set.

    Each flip applies to the node's locally computed value, so it composes with
    faults already present in its fan-in.
    """
    values = _run_scalar(net, x, f)
    return tuple(values[o] for o in net.outputs)


def evaluate_faulty_nodes(net: Netlist, x, f) -> tuple[tuple[bool, ...], tuple[bool, ...]]:
    values = _run_scalar(net, x, f)
    return (
        tuple(values[u] for u in net.internal_nodes),
        tuple(values[o] for o in net.outputs),
    )


# ---------------------------------------------------------------------------
# bit-parallel engine


def simulate(
    net: Netlist, pi_words: Sequence[np.ndarray], flip_words=None, nwords: int | None = None
) -> list[np.ndarray]:
    """Propagate packed patterns; returns one word array per net in ``net.net_order``.

    ``flip_words[j]`` (if given) is XORed into internal node ``j``.  ``nwords``
    is only needed when the netlist has no primary inputs.
    """
    if len(pi_words) != net.n:
        raise ValueError(f"expected {net.n} input word arrays, got {len(pi_words)}")
    shape = pi_words[0].shape if net.n else (nwords or 1,)
    values: list = list(pi_words) + [None] * len(net.topo_gates)
    for cell, ins, out, slot in net._program:
        v = cell.evaluate_words([values[i] for i in ins], shape)
        if slot >= 0 and flip_words is not None and flip_words[slot] is not None:
            v = v ^ flip_words[slot]
        values[out] = v
    return values


def words_for(npatterns: int) -> int:
    return max(1, -(-npatterns // WORD_BITS))


def index_bit_words(bit: int, start: int, npatterns: int) -> np.ndarray:
    """Words whose pattern ``p`` holds bit ``bit`` of index ``start + p``.

    ``start`` must be a multiple of 64.
    """
    if start % WORD_BITS:
        raise ValueError("pattern ranges must start on a word boundary")
    nwords = words_for(npatterns)
    if bit < 6:
        return np.full(nwords, _LOW_BIT_WORDS[bit], dtype=np.uint64)
    w = np.arange(start // WORD_BITS, start // WORD_BITS + nwords, dtype=np.uint64)
    sel = (w >> np.uint64(bit - 6)) & np.uint64(1)
    return np.where(sel.astype(bool), ALL_ONES, np.uint64(0))


def pack_bits(bits: np.ndarray) -> np.ndarray:
    """Pack a boolean vector into little-endian ``uint64`` words."""
    bits = np.asarray(bits, dtype=bool)
    nwords = words_for(len(bits))
    padded = np.zeros(nwords * WORD_BITS, dtype=bool)
    padded[: len(bits)] = bits
    return np.packbits(padded, bitorder="little").view("<u8").astype(np.uint64)


def unpack_bits(words: np.ndarray, npatterns: int) -> np.ndarray:
    raw = np.ascontiguousarray(words, dtype="<u8").view(np.uint8)
    return np.unpackbits(raw, bitorder="little")[:npatterns].astype(bool)


def exhaustive_input_words(net: Netlist) -> list[np.ndarray]:
    """Input words covering all ``2**n`` vectors, pattern index = vector (A is MSB)."""
    total = 1 << net.n
    return [index_bit_words(net.n - 1 - i, 0, total) for i in range(net.n)]


def evaluate_block(net: Netlist, xs) -> np.ndarray:
    """Evaluate up to 64 input vectors at once.

    Returns one ``uint64`` per primary output whose bit ``i`` is that output
    for ``xs[i]``; bits past ``len(xs)`` are zero.
    """
    vectors = [as_bits(x, net.n) for x in xs]
    if len(vectors) > WORD_BITS:
        raise ValueError(f"a block holds at most {WORD_BITS} vectors")
    if not vectors:
        return np.zeros(len(net.outputs), dtype=np.uint64)
    matrix = np.array(vectors, dtype=bool).reshape(len(vectors), net.n)
    pi = [pack_bits(matrix[:, i]) for i in range(net.n)]
    values = simulate(net, pi)
    valid = pack_bits(np.ones(len(vectors), dtype=bool))[0]
    return np.array(
        [values[net.net_index[o]][0] & valid for o in net.outputs], dtype=np.uint64
    )
