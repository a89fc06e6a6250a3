"""Structural and cost-model design metrics, and report comparison.

Absolute power, delay and area need a characterized library; here they come
from a pluggable :class:`CostModel`.  The default unit model charges 1 area,
1 delay and 1 power weight per cell, so delay equals logic depth and area
equals gate count.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

import numpy as np

from .circuit import Cell, Netlist, exhaustive_input_words, simulate, unpack_bits
from .faults import FmrReport


@dataclass(frozen=True)
class CostModel:
    """``source`` is ``"unit"`` or ``"library"``; ``overrides`` maps cell name to
    ``(area, delay, power_weight)``."""

    source: str = "unit"
    overrides: Mapping[str, tuple[float, float, float]] = field(default_factory=dict)

    def __post_init__(self):
        if self.source not in ("unit", "library"):
            raise ValueError("cost model source must be 'unit' or 'library'")
        for name, values in self.overrides.items():
            if len(values) != 3 or any(v < 0 for v in values):
                raise ValueError(f"override for {name} must be three nonnegative numbers")

    def cost(self, cell: Cell) -> tuple[float, float, float]:
        if cell.name in self.overrides:
            return tuple(float(v) for v in self.overrides[cell.name])
        if self.source == "unit":
            return 1.0, 1.0, 1.0
        return cell.area, cell.delay, cell.power_weight


@dataclass(frozen=True)
class MetricsReport:
    gate_count: int
    logic_depth: int
    area: float
    delay: float
    power_proxy: float
    hypothetical: bool

    @property
    def fom(self) -> float | None:
        """Inverse power-delay product; None when either factor is zero."""
        if self.power_proxy > 0 and self.delay > 0:
            return 1.0 / (self.power_proxy * self.delay)
        return None

    def to_document(self) -> dict:
        return {
            "gate_count": self.gate_count,
            "logic_depth": self.logic_depth,
            "area": self.area,
            "delay": self.delay,
            "power_proxy": self.power_proxy,
            "fom": self.fom,
            "hypothetical": self.hypothetical,
        }


def _longest(net: Netlist, weight) -> float:
    arrival: dict[str, float] = {}
    for g in net.topo_gates:
        start = max((arrival.get(n, 0) for n in g.input_nets), default=0)
        arrival[g.output_net] = start + weight(g)
    return max((arrival[o] for o in net.outputs), default=0)


def logic_depth(net: Netlist) -> int:
    """Most gate stages on any primary-input to primary-output path."""
    return int(_longest(net, lambda g: 1))


def toggle_counts(net: Netlist) -> dict[str, int]:
    """Output toggles per gate over the ascending exhaustive input sweep."""
    if net.n > 16:
        raise ValueError("toggle sweep supports at most 16 inputs")
    total = 1 << net.n
    values = simulate(net, exhaustive_input_words(net))
    counts = {}
    for g in net.gates:
        bits = unpack_bits(values[net.net_index[g.output_net]], total)
        counts[g.id] = int(np.count_nonzero(bits[1:] != bits[:-1]))
    return counts


def metrics(net: Netlist, cm: CostModel | None = None) -> MetricsReport:
    cm = cm or CostModel()
    costs = {g.id: cm.cost(net.cells[g.cell]) for g in net.gates}
    toggles = toggle_counts(net)
    return MetricsReport(
        gate_count=len(net.gates),
        logic_depth=logic_depth(net),
        area=math.fsum(c[0] for c in costs.values()),
        delay=float(_longest(net, lambda g: costs[g.id][1])),
        power_proxy=math.fsum(costs[gid][2] * toggles[gid] for gid in costs),
        hypothetical=any(net.cells[g.cell].hypothetical for g in net.gates),
    )


@dataclass(frozen=True)
class Delta:
    metric: str
    before: float | Fraction | None
    after: float | Fraction | None
    absolute: float | Fraction | None
    percent: float | None  # None when undefined

    def to_document(self) -> dict:
        def num(x):
            return float(x) if x is not None else None

        return {
            "metric": self.metric,
            "a": num(self.before),
            "b": num(self.after),
            "delta": num(self.absolute),
            "percent": self.percent,
        }


def percent_change(a, b) -> float | None:
    """``(b - a) / a`` in percent, computed exactly for Fractions."""
    if a is None or b is None or a == 0:
        return None
    return float((Fraction(b) - Fraction(a)) / Fraction(a) * 100)


def compare(a: tuple[MetricsReport, FmrReport], b: tuple[MetricsReport, FmrReport]) -> list[Delta]:
    """Deltas from ``a`` to ``b`` for every metric and the FMR."""
    (ma, fa), (mb, fb) = a, b
    rows = []
    for name in ("gate_count", "logic_depth", "area", "delay", "power_proxy", "fom"):
        x, y = getattr(ma, name), getattr(mb, name)
        absolute = None if x is None or y is None else y - x
        rows.append(Delta(name, x, y, absolute, percent_change(x, y)))
    x, y = fa.fmr_exact, fb.fmr_exact
    rows.append(Delta("fmr", x, y, y - x, percent_change(x, y)))
    return rows
