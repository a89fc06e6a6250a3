"""Text renderings (CSV, Markdown, JSON) of the analysis results."""

from __future__ import annotations

import csv
import io
import json
from typing import Iterable, Sequence

from .circuit import Netlist, bits_str
from .faults import EnumerationRow, FmrReport, McEstimate, RowState
from .metrics import Delta, MetricsReport
from .redundancy import FindingStatus, RedundancyFinding

ENUM_HEADER = ["inputs", "mask", "node_values", "fault_kinds", "outputs", "state"]


def dumps(doc) -> str:
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


def _md_table(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    lines = ["| " + " | ".join(header) + " |", "|" + "|".join("---" for _ in header) + "|"]
    lines += ["| " + " | ".join(str(c) for c in row) + " |" for row in rows]
    return "\n".join(lines) + "\n"


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


# -- enumeration ------------------------------------------------------------


def enumeration_csv(rows: Iterable[EnumerationRow]) -> str:
    def fmt(r: EnumerationRow):
        kinds = ";".join(f"{node}:{kind.ascii}" for node, kind in r.fault_kinds)
        return [bits_str(r.vector), bits_str(r.mask), bits_str(r.node_values), kinds, bits_str(r.outputs), r.state]

    return _csv(ENUM_HEADER, (fmt(r) for r in rows))


def enumeration_markdown(net: Netlist, rows: Iterable[EnumerationRow]) -> str:
    header = list(net.inputs) + list(net.internal_nodes) + list(net.outputs) + ["State of PO"]

    def fmt(r: EnumerationRow):
        kinds = dict(r.fault_kinds)
        nodes = [
            f"{int(v)} ({kinds[u]})" if u in kinds else str(int(v))
            for u, v in zip(net.internal_nodes, r.node_values)
        ]
        return [int(b) for b in r.vector] + nodes + [int(b) for b in r.outputs] + [r.state]

    return _md_table(header, (fmt(r) for r in rows))


def enumeration_json(rows: Iterable[EnumerationRow]) -> str:
    return dumps(
        [
            {
                "inputs": bits_str(r.vector),
                "mask": bits_str(r.mask),
                "node_values": bits_str(r.node_values),
                "fault_kinds": {node: kind.ascii for node, kind in r.fault_kinds},
                "outputs": bits_str(r.outputs),
                "state": str(r.state),
            }
            for r in rows
        ]
    )


def render_enumeration(net: Netlist, rows, fmt: str) -> str:
    if fmt == "csv":
        return enumeration_csv(rows)
    if fmt == "json":
        return enumeration_json(rows)
    return enumeration_markdown(net, rows)


# -- FMR --------------------------------------------------------------------


def fmr_summary_line(name: str, r: FmrReport) -> str:
    return f"{name}: FMR = {r.k}/{r.denominator} = {r.fmr_decimal:.4f} (n={r.n}, m={r.m})"


def render_fmr(name: str, r: FmrReport, fmt: str) -> str:
    if fmt == "json":
        doc = {"circuit": name}
        doc.update(r.to_document())
        return dumps(doc)
    rows = [
        [bits_str(tuple(bool((v >> (r.n - 1 - i)) & 1) for i in range(r.n))), c, e]
        for v, (c, e) in enumerate(r.per_vector)
    ]
    if fmt == "csv":
        return _csv(["inputs", "masked", "error"], rows)
    return fmr_summary_line(name, r) + "\n\n" + _md_table(["inputs", "masked", "error"], rows)


def render_mc(name: str, est: McEstimate, fmt: str) -> str:
    doc = est.to_document()
    if fmt == "json":
        return dumps({"circuit": name, **doc})
    if fmt == "csv":
        return _csv(list(doc), [list(doc.values())])
    lo, hi = est.ci95
    return (
        f"{name}: FMR ~ {est.estimate:.4f} (95% CI [{lo:.4f}, {hi:.4f}], "
        f"{est.hits}/{est.samples} masked, seed {est.seed})\n"
    )


# -- redundancy findings ----------------------------------------------------


FINDING_HEADER = ["inputs", "node", "node value", "PO expected", "PO faulty", "state", "redundant logic"]


def _finding_row(net: Netlist, f: RedundancyFinding):
    faulty_node = "0" if f.kind.value.endswith("0") else "1"
    return [
        bits_str(f.vector),
        f.node,
        f"{faulty_node} ({f.kind} fault)",
        int(f.golden),
        int(f.faulty),
        RowState.CORRECT if f.status is FindingStatus.NOT_NECESSARY else RowState.ERROR,
        f.label(net.inputs),
    ]


def render_findings(net: Netlist, findings: Sequence[RedundancyFinding], products, fmt: str) -> str:
    names = net.inputs
    if fmt == "json":
        return dumps(
            {
                "circuit": net.name,
                "findings": [
                    {
                        "inputs": bits_str(f.vector),
                        "node": f.node,
                        "fault": f.kind.ascii,
                        "po_expected": int(f.golden),
                        "po_faulty": int(f.faulty),
                        "status": f.status.value,
                        "product": f.product.render(names) if f.product else None,
                    }
                    for f in findings
                ],
                "products": [p.render(names) for p in products],
            }
        )
    rows = [_finding_row(net, f) for f in findings]
    if fmt == "csv":
        return _csv(FINDING_HEADER, rows)
    listing = ", ".join(p.render(names) for p in products) or "(none)"
    return _md_table(FINDING_HEADER, rows) + f"\nRedundant products: {listing}\n"


# -- metrics ----------------------------------------------------------------


METRICS_HEADER = ["Circuit", "Power-proxy", "Delay", "Area", "FoM", "FMR"]


def _fom(x):
    return "n/a" if x is None else f"{x:.6g}"


def render_metrics(entries: Sequence[tuple[str, MetricsReport, FmrReport]], fmt: str) -> str:
    if fmt == "json":
        return dumps(
            [
                {"circuit": name, **m.to_document(), "fmr": fr.fmr_decimal, "fmr_exact": f"{fr.k}/{fr.denominator}"}
                for name, m, fr in entries
            ]
        )
    rows = [
        [name + (" (hypothetical)" if m.hypothetical else ""), f"{m.power_proxy:g}", f"{m.delay:g}",
         f"{m.area:g}", _fom(m.fom), f"{fr.fmr_decimal:.4f}"]
        for name, m, fr in entries
    ]
    if fmt == "csv":
        return _csv(METRICS_HEADER, rows)
    return _md_table(METRICS_HEADER, rows)


def render_compare(a: str, b: str, deltas: Sequence[Delta], fmt: str) -> str:
    if fmt == "json":
        return dumps({"a": a, "b": b, "deltas": [d.to_document() for d in deltas]})

    def num(x):
        return "n/a" if x is None else f"{float(x):.6g}"

    def pct(x):
        return "undefined" if x is None else f"{x:+.1f}%"

    rows = [[d.metric, num(d.before), num(d.after), num(d.absolute), pct(d.percent)] for d in deltas]
    header = ["metric", a, b, "delta", "percent"]
    if fmt == "csv":
        return _csv(header, rows)
    return _md_table(header, rows)
