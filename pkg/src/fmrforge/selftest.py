"""Reproduce the case-study numbers from the bundled netlists.

Used by ``fmrforge --selftest``; each check yields ``(name, passed, detail)``.
"""

from __future__ import annotations

from fractions import Fraction

from . import bundled
from .faults import compute_fmr
from .metrics import logic_depth, percent_change
from .redundancy import apply_insertion, flatten_hypothetical, identify_redundant_products, plan_insertion
from .twolevel import Cube, minimal_cover, read_pla


def _fmr(net) -> Fraction:
    return compute_fmr(net).fmr_exact


def checks():
    lib = bundled.demo_library()
    nets = {name: bundled.netlist(name, lib) for name in bundled.NETLISTS}
    base = _fmr(nets["fig1a"])
    names = nets["fig1a"].inputs

    def inserted(products):
        net = nets["fig1a"]
        plan = plan_insertion(net, [Cube.parse(p, names) for p in products], lib, capacity=2)
        return apply_insertion(net, plan)

    def pct(a, b):
        return round(percent_change(a, b), 1)

    yield "FMR fig1a = 7/16", base == Fraction(7, 16), str(base)
    f1b = _fmr(nets["fig1b"])
    yield "FMR fig1b = 10/48", f1b == Fraction(10, 48), str(f1b)
    yield "fig1a over fig1b = +110%", pct(f1b, base) == 110.0, f"{pct(f1b, base)}%"
    flat = _fmr(flatten_hypothetical(nets["fig1a"], keep_nodes=["J"]))
    yield "flatten(keep J) = 11/16, +57.1%", flat == Fraction(11, 16) and pct(base, flat) == 57.1, str(flat)
    f3a = _fmr(inserted(["AD", "BC"]))
    yield "insert AD,BC = 30/48, +42.9%", f3a == Fraction(30, 48) and pct(base, f3a) == 42.9, str(f3a)
    f3b = _fmr(inserted(["AD", "BC", "AC", "BD"]))
    yield "insert AD,BC,AC,BD = 76/112, +55.1%", f3b == Fraction(76, 112) and pct(base, f3b) == 55.1, str(f3b)
    f4a = _fmr(nets["fig4a"])
    yield "FMR fig4a = 22/48, +4.8%", f4a == Fraction(22, 48) and pct(base, f4a) == 4.8, str(f4a)
    f4b = _fmr(nets["fig4b"])
    ok = f4b == Fraction(76, 112) and pct(f4a, f4b) == 48.1 and f4b == _fmr(nets["fig3b"])
    yield "FMR fig4b = 76/112 = fig3b, +48.1% over fig4a", ok, str(f4b)
    _, products = identify_redundant_products(nets["fig1a"])
    got = [p.render(names) for p in products]
    yield "identify fig1a = BD, BC, AD, AC", got == ["BD", "BC", "AD", "AC"], ", ".join(got)
    tt = read_pla(bundled.majority_pla())
    cover = minimal_cover(tt).render(tt.names)
    yield "minimal cover = AB+AC+AD+BC+BD+CD", cover == "AB + AC + AD + BC + BD + CD", cover
    depths = (logic_depth(nets["fig3b"]), logic_depth(nets["fig4b"]))
    counts = (len(nets["fig3b"].gates), len(nets["fig4b"].gates))
    yield "depth 4/3, gate count 4/4", depths == (4, 3) and counts == (4, 4), f"{depths} {counts}"
    ideal = _fmr(flatten_hypothetical(nets["fig1a"]))
    yield "flatten(keep none) = 1", ideal == 1, str(ideal)


def run(stream=None) -> bool:
    ok_all = True
    for name, ok, detail in checks():
        ok_all &= ok
        line = f"[{'PASS' if ok else 'FAIL'}] {name} ({detail})"
        if stream is not None:
            print(line, file=stream)
    return ok_all
