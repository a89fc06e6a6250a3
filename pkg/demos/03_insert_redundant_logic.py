"""
Inserting redundant products with library cells
===============================================

The identified products are chained through AO221 gates: each gate adds two
products and passes the previous value through its direct input.  Two
products give one extra gate; all four give a two-gate chain.
"""

from fmrforge import Cube, apply_insertion, bundled, check_equivalence, compute_fmr, plan_insertion
from fmrforge.metrics import percent_change
from fmrforge.report import fmr_summary_line

lib = bundled.demo_library()
base = bundled.netlist("fig1a", lib)
before = compute_fmr(base).fmr_exact

for chosen in (["AD", "BC"], ["AD", "BC", "AC", "BD"]):
    products = [Cube.parse(p, base.inputs) for p in chosen]
    plan = plan_insertion(base, products, lib, capacity=2)
    augmented = apply_insertion(base, plan)
    report = compute_fmr(augmented)
    print(" + ".join(chosen))
    for g in plan.new_gates:
        print(f"  {g.id}: {g.cell}{g.input_nets} -> {g.output_net}")
    print(" ", fmr_summary_line(augmented.name, report))
    print(f"  change vs. original: {percent_change(before, report.fmr_exact):+.1f}%")
    print("  same function:", check_equivalence(base, augmented))

###############################################################################
# Collapsing the whole output cone into one (non-library) complex gate that
# keeps J as an input shows what full-custom design would reach.

from fmrforge import flatten_hypothetical

flat = flatten_hypothetical(base, keep_nodes=["J"])
print(fmr_summary_line(flat.name, compute_fmr(flat)))
ideal = flatten_hypothetical(base)
print(fmr_summary_line(ideal.name, compute_fmr(ideal)), "(no internal nodes left)")
