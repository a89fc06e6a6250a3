"""
Logic sharing versus a redundant chain
======================================

Two AO222 gates plus an OR2 realize the same function with shared literals.
Adding AB and CD through one AO221 reaches the same masking ratio as the
two-gate chain, with one stage less.  Costs here come from the unit model
(every cell costs 1) or from the demo library's illustrative numbers.
"""

from fmrforge import CostModel, bundled, compute_fmr, metrics
from fmrforge.metrics import compare
from fmrforge.report import render_compare, render_metrics

lib = bundled.demo_library()
nets = {name: bundled.netlist(name, lib) for name in ("fig1a", "fig1b", "fig3a", "fig3b", "fig4a", "fig4b")}

for model in (CostModel("unit"), CostModel("library")):
    print(f"cost model: {model.source}")
    entries = [(name, metrics(net, model), compute_fmr(net)) for name, net in nets.items()]
    print(render_metrics(entries, "md"))

###############################################################################
# Same masking ratio, shallower circuit.

a, b = nets["fig3b"], nets["fig4b"]
deltas = compare((metrics(a), compute_fmr(a)), (metrics(b), compute_fmr(b)))
print(render_compare(a.name, b.name, deltas, "md"))
