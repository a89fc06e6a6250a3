"""
Which product terms would mask the output errors?
=================================================

For every single-node fault that drives the output from 1 to 0, pick a prime
implicant of the output function that covers the vector.  ORing that product
in keeps the function and pins the output at 1 there.
"""

from fmrforge import bundled, identify_redundant_products, minimal_cover, netlist_truth_table
from fmrforge.report import render_findings

net = bundled.netlist("fig1a")

# the function itself, in minimum two-level form
tt = netlist_truth_table(net, "V")
print("V =", minimal_cover(tt).render(tt.names))

findings, products = identify_redundant_products(net)
print(render_findings(net, findings, products, "md"))

# 0->1 output errors are left alone: an extra product can only raise the output
for f in findings:
    print(f"{''.join(map(str, map(int, f.vector)))}  {f.kind.ascii:5s}  {f.label(net.inputs)}")
