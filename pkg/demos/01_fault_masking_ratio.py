"""
Fault masking ratio of a two-gate circuit
=========================================

Load the bundled OA22/AO221 implementation of the 4-input "two or more"
function, print its truth-cum-fault table and count how many of the
injected single-node faults never reach the output.
"""

from fmrforge import bundled, compute_fmr, enumerate_faults
from fmrforge.report import enumeration_markdown, fmr_summary_line

lib = bundled.demo_library()
net = bundled.netlist("fig1a", lib)
print(f"inputs {net.inputs}, internal nodes {net.internal_nodes}, outputs {net.outputs}")

###############################################################################
# Every input vector is paired with every fault mask.  Mask 0 is the
# fault-free row; the other rows flip J and are marked Correct or Error.

rows = list(enumerate_faults(net))
print(enumeration_markdown(net, rows))

###############################################################################
# The ratio is exact: masked faulty rows over all faulty rows.

report = compute_fmr(net)
print(fmr_summary_line(net.name, report))
print("as a fraction:", report.fmr_exact)

###############################################################################
# The product-of-sums variant has two internal nodes and masks far less.

other = bundled.netlist("fig1b", lib)
print(fmr_summary_line(other.name, compute_fmr(other)))
