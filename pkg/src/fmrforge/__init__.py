"""Fault masking ratio analysis and redundant logic insertion for cell-mapped
combinational circuits."""

from .circuit import (
    Cell,
    CellLibrary,
    GateInstance,
    Netlist,
    evaluate,
    evaluate_block,
    evaluate_faulty,
    load_library,
    load_netlist,
)
from .errors import CapExceededError, FmrForgeError, ParseError, ValidationError
from .faults import (
    EnumerationRow,
    FmrReport,
    McEstimate,
    RowState,
    compute_fmr,
    enumerate_faults,
    estimate_fmr_mc,
    single_fault_errors,
)
from .metrics import CostModel, MetricsReport, compare, logic_depth, metrics
from .redundancy import (
    InsertionPlan,
    RedundancyFinding,
    apply_insertion,
    check_equivalence,
    flatten_hypothetical,
    identify_redundant_products,
    plan_insertion,
)
from .twolevel import (
    Cover,
    Cube,
    TruthTable,
    is_implicant,
    minimal_cover,
    netlist_truth_table,
    prime_implicants,
)

__version__ = "0.1.0"
