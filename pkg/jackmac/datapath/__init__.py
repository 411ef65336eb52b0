from .modes import Mode, ModeName, OutputFormat, all_modes, widest_shifter
from .stages import (
    EMPTY_EXPONENT,
    AlignmentSet,
    LaneOperand,
    ProductTerm,
    SubProduct,
    align_and_accumulate,
    exponent_extract,
    grouped_accumulate,
    lane_operand,
    multiply_lanes,
    ungrouped_accumulate,
    xor_bundle,
)
from .normalizer import Normalized, finalize, normalize, round_output, saturate16
from .unit import (
    Activation,
    JackResult,
    Submodule,
    acc_in_term,
    jack_mac,
    jack_mac_reference,
    mode_activation,
)

__all__ = [
    "Mode",
    "ModeName",
    "OutputFormat",
    "all_modes",
    "widest_shifter",
    "EMPTY_EXPONENT",
    "AlignmentSet",
    "LaneOperand",
    "ProductTerm",
    "SubProduct",
    "align_and_accumulate",
    "exponent_extract",
    "grouped_accumulate",
    "lane_operand",
    "multiply_lanes",
    "ungrouped_accumulate",
    "xor_bundle",
    "Normalized",
    "finalize",
    "normalize",
    "round_output",
    "saturate16",
    "Activation",
    "JackResult",
    "Submodule",
    "acc_in_term",
    "jack_mac",
    "jack_mac_reference",
    "mode_activation",
]
