from .decomposition import DecompositionError, decompose_step
from .oracle import OracleLimitExceeded, enumerate_solutions
from .verify import STAGES, Verdict, verify
from .witness import (
    DecompositionTree,
    Plan,
    PlanStep,
    TreeNode,
    WitnessParseError,
    format_witness,
    parse_witness,
    renumber,
)

__all__ = [
    "DecompositionError",
    "DecompositionTree",
    "OracleLimitExceeded",
    "Plan",
    "PlanStep",
    "STAGES",
    "TreeNode",
    "Verdict",
    "WitnessParseError",
    "decompose_step",
    "enumerate_solutions",
    "format_witness",
    "parse_witness",
    "renumber",
    "verify",
]
