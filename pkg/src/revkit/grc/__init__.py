"""Generalized reversible computing core: states, distributions, conditioned ops."""

from .core import (
    K_B,
    MAX_WIDTH,
    BitState,
    ConditionedOp,
    Distribution,
    LossReport,
    MergeWitness,
    Precondition,
    ReversibilityClass,
    StateSpace,
    classify,
    compose,
    entropy,
    information_loss,
    inverse,
    permutation_op,
    pushforward,
    verify_no_merge,
)
from .gates import GateKind, apply_gate, make_gate
from .textio import format_dist, format_op, parse_op_text, read_op_file

__all__ = [
    "K_B", "MAX_WIDTH", "BitState", "ConditionedOp", "Distribution", "LossReport", "MergeWitness",
    "Precondition", "ReversibilityClass", "StateSpace", "classify", "compose", "entropy",
    "information_loss", "inverse", "permutation_op", "pushforward", "verify_no_merge",
    "GateKind", "apply_gate", "make_gate", "format_dist", "format_op", "parse_op_text", "read_op_file",
]
