"""Bennett-style compilation of irreversible netlists and reversible pebbling."""

from .dag import GateDAG, Node, evaluate_dag, parse_dag
from .pebble import (
    IllegalMove,
    PebbleStrategy,
    check_strategy,
    pebble_bennett_recursive,
    pebble_exhaustive,
    replay,
)
from .schedule import (
    PreconditionViolation,
    ReversibleSchedule,
    Step,
    VerificationReport,
    bennett_embed,
    execute_schedule,
    parse_schedule,
    verify_report_text,
    verify_schedule,
)

__all__ = [
    "GateDAG", "Node", "evaluate_dag", "parse_dag",
    "IllegalMove", "PebbleStrategy", "check_strategy", "pebble_bennett_recursive", "pebble_exhaustive", "replay",
    "PreconditionViolation", "ReversibleSchedule", "Step", "VerificationReport", "bennett_embed",
    "execute_schedule", "parse_schedule", "verify_schedule", "verify_report_text",
]
