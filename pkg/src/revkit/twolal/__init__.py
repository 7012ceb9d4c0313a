"""Two-level adiabatic logic (2LAL): circuits, simulator and energy ledger."""

from .builders import (
    build_or_element,
    build_shift_register,
    decompute_cycle,
    input_waveform,
    or_element_circuit,
    pure_delay,
    shift_register_output,
)
from .circuit import (
    REST_LEVEL,
    ClockSchedule,
    Control,
    Driver,
    DualRailSignal,
    Element,
    Sink,
    TransmissionGate,
    TwoLALCircuit,
    is_valid_one,
    is_valid_zero,
    logic_value,
    parse_circuit,
    rail_levels,
    read_circuit,
)
from .report import EnergySummary, TraceTotals, energy_summary, read_trace_totals, trace_csv, write_trace
from .sim import (
    DRIVE_FLOATING,
    TRACE_COLUMNS,
    TURN_OFF_MID_RAMP,
    TURN_ON,
    VIOLATION_KINDS,
    AdiabaticEvent,
    EnergyLedger,
    LevelConflictError,
    SimResult,
    Simulator,
    ViolationReport,
    simulate,
)

__all__ = [
    "build_or_element", "build_shift_register", "decompute_cycle", "input_waveform", "or_element_circuit",
    "pure_delay", "shift_register_output",
    "REST_LEVEL", "ClockSchedule", "Control", "Driver", "DualRailSignal", "Element", "Sink", "TransmissionGate",
    "TwoLALCircuit", "is_valid_one", "is_valid_zero", "logic_value", "parse_circuit", "rail_levels", "read_circuit",
    "EnergySummary", "TraceTotals", "energy_summary", "read_trace_totals", "trace_csv", "write_trace",
    "DRIVE_FLOATING", "TRACE_COLUMNS", "TURN_OFF_MID_RAMP", "TURN_ON", "VIOLATION_KINDS", "AdiabaticEvent",
    "EnergyLedger", "LevelConflictError", "SimResult", "Simulator", "ViolationReport", "simulate",
]
