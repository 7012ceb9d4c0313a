"""Per-transistor energy summaries and trace CSV input/output."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

from ..energy import EV, signal_energy
from ..errors import ParseError, ValidationError
from .sim import TRACE_COLUMNS, VIOLATION_KINDS, SimResult

LEAKAGE_NODE = "*"
LEAKAGE_KIND = "leakage"


@dataclass(frozen=True)
class EnergySummary:
    cycles: int
    transistors: int
    adiabatic_J: float
    violation_J: float
    leakage_J: float
    total_J: float
    per_transistor_cycle_J: float
    per_transistor_cycle_eV: float
    signal_energy_J: float
    ratio_to_signal: float
    adiabatic_events: int
    violations: list = field(default_factory=list)

    @property
    def adiabatic_share(self) -> float:
        return self.adiabatic_J / self.total_J if self.total_J else 0.0

    def as_dict(self) -> dict:
        return {
            "cycles": self.cycles,
            "transistors": self.transistors,
            "adiabatic_J": self.adiabatic_J,
            "violation_J": self.violation_J,
            "leakage_J": self.leakage_J,
            "total_J": self.total_J,
            "per_transistor_cycle_J": self.per_transistor_cycle_J,
            "per_transistor_cycle_eV": self.per_transistor_cycle_eV,
            "signal_energy_J": self.signal_energy_J,
            "ratio_to_signal": self.ratio_to_signal,
            "adiabatic_events": self.adiabatic_events,
            "violation_count": len(self.violations),
            "violations": [
                {"kind": v.kind, "tick": v.tick, "node": v.node, "gates": list(v.gates), "energy_J": v.dissipated}
                for v in self.violations
            ],
        }

    def to_text(self) -> str:
        lines = [
            f"cycles                 {self.cycles}",
            f"transistors            {self.transistors}",
            f"adiabatic_J            {self.adiabatic_J!r}",
            f"violation_J            {self.violation_J!r}",
            f"leakage_J              {self.leakage_J!r}",
            f"total_J                {self.total_J!r}",
            f"J/transistor/cycle     {self.per_transistor_cycle_J:.6g}",
            f"eV/transistor/cycle    {self.per_transistor_cycle_eV:.6g}",
            f"ratio to CV^2          {self.ratio_to_signal:.6g}",
            f"adiabatic events       {self.adiabatic_events}",
            f"violations             {len(self.violations)}",
        ]
        for v in self.violations:
            lines.append(f"  tick {v.tick} {v.kind} {v.node} [{','.join(v.gates)}] {v.dissipated:.6g} J")
        return "\n".join(lines) + "\n"


def energy_summary(result: SimResult) -> EnergySummary:
    """Normalize a run's ledger by transistor count and completed cycles."""
    cycles = result.cycles
    if cycles < 1:
        raise ValidationError("energy summary needs at least one completed cycle")
    transistors = result.circuit.transistor_count
    if transistors < 1:
        raise ValidationError("circuit has no transistors")
    ledger = result.ledger
    total = ledger.total
    per = total / (transistors * cycles)
    cv2 = signal_energy(result.params)
    return EnergySummary(
        cycles=cycles,
        transistors=transistors,
        adiabatic_J=ledger.adiabatic_total,
        violation_J=ledger.violation_total,
        leakage_J=ledger.leakage_total,
        total_J=total,
        per_transistor_cycle_J=per,
        per_transistor_cycle_eV=per / EV,
        signal_energy_J=cv2,
        ratio_to_signal=per / cv2,
        adiabatic_events=len(ledger.adiabatic_events),
        violations=list(ledger.violation_events),
    )


def write_trace(result: SimResult, stream) -> None:
    """Write the trace as CSV; a final row carries the leakage total."""
    if result.trace is None:
        raise ValidationError("run was not traced")
    w = csv.writer(stream, lineterminator="\n")
    w.writerow(TRACE_COLUMNS)
    for tick, node, level, mode, kind, energy in result.trace:
        w.writerow([tick, node, repr(float(level)), mode, kind, repr(energy) if kind else ""])
    w.writerow([result.ticks, LEAKAGE_NODE, "", "", LEAKAGE_KIND, repr(result.ledger.leakage_total)])


def trace_csv(result: SimResult) -> str:
    buf = io.StringIO()
    write_trace(result, buf)
    return buf.getvalue()


@dataclass(frozen=True)
class TraceTotals:
    adiabatic: float
    violation: float
    leakage: float

    @property
    def total(self) -> float:
        return math.fsum([self.adiabatic, self.violation, self.leakage])


def read_trace_totals(text: str) -> TraceTotals:
    """Recompute ledger totals from a trace CSV."""
    rows = csv.reader(io.StringIO(text))
    header = next(rows, None)
    if tuple(header or ()) != TRACE_COLUMNS:
        raise ParseError(f"trace header must be {','.join(TRACE_COLUMNS)}", 1, 1)
    adiabatic, violation, leakage = [], [], []
    for lineno, row in enumerate(rows, 2):
        if len(row) != len(TRACE_COLUMNS):
            raise ParseError(f"expected {len(TRACE_COLUMNS)} fields, got {len(row)}", lineno, 1)
        kind, energy = row[4], row[5]
        if not kind:
            continue
        try:
            value = float(energy)
        except ValueError:
            raise ParseError(f"bad energy {energy!r}", lineno, 1) from None
        if kind.startswith("adiabatic"):
            adiabatic.append(value)
        elif kind in VIOLATION_KINDS:
            violation.append(value)
        elif kind == LEAKAGE_KIND:
            leakage.append(value)
        else:
            raise ParseError(f"unknown event kind {kind!r}", lineno, 1)
    return TraceTotals(math.fsum(adiabatic), math.fsum(violation), math.fsum(leakage))
