"""2LAL circuit description: dual-rail signals, transmission gates, drivers.

Dual-rail convention (used by every check in this package):

* each signal ``X`` has an N rail ``X.n`` and a P rail ``X.p``;
* rest and logic 0: N low (0), P high (1), i.e. both rails at the level
  that keeps the transistors they control switched off;
* logic 1: N high, P low;
* N high together with P high is never valid.

A transmission gate (one nFET + one pFET) conducts only while its control
signal is a valid logic 1 (or valid 0 for an inverted control). A series
stack of several controls conducts when all of them do.

Drivers are ideal clock/data sources. A driver's waveform gives the logic
value at the end of each clock interval; the rails ramp linearly across the
interval (``ramp``) or jump at its first tick (``step``, which is never
adiabatic).

Text format, one stanza per line, ``#`` comments::

    clock <ticks_per_interval> <intervals_per_cycle>
    signal <name>...
    driver <signal> ramp|step [cyclic] <bits>...     # e.g. 0110 or 0 1 1 0
    tgate <id> <ctrl>[,<ctrl>...] <rail> <rail>       # ctrl: X or ~X; rail: X.n / X.p
    element or|and|buf <out> <drive> <in>...
    sink <signal> <phase>

A ``sink`` stands for the downstream environment: in every interval whose
index is congruent to ``phase`` modulo the cycle length, it reads the
signal, then reversibly ramps it back to rest.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from ..errors import ParseError, ValidationError

REST_LEVEL = {"n": 0.0, "p": 1.0}
LEVEL_EPS = 1e-9


def rail_levels(value: float) -> tuple[float, float]:
    """(N, P) rail levels encoding a logic value."""
    return float(value), 1.0 - float(value)


def rest_level(rail: str) -> float:
    return REST_LEVEL[rail.rsplit(".", 1)[1]]


def is_valid_one(n: float, p: float) -> bool:
    return n >= 1.0 - LEVEL_EPS and p <= LEVEL_EPS


def is_valid_zero(n: float, p: float) -> bool:
    return n <= LEVEL_EPS and p >= 1.0 - LEVEL_EPS


def logic_value(n: float, p: float) -> int | None:
    if is_valid_one(n, p):
        return 1
    if is_valid_zero(n, p):
        return 0
    return None


@dataclass(frozen=True)
class DualRailSignal:
    name: str

    @property
    def n(self) -> str:
        return f"{self.name}.n"

    @property
    def p(self) -> str:
        return f"{self.name}.p"

    @property
    def rails(self) -> tuple[str, str]:
        return self.n, self.p


@dataclass(frozen=True)
class Control:
    signal: str
    inverted: bool = False

    def __str__(self) -> str:
        return ("~" if self.inverted else "") + self.signal


@dataclass(frozen=True)
class TransmissionGate:
    id: str
    controls: tuple[Control, ...]
    terminal_a: str
    terminal_b: str

    @property
    def transistors(self) -> int:
        return 2 * len(self.controls)


@dataclass(frozen=True)
class Driver:
    signal: str
    values: tuple[int, ...]
    mode: str = "ramp"
    cyclic: bool = False

    def __post_init__(self):
        if self.mode not in ("ramp", "step"):
            raise ValidationError(f"driver mode must be ramp or step, got {self.mode!r}")
        if not self.values:
            raise ValidationError(f"driver {self.signal} has an empty waveform")
        if any(v not in (0, 1) for v in self.values):
            raise ValidationError(f"driver {self.signal} values must be 0/1")

    def value(self, interval: int) -> int:
        """Logic value at the end of ``interval``; rest before interval 0."""
        if interval < 0:
            return 0
        if self.cyclic:
            return self.values[interval % len(self.values)]
        if interval < len(self.values):
            return self.values[interval]
        return self.values[-1]


@dataclass(frozen=True)
class Element:
    kind: str
    output: str
    drive: str
    inputs: tuple[str, ...]
    gates: tuple[str, ...]


@dataclass(frozen=True)
class Sink:
    signal: str
    phase: int


@dataclass(frozen=True)
class ClockSchedule:
    """Tick granularity and cycle length.

    Every driver transition is a ramp spanning one full interval of
    ``ticks_per_interval`` ticks. The physical interval duration is the
    technology ramp time tau.
    """

    ticks_per_interval: int = 16
    intervals_per_cycle: int = 4

    def __post_init__(self):
        if self.ticks_per_interval < 1 or self.intervals_per_cycle < 1:
            raise ValidationError("ticks_per_interval and intervals_per_cycle must be >= 1")

    @property
    def ticks_per_cycle(self) -> int:
        return self.ticks_per_interval * self.intervals_per_cycle


@dataclass
class TwoLALCircuit:
    clock: ClockSchedule = field(default_factory=ClockSchedule)
    signals: dict[str, DualRailSignal] = field(default_factory=dict)
    drivers: dict[str, Driver] = field(default_factory=dict)
    gates: list[TransmissionGate] = field(default_factory=list)
    elements: list[Element] = field(default_factory=list)
    sinks: list[Sink] = field(default_factory=list)

    def clone(self) -> "TwoLALCircuit":
        # components are frozen, so copying the containers is enough
        return TwoLALCircuit(self.clock, dict(self.signals), dict(self.drivers), list(self.gates),
                             list(self.elements), list(self.sinks))

    def signal(self, name: str) -> DualRailSignal:
        if name not in self.signals:
            self.signals[name] = DualRailSignal(name)
        return self.signals[name]

    def _require(self, name: str) -> DualRailSignal:
        if name not in self.signals:
            raise ValidationError(f"unknown signal {name!r}")
        return self.signals[name]

    def add_driver(self, signal: str, values: Iterable[int], mode: str = "ramp", cyclic: bool = False) -> Driver:
        self._require(signal)
        if signal in self.drivers:
            raise ValidationError(f"signal {signal!r} already has a driver")
        drv = Driver(signal, tuple(int(v) for v in values), mode, cyclic)
        self.drivers[signal] = drv
        return drv

    def set_driver(self, signal: str, values: Iterable[int], mode: str | None = None, cyclic: bool | None = None):
        old = self.drivers[signal]
        self.drivers[signal] = Driver(signal, tuple(int(v) for v in values),
                                      old.mode if mode is None else mode, old.cyclic if cyclic is None else cyclic)

    def add_gate(self, gate_id: str, controls: Sequence[Control | str], a: str, b: str) -> TransmissionGate:
        ctrls = []
        for c in controls:
            if isinstance(c, str):
                c = Control(c[1:], True) if c.startswith("~") else Control(c)
            self._require(c.signal)
            ctrls.append(c)
        for rail in (a, b):
            self._check_rail(rail)
        if a == b:
            raise ValidationError(f"gate {gate_id!r} connects rail {a} to itself")
        if any(g.id == gate_id for g in self.gates):
            raise ValidationError(f"duplicate gate id {gate_id!r}")
        gate = TransmissionGate(gate_id, tuple(ctrls), a, b)
        self.gates.append(gate)
        return gate

    def add_sink(self, signal: str, phase: int) -> Sink:
        self._require(signal)
        if signal in self.drivers:
            raise ValidationError(f"sink on driven signal {signal!r}")
        sink = Sink(signal, int(phase))
        self.sinks.append(sink)
        return sink

    def _check_rail(self, rail: str) -> None:
        name, _, pol = rail.rpartition(".")
        if pol not in ("n", "p") or name not in self.signals:
            raise ValidationError(f"unknown rail {rail!r}")

    def add_element(self, kind: str, output: str, drive: str, inputs: Sequence[str]) -> Element:
        """Add an OR, AND or buffer cell.

        OR: on each half, one gate per input in parallel from the driver
        rail to the output rail. AND: the same structure with the inputs
        stacked in series. Buffer: a single gate controlled by the input.
        The P half is an identical copy driven by the complementary rail.
        """
        kind = kind.lower()
        inputs = tuple(inputs)
        arity = {"or": 2, "and": 2, "buf": 1}
        if kind not in arity:
            raise ValidationError(f"unknown element kind {kind!r}")
        if len(inputs) != arity[kind]:
            raise ValidationError(f"{kind} element takes {arity[kind]} input(s), got {len(inputs)}")
        names = (output, drive) + inputs
        if len(set(names)) != len(names):
            raise ValidationError(f"aliased signals in {kind} element: {names}")
        for name in names:
            self._require(name)
        if drive not in self.drivers:
            raise ValidationError(f"drive signal {drive!r} has no driver")
        if output in self.drivers:
            raise ValidationError(f"output signal {output!r} is externally driven")
        idx = len(self.elements)
        gate_ids = []
        for half in ("n", "p"):
            d, q = f"{drive}.{half}", f"{output}.{half}"
            if kind == "and":
                gate_ids.append(self.add_gate(f"e{idx}.{half}", inputs, d, q).id)
            else:
                for k, inp in enumerate(inputs):
                    gate_ids.append(self.add_gate(f"e{idx}.{half}{k}", [inp], d, q).id)
        element = Element(kind, output, drive, inputs, tuple(gate_ids))
        self.elements.append(element)
        return element

    @property
    def transistor_count(self) -> int:
        return sum(g.transistors for g in self.gates)

    def logic_signals(self) -> list[str]:
        return [s for s in self.signals if s not in self.drivers]

    def to_text(self) -> str:
        lines = [f"clock {self.clock.ticks_per_interval} {self.clock.intervals_per_cycle}"]
        lines.append("signal " + " ".join(self.signals))
        for drv in self.drivers.values():
            cyc = " cyclic" if drv.cyclic else ""
            lines.append(f"driver {drv.signal} {drv.mode}{cyc} {''.join(map(str, drv.values))}")
        element_gates = set()
        for el in self.elements:
            lines.append(f"element {el.kind} {el.output} {el.drive} {' '.join(el.inputs)}")
            element_gates.update(el.gates)
        for g in self.gates:
            if g.id not in element_gates:
                lines.append(f"tgate {g.id} {','.join(map(str, g.controls))} {g.terminal_a} {g.terminal_b}")
        for s in self.sinks:
            lines.append(f"sink {s.signal} {s.phase}")
        return "\n".join(lines) + "\n"


def parse_circuit(text: str, source: str | None = None) -> TwoLALCircuit:
    circuit = TwoLALCircuit()
    seen_clock = False
    for lineno, raw in enumerate(text.splitlines(), 1):
        toks = raw.split("#", 1)[0].split()
        if not toks:
            continue
        col = raw.index(toks[0]) + 1
        head, args = toks[0], toks[1:]
        try:
            if head == "clock":
                if seen_clock or circuit.signals:
                    raise ParseError("'clock' must appear once, before other stanzas", lineno, col, source)
                if len(args) != 2:
                    raise ParseError("usage: clock <ticks_per_interval> <intervals_per_cycle>", lineno, col, source)
                circuit.clock = ClockSchedule(int(args[0]), int(args[1]))
                seen_clock = True
            elif head == "signal":
                if not args:
                    raise ParseError("usage: signal <name>...", lineno, col, source)
                for name in args:
                    if name in circuit.signals or not name.replace("_", "").replace("[", "").replace("]", "").isalnum():
                        raise ParseError(f"bad or duplicate signal name {name!r}", lineno, col, source)
                    circuit.signal(name)
            elif head == "driver":
                if len(args) < 3:
                    raise ParseError("usage: driver <signal> ramp|step [cyclic] <bits>...", lineno, col, source)
                sig, mode, rest = args[0], args[1], args[2:]
                cyclic = False
                if rest and rest[0] == "cyclic":
                    cyclic, rest = True, rest[1:]
                bits = "".join(rest)
                if not bits or any(c not in "01" for c in bits):
                    raise ParseError(f"driver waveform must be 0/1 digits, got {' '.join(rest)!r}", lineno, col, source)
                circuit.add_driver(sig, [int(c) for c in bits], mode, cyclic)
            elif head == "tgate":
                if len(args) != 4:
                    raise ParseError("usage: tgate <id> <ctrl>[,<ctrl>...] <rail> <rail>", lineno, col, source)
                circuit.add_gate(args[0], args[1].split(","), args[2], args[3])
            elif head == "element":
                if len(args) < 4:
                    raise ParseError("usage: element or|and|buf <out> <drive> <in>...", lineno, col, source)
                circuit.add_element(args[0], args[1], args[2], args[3:])
            elif head == "sink":
                if len(args) != 2:
                    raise ParseError("usage: sink <signal> <phase>", lineno, col, source)
                if not args[1].isdigit():
                    raise ParseError(f"sink phase must be a non-negative integer, got {args[1]!r}", lineno, col, source)
                circuit.add_sink(args[0], int(args[1]))
            else:
                raise ParseError(f"unknown stanza {head!r}", lineno, col, source)
        except ValidationError as exc:
            raise ParseError(str(exc), lineno, col, source) from None
        except ValueError as exc:
            if isinstance(exc, ParseError):
                raise
            raise ParseError(str(exc), lineno, col, source) from None
    return circuit


def read_circuit(path) -> TwoLALCircuit:
    path = Path(path)
    return parse_circuit(path.read_text(), source=str(path))
