"""Discrete-tick switch-level simulation with energy accounting.

Each tick:

1. driver rails move to their programmed level (linear ramp across the
   interval, or an immediate jump for ``step`` drivers);
2. gate conduction is evaluated from the control levels of the previous
   tick (a valid logic level is required to conduct);
3. rails joined by conducting gates form nets; a net containing a source
   (driver rail or active sink) takes the source level, two sources at
   different levels raise :class:`LevelConflictError`, and a net without a
   source keeps its charge;
4. dissipation is booked on the energy ledger.

Energy model, per logic node of capacitance C:

* following a ramping source for k of the m ticks of its interval, with
  swing s: ``adiabatic_dissipation(params) * s**2 * k / m`` (one ledger
  event per transition);
* any abrupt change of ``dv`` (normalized): ``1/2 C V**2 dv**2``, booked as
  a violation;
* leakage through every off transistor: ``I_off * V * dv`` while its
  terminals differ by ``dv``.

Violation kinds:

``turn_on_with_differential``
    a node at its rest level is connected to a source at another level, or
    a source jumps instead of ramping while connected;
``drive_floating_node_from_different_level``
    a latched node (floating away from its rest level) is connected to a
    source, or floating nodes at different levels are joined;
``turn_off_while_conducting_mid_ramp``
    a gate stops conducting while the ramp it carries is still under way;
    charged for the swing the node is left short of.
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass, field
from typing import NamedTuple

from ..energy import TechnologyParams, adiabatic_dissipation, non_adiabatic_dissipation
from ..errors import RevkitError, ValidationError
from .circuit import LEVEL_EPS, TwoLALCircuit, logic_value, rest_level

TURN_ON = "turn_on_with_differential"
TURN_OFF_MID_RAMP = "turn_off_while_conducting_mid_ramp"
DRIVE_FLOATING = "drive_floating_node_from_different_level"
VIOLATION_KINDS = (TURN_ON, TURN_OFF_MID_RAMP, DRIVE_FLOATING)

TRACE_COLUMNS = ("tick", "node", "level", "mode", "event_kind", "energy_J")


class LevelConflictError(RevkitError):
    """Two sources at different levels share a conducting net."""

    def __init__(self, tick: int, nodes: list[str], levels: dict[str, float]):
        self.tick = tick
        self.nodes = nodes
        self.levels = levels
        detail = ", ".join(f"{k}={v:g}" for k, v in levels.items())
        super().__init__(f"tick {tick}: conflicting drivers on net {{{', '.join(nodes)}}} ({detail})")


@dataclass(frozen=True)
class AdiabaticEvent:
    tick: int
    node: str
    energy: float
    direction: str


@dataclass(frozen=True)
class ViolationReport:
    kind: str
    tick: int
    node: str
    gates: tuple[str, ...]
    dissipated: float


@dataclass
class EnergyLedger:
    params: TechnologyParams
    adiabatic_events: list[AdiabaticEvent] = field(default_factory=list)
    violation_events: list[ViolationReport] = field(default_factory=list)
    leakage_total: float = 0.0

    @property
    def adiabatic_total(self) -> float:
        return math.fsum(e.energy for e in self.adiabatic_events)

    @property
    def violation_total(self) -> float:
        return math.fsum(v.dissipated for v in self.violation_events)

    @property
    def total(self) -> float:
        return math.fsum([self.adiabatic_total, self.violation_total, self.leakage_total])


@dataclass
class _Transition:
    key: tuple
    swing: float
    direction: str
    ticks: int = 0


class _Source(NamedTuple):
    prev: float
    new: float
    end: float
    swing: float
    gradual: bool
    key: tuple
    moving: bool


def _source(prev: float, new: float, end: float, swing: float, gradual: bool, key: tuple) -> _Source:
    return _Source(prev, new, end, swing, gradual, key, abs(new - prev) > LEVEL_EPS)


class Simulator:
    """Tick-by-tick simulation of one circuit under one parameter set.

    The circuit is copied; the simulator owns all mutable state.
    """

    def __init__(self, circuit: TwoLALCircuit, params: TechnologyParams | None = None, trace: bool = False):
        self.circuit = circuit.clone()
        self.params = params or TechnologyParams()
        self.m = self.circuit.clock.ticks_per_interval
        self.period = self.circuit.clock.intervals_per_cycle
        self.tick = 0
        self.ledger = EnergyLedger(self.params)
        self.record_trace = trace
        self.trace: list[tuple] = []
        self.outputs: dict[str, list[tuple[int, int | None]]] = defaultdict(list)
        self.invalid_signals: list[tuple[int, str, float, float]] = []

        rails = []
        for sig in self.circuit.signals.values():
            rails.extend(sig.rails)
        self.rails = rails
        self.index = {r: i for i, r in enumerate(rails)}
        self.rest = [rest_level(r) for r in rails]
        self.level = list(self.rest)
        self.mode = ["floating"] * len(rails)
        self.driver_of: dict[int, tuple] = {}
        for drv in self.circuit.drivers.values():
            sig = self.circuit.signals[drv.signal]
            self.driver_of[self.index[sig.n]] = (drv, 0)
            self.driver_of[self.index[sig.p]] = (drv, 1)
            self.mode[self.index[sig.n]] = self.mode[self.index[sig.p]] = "held"
        self.gates = [
            (g.id,
             [(self.index[f"{c.signal}.n"], self.index[f"{c.signal}.p"], c.inverted) for c in g.controls],
             self.index[g.terminal_a], self.index[g.terminal_b], g.transistors)
            for g in self.circuit.gates
        ]
        self.conducting = [False] * len(self.gates)
        self.sinks = [(s.signal, self.index[f"{s.signal}.n"], self.index[f"{s.signal}.p"], s.phase % self.period)
                      for s in self.circuit.sinks]
        self._sink_start: dict[int, float] = {}
        self.open: dict[int, _Transition] = {}
        # source each logic rail followed during the previous tick
        self._followed: dict[int, _Source] = {}
        self._logic_signals = [(s, self.index[f"{s}.n"], self.index[f"{s}.p"]) for s in self.circuit.logic_signals()]

        self._may_source = set(self.driver_of)
        for _, rn, rp, _ in self.sinks:
            self._may_source.update((rn, rp))
        # incremental bookkeeping: only gates next to a rail that moved are re-examined
        self._by_control: dict[int, set[int]] = defaultdict(set)
        self._by_terminal: dict[int, set[int]] = defaultdict(set)
        for g, (_, ctrl, a, b, _) in enumerate(self.gates):
            for rn, rp, _ in ctrl:
                self._by_control[rn].add(g)
                self._by_control[rp].add(g)
            self._by_terminal[a].add(g)
            self._by_terminal[b].add(g)
        self._source_singletons = [([r], [] if r in self.driver_of else [r], [], [])
                                   for r in sorted(self._may_source)]
        self._dirty: set[int] | None = None
        self._plan_k: int | None = None
        self._plan: list[tuple] = []
        self._busy = self._partition([])
        self._leak = [0.0] * len(self.gates)
        self._update_leak(range(len(self.gates)), self.level)

        self.e_adiabatic = adiabatic_dissipation(self.params)
        self.dt = self.params.ramp_time / self.m

    def _interval_plan(self, k: int) -> list[tuple]:
        """Start and end level of every driver rail over interval ``k``."""
        plan = []
        for r, (drv, pol) in self.driver_of.items():
            v0, v1 = drv.value(k - 1), drv.value(k)
            if pol:
                v0, v1 = 1 - v0, 1 - v1
            plan.append((r, v0, v1, float(abs(v1 - v0)), drv.mode == "ramp", ("drv", r, k)))
        return plan

    def _sources(self, k: int, j: int) -> dict[int, _Source]:
        out = {}
        frac = j / self.m
        if self._plan_k != k:
            self._plan_k, self._plan = k, self._interval_plan(k)
        level = self.level
        for r, v0, v1, swing, ramp, key in self._plan:
            new = v0 + (v1 - v0) * frac if ramp else float(v1)
            out[r] = _source(level[r], new, float(v1), swing, ramp, key)
        for name, rn, rp, phase in self.sinks:
            if k % self.period != phase:
                continue
            if j == 1:
                self.outputs[name].append((k, logic_value(self.level[rn], self.level[rp])))
                self._sink_start[rn] = self.level[rn]
                self._sink_start[rp] = self.level[rp]
            for r in (rn, rp):
                start, target = self._sink_start[r], self.rest[r]
                new = start + (target - start) * frac
                out[r] = _source(self.level[r], new, target, abs(target - start), True, ("sink", r, k))
        return out

    def _partition(self, on_gates: list[int]) -> list[tuple]:
        """Conducting nets worth visiting each tick, ordered by lowest rail.

        A rail outside every conducting gate that nothing can drive is left
        out: its level cannot change and it is floating.
        """
        gates = self.gates
        parent: dict[int, int] = {}
        for g in on_gates:
            a, b = gates[g][2], gates[g][3]
            parent.setdefault(a, a)
            parent.setdefault(b, b)
        if not parent:
            return self._source_singletons

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for g in on_gates:
            ra, rb = find(gates[g][2]), find(gates[g][3])
            if ra != rb:
                parent[ra] = rb
        nets: dict[int, list[int]] = {}
        for r in sorted(parent):
            nets.setdefault(find(r), []).append(r)
        net_gates: dict[int, list[int]] = {}
        for g in on_gates:
            net_gates.setdefault(find(gates[g][2]), []).append(g)
        driven = self.driver_of
        busy = [net for net in self._source_singletons if net[0][0] not in parent]
        for root, members in nets.items():
            gates_here = net_gates[root]
            busy.append((members, [r for r in members if r not in driven], gates_here,
                         [gates[g][0] for g in gates_here]))
        busy.sort(key=lambda net: net[0][0])
        return busy

    def _update_leak(self, stale, level) -> None:
        gates, leak, on = self.gates, self._leak, self.conducting
        for g in stale:
            if on[g]:
                leak[g] = 0.0
                continue
            _, _, a, b, nt = gates[g]
            dv = abs(level[a] - level[b])
            leak[g] = nt * dv if dv > LEVEL_EPS else 0.0

    def _valid(self, controls) -> bool:
        lv = self.level
        for rn, rp, inv in controls:
            n, p = lv[rn], lv[rp]
            if inv:
                n, p = p, n
            if not (n >= 1.0 - LEVEL_EPS and p <= LEVEL_EPS):
                return False
        return True

    def _close(self, r: int, tick: int) -> None:
        tr = self.open.pop(r, None)
        if tr is None or tr.ticks == 0:
            return
        energy = self.e_adiabatic * (tr.swing * tr.swing) * (tr.ticks / self.m)
        self.ledger.adiabatic_events.append(AdiabaticEvent(tick, self.rails[r], energy, tr.direction))
        if self.record_trace:
            self.trace.append((tick, self.rails[r], self.level[r], self.mode[r], f"adiabatic_{tr.direction}", energy))

    def _violate(self, kind: str, tick: int, r: int, gates, dv: float) -> None:
        energy = non_adiabatic_dissipation(self.params, dv)
        self.ledger.violation_events.append(ViolationReport(kind, tick, self.rails[r], tuple(gates), energy))
        if self.record_trace:
            self.trace.append((tick, self.rails[r], self.level[r], self.mode[r], kind, energy))

    def step(self) -> None:
        """Advance one tick."""
        t = self.tick
        k, j = divmod(t, self.m)
        j += 1
        sources = self._sources(k, j)
        prev = self.level
        prev_mode = self.mode

        was_on = self.conducting
        now_on = list(was_on)
        check = range(len(self.gates)) if self._dirty is None else sorted(self._dirty)
        for g in check:
            now_on[g] = self._valid(self.gates[g][1])
        toggled = [g for g in check if now_on[g] != was_on[g]]
        turned_on = {g for g in toggled if now_on[g]}
        turned_off = [g for g in toggled if not now_on[g]]

        new_level = list(prev)
        new_mode = list(prev_mode)
        followed: dict[int, _Source] = {}

        if toggled or self._dirty is None:
            old_rails = {r for net in self._busy for r in net[0]}
            self._busy = self._partition([g for g, on in enumerate(now_on) if on])
            for r in old_rails - {r for net in self._busy for r in net[0]}:
                new_mode[r] = "floating"
        busy = self._busy
        for members, logic, gates_here, gate_ids in busy:
            srcs = [r for r in members if r in sources]
            if len(members) == 1 and not srcs:
                r = members[0]
                if r not in self.driver_of:
                    new_mode[r] = "floating"
                continue
            if srcs:
                ref = sources[srcs[0]].new
                if any(abs(sources[r].new - ref) > LEVEL_EPS for r in srcs):
                    raise LevelConflictError(t, [self.rails[r] for r in members],
                                             {self.rails[r]: sources[r].new for r in srcs})
                src = sources[next((r for r in srcs if r in self.driver_of), srcs[0])]
                for r in srcs:
                    if r in self.driver_of:
                        new_level[r] = sources[r].new
                        new_mode[r] = "ramping" if sources[r].moving else "held"
                on_ids = [self.gates[g][0] for g in gates_here if g in turned_on] or gate_ids
                for r in logic:
                    jump = src.prev - prev[r]
                    if abs(jump) > LEVEL_EPS:
                        latched = prev_mode[r] == "floating" and abs(prev[r] - self.rest[r]) > LEVEL_EPS
                        self._violate(DRIVE_FLOATING if latched else TURN_ON, t, r, on_ids, jump)
                        self._close(r, t)
                    change = src.new - src.prev
                    if abs(change) > LEVEL_EPS:
                        if src.gradual:
                            tr = self.open.get(r)
                            if tr is None or tr.key != src.key:
                                self._close(r, t)
                                tr = self.open[r] = _Transition(src.key, src.swing,
                                                                "charge" if change > 0 else "discharge")
                            tr.ticks += 1
                        else:
                            self._violate(TURN_ON, t, r, gate_ids, change)
                    new_level[r] = src.new
                    new_mode[r] = "ramping" if src.moving else "held"
                    followed[r] = src
            else:
                mean = math.fsum(prev[r] for r in logic) / len(logic)
                for r in logic:
                    dv = prev[r] - mean
                    if abs(dv) > LEVEL_EPS:
                        self._violate(DRIVE_FLOATING, t, r, gate_ids, dv)
                        new_level[r] = mean
                    new_mode[r] = "floating"

        # rails cut off from a source whose ramp continues this tick
        for r, old in self._followed.items():
            cur = followed.get(r)
            if cur is not None and cur.key == old.key:
                continue
            if old.moving and j > 1:
                still = sources.get(old.key[1])
                if still is not None and still.key == old.key and still.moving:
                    off_ids = [self.gates[g][0] for g in turned_off if r in self.gates[g][2:4]]
                    self._violate(TURN_OFF_MID_RAMP, t, r, off_ids or [self.gates[g][0] for g in turned_off],
                                  old.end - prev[r])
            tr = self.open.get(r)
            if tr is not None and tr.key == old.key:
                self._close(r, t)
        self._followed = followed

        self.level = new_level
        self.mode = new_mode
        self.conducting = now_on

        if j == self.m:
            for r in list(self.open):
                self._close(r, t)

        moved = [r for net in busy for r in net[0] if new_level[r] != prev[r]]
        stale = set(toggled)
        dirty: set[int] = set()
        for r in moved:
            stale |= self._by_terminal.get(r, set())
            dirty |= self._by_control.get(r, set())
        self._dirty = dirty
        self._update_leak(stale, new_level)
        leak = sum(self._leak)
        if leak:
            self.ledger.leakage_total += leak * self.params.off_current * self.params.swing * self.dt

        if self.record_trace:
            for r in range(len(self.rails)):
                if new_level[r] != prev[r] or new_mode[r] != prev_mode[r]:
                    self.trace.append((t, self.rails[r], new_level[r], new_mode[r], "", ""))

        if j == self.m:
            for name, rn, rp in self._logic_signals:
                n, p = new_level[rn], new_level[rp]
                if logic_value(n, p) is None:
                    self.invalid_signals.append((t, name, n, p))

        self.tick += 1

    def run_ticks(self, n: int) -> None:
        for _ in range(n):
            self.step()

    def run(self, cycles: int) -> "SimResult":
        if cycles < 1:
            raise ValidationError("need at least one cycle")
        self.run_ticks(cycles * self.m * self.period)
        return self.result()

    def result(self) -> "SimResult":
        return SimResult(self.circuit, self.params, self.ledger, self.tick, self.m * self.period,
                         dict(self.outputs), list(self.invalid_signals), list(self.trace) if self.record_trace else None)

    def signal_value(self, name: str) -> int | None:
        sig = self.circuit.signals[name]
        return logic_value(self.level[self.index[sig.n]], self.level[self.index[sig.p]])

    def rail_level(self, rail: str) -> float:
        return self.level[self.index[rail]]

    def rail_mode(self, rail: str) -> str:
        return self.mode[self.index[rail]]


@dataclass
class SimResult:
    circuit: TwoLALCircuit
    params: TechnologyParams
    ledger: EnergyLedger
    ticks: int
    ticks_per_cycle: int
    outputs: dict
    invalid_signals: list
    trace: list | None

    @property
    def cycles(self) -> int:
        return self.ticks // self.ticks_per_cycle

    @property
    def violations(self) -> list[ViolationReport]:
        return self.ledger.violation_events


def simulate(circuit: TwoLALCircuit, cycles: int, params: TechnologyParams | None = None,
             trace: bool = False) -> SimResult:
    return Simulator(circuit, params, trace=trace).run(cycles)
