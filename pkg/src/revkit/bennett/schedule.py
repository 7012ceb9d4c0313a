"""Bennett compute/copy/decompute embedding of gate DAGs.

Register layout of a compiled schedule, most-significant variable first::

    [ primary inputs | one ancilla per gate | one result register per output ]

Each DAG node is computed into its own zero ancilla (``REV_AND``,
``REV_OR`` or ``COPY_NOT``), each output is copied into a zero result
register, and the forward phase is then undone in reverse order. For G
gates and M outputs the schedule has exactly ``2*G + M`` steps.

Execution never materializes transition tables; steps act on integer state
indices through :func:`revkit.grc.gates.apply_gate`, vectorized over all
inputs when verifying.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ..errors import ParseError, RevkitError, ValidationError
from ..grc.core import MAX_WIDTH, BitState, ConditionedOp, compose
from ..grc.gates import GateKind, apply_gate, check_wiring, make_gate
from .dag import GateDAG, evaluate_dag

MAX_EXEC_WIDTH = 62

_NODE_GATE = {"AND": GateKind.REV_AND, "OR": GateKind.REV_OR, "NOT": GateKind.COPY_NOT}


class PreconditionViolation(RevkitError):
    """A schedule step was applied to a state outside its precondition."""

    def __init__(self, step: int, state: BitState, gate: "Step"):
        self.step = step
        self.state = state
        self.gate = gate
        super().__init__(f"precondition of step {step} ({gate}) violated by state {state}")


@dataclass(frozen=True)
class Step:
    kind: GateKind
    wiring: tuple[int, ...]
    inverse: bool = False

    @property
    def direction(self) -> str:
        return "inv" if self.inverse else "fwd"

    def flipped(self) -> "Step":
        return Step(self.kind, self.wiring, not self.inverse)

    def __str__(self) -> str:
        return f"{self.kind} {','.join(map(str, self.wiring))} {self.direction}"


@dataclass(frozen=True)
class ReversibleSchedule:
    n_inputs: int
    n_ancillas: int
    n_results: int
    steps: tuple[Step, ...]
    labels: tuple[str, ...] = field(default=(), compare=False)

    def __post_init__(self):
        if min(self.n_inputs, self.n_ancillas, self.n_results) < 0:
            raise ValidationError("register counts must be non-negative")
        if self.width < 1:
            raise ValidationError("schedule needs at least one register")
        for s in self.steps:
            check_wiring(s.kind, s.wiring, self.width)

    @property
    def width(self) -> int:
        return self.n_inputs + self.n_ancillas + self.n_results

    @property
    def ancilla_slice(self) -> slice:
        return slice(self.n_inputs, self.n_inputs + self.n_ancillas)

    @property
    def result_slice(self) -> slice:
        return slice(self.n_inputs + self.n_ancillas, self.width)

    def __len__(self) -> int:
        return len(self.steps)

    def inverse(self) -> "ReversibleSchedule":
        return ReversibleSchedule(self.n_inputs, self.n_ancillas, self.n_results,
                                  tuple(s.flipped() for s in reversed(self.steps)), self.labels)

    def with_steps(self, steps: Sequence[Step]) -> "ReversibleSchedule":
        return ReversibleSchedule(self.n_inputs, self.n_ancillas, self.n_results, tuple(steps), self.labels)

    def initial_state(self, inputs: BitState | Sequence[int] | str) -> BitState:
        if isinstance(inputs, str):
            inputs = BitState.parse(inputs)
        bits = tuple(inputs)
        if len(bits) != self.n_inputs:
            raise ValidationError(f"expected {self.n_inputs} input bits, got {len(bits)}")
        return BitState(tuple(int(b) for b in bits) + (0,) * (self.n_ancillas + self.n_results))

    def to_ops(self) -> list[ConditionedOp]:
        """Explicit transition tables, one per step (width <= 24 only)."""
        if self.width > MAX_WIDTH:
            raise ValidationError(f"width {self.width} exceeds the explicit-table cap {MAX_WIDTH}")
        return [make_gate(s.kind, s.wiring, self.width, inverse=s.inverse) for s in self.steps]

    def composite(self) -> ConditionedOp:
        return compose(self.to_ops())

    def to_text(self) -> str:
        lines = [f"layout {self.n_inputs} {self.n_ancillas} {self.n_results}"]
        if self.labels:
            lines.append("labels " + " ".join(self.labels))
        for n, s in enumerate(self.steps, 1):
            lines.append(f"step {n} {s}")
        return "\n".join(lines) + "\n"


def parse_schedule(text: str, source: str | None = None) -> ReversibleSchedule:
    layout = None
    labels: tuple[str, ...] = ()
    steps: list[Step] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        toks = raw.split("#", 1)[0].split()
        if not toks:
            continue
        if toks[0] == "layout":
            if len(toks) != 4:
                raise ParseError("usage: layout <inputs> <ancillas> <results>", lineno, 1, source)
            try:
                layout = tuple(int(t) for t in toks[1:])
            except ValueError:
                raise ParseError("layout counts must be integers", lineno, 1, source) from None
        elif toks[0] == "labels":
            labels = tuple(toks[1:])
        elif toks[0] == "step":
            if len(toks) != 5:
                raise ParseError("usage: step <n> <gate> <indices> <fwd|inv>", lineno, 1, source)
            if toks[1] != str(len(steps) + 1):
                raise ParseError(f"expected step {len(steps) + 1}, got {toks[1]}", lineno, 1, source)
            try:
                kind = GateKind(toks[2])
                wiring = tuple(int(w) for w in toks[3].split(","))
            except ValueError:
                raise ParseError(f"bad gate or wiring in {raw.strip()!r}", lineno, 1, source) from None
            if toks[4] not in ("fwd", "inv"):
                raise ParseError(f"direction must be fwd or inv, got {toks[4]!r}", lineno, 1, source)
            steps.append(Step(kind, wiring, toks[4] == "inv"))
        else:
            raise ParseError(f"unknown statement {toks[0]!r}", lineno, 1, source)
    if layout is None:
        raise ParseError("missing 'layout' line", None, None, source)
    try:
        return ReversibleSchedule(*layout, tuple(steps), labels)
    except ValidationError as exc:
        raise ParseError(str(exc), None, None, source) from None


def bennett_embed(dag: GateDAG, verify: bool = False) -> ReversibleSchedule:
    """Compile ``dag`` into a compute/copy/decompute schedule.

    With ``verify=True`` the schedule is checked exhaustively when its width
    fits the verification cap; wider schedules are returned with a warning.
    """
    n_in, n_gates, n_out = len(dag.inputs), len(dag.nodes), len(dag.outputs)
    reg = {name: i for i, name in enumerate(dag.inputs)}
    for j, node in enumerate(dag.nodes):
        reg[node.id] = n_in + j
    forward = []
    for node in dag.nodes:
        kind = _NODE_GATE[node.kind]
        operands = tuple(reg[o] for o in node.operands)
        if len(set(operands)) < len(operands):
            # AND x x / OR x x is a plain copy of x
            kind, operands = GateKind.COPY, operands[:1]
        forward.append(Step(kind, operands + (reg[node.id],)))
    copies = [Step(GateKind.COPY, (reg[out], n_in + n_gates + k)) for k, out in enumerate(dag.outputs)]
    reverse = [s.flipped() for s in reversed(forward)]
    labels = dag.inputs + tuple(n.id for n in dag.nodes) + tuple(f"out:{o}" for o in dag.outputs)
    schedule = ReversibleSchedule(n_in, n_gates, n_out, tuple(forward + copies + reverse), labels)
    if verify:
        if schedule.width > MAX_WIDTH:
            warnings.warn(f"schedule width {schedule.width} exceeds {MAX_WIDTH}; verification skipped",
                          RuntimeWarning, stacklevel=2)
        else:
            report = verify_schedule(schedule, dag)
            if not report.passed:
                raise RevkitError(f"internal compiler error: {report.message}")
    return schedule


def _run(schedule: ReversibleSchedule, states: np.ndarray):
    """Apply all steps to an array of states.

    Returns final states and, per state, the 1-based index of the first
    violated step (0 if none).
    """
    if schedule.width > MAX_EXEC_WIDTH:
        raise ValidationError(f"width {schedule.width} exceeds executable width {MAX_EXEC_WIDTH}")
    first_bad = np.zeros(states.shape, dtype=np.int64)
    for n, s in enumerate(schedule.steps, 1):
        states, ok = apply_gate(s.kind, s.wiring, schedule.width, states, inverse=s.inverse)
        first_bad = np.where((first_bad == 0) & ~ok, n, first_bad)
    return states, first_bad


def execute_schedule(schedule: ReversibleSchedule, state: BitState | Sequence[int] | str) -> BitState:
    """Run ``schedule`` on a full register state, raising on any precondition violation."""
    if isinstance(state, str):
        state = BitState.parse(state)
    elif not isinstance(state, BitState):
        state = BitState(tuple(int(b) for b in state))
    if state.width != schedule.width:
        raise ValidationError(f"state width {state.width} != schedule width {schedule.width}")
    w = schedule.width
    cur = np.array([state.to_index()], dtype=np.int64)
    for n, s in enumerate(schedule.steps, 1):
        nxt, ok = apply_gate(s.kind, s.wiring, w, cur, inverse=s.inverse)
        if not ok[0]:
            raise PreconditionViolation(n, BitState.from_index(int(cur[0]), w), s)
        cur = nxt
    return BitState.from_index(int(cur[0]), w)


@dataclass
class VerificationReport:
    preconditions_hold: bool
    outputs_match: bool
    ancillas_zero: bool
    injective: bool
    counterexample: BitState | None = None
    step: int | None = None
    message: str = "PASS"
    inputs_checked: int = 0

    @property
    def passed(self) -> bool:
        return self.preconditions_hold and self.outputs_match and self.ancillas_zero and self.injective

    def as_dict(self) -> dict:
        return {
            "passed": self.passed,
            "preconditions_hold": self.preconditions_hold,
            "outputs_match": self.outputs_match,
            "ancillas_zero": self.ancillas_zero,
            "injective": self.injective,
            "counterexample": None if self.counterexample is None else str(self.counterexample),
            "step": self.step,
            "message": self.message,
            "inputs_checked": self.inputs_checked,
        }


def verify_schedule(schedule: ReversibleSchedule, dag: GateDAG) -> VerificationReport:
    """Exhaustively check a schedule against the DAG it claims to implement.

    For every primary input x, starting from (x, 0, 0): no step precondition
    is violated, the result registers equal ``evaluate_dag(dag, x)``, the
    ancillas end at zero, and distinct inputs end in distinct states.
    """
    if schedule.width > MAX_WIDTH:
        raise ValidationError(f"schedule width {schedule.width} exceeds verification cap {MAX_WIDTH}")
    if schedule.n_inputs != len(dag.inputs) or schedule.n_results != len(dag.outputs):
        raise ValidationError("schedule layout does not match the DAG's inputs/outputs")
    n_in, w = schedule.n_inputs, schedule.width
    shift = w - n_in
    xs = np.arange(1 << n_in, dtype=np.int64)
    final, first_bad = _run(schedule, xs << shift)

    expected = np.array([evaluate_dag(dag, BitState.from_index(int(x), n_in)).to_index() for x in xs],
                        dtype=np.int64)
    n_anc, n_res = schedule.n_ancillas, schedule.n_results
    results = final & ((1 << n_res) - 1)
    ancillas = (final >> n_res) & ((1 << n_anc) - 1)

    pre_ok = first_bad == 0
    out_ok = results == expected
    anc_ok = ancillas == 0
    injective = np.unique(final).size == final.size

    report = VerificationReport(bool(pre_ok.all()), bool(out_ok.all()), bool(anc_ok.all()), injective,
                                inputs_checked=int(xs.size))

    def fail(mask, text, step=None):
        i = int(np.flatnonzero(~mask)[0])
        report.counterexample = BitState.from_index(i, n_in)
        report.step = step(i) if step else None
        report.message = text.format(x=report.counterexample, step=report.step)

    if not report.preconditions_hold:
        fail(pre_ok, "precondition of step {step} violated for input {x}", lambda i: int(first_bad[i]))
    elif not report.outputs_match:
        fail(out_ok, "outputs differ from the DAG for input {x}")
    elif not report.ancillas_zero:
        fail(anc_ok, "ancillas not returned to zero for input {x}")
    elif not report.injective:
        _, first = np.unique(final, return_index=True)
        dup = np.ones(final.size, dtype=bool)
        dup[first] = False
        fail(~dup, "composite map merges input {x} with another input")
    return report


def verify_report_text(report: VerificationReport) -> str:
    flag = lambda b: "ok" if b else "FAIL"
    return "\n".join([
        f"verify: {'PASS' if report.passed else 'FAIL'} ({report.inputs_checked} inputs)",
        f"  preconditions  {flag(report.preconditions_hold)}",
        f"  outputs        {flag(report.outputs_match)}",
        f"  ancillas zero  {flag(report.ancillas_zero)}",
        f"  injective      {flag(report.injective)}",
    ] + ([f"  counterexample {report.counterexample} step {report.step}: {report.message}"]
         if not report.passed else []))

