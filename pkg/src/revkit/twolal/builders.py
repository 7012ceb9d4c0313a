"""Ready-made 2LAL structures: the OR/AND element and the shift register.

Shift-register phasing (the adopted four-phase scheme). A cycle has four
intervals. Cell ``Q[i]`` (i = 1..4n) belongs to phase ``i % 4`` and is
clocked by two cyclic drivers:

* ``D<phi>`` computes: ramps high in interval phi, holds through phi+1,
  ramps back in phi+2. A forward buffer copies ``Q[i-1]`` onto ``Q[i]``
  while ``D<phi>`` ramps up.
* ``R<phi>`` decomputes the previous cell: it ramps high one interval
  earlier, holds through phi, and ramps back in phi+1. A reverse buffer
  controlled by ``Q[i]`` connects ``R<phi>`` to ``Q[i-1]`` once ``Q[i]``
  is valid, so ``Q[i-1]`` returns to rest while ``Q[i]`` stays latched
  (decompute option 1).

Four cells form one stage, so a bit advances one stage per cycle. The input
``X`` is a non-cyclic driver acting as cell 0; a sink on the last cell
plays the downstream environment.
"""

from __future__ import annotations

from typing import Sequence

from ..errors import ValidationError
from .circuit import ClockSchedule, Element, TwoLALCircuit

PHASES = 4


def build_or_element(circuit: TwoLALCircuit, a: str, b: str, drive: str, q: str, kind: str = "or") -> Element:
    """Add an OR (or AND) element ``q = drive if (a op b)`` to ``circuit``.

    Signals are created on demand; ``drive`` must already have a driver.
    """
    for name in (a, b, q):
        circuit.signal(name)
    return circuit.add_element(kind, q, drive, (a, b))


def or_element_circuit(a: int, b: int, ticks_per_interval: int = 16, kind: str = "or",
                       full_cycle: bool = True) -> TwoLALCircuit:
    """A stand-alone element: inputs ramp in at @1, the drive ramps at @2.

    With ``full_cycle`` the element is then restored: the drive ramps back
    (decomputing Q) and finally the inputs return to 0, four intervals in
    all. Otherwise the circuit stops after @2, ready for
    :func:`decompute_cycle`.
    """
    if full_cycle:
        inp, drv = (lambda v: [v, v, v, 0]), [0, 1, 0, 0]
    else:
        inp, drv = (lambda v: [v, v]), [0, 1]
    c = TwoLALCircuit(clock=ClockSchedule(ticks_per_interval, len(drv)))
    for name in ("A", "B", "D", "Q"):
        c.signal(name)
    c.add_driver("A", inp(a))
    c.add_driver("B", inp(b))
    c.add_driver("D", drv)
    c.add_element(kind, "Q", "D", ("A", "B"))
    return c


def decompute_cycle(circuit: TwoLALCircuit, element: Element, option: int) -> TwoLALCircuit:
    """Append the reversible restore step after an element's drive interval.

    The element's inputs and drive must be plain drivers. Option 1 ramps
    the inputs back to 0 (Q stays latched); option 2 ramps the drive back
    to rest, decomputing Q while the inputs hold. The clock is lengthened
    by one interval; the returned circuit is a modified copy.
    """
    if option not in (1, 2):
        raise ValidationError(f"decompute option must be 1 or 2, got {option!r}")
    out = circuit.clone()
    drv = out.drivers.get(element.drive)
    if drv is None:
        raise ValidationError(f"drive {element.drive!r} is not a driver")
    end = len(drv.values)
    if drv.values[-1] != 1:
        raise ValidationError("element has not completed its drive interval")
    targets = element.inputs if option == 1 else (element.drive,)
    for name in targets:
        d = out.drivers.get(name)
        if d is None:
            raise ValidationError(f"signal {name!r} is not a driver")
        if d.cyclic:
            raise ValidationError(f"cyclic driver {name!r} cannot be rescheduled")
        held = list(d.values) + [d.values[-1]] * (end - len(d.values))
        out.set_driver(name, held + [0])
    for name, d in list(out.drivers.items()):
        if name not in targets and not d.cyclic:
            out.set_driver(name, list(d.values) + [d.values[-1]] * (end + 1 - len(d.values)))
    clock = out.clock
    out.clock = ClockSchedule(clock.ticks_per_interval, max(clock.intervals_per_cycle, end + 1))
    return out


def cell(i: int) -> str:
    return "X" if i == 0 else f"Q{i}"


def input_waveform(pattern: Sequence[int]) -> list[int]:
    """Per-interval values of the input driver for a bit pattern."""
    wave = []
    for bit in pattern:
        wave.extend((bit, bit, 0, 0))
    return wave or [0]


def build_shift_register(n_stages: int, pattern: Sequence[int] = (), ticks_per_interval: int = 16) -> TwoLALCircuit:
    """An ``n_stages``-stage 2LAL shift register fed with ``pattern``.

    One bit enters per cycle; the sink on the last cell records it ``n_stages``
    cycles later (see :func:`shift_register_output`).
    """
    if n_stages < 1:
        raise ValidationError(f"n_stages must be >= 1, got {n_stages}")
    pattern = [int(b) for b in pattern]
    if any(b not in (0, 1) for b in pattern):
        raise ValidationError("pattern bits must be 0/1")
    c = TwoLALCircuit(clock=ClockSchedule(ticks_per_interval, PHASES))
    cells = PHASES * n_stages
    for phi in range(PHASES):
        c.signal(f"D{phi}")
        c.signal(f"R{phi}")
        c.add_driver(f"D{phi}", [1 if (k - phi) % PHASES in (0, 1) else 0 for k in range(PHASES)], cyclic=True)
        c.add_driver(f"R{phi}", [1 if (k - phi) % PHASES in (3, 0) else 0 for k in range(PHASES)], cyclic=True)
    for i in range(cells + 1):
        c.signal(cell(i))
    c.add_driver("X", input_waveform(pattern))
    for i in range(1, cells + 1):
        c.add_element("buf", cell(i), f"D{i % PHASES}", (cell(i - 1),))
        if i >= 2:
            c.add_element("buf", cell(i - 1), f"R{i % PHASES}", (cell(i),))
    c.add_sink(cell(cells), (cells + 2) % PHASES)
    return c


def shift_register_output(outputs: dict, n_stages: int | None = None) -> list[int | None]:
    """Bits read by the shift register's sink, one per cycle, in order."""
    for name, reads in outputs.items():
        if name.startswith("Q"):
            return [v for _, v in reads]
    return []


def pure_delay(pattern: Sequence[int], n_stages: int, cycles: int) -> list[int]:
    """Oracle: bit read at cycle m is ``pattern[m - n_stages]`` (0 outside)."""
    out = []
    for m in range(cycles):
        src = m - n_stages
        out.append(int(pattern[src]) if 0 <= src < len(pattern) else 0)
    return out
