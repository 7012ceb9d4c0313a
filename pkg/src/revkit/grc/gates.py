"""Standard gate library.

Gates act on integer state indices through :func:`apply_gate`, which works
on whole numpy arrays at once. The same routine builds explicit transition
tables (:func:`make_gate`) and drives table-free schedule execution in
:mod:`revkit.bennett`.

Conditioned gates (``REV_OR``, ``REV_AND``, ``COPY``, ``COPY_NOT``) write
their value into a target that must start at 0. The map itself overwrites
the target on every state, so outside the precondition it merges states
exactly like the corresponding ``OVERWRITE_*`` gate. Their inverses clear
the target and require it to hold the computed value.
"""

from __future__ import annotations

import enum

import numpy as np

from ..errors import ValidationError
from .core import ConditionedOp, Precondition, StateSpace


class GateKind(str, enum.Enum):
    NOT = "NOT"
    CNOT = "CNOT"
    TOFFOLI = "TOFFOLI"
    FREDKIN = "FREDKIN"
    ERASE = "ERASE"
    OVERWRITE_OR = "OVERWRITE_OR"
    OVERWRITE_AND = "OVERWRITE_AND"
    REV_OR = "REV_OR"
    REV_AND = "REV_AND"
    COPY = "COPY"
    COPY_NOT = "COPY_NOT"

    def __str__(self) -> str:
        return self.value


# wiring order: controls/operands first, target last
ARITY = {
    GateKind.NOT: 1,
    GateKind.CNOT: 2,
    GateKind.TOFFOLI: 3,
    GateKind.FREDKIN: 3,
    GateKind.ERASE: 1,
    GateKind.OVERWRITE_OR: 3,
    GateKind.OVERWRITE_AND: 3,
    GateKind.REV_OR: 3,
    GateKind.REV_AND: 3,
    GateKind.COPY: 2,
    GateKind.COPY_NOT: 2,
}

SELF_INVERSE = frozenset({GateKind.NOT, GateKind.CNOT, GateKind.TOFFOLI, GateKind.FREDKIN})
CONDITIONED = frozenset({GateKind.REV_OR, GateKind.REV_AND, GateKind.COPY, GateKind.COPY_NOT})


def check_wiring(kind: GateKind | str, wiring, width: int) -> tuple[GateKind, tuple[int, ...]]:
    try:
        kind = GateKind(kind)
    except ValueError:
        raise ValidationError(f"unknown gate kind {kind!r}") from None
    wiring = tuple(int(w) for w in wiring)
    if len(wiring) != ARITY[kind]:
        raise ValidationError(f"{kind} takes {ARITY[kind]} wires, got {len(wiring)}")
    if len(set(wiring)) != len(wiring):
        raise ValidationError(f"{kind} wiring collision: {wiring}")
    for w in wiring:
        if not 0 <= w < width:
            raise ValidationError(f"{kind} wire {w} outside width {width}")
    return kind, wiring


def _target_value(kind: GateKind, bits: list[np.ndarray]) -> np.ndarray:
    if kind in (GateKind.REV_OR, GateKind.OVERWRITE_OR):
        return bits[0] | bits[1]
    if kind in (GateKind.REV_AND, GateKind.OVERWRITE_AND):
        return bits[0] & bits[1]
    if kind is GateKind.COPY:
        return bits[0]
    if kind is GateKind.COPY_NOT:
        return bits[0] ^ 1
    raise AssertionError(kind)


def apply_gate(kind: GateKind, wiring: tuple[int, ...], width: int, states: np.ndarray,
               inverse: bool = False) -> tuple[np.ndarray, np.ndarray]:
    """Apply a gate to an array of state indices.

    Returns ``(new_states, precondition_ok)``. ``wiring`` must already be
    validated. ``inverse`` selects the inverse of a conditioned gate, whose
    precondition is "target equals the computed value" and which clears the
    target.
    """
    pos = [width - 1 - w for w in wiring]
    bits = [(states >> p) & 1 for p in pos]
    ok = np.ones(states.shape, dtype=bool)

    if kind is GateKind.NOT:
        return states ^ (1 << pos[0]), ok
    if kind is GateKind.CNOT:
        return states ^ (bits[0] << pos[1]), ok
    if kind is GateKind.TOFFOLI:
        return states ^ ((bits[0] & bits[1]) << pos[2]), ok
    if kind is GateKind.FREDKIN:
        d = (bits[1] ^ bits[2]) & bits[0]
        return states ^ (d << pos[1]) ^ (d << pos[2]), ok

    if inverse and kind not in CONDITIONED:
        raise ValidationError(f"{kind} has no inverse")

    tpos = pos[-1]
    tmask = np.int64(1) << tpos
    if kind is GateKind.ERASE:
        return states & ~tmask, ok
    value = _target_value(kind, bits[:-1])
    if kind in (GateKind.OVERWRITE_OR, GateKind.OVERWRITE_AND):
        return (states & ~tmask) | (value << tpos), ok

    target = bits[-1]
    if inverse:
        return states & ~tmask, target == value
    return (states & ~tmask) | (value << tpos), target == 0


def make_gate(kind: GateKind | str, wiring, width: int, inverse: bool = False) -> ConditionedOp:
    """Explicit transition table for a library gate on a ``width``-bit space.

    ``inverse=True`` builds the inverse direction of a conditioned gate
    (self-inverse gates are returned unchanged).
    """
    space = StateSpace(width)
    kind, wiring = check_wiring(kind, wiring, width)
    states = space.indices()
    if kind in SELF_INVERSE:
        inverse = False
    table, ok = apply_gate(kind, wiring, width, states, inverse=inverse)
    pre = Precondition(space, ok)
    label = f"{kind}{'^-1' if inverse else ''}({','.join(map(str, wiring))})"
    return ConditionedOp(space, table, pre, label)
