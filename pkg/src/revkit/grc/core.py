"""State spaces, distributions and conditioned operations.

States of a ``width``-bit space are stored as integer indices. Variable 0 is
the most significant bit, so the integer order of indices is the
lexicographic order of the bit tuples.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator, Mapping, Sequence

import numpy as np

from ..errors import ValidationError

MAX_WIDTH = 24
MASS_TOL = 1e-12
LOSS_TOL = 1e-12

#: Boltzmann constant, exact 2019 SI value (J/K).
K_B = 1.380649e-23


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, order=True)
class BitState:
    """An ordered tuple of bits, most-significant variable first."""

    bits: tuple[int, ...]

    def __post_init__(self):
        if any(b not in (0, 1) for b in self.bits):
            raise ValidationError(f"bits must be 0/1, got {self.bits!r}")

    @classmethod
    def parse(cls, text: str) -> "BitState":
        if not text or any(c not in "01" for c in text):
            raise ValidationError(f"not a bit string: {text!r}")
        return cls(tuple(int(c) for c in text))

    @classmethod
    def from_index(cls, index: int, width: int) -> "BitState":
        return cls(tuple((index >> (width - 1 - i)) & 1 for i in range(width)))

    @property
    def width(self) -> int:
        return len(self.bits)

    def to_index(self) -> int:
        value = 0
        for b in self.bits:
            value = (value << 1) | b
        return value

    def __str__(self) -> str:
        return "".join(str(b) for b in self.bits)

    def __len__(self) -> int:
        return len(self.bits)

    def __getitem__(self, i):
        return self.bits[i]


@dataclass(frozen=True)
class StateSpace:
    width: int

    def __post_init__(self):
        if not isinstance(self.width, (int, np.integer)) or not 1 <= self.width <= MAX_WIDTH:
            raise ValidationError(f"width must be in 1..{MAX_WIDTH}, got {self.width!r}")

    @property
    def size(self) -> int:
        return 1 << self.width

    def states(self) -> Iterator[BitState]:
        for i in range(self.size):
            yield BitState.from_index(i, self.width)

    def index(self, state: BitState | str | Sequence[int]) -> int:
        state = self.coerce(state)
        return state.to_index()

    def state(self, index: int) -> BitState:
        if not 0 <= index < self.size:
            raise ValidationError(f"index {index} outside space of width {self.width}")
        return BitState.from_index(index, self.width)

    def coerce(self, state: BitState | str | Sequence[int]) -> BitState:
        if isinstance(state, str):
            state = BitState.parse(state)
        elif not isinstance(state, BitState):
            state = BitState(tuple(int(b) for b in state))
        if state.width != self.width:
            raise ValidationError(f"state {state} has width {state.width}, space has {self.width}")
        return state

    def bit_position(self, var: int) -> int:
        """Integer bit position of variable ``var`` inside a state index."""
        return self.width - 1 - var

    def indices(self) -> np.ndarray:
        return np.arange(self.size, dtype=np.int64)


@dataclass(frozen=True, eq=False)
class Distribution:
    """Probability mass over every state of a space (dense vector)."""

    space: StateSpace
    mass: np.ndarray

    def __post_init__(self):
        mass = np.array(self.mass, dtype=np.float64)
        if mass.shape != (self.space.size,):
            raise ValidationError(f"mass vector has shape {mass.shape}, expected ({self.space.size},)")
        if not np.all(np.isfinite(mass)):
            raise ValidationError("mass contains non-finite values")
        if np.any(mass < 0):
            i = int(np.argmin(mass))
            raise ValidationError(f"negative probability {mass[i]} at {self.space.state(i)}")
        total = math.fsum(mass)
        if abs(total - 1.0) > MASS_TOL:
            raise ValidationError(f"probabilities sum to {total!r}, not 1")
        object.__setattr__(self, "mass", _frozen(mass))

    @classmethod
    def from_mapping(cls, space: StateSpace, probs: Mapping) -> "Distribution":
        mass = np.zeros(space.size)
        for state, p in probs.items():
            mass[space.index(state)] += p
        return cls(space, mass)

    @classmethod
    def uniform(cls, space: StateSpace, support: Iterable | np.ndarray | None = None) -> "Distribution":
        if support is None:
            return cls(space, np.full(space.size, 1.0 / space.size))
        if isinstance(support, np.ndarray) and support.dtype == bool:
            mask = support
        else:
            mask = np.zeros(space.size, dtype=bool)
            for s in support:
                mask[space.index(s)] = True
        k = int(mask.sum())
        if k == 0:
            raise ValidationError("uniform distribution needs a non-empty support")
        mass = np.where(mask, 1.0 / k, 0.0)
        return cls(space, mass)

    @classmethod
    def point(cls, space: StateSpace, state) -> "Distribution":
        mass = np.zeros(space.size)
        mass[space.index(state)] = 1.0
        return cls(space, mass)

    @property
    def support(self) -> np.ndarray:
        return self.mass > 0

    def prob(self, state) -> float:
        return float(self.mass[self.space.index(state)])

    def items(self) -> Iterator[tuple[BitState, float]]:
        """Yield (state, probability) over the support, in canonical order."""
        for i in np.flatnonzero(self.mass > 0):
            yield self.space.state(int(i)), float(self.mass[i])

    def allclose(self, other: "Distribution", atol: float = MASS_TOL) -> bool:
        return self.space == other.space and bool(np.allclose(self.mass, other.mass, rtol=0, atol=atol))


@dataclass(frozen=True, eq=False)
class Precondition:
    """Set of allowed initial states, stored as a boolean mask."""

    space: StateSpace
    allowed: np.ndarray

    def __post_init__(self):
        allowed = np.array(self.allowed, dtype=bool)
        if allowed.shape != (self.space.size,):
            raise ValidationError(f"allowed mask has shape {allowed.shape}, expected ({self.space.size},)")
        if not allowed.any():
            raise ValidationError("precondition allows no states")
        object.__setattr__(self, "allowed", _frozen(allowed))

    @classmethod
    def full(cls, space: StateSpace) -> "Precondition":
        return cls(space, np.ones(space.size, dtype=bool))

    @classmethod
    def from_states(cls, space: StateSpace, states: Iterable) -> "Precondition":
        mask = np.zeros(space.size, dtype=bool)
        for s in states:
            mask[space.index(s)] = True
        return cls(space, mask)

    @classmethod
    def from_predicate(cls, space: StateSpace, predicate: Callable[[BitState], bool]) -> "Precondition":
        return cls(space, np.fromiter((bool(predicate(s)) for s in space.states()), dtype=bool, count=space.size))

    @property
    def is_full(self) -> bool:
        return bool(self.allowed.all())

    def __contains__(self, state) -> bool:
        return bool(self.allowed[self.space.index(state)])

    def states(self) -> Iterator[BitState]:
        for i in np.flatnonzero(self.allowed):
            yield self.space.state(int(i))

    def __eq__(self, other):
        if not isinstance(other, Precondition):
            return NotImplemented
        return self.space == other.space and np.array_equal(self.allowed, other.allowed)

    __hash__ = None


@dataclass(frozen=True, eq=False)
class ConditionedOp:
    """A total deterministic map on a state space plus a precondition.

    ``table[i]`` is the index of the image of state ``i``. Behavior outside
    the precondition is defined (the map is total) but carries no
    reversibility guarantee.
    """

    space: StateSpace
    table: np.ndarray
    precondition: Precondition = None
    name: str = field(default="op", compare=False)

    def __post_init__(self):
        table = np.array(self.table, dtype=np.int64)
        if table.shape != (self.space.size,):
            raise ValidationError(f"table has shape {table.shape}, expected ({self.space.size},)")
        if table.size and (table.min() < 0 or table.max() >= self.space.size):
            raise ValidationError("table entries fall outside the state space")
        object.__setattr__(self, "table", _frozen(table))
        if self.precondition is None:
            object.__setattr__(self, "precondition", Precondition.full(self.space))
        elif self.precondition.space != self.space:
            raise ValidationError("precondition lives in a different space")

    @classmethod
    def from_function(cls, space: StateSpace, fn: Callable[[BitState], BitState | Sequence[int]],
                      precondition: Precondition | None = None, name: str = "op") -> "ConditionedOp":
        table = np.fromiter((space.index(fn(s)) for s in space.states()), dtype=np.int64, count=space.size)
        return cls(space, table, precondition, name)

    @classmethod
    def identity(cls, space: StateSpace) -> "ConditionedOp":
        return cls(space, space.indices(), name="identity")

    def __call__(self, state) -> BitState:
        return self.space.state(int(self.table[self.space.index(state)]))

    def allows(self, state) -> bool:
        return state in self.precondition

    def is_injective(self) -> bool:
        """Injective (hence bijective) on the full space."""
        return _injective(self.table)

    def is_injective_on(self, mask: np.ndarray) -> bool:
        return _injective(self.table[mask])

    def __eq__(self, other):
        if not isinstance(other, ConditionedOp):
            return NotImplemented
        return (self.space == other.space and np.array_equal(self.table, other.table)
                and self.precondition == other.precondition)

    __hash__ = None

    def same_on_allowed(self, other: "ConditionedOp") -> bool:
        """Equal maps on this op's allowed states, ignoring behavior elsewhere."""
        mask = self.precondition.allowed
        return self.space == other.space and np.array_equal(self.table[mask], other.table[mask])


def _injective(images: np.ndarray) -> bool:
    return np.unique(images).size == images.size


class ReversibilityClass(enum.Enum):
    UNCONDITIONALLY_REVERSIBLE = "UnconditionallyReversible"
    CONDITIONALLY_REVERSIBLE = "ConditionallyReversible"
    IRREVERSIBLE = "Irreversible"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class LossReport:
    input_entropy: float
    output_entropy: float
    loss: float
    temperature: float | None = None
    min_heat: float | None = None


@dataclass(frozen=True)
class MergeWitness:
    first: BitState
    second: BitState
    image: BitState


def _check_space(op: ConditionedOp, dist: Distribution) -> None:
    if op.space != dist.space:
        raise ValidationError(f"op space width {op.space.width} != distribution space width {dist.space.width}")


def entropy(dist: Distribution) -> float:
    """Shannon entropy in bits; 0 log 0 is taken as 0."""
    p = dist.mass[dist.mass > 0]
    # fsum is correctly rounded, so equal multisets of masses give identical results
    h = -math.fsum((p * np.log2(p)).tolist())
    return h + 0.0


def pushforward(op: ConditionedOp, dist: Distribution) -> Distribution:
    _check_space(op, dist)
    mass = np.bincount(op.table, weights=dist.mass, minlength=dist.space.size)
    return Distribution(dist.space, mass)


def information_loss(op: ConditionedOp, dist: Distribution, temperature: float | None = None) -> LossReport:
    """Entropy ejected by ``op`` acting on ``dist``; optionally the Landauer heat floor."""
    _check_space(op, dist)
    h_in = entropy(dist)
    h_out = entropy(pushforward(op, dist))
    loss = h_in - h_out
    if loss < -LOSS_TOL:
        raise RuntimeError(f"negative information loss {loss!r}: entropy computation is inconsistent")
    min_heat = None
    if temperature is not None:
        if not temperature > 0:
            raise ValidationError(f"temperature must be positive, got {temperature!r}")
        min_heat = loss * K_B * temperature * math.log(2)
    return LossReport(h_in, h_out, loss, temperature, min_heat)


def verify_no_merge(op: ConditionedOp, dist: Distribution) -> tuple[bool, MergeWitness | None]:
    """True iff no two distinct support states share an image.

    On failure returns the first merged pair in canonical order.
    """
    _check_space(op, dist)
    support = np.flatnonzero(dist.mass > 0)
    images = op.table[support]
    order = np.argsort(images, kind="stable")
    sorted_images = images[order]
    dup = np.flatnonzero(sorted_images[1:] == sorted_images[:-1])
    if dup.size == 0:
        return True, None
    j = int(dup[0])
    a, b = int(support[order[j]]), int(support[order[j + 1]])
    space = op.space
    return False, MergeWitness(space.state(a), space.state(b), space.state(int(sorted_images[j])))


def classify(op: ConditionedOp) -> ReversibilityClass:
    if op.is_injective():
        return ReversibilityClass.UNCONDITIONALLY_REVERSIBLE
    if op.is_injective_on(op.precondition.allowed):
        return ReversibilityClass.CONDITIONALLY_REVERSIBLE
    return ReversibilityClass.IRREVERSIBLE


def compose(ops: Sequence[ConditionedOp]) -> ConditionedOp:
    """Sequential composition, first op applied first.

    The result's precondition is the set of states for which every op's
    precondition holds at the moment that op is applied.
    """
    if not ops:
        raise ValidationError("cannot compose an empty sequence")
    space = ops[0].space
    for op in ops[1:]:
        if op.space != space:
            raise ValidationError("all composed ops must share one space")
    current = space.indices()
    allowed = np.ones(space.size, dtype=bool)
    for op in ops:
        allowed &= op.precondition.allowed[current]
        current = op.table[current]
    if not allowed.any():
        raise ValidationError("composition has an empty precondition (inconsistent schedule)")
    name = ";".join(op.name for op in ops)
    return ConditionedOp(space, current, Precondition(space, allowed), name)


def inverse(op: ConditionedOp) -> ConditionedOp:
    """Inverse of ``op`` restricted to its allowed states.

    The inverse is allowed exactly on the image of the allowed set and is the
    identity elsewhere. Raises if ``op`` merges allowed states.
    """
    allowed = np.flatnonzero(op.precondition.allowed)
    images = op.table[allowed]
    if not _injective(images):
        raise ValidationError(f"{op.name} is not injective on its precondition; no inverse exists")
    table = op.space.indices().copy()
    table[images] = allowed
    mask = np.zeros(op.space.size, dtype=bool)
    mask[images] = True
    return ConditionedOp(op.space, table, Precondition(op.space, mask), f"inv({op.name})")


def permutation_op(space: StateSpace, perm: Sequence[int] | np.ndarray, name: str = "perm") -> ConditionedOp:
    perm = np.asarray(perm, dtype=np.int64)
    if np.unique(perm).size != space.size or perm.size != space.size:
        raise ValidationError("not a permutation of the state indices")
    return ConditionedOp(space, perm, name=name)
