"""Reversible pebble game on a straight-line chain of segments.

Segments are numbered 1..n. A pebble may be placed on or removed from
segment i only while segment i-1 holds a pebble; segment 1 is always
eligible (its input is the primary input). A strategy succeeds when
segment n is pebbled. With ``clean=True`` it must also leave no other
pebbles behind, the garbage-free form of the game.

Configurations are bitmasks: bit i-1 set means segment i is pebbled.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import lru_cache

from ..errors import ValidationError

PLACE = "place"
REMOVE = "remove"

MAX_EXHAUSTIVE = 12


class IllegalMove(ValidationError):
    pass


@dataclass(frozen=True)
class PebbleStrategy:
    chain_length: int
    moves: tuple[tuple[str, int], ...]
    max_pebbles: int
    step_count: int

    def __str__(self) -> str:
        body = " ".join(f"{'+' if a == PLACE else '-'}{i}" for a, i in self.moves)
        return f"n={self.chain_length} moves={self.step_count} peak={self.max_pebbles}: {body}"


def replay(chain_length: int, moves, clean: bool = False) -> tuple[int, int]:
    """Check legality of ``moves``; return (max_pebbles, step_count).

    Raises :class:`IllegalMove` on the first illegal move or unmet goal.
    """
    n = chain_length
    if n < 1:
        raise IllegalMove(f"chain length must be >= 1, got {n}")
    pebbled = 0
    peak = 0
    for k, (action, seg) in enumerate(moves, 1):
        if not 1 <= seg <= n:
            raise IllegalMove(f"move {k}: segment {seg} outside 1..{n}")
        bit = 1 << (seg - 1)
        if seg > 1 and not pebbled & (1 << (seg - 2)):
            raise IllegalMove(f"move {k}: {action} on segment {seg} while segment {seg - 1} is unpebbled")
        if action == PLACE:
            if pebbled & bit:
                raise IllegalMove(f"move {k}: segment {seg} already pebbled")
            pebbled |= bit
        elif action == REMOVE:
            if not pebbled & bit:
                raise IllegalMove(f"move {k}: segment {seg} holds no pebble")
            pebbled &= ~bit
        else:
            raise IllegalMove(f"move {k}: unknown action {action!r}")
        peak = max(peak, bin(pebbled).count("1"))
    goal = 1 << (n - 1)
    if not pebbled & goal:
        raise IllegalMove(f"final configuration does not pebble segment {n}")
    if clean and pebbled != goal:
        raise IllegalMove("final configuration leaves extra pebbles")
    return peak, len(moves)


def check_strategy(strategy: PebbleStrategy, clean: bool = False) -> None:
    peak, count = replay(strategy.chain_length, strategy.moves, clean=clean)
    if peak != strategy.max_pebbles or count != strategy.step_count:
        raise IllegalMove(f"recorded peak/steps ({strategy.max_pebbles}, {strategy.step_count}) "
                          f"do not match replay ({peak}, {count})")


def _make(n: int, moves) -> PebbleStrategy:
    moves = tuple(moves)
    peak, count = replay(n, moves)
    return PebbleStrategy(n, moves, peak, count)


def pebble_exhaustive(chain_length: int, max_pebbles: int, clean: bool = False) -> PebbleStrategy | None:
    """Minimum-move strategy by breadth-first search, or None if infeasible."""
    n, s = chain_length, max_pebbles
    if not 1 <= n <= MAX_EXHAUSTIVE:
        raise ValidationError(f"chain_length must be in 1..{MAX_EXHAUSTIVE}, got {n}")
    if s < 1:
        raise ValidationError(f"max_pebbles must be >= 1, got {s}")
    goal = 1 << (n - 1)

    def done(cfg):
        return cfg == goal if clean else bool(cfg & goal)

    parent = {0: None}
    queue = deque([0])
    while queue:
        cfg = queue.popleft()
        if done(cfg):
            moves = []
            while parent[cfg] is not None:
                prev, move = parent[cfg]
                moves.append(move)
                cfg = prev
            return _make(n, reversed(moves))
        count = bin(cfg).count("1")
        for seg in range(1, n + 1):
            if seg > 1 and not cfg & (1 << (seg - 2)):
                continue
            bit = 1 << (seg - 1)
            if cfg & bit:
                nxt, move = cfg & ~bit, (REMOVE, seg)
            elif count < s:
                nxt, move = cfg | bit, (PLACE, seg)
            else:
                continue
            if nxt not in parent:
                parent[nxt] = (cfg, move)
                queue.append(nxt)
    return None


@lru_cache(maxsize=None)
def _compute(length: int, k: int) -> tuple[tuple[str, int], ...]:
    """Moves pebbling offset ``length`` from a pebbled (or input) offset 0.

    Leaves only the endpoint pebbled in addition to what was there before.
    Offsets are relative; callers shift them.
    """
    if length == 1:
        return ((PLACE, 1),)
    parts = min(k, length)
    base, extra = divmod(length, parts)
    sizes = [base + (1 if i < extra else 0) for i in range(parts)]
    bounds = [0]
    for sz in sizes:
        bounds.append(bounds[-1] + sz)
    moves = []
    for j in range(parts):
        moves.extend(_shift(_compute(sizes[j], k), bounds[j]))
    for j in range(parts - 2, -1, -1):
        moves.extend(_shift(_uncompute(sizes[j], k), bounds[j]))
    return tuple(moves)


def _uncompute(length: int, k: int):
    return tuple((REMOVE if a == PLACE else PLACE, i) for a, i in reversed(_compute(length, k)))


def _shift(moves, offset: int):
    return ((a, i + offset) for a, i in moves)


def pebble_bennett_recursive(chain_length: int, branching: int) -> PebbleStrategy:
    """Bennett's recursive k-segment checkpointing strategy.

    The chain is split into ``branching`` near-equal sub-chains; each is
    pebbled recursively in turn, then all checkpoints but the last are
    removed by running their strategies backwards. Peak pebbles grow like
    (k-1)*log_k(n); moves like n**log_k(2k-1).
    """
    if chain_length < 1:
        raise ValidationError(f"chain_length must be >= 1, got {chain_length}")
    if branching < 2:
        raise ValidationError(f"branching must be >= 2, got {branching}")
    return _make(chain_length, _compute(chain_length, branching))
