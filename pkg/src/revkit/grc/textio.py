"""Line-oriented text format for transition tables and distributions.

Grammar (one statement per line, ``#`` starts a comment)::

    space <width>                 # required, first statement
    map <in-bits> <out-bits>      # transition; unlisted states map to themselves
    pre <bits>                    # allowed state; no pre lines = full space
    p <bits> <probability>        # distribution mass; unlisted states get 0

Bits are 0/1 strings, most-significant variable first, exactly ``width``
characters long. A file may carry a table, a distribution, or both.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..errors import ParseError, ValidationError
from .core import BitState, ConditionedOp, Distribution, Precondition, StateSpace


@dataclass
class OpFile:
    space: StateSpace
    op: ConditionedOp | None
    dist: Distribution | None


def _bits(tok: str, width: int, line: int, col: int, source) -> int:
    if len(tok) != width or any(c not in "01" for c in tok):
        raise ParseError(f"expected a {width}-bit 0/1 string, got {tok!r}", line, col, source)
    return int(tok, 2)


def parse_op_text(text: str, source: str | None = None) -> OpFile:
    space = None
    table = None
    mapped = None
    pre_mask = None
    mass = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0]
        toks = line.split()
        if not toks:
            continue
        cols = []
        pos = 0
        for t in toks:
            pos = line.index(t, pos)
            cols.append(pos + 1)
            pos += len(t)
        head = toks[0]
        if head == "space":
            if space is not None:
                raise ParseError("duplicate 'space' header", lineno, cols[0], source)
            if len(toks) != 2:
                raise ParseError("usage: space <width>", lineno, cols[0], source)
            try:
                space = StateSpace(int(toks[1]))
            except (ValueError, ValidationError) as exc:
                raise ParseError(f"bad width {toks[1]!r}: {exc}", lineno, cols[1], source) from None
            continue
        if space is None:
            raise ParseError("'space <width>' must come first", lineno, cols[0], source)
        w = space.width
        if head == "map":
            if len(toks) != 3:
                raise ParseError("usage: map <in-bits> <out-bits>", lineno, cols[0], source)
            src = _bits(toks[1], w, lineno, cols[1], source)
            dst = _bits(toks[2], w, lineno, cols[2], source)
            if table is None:
                table = np.arange(space.size, dtype=np.int64)
                mapped = np.zeros(space.size, dtype=bool)
            if mapped[src]:
                raise ParseError(f"state {toks[1]} mapped twice", lineno, cols[1], source)
            mapped[src] = True
            table[src] = dst
        elif head == "pre":
            if len(toks) != 2:
                raise ParseError("usage: pre <bits>", lineno, cols[0], source)
            if pre_mask is None:
                pre_mask = np.zeros(space.size, dtype=bool)
            pre_mask[_bits(toks[1], w, lineno, cols[1], source)] = True
        elif head == "p":
            if len(toks) != 3:
                raise ParseError("usage: p <bits> <probability>", lineno, cols[0], source)
            idx = _bits(toks[1], w, lineno, cols[1], source)
            try:
                prob = float(toks[2])
            except ValueError:
                raise ParseError(f"bad probability {toks[2]!r}", lineno, cols[2], source) from None
            if mass is None:
                mass = np.zeros(space.size)
            mass[idx] += prob
        else:
            raise ParseError(f"unknown statement {head!r}", lineno, cols[0], source)
    if space is None:
        raise ParseError("missing 'space <width>' header", None, None, source)

    op = dist = None
    try:
        if table is not None or pre_mask is not None:
            if table is None:
                table = np.arange(space.size, dtype=np.int64)
            pre = Precondition(space, pre_mask) if pre_mask is not None else None
            op = ConditionedOp(space, table, pre, name=source or "op")
        if mass is not None:
            dist = Distribution(space, mass)
    except ValidationError as exc:
        raise ParseError(str(exc), None, None, source) from None
    return OpFile(space, op, dist)


def read_op_file(path) -> OpFile:
    path = Path(path)
    return parse_op_text(path.read_text(), source=str(path))


def format_op(op: ConditionedOp, dist: Distribution | None = None) -> str:
    space = op.space
    w = space.width
    lines = [f"space {w}"]
    for i, j in enumerate(op.table.tolist()):
        lines.append(f"map {i:0{w}b} {j:0{w}b}")
    if not op.precondition.is_full:
        for i in np.flatnonzero(op.precondition.allowed).tolist():
            lines.append(f"pre {i:0{w}b}")
    if dist is not None:
        lines.extend(format_dist(dist).splitlines()[1:])
    return "\n".join(lines) + "\n"


def format_dist(dist: Distribution) -> str:
    w = dist.space.width
    lines = [f"space {w}"]
    for i in np.flatnonzero(dist.mass > 0).tolist():
        lines.append(f"p {i:0{w}b} {float(dist.mass[i])!r}")
    return "\n".join(lines) + "\n"


__all__ = ["OpFile", "parse_op_text", "read_op_file", "format_op", "format_dist", "BitState"]
