"""Irreversible AND/OR/NOT netlists.

Netlist grammar. Statements end with ``;`` or a newline, ``#`` starts a
comment, whitespace is free::

    in a b c;             # primary inputs (may repeat; order is kept)
    n1 = AND a b;         # AND/OR take 2 operands, NOT takes 1
    n2 = NOT n1;
    out n2 a;             # outputs: any node or input ids

Definitions may appear in any order; the parser sorts them topologically
and reports cycles.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Sequence

from ..errors import ParseError, ValidationError
from ..grc.core import BitState

GATE_ARITY = {"AND": 2, "OR": 2, "NOT": 1}
_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_.\[\]]*$")


@dataclass(frozen=True)
class Node:
    id: str
    kind: str
    operands: tuple[str, ...]


@dataclass(frozen=True)
class GateDAG:
    inputs: tuple[str, ...]
    nodes: tuple[Node, ...]
    outputs: tuple[str, ...]

    def __post_init__(self):
        seen = set()
        for name in self.inputs:
            if name in seen:
                raise ValidationError(f"duplicate id {name!r}")
            seen.add(name)
        for node in self.nodes:
            if node.id in seen:
                raise ValidationError(f"duplicate id {node.id!r}")
            if node.kind not in GATE_ARITY:
                raise ValidationError(f"unknown gate kind {node.kind!r}")
            if len(node.operands) != GATE_ARITY[node.kind]:
                raise ValidationError(f"{node.kind} {node.id!r} needs {GATE_ARITY[node.kind]} operands")
            for op in node.operands:
                if op not in seen:
                    raise ValidationError(f"operand {op!r} of {node.id!r} is not defined before use")
            seen.add(node.id)
        for out in self.outputs:
            if out not in seen:
                raise ValidationError(f"output {out!r} does not exist")

    @property
    def n_gates(self) -> int:
        return len(self.nodes)

    def to_text(self) -> str:
        lines = []
        if self.inputs:
            lines.append("in " + " ".join(self.inputs) + ";")
        for n in self.nodes:
            lines.append(f"{n.id} = {n.kind} {' '.join(n.operands)};")
        lines.append("out " + " ".join(self.outputs) + ";")
        return "\n".join(lines) + "\n"


def _statements(text: str):
    """Yield (tokens, columns, line) per statement."""
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0]
        start = 0
        for part in line.split(";"):
            toks, cols = [], []
            for m in re.finditer(r"\S+", part):
                toks.append(m.group())
                cols.append(start + m.start() + 1)
            # '=' glued to ids, e.g. "n1=AND"
            if toks:
                yield _split_eq(toks, cols), lineno
            start += len(part) + 1


def _split_eq(toks, cols):
    out_t, out_c = [], []
    for t, c in zip(toks, cols):
        pieces = re.split(r"(=)", t)
        off = 0
        for p in pieces:
            if p:
                out_t.append(p)
                out_c.append(c + off)
            off += len(p)
    return out_t, out_c


def parse_dag(text: str, source: str | None = None) -> GateDAG:
    inputs: list[str] = []
    outputs: list[tuple[str, int, int]] = []
    defs: dict[str, tuple[str, tuple[str, ...], int, list[int]]] = {}
    order: list[str] = []
    where: dict[str, tuple[int, int]] = {}

    def declare(name, line, col):
        if not _IDENT.match(name):
            raise ParseError(f"bad identifier {name!r}", line, col, source)
        if name in where:
            raise ParseError(f"duplicate id {name!r} (first defined at line {where[name][0]})", line, col, source)
        where[name] = (line, col)

    for (toks, cols), line in _statements(text):
        head = toks[0]
        if head == "in":
            for t, c in zip(toks[1:], cols[1:]):
                declare(t, line, c)
                inputs.append(t)
        elif head == "out":
            if len(toks) < 2:
                raise ParseError("'out' needs at least one id", line, cols[0], source)
            outputs.extend((t, line, c) for t, c in zip(toks[1:], cols[1:]))
        elif len(toks) >= 2 and toks[1] == "=":
            if len(toks) < 3:
                raise ParseError("missing gate kind after '='", line, cols[1], source)
            kind = toks[2].upper()
            if kind not in GATE_ARITY:
                raise ParseError(f"unknown gate kind {toks[2]!r} (expected AND, OR or NOT)", line, cols[2], source)
            operands = tuple(toks[3:])
            if len(operands) != GATE_ARITY[kind]:
                raise ParseError(f"{kind} takes {GATE_ARITY[kind]} operand(s), got {len(operands)}",
                                 line, cols[2], source)
            declare(head, line, cols[0])
            defs[head] = (kind, operands, line, cols[3:])
            order.append(head)
        else:
            raise ParseError(f"cannot parse statement starting with {head!r}", line, cols[0], source)

    for nid in order:
        kind, operands, line, ocols = defs[nid]
        for op, c in zip(operands, ocols):
            if op not in where:
                raise ParseError(f"unknown operand {op!r}", line, c, source)

    # depth-first topological sort, stable in source order
    state: dict[str, int] = {}
    sorted_ids: list[str] = []

    def visit(nid, stack):
        st = state.get(nid, 0)
        if st == 2:
            return
        if st == 1:
            cycle = stack[stack.index(nid):] + [nid]
            line, col = where[nid]
            raise ParseError("cycle detected: " + " -> ".join(cycle), line, col, source)
        state[nid] = 1
        stack.append(nid)
        for op in defs[nid][1]:
            if op in defs:
                visit(op, stack)
        stack.pop()
        state[nid] = 2
        sorted_ids.append(nid)

    for nid in order:
        visit(nid, [])

    for name, line, col in outputs:
        if name not in where:
            raise ParseError(f"output {name!r} does not exist", line, col, source)
    if not outputs:
        raise ParseError("netlist declares no outputs", None, None, source)

    nodes = tuple(Node(nid, defs[nid][0], defs[nid][1]) for nid in sorted_ids)
    return GateDAG(tuple(inputs), nodes, tuple(name for name, _, _ in outputs))


def evaluate_dag(dag: GateDAG, inputs: BitState | Sequence[int] | str) -> BitState:
    if isinstance(inputs, str):
        inputs = BitState.parse(inputs)
    bits = tuple(inputs.bits if isinstance(inputs, BitState) else inputs)
    if len(bits) != len(dag.inputs):
        raise ValidationError(f"expected {len(dag.inputs)} input bits, got {len(bits)}")
    env = dict(zip(dag.inputs, (int(b) for b in bits)))
    for node in dag.nodes:
        v = [env[o] for o in node.operands]
        if node.kind == "AND":
            env[node.id] = v[0] & v[1]
        elif node.kind == "OR":
            env[node.id] = v[0] | v[1]
        else:
            env[node.id] = 1 - v[0]
    return BitState(tuple(env[o] for o in dag.outputs))
