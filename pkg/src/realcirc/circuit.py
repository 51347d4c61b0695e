"""Arithmetic circuits over the rationals.

Gate codes::

    1 input   2 const   3 add   4 mul   5 sign   6 output
    7 sub     8 eq      9 lt   10 gt   11 le    12 ge

Codes 7 to 12 are auxiliary; ``normalize.eliminate_aux_gates`` removes them.
Relational gates compare ``preds[0]`` (left) with ``preds[1]`` (right) and
output 1 or 0.  ``add``/``mul`` with one predecessor are identities.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import IntEnum
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .errors import InvalidCircuitError, ParseError, UnknownGateError
from .structure import exact


class GateType(IntEnum):
    INPUT = 1
    CONST = 2
    ADD = 3
    MUL = 4
    SIGN = 5
    OUTPUT = 6
    SUB = 7
    EQ = 8
    LT = 9
    GT = 10
    LE = 11
    GE = 12

    @property
    def label(self) -> str:
        return _NAMES[self]


_NAMES = {
    GateType.INPUT: "input", GateType.CONST: "const", GateType.ADD: "add", GateType.MUL: "mul",
    GateType.SIGN: "sign", GateType.OUTPUT: "output", GateType.SUB: "sub", GateType.EQ: "eq",
    GateType.LT: "lt", GateType.GT: "gt", GateType.LE: "le", GateType.GE: "ge",
}
_BY_NAME = {name: t for t, name in _NAMES.items()}
AUX_TYPES = frozenset(t for t in GateType if t >= 7)
_BINARY = frozenset({GateType.SUB, GateType.EQ, GateType.LT, GateType.GT, GateType.LE, GateType.GE})


@dataclass(frozen=True)
class Gate:
    id: int
    gtype: GateType
    payload: object = None  # Fraction for const, input index for input
    preds: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "gtype", GateType(self.gtype))
        object.__setattr__(self, "preds", tuple(self.preds))
        if self.gtype == GateType.CONST:
            object.__setattr__(self, "payload", Fraction(exact(self.payload)))


@dataclass(frozen=True)
class Violation:
    kind: str  # indegree, payload, duplicate-pred, missing-pred, cycle, inputs, output, type
    gate: int | None
    message: str

    def __str__(self) -> str:
        where = "" if self.gate is None else f"gate {self.gate}: "
        return f"{self.kind}: {where}{self.message}"


class Circuit:
    """Immutable gate collection keyed by id.

    ``complete=False`` marks a fragment (an induced subcircuit) that may lack
    some input gates and the output gate.
    """

    def __init__(self, gates: Iterable[Gate], n_inputs: int | None = None, *, complete: bool = True):
        table: dict[int, Gate] = {}
        for g in gates:
            if g.id in table:
                raise InvalidCircuitError(f"gate id {g.id} used twice",
                                          [Violation("duplicate-id", g.id, "id used twice")])
            table[g.id] = g
        self.gates: dict[int, Gate] = dict(sorted(table.items()))
        if n_inputs is None:
            n_inputs = sum(1 for g in self.gates.values() if g.gtype == GateType.INPUT)
        self.n_inputs = n_inputs
        self.complete = complete
        self._succ: dict[int, list[int]] | None = None
        self._order: list[int] | None = None
        self._checked = False

    # -- basic access -------------------------------------------------------
    def __len__(self) -> int:
        return len(self.gates)

    def __iter__(self):
        return iter(self.gates.values())

    def __getitem__(self, gid: int) -> Gate:
        try:
            return self.gates[gid]
        except KeyError:
            raise UnknownGateError(gid) from None

    def __contains__(self, gid: int) -> bool:
        return gid in self.gates

    def __eq__(self, other) -> bool:
        return (isinstance(other, Circuit) and self.n_inputs == other.n_inputs
                and self.gates == other.gates)

    def __repr__(self) -> str:
        return f"Circuit(size={len(self.gates)}, n_inputs={self.n_inputs})"

    @property
    def outputs(self) -> list[int]:
        return [g.id for g in self.gates.values() if g.gtype == GateType.OUTPUT]

    @property
    def output(self) -> int:
        outs = self.outputs
        if len(outs) != 1:
            raise InvalidCircuitError(f"expected exactly one output gate, found {len(outs)}",
                                      [Violation("output", None, f"{len(outs)} output gates")])
        return outs[0]

    def input_gate(self, index: int) -> int:
        for g in self.gates.values():
            if g.gtype == GateType.INPUT and g.payload == index:
                return g.id
        raise UnknownGateError(f"input {index}")

    def successors(self) -> dict[int, list[int]]:
        if self._succ is None:
            succ: dict[int, list[int]] = {gid: [] for gid in self.gates}
            for g in self.gates.values():
                for p in g.preds:
                    if p in succ:
                        succ[p].append(g.id)
            self._succ = succ
        return self._succ

    def outdegree(self, gid: int) -> int:
        return len(self.successors()[gid])

    def topological_order(self) -> list[int]:
        """Gate ids with every gate after its predecessors; raises on a cycle."""
        if self._order is None:
            indeg = {gid: sum(1 for p in g.preds if p in self.gates) for gid, g in self.gates.items()}
            ready = [gid for gid, d in indeg.items() if d == 0]
            ready.reverse()
            succ = self.successors()
            order: list[int] = []
            while ready:
                gid = ready.pop()
                order.append(gid)
                for s in succ[gid]:
                    indeg[s] -= 1
                    if indeg[s] == 0:
                        ready.append(s)
            if len(order) != len(self.gates):
                stuck = sorted(set(self.gates) - set(order))
                raise InvalidCircuitError("circuit contains a cycle",
                                          [Violation("cycle", stuck[0], "gate lies on or behind a cycle")])
            self._order = order
        return self._order


def validate(C: Circuit) -> list[Violation]:
    """Every invariant violation, with the offending gate id where there is one."""
    out: list[Violation] = []
    seen_inputs: dict[int, int] = {}
    for g in C.gates.values():
        t, k = g.gtype, len(g.preds)
        if t in (GateType.INPUT, GateType.CONST) and k:
            out.append(Violation("indegree", g.id, f"{t.label} gate must have no predecessors, has {k}"))
        elif t in (GateType.SIGN, GateType.OUTPUT) and k != 1:
            out.append(Violation("indegree", g.id, f"{t.label} gate must have 1 predecessor, has {k}"))
        elif t in _BINARY and k != 2:
            out.append(Violation("indegree", g.id, f"{t.label} gate must have 2 predecessors, has {k}"))
        elif t in (GateType.ADD, GateType.MUL) and k < 1:
            out.append(Violation("indegree", g.id, f"{t.label} gate needs at least 1 predecessor"))
        if len(set(g.preds)) != k:
            out.append(Violation("duplicate-pred", g.id, "a gate appears twice among the predecessors"))
        for p in g.preds:
            if p not in C.gates and C.complete:
                out.append(Violation("missing-pred", g.id, f"predecessor {p} does not exist"))
        if t == GateType.INPUT:
            idx = g.payload
            if not isinstance(idx, int) or isinstance(idx, bool) or not 1 <= idx <= C.n_inputs:
                out.append(Violation("payload", g.id, f"input index {idx!r} outside 1..{C.n_inputs}"))
            elif idx in seen_inputs:
                out.append(Violation("inputs", g.id, f"input index {idx} also used by gate {seen_inputs[idx]}"))
            else:
                seen_inputs[idx] = g.id
        elif t != GateType.CONST and g.payload is not None:
            out.append(Violation("payload", g.id, f"{t.label} gate carries a payload"))
    if C.complete:
        missing = [i for i in range(1, C.n_inputs + 1) if i not in seen_inputs]
        if missing:
            out.append(Violation("inputs", None, f"no input gate for index {missing[0]}"
                                 + (f" (and {len(missing) - 1} more)" if len(missing) > 1 else "")))
        if not C.outputs:
            out.append(Violation("output", None, "no output gate"))
    try:
        C.topological_order()
    except InvalidCircuitError as err:
        out.extend(err.violations)
    return out


def check(C: Circuit) -> Circuit:
    """Raise InvalidCircuitError listing every violation; return C otherwise."""
    if not C._checked:
        problems = validate(C)
        if problems:
            raise InvalidCircuitError("; ".join(map(str, problems[:5])), problems)
        C._checked = True
    return C


# -- evaluation ----------------------------------------------------------------

def _sign(x) -> int:
    return 1 if x > 0 else (-1 if x < 0 else 0)


def evaluate_gates(C: Circuit, x: Sequence) -> dict[int, object]:
    """Value of every gate on input vector ``x`` (exact arithmetic)."""
    check(C)
    if len(x) != C.n_inputs:
        raise InvalidCircuitError(f"circuit has {C.n_inputs} inputs, got {len(x)} values",
                                  [Violation("inputs", None, "input vector length mismatch")])
    xs = [exact(v) for v in x]
    val: dict[int, object] = {}
    gates = C.gates
    for gid in C.topological_order():
        g = gates[gid]
        t = g.gtype
        if t == GateType.INPUT:
            v = xs[g.payload - 1]
        elif t == GateType.CONST:
            v = g.payload
            if v.denominator == 1:
                v = v.numerator
        elif t == GateType.ADD:
            v = 0
            for p in g.preds:
                v += val[p]
        elif t == GateType.MUL:
            v = 1
            for p in g.preds:
                v *= val[p]
        elif t == GateType.SIGN:
            v = _sign(val[g.preds[0]])
        elif t == GateType.OUTPUT:
            v = val[g.preds[0]]
        else:
            a, b = val[g.preds[0]], val[g.preds[1]]
            if t == GateType.SUB:
                v = a - b
            elif t == GateType.EQ:
                v = int(a == b)
            elif t == GateType.LT:
                v = int(a < b)
            elif t == GateType.GT:
                v = int(a > b)
            elif t == GateType.LE:
                v = int(a <= b)
            else:
                v = int(a >= b)
        val[gid] = v
    return val


def evaluate(C: Circuit, x: Sequence) -> list:
    """Output values, ordered by output gate id."""
    val = evaluate_gates(C, x)
    return [val[o] for o in C.outputs]


# -- measures ------------------------------------------------------------------

def size(C: Circuit) -> int:
    return len(C.gates)


def _longest_from_sources(C: Circuit) -> dict[int, int]:
    """Longest path length from any source gate (no predecessors) to each gate."""
    dist: dict[int, int] = {}
    for gid in C.topological_order():
        preds = [p for p in C.gates[gid].preds if p in C.gates]
        dist[gid] = 1 + max(dist[p] for p in preds) if preds else 0
    return dist


def depth(C: Circuit) -> int:
    """Longest path from a source gate (input or constant) to an output gate."""
    check(C)
    dist = _longest_from_sources(C)
    outs = C.outputs or list(C.gates)
    return max((dist[o] for o in outs), default=0)


def tree_shape_size(C: Circuit) -> int:
    """Gate count with each input gate counted once per outgoing connection."""
    check(C)
    succ = C.successors()
    extra = sum(len(succ[g.id]) - 1 for g in C.gates.values() if g.gtype == GateType.INPUT)
    return len(C.gates) + extra


def induced_subcircuit(C: Circuit, g: int) -> Circuit:
    """``g`` together with every gate that has a path to ``g``."""
    if g not in C.gates:
        raise UnknownGateError(g)
    keep: set[int] = set()
    stack = [g]
    while stack:
        v = stack.pop()
        if v in keep:
            continue
        keep.add(v)
        stack.extend(C.gates[v].preds)
    return Circuit((C.gates[v] for v in sorted(keep)), C.n_inputs, complete=False)


def is_tree_like(C: Circuit) -> bool:
    check(C)
    succ = C.successors()
    return all(len(succ[g.id]) <= 1 for g in C.gates.values() if g.gtype != GateType.INPUT)


def path_length_ranges(C: Circuit, include_constants: bool = False) -> dict[int, tuple[int, int]]:
    """(shortest, longest) source-to-gate path length for every reachable gate.

    Sources are input gates, plus constant gates when ``include_constants``.
    """
    source_types = {GateType.INPUT} | ({GateType.CONST} if include_constants else set())
    ranges: dict[int, tuple[int, int]] = {}
    for gid in C.topological_order():
        g = C.gates[gid]
        if g.gtype in source_types:
            ranges[gid] = (0, 0)
            continue
        reached = [ranges[p] for p in g.preds if p in ranges]
        if reached:
            ranges[gid] = (1 + min(r[0] for r in reached), 1 + max(r[1] for r in reached))
    return ranges


def is_leveled(C: Circuit, include_constants: bool = False) -> bool:
    """All input-to-v paths have equal length, for every gate v."""
    check(C)
    return all(lo == hi for lo, hi in path_length_ranges(C, include_constants).values())


def relabel(C: Circuit, mapping: Mapping[int, int] | None = None) -> Circuit:
    """Rename gate ids; with no mapping, number gates 1..size in topological order."""
    if mapping is None:
        mapping = {gid: k for k, gid in enumerate(C.topological_order(), 1)}
    gates = [Gate(mapping[g.id], g.gtype, g.payload, tuple(mapping[p] for p in g.preds))
             for g in C.gates.values()]
    return Circuit(gates, C.n_inputs, complete=C.complete)


# -- text formats --------------------------------------------------------------

def format_circuit(C: Circuit) -> str:
    lines = [f"inputs {C.n_inputs}"]
    for g in C.gates.values():
        parts = [str(g.id), g.gtype.label]
        if g.gtype == GateType.CONST:
            parts.append(f"const={g.payload}")
        elif g.gtype == GateType.INPUT:
            parts.append(f"in={g.payload}")
        parts.append("preds=" + ",".join(map(str, g.preds)))
        lines.append(" ".join(parts))
    return "\n".join(lines) + "\n"


_GATE_LINE = re.compile(
    r"^(\d+)\s+([a-z]+)(?:\s+(const|in)=(\S+))?\s+preds=([\d,]*)$")


def parse_circuit(text: str) -> Circuit:
    """Read the one-gate-per-line text format (``#`` starts a comment)."""
    n: int | None = None
    gates: list[Gate] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if n is None:
            m = re.fullmatch(r"inputs\s+(\d+)", line)
            if m is None:
                raise ParseError("circuit text must start with 'inputs <n>'", 0, lineno, 1)
            n = int(m.group(1))
            continue
        m = _GATE_LINE.match(line)
        if m is None:
            raise ParseError(f"bad gate line {line!r}", 0, lineno, 1)
        gid, name, key, value, preds = m.groups()
        if name not in _BY_NAME:
            raise ParseError(f"unknown gate type {name!r}", 0, lineno, 1)
        gtype = _BY_NAME[name]
        payload = None
        if gtype == GateType.CONST:
            if key != "const":
                raise ParseError("const gate needs const=<rational>", 0, lineno, 1)
            try:
                payload = Fraction(value)
            except ValueError:
                raise ParseError(f"bad rational {value!r}", 0, lineno, 1) from None
        elif gtype == GateType.INPUT:
            if key != "in":
                raise ParseError("input gate needs in=<k>", 0, lineno, 1)
            payload = int(value)
        elif key is not None:
            raise ParseError(f"{name} gate takes no payload", 0, lineno, 1)
        pred_ids = tuple(int(p) for p in preds.split(",") if p)
        gates.append(Gate(int(gid), gtype, payload, pred_ids))
    if n is None:
        raise ParseError("empty circuit text", 0, 1, 1)
    return Circuit(gates, n)


def to_dot(C: Circuit) -> str:
    """Plain ``digraph`` text; edges point from predecessor to successor."""
    lines = ["digraph circuit {"]
    for g in C.gates.values():
        if g.gtype == GateType.CONST:
            label = str(g.payload)
        elif g.gtype == GateType.INPUT:
            label = f"in{g.payload}"
        else:
            label = g.gtype.label
        lines.append(f'  g{g.id} [label="{label}"];')
    for g in C.gates.values():
        for p in g.preds:
            lines.append(f"  g{p} -> g{g.id};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def figure1() -> Circuit:
    """out = (in1 * in2) + (in2 + in3), with in2 shared; size 7, tree-shape-size 8."""
    return Circuit([
        Gate(1, GateType.INPUT, 1), Gate(2, GateType.INPUT, 2), Gate(3, GateType.INPUT, 3),
        Gate(4, GateType.MUL, None, (1, 2)), Gate(5, GateType.ADD, None, (2, 3)),
        Gate(6, GateType.ADD, None, (4, 5)), Gate(7, GateType.OUTPUT, None, (6,)),
    ], 3)
