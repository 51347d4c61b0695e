"""Circuit-to-circuit normalization passes.

* ``eliminate_aux_gates``: rewrite codes 7 to 12 into codes 1 to 6, in stages
  (le/ge, then eq, then lt/gt, then sub) so each stage only meets gates the
  later stages know how to remove.
* ``make_tree_like``: duplicate shared non-input subcircuits.
* ``level_paths``: pad short source edges with unary ``add`` gates.
"""

from __future__ import annotations

from fractions import Fraction

from .circuit import Circuit, Gate, GateType, check, is_tree_like
from .errors import NotTreeLikeError

T = GateType

# Gates added by rewriting one gate of each auxiliary type (its own stage only).
AUX_GATE_DELTA = {T.SUB: 2, T.EQ: 9, T.LT: 6, T.GT: 6, T.LE: 3, T.GE: 3}

STAGES: tuple[tuple[GateType, ...], ...] = ((T.LE, T.GE), (T.EQ,), (T.LT, T.GT), (T.SUB,))


class _Editor:
    """Mutable gate table with fresh-id allocation."""

    def __init__(self, C: Circuit):
        self.n = C.n_inputs
        self.gates: dict[int, Gate] = dict(C.gates)
        self.next_id = max(self.gates, default=0) + 1

    def add(self, gtype: GateType, preds=(), payload=None) -> int:
        gid = self.next_id
        self.next_id += 1
        self.gates[gid] = Gate(gid, gtype, payload, tuple(preds))
        return gid

    def const(self, value) -> int:
        return self.add(T.CONST, payload=Fraction(value))

    def put(self, gid: int, gtype: GateType, preds) -> None:
        self.gates[gid] = Gate(gid, gtype, None, tuple(preds))

    def circuit(self) -> Circuit:
        return Circuit(self.gates.values(), self.n)


def _sign_prime(ed: _Editor, x: int) -> int:
    """sign(sign(x) + 1): 1 for x >= 0, 0 for x < 0.  Three new gates."""
    return ed.add(T.SIGN, [ed.add(T.ADD, [ed.add(T.SIGN, [x]), ed.const(1)])])


def _lower(ed: _Editor, g: Gate) -> None:
    """Replace aux gate ``g`` in place; the top of the replacement keeps g's id."""
    p1, p2 = g.preds
    t = g.gtype
    if t in (T.LE, T.GE):
        strict = ed.add(T.LT if t == T.LE else T.GT, [p1, p2])
        equal = ed.add(T.EQ, [p1, p2])
        ed.put(g.id, T.SIGN, [ed.add(T.ADD, [strict, equal])])
    elif t == T.EQ:
        d = ed.add(T.SUB, [p1, p2])
        square = ed.add(T.MUL, [ed.add(T.ADD, [d]), ed.add(T.ADD, [d])])
        negated = ed.add(T.SUB, [ed.const(0), square])
        inner = ed.add(T.SIGN, [negated])
        ed.put(g.id, T.SIGN, [ed.add(T.ADD, [ed.const(1), inner])])
    elif t in (T.LT, T.GT):
        a, b = (p1, p2) if t == T.LT else (p2, p1)
        diff = ed.add(T.SUB, [a, b])
        one = ed.const(1)
        ed.put(g.id, T.SUB, [one, _sign_prime(ed, diff)])
    elif t == T.SUB:
        ed.put(g.id, T.ADD, [p1, ed.add(T.MUL, [ed.const(-1), p2])])
    else:
        raise ValueError(f"gate {g.id} of type {t.label} is not auxiliary")


def lower_gate(C: Circuit, gid: int) -> Circuit:
    """Rewrite one auxiliary gate; gates it introduces are left as they are."""
    check(C)
    ed = _Editor(C)
    _lower(ed, C[gid])
    return ed.circuit()


def lower_stage(C: Circuit, types) -> Circuit:
    """Rewrite every gate of the given types that is present in ``C``."""
    check(C)
    types = frozenset(types)
    targets = [g for g in C.gates.values() if g.gtype in types]
    if not targets:
        return C
    ed = _Editor(C)
    for g in targets:
        _lower(ed, g)
    return ed.circuit()


def eliminate_aux_gates(C: Circuit) -> Circuit:
    """Equivalent circuit using gate codes 1 to 6 only."""
    for types in STAGES:
        C = lower_stage(C, types)
    return C


def make_tree_like(C: Circuit) -> Circuit:
    """Duplicate shared subcircuits until every non-input gate has outdegree <= 1.

    Each round handles the smallest-id offender whose own subcircuit holds no
    other offender; its first successor (by id) keeps the original.
    """
    check(C)
    C.output  # single output required
    ed = _Editor(C)
    while True:
        succ: dict[int, list[int]] = {gid: [] for gid in ed.gates}
        for g in ed.gates.values():
            for p in g.preds:
                succ[p].append(g.id)
        offenders = {gid for gid, s in succ.items()
                     if len(s) > 1 and ed.gates[gid].gtype != T.INPUT}
        if not offenders:
            return ed.circuit()
        below: dict[int, bool] = {}  # gate's subcircuit contains an offender other than itself

        def has_offender_below(gid: int) -> bool:
            stack = [gid]
            while stack:
                v = stack[-1]
                if v in below:
                    stack.pop()
                    continue
                pending = [p for p in ed.gates[v].preds if p not in below]
                if pending:
                    stack.extend(pending)
                    continue
                stack.pop()
                below[v] = any(below[p] or p in offenders for p in ed.gates[v].preds)
            return below[gid]

        g = min(o for o in offenders if not has_offender_below(o))
        sub = _subcircuit_ids(ed, g)
        for s in sorted(succ[g])[1:]:
            mapping: dict[int, int] = {}
            for v in sub:
                gate = ed.gates[v]
                if gate.gtype == T.INPUT:
                    mapping[v] = v
                    continue
                mapping[v] = ed.add(gate.gtype, [mapping[p] for p in gate.preds], gate.payload)
            old = ed.gates[s]
            ed.gates[s] = Gate(s, old.gtype, old.payload,
                               tuple(mapping[g] if p == g else p for p in old.preds))


def _subcircuit_ids(ed: _Editor, g: int) -> list[int]:
    keep: set[int] = set()
    stack = [g]
    while stack:
        v = stack.pop()
        if v not in keep:
            keep.add(v)
            stack.extend(ed.gates[v].preds)
    # Predecessors must be copied before their successors; ids alone need not
    # respect that in arbitrary input circuits, so order topologically.
    order: list[int] = []
    done: set[int] = set()
    for root in sorted(keep):
        stack = [(root, False)]
        while stack:
            v, expanded = stack.pop()
            if v in done:
                continue
            if expanded:
                done.add(v)
                order.append(v)
                continue
            stack.append((v, True))
            stack.extend((p, False) for p in reversed(ed.gates[v].preds) if p not in done)
    return order


def level_paths(C: Circuit, include_constants: bool = False) -> Circuit:
    """Pad source edges so all source-to-gate paths of each gate have equal length.

    Sources are input gates, and constant gates too when ``include_constants``.
    Each short edge ``(s, v)`` gets its own chain of unary ``add`` gates placed
    directly above ``s``.
    """
    check(C)
    if not is_tree_like(C):
        raise NotTreeLikeError("level_paths needs a tree-like circuit")
    source_types = {T.INPUT} | ({T.CONST} if include_constants else set())
    order = C.topological_order()
    longest: dict[int, int] = {}
    for gid in order:
        g = C.gates[gid]
        if g.gtype in source_types:
            longest[gid] = 0
        else:
            reach = [longest[p] for p in g.preds if p in longest]
            if reach:
                longest[gid] = 1 + max(reach)
    succ = C.successors()
    level: dict[int, int] = {}
    for gid in reversed(order):
        g = C.gates[gid]
        if g.gtype in source_types or gid not in longest:
            continue
        if not succ[gid]:
            level[gid] = longest[gid]
        elif succ[gid][0] in level:
            level[gid] = level[succ[gid][0]] - 1
        else:
            level[gid] = longest[gid]
    ed = _Editor(C)
    for gid in sorted(level):
        g = C.gates[gid]
        new_preds = list(g.preds)
        changed = False
        for k, p in enumerate(g.preds):
            if C.gates[p].gtype not in source_types:
                continue
            top = p
            for _ in range(level[gid] - 1):
                top = ed.add(T.ADD, [top])
            if top != p:
                new_preds[k] = top
                changed = True
        if changed:
            ed.gates[gid] = Gate(gid, g.gtype, g.payload, tuple(new_preds))
    return ed.circuit() if ed.next_id != max(C.gates, default=0) + 1 else C


def normalize(C: Circuit, *, aux: bool = True, tree_like: bool = True, level: bool = True,
              include_constants: bool = False) -> Circuit:
    """Apply the selected passes in the fixed order aux, tree-like, level."""
    if aux:
        C = eliminate_aux_gates(C)
    if tree_like:
        C = make_tree_like(C)
    if level:
        C = level_paths(C, include_constants)
    return C

