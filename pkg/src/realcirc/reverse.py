"""From a leveled circuit back to a sentence with auxiliary tables.

Gates are identified with ``q``-tuples over the universe (base-``u`` digits
of the gate's rank in id order, most significant first).  The circuit is
described by auxiliary number symbols:

* ``t(v)``: gate type (0 for unused tuples), ``c(v)``: constant value,
* ``pred(w, v)``: 1 if ``w`` is a predecessor of ``v``,
* ``in_g(v, j)``: 1 if input gate ``v`` reads ``g(j)`` from the encoding
  (one table per encoded symbol ``g``; a 0-ary symbol uses one index for its
  ``u`` copies),
* ``rank(k) = k`` turns skeleton values into numbers.

``val_x`` is the value of any gate on level ``x``.  Level ``x`` uses free
variables ``z<x>_1 .. z<x>_q``; the sums in ``val_{x+1}`` bind exactly those
names, so ``val_x`` is shared (the terms are DAGs, not trees).
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .circuit import AUX_TYPES, Circuit, GateType, check, depth, is_leveled
from .errors import InvalidCircuitError, NotLeveledError, TooManyGatesError
from .logic import (
    Add, AuxNumApp, Char, Const, Forall, Formula, Implies, Mul, NumApp, NumberTerm, NumEq,
    Prod, Sign, Signature, SkeletonApp, Sum, Var, children,
)
from .structure import ArbInterpretation, input_layout, table_index

T = GateType


def _digits(k: int, u: int, q: int) -> tuple[int, ...]:
    out = []
    for _ in range(q):
        k, d = divmod(k, u)
        out.append(d)
    return tuple(reversed(out))


def coordinate_arity(size: int, u: int) -> int:
    """Smallest ``q`` with ``u ** q >= size``."""
    if size <= 1:
        return 1 if size == 1 else 0
    if u == 1:
        raise TooManyGatesError(f"{size} gates cannot be addressed with universe size 1")
    q, cap = 1, u
    while cap < size:
        q += 1
        cap *= u
    return q


@dataclass
class FamilyDescriptor:
    """Tables describing one circuit of the family, at universe size ``u``."""

    sig: Signature
    u: int
    q: int
    d: int
    gate_tuples: dict[int, tuple[int, ...]]
    t: tuple
    c: tuple
    pred: tuple
    inputs: dict[str, tuple] = field(default_factory=dict)  # encoded symbol -> in_g table
    names: dict[str, str] = field(default_factory=dict)     # role -> aux symbol name

    def in_arity(self, symbol: str) -> int:
        arity = dict(self.sig.encoded)[symbol]
        return self.q + max(arity, 1)

    def aux_symbols(self) -> list[tuple[str, int, str]]:
        n = self.names
        out = [(n["t"], self.q, "number"), (n["c"], self.q, "number"), (n["pred"], 2 * self.q, "number")]
        out += [(n["in_" + g], self.in_arity(g), "number") for g, _ in self.sig.encoded]
        if self.sig.skeleton:
            out.append((n["rank"], 1, "number"))
        return out

    def signature(self) -> Signature:
        """The input signature extended by the descriptor's auxiliary symbols."""
        return self.sig.with_aux(self.aux_symbols())

    def arb(self) -> ArbInterpretation:
        n = self.names
        tables = {n["t"]: self.t, n["c"]: self.c, n["pred"]: self.pred}
        tables.update({n["in_" + g]: tbl for g, tbl in self.inputs.items()})
        if self.sig.skeleton:
            tables[n["rank"]] = tuple(range(self.u))
        return ArbInterpretation(self.u, {k: tuple(v) for k, v in tables.items()})


def _aux_names(sig: Signature) -> dict[str, str]:
    taken = {s.name for s in sig.symbols}
    names = {}
    for role in ["t", "c", "pred", "rank"] + ["in_" + g for g, _ in sig.encoded]:
        name = role
        while name in taken:
            name += "_"
        taken.add(name)
        names[role] = name
    return names


def descriptor_from_circuit(C: Circuit, sig: Signature, u: int, q: int | None = None) -> FamilyDescriptor:
    """Tabulate a leveled circuit over gate codes 1 to 6.

    Levels count from every source gate, constants included, so
    ``normalize.level_paths(C, include_constants=True)`` output qualifies.
    """
    check(C)
    bad = [g.id for g in C if g.gtype in AUX_TYPES]
    if bad:
        raise InvalidCircuitError(f"gate {bad[0]} uses an auxiliary type; eliminate those first")
    if not is_leveled(C, include_constants=True):
        raise NotLeveledError("circuit is not leveled (every source-to-gate path must have equal length)")
    size = len(C)
    if q is None:
        q = coordinate_arity(size, u)
    elif u ** q < size:
        raise TooManyGatesError(f"{size} gates do not fit in {u}^{q} tuples")
    ids = sorted(C.gates)
    tuples = {gid: _digits(k, u, q) for k, gid in enumerate(ids)}
    width = u ** q
    t = [0] * width
    c = [0] * width
    pred = [0] * (width * width)
    layout = input_layout(sig, u)
    blocks = sorted((offset, name) for name, offset in layout.items())
    inputs = {g: [0] * (u ** (q + max(a, 1))) for g, a in sig.encoded}
    arities = dict(sig.encoded)
    for gid in ids:
        g = C[gid]
        v = tuples[gid]
        k = table_index(v, u)
        t[k] = int(g.gtype)
        if g.gtype == T.CONST:
            value = g.payload
            c[k] = value.numerator if value.denominator == 1 else value
        for p in g.preds:
            pred[table_index(tuples[p] + v, u)] = 1
        if g.gtype == T.INPUT:
            pos = g.payload - 1
            name = max((b for b in blocks if b[0] <= pos), default=None)
            if name is None:
                raise InvalidCircuitError(f"input {g.payload} lies outside the encoding of the signature")
            offset, symbol = name
            local = pos - offset
            size_g = u ** max(arities[symbol], 1)
            if local >= size_g:
                raise InvalidCircuitError(f"input {g.payload} lies outside the encoding of the signature")
            j = _digits(local, u, max(arities[symbol], 1))
            inputs[symbol][table_index(v + j, u)] = 1
    return FamilyDescriptor(
        sig=sig, u=u, q=q, d=depth(C), gate_tuples=tuples, t=tuple(t), c=tuple(c),
        pred=tuple(pred), inputs={g: tuple(tbl) for g, tbl in inputs.items()},
        names=_aux_names(sig),
    )


def level_variables(x: int, q: int) -> tuple[str, ...]:
    return tuple(f"z{x}_{r}" for r in range(1, q + 1))


def _sums(kind, names, body):
    for name in reversed(names):
        body = kind(name, body)
    return body


def _vars(names) -> tuple[Var, ...]:
    return tuple(Var(n) for n in names)


def build_val_terms(desc: FamilyDescriptor) -> list[NumberTerm]:
    """``[val_0, ..., val_d]``; ``val_x`` has free variables ``level_variables(x, q)``."""
    n = desc.names
    q = desc.q
    arities = dict(desc.sig.encoded)
    skeleton = {s for s, _ in desc.sig.skeleton}

    def is_type(zs, k: int) -> Char:
        return Char(NumEq(AuxNumApp(n["t"], zs), Const(k)))

    z0 = _vars(level_variables(0, q))
    parts: list[NumberTerm] = []
    for g, _ in desc.sig.encoded:
        ar = arities[g]
        js = tuple(f"j_{g}_{r}" for r in range(1, max(ar, 1) + 1))
        args = _vars(js[:ar])
        if g in skeleton:
            value = AuxNumApp(n["rank"], (SkeletonApp(g, args),))
        else:
            value = NumApp(g, args)
        gated = Mul(AuxNumApp(n["in_" + g], z0 + _vars(js)), value)
        parts.append(_sums(Sum, js, gated))
    parts.append(Mul(is_type(z0, int(T.CONST)), AuxNumApp(n["c"], z0)))
    val = parts[0]
    for p in parts[1:]:
        val = Add(val, p)
    terms = [val]

    for x in range(1, desc.d + 1):
        below = level_variables(x - 1, q)
        zx = _vars(level_variables(x, q))
        w = _vars(below)
        prev = terms[-1]
        edge = AuxNumApp(n["pred"], w + zx)
        t_sum = _sums(Sum, below, Mul(edge, prev))
        t_prod = _sums(Prod, below, Add(Mul(edge, Add(prev, Const(-1))), Const(1)))
        t_sign = _sums(Sum, below, Mul(edge, Sign(prev)))
        branches = [
            (T.CONST, AuxNumApp(n["c"], zx)),
            (T.ADD, t_sum),
            (T.MUL, t_prod),
            (T.SIGN, t_sign),
            (T.OUTPUT, t_sum),
        ]
        val = None
        for k, term in branches:
            piece = Mul(is_type(zx, int(k)), term)
            val = piece if val is None else Add(val, piece)
        terms.append(val)
    return terms


def build_sentence(desc: FamilyDescriptor) -> Formula:
    """``forall z (t(z) = 6 -> val_d(z) = 1)`` over the top level's variables."""
    names = level_variables(desc.d, desc.q)
    zs = _vars(names)
    val = build_val_terms(desc)[desc.d]
    body = Implies(NumEq(AuxNumApp(desc.names["t"], zs), Const(int(T.OUTPUT))), NumEq(val, Const(1)))
    for name in reversed(names):
        body = Forall(name, body)
    return body


def printed_size(node) -> int:
    """Length estimate of the fully expanded text of a (DAG-shaped) AST."""
    memo: dict[int, int] = {}

    def go(m) -> int:
        key = id(m)
        if key not in memo:
            memo[key] = 4 + sum(go(ch) for ch in children(m))
        return memo[key]

    return go(node)
