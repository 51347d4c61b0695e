"""Compile sentences into arithmetic circuits with post-order gate numbers.

Gate ids follow a left-to-right post-order walk of the circuit's tree
shape, in which every input slot consumes one number (a hole; the slot is
wired to the real input gate).  Hence the output gate is numbered
``tss(C)``, and input ``i`` is numbered ``tss(C) + i``.

Layouts, writing ``s(X)`` for the tree-shape-size of X's subcircuit:

=====================  ========================================  ==================
node                   gates (post-order)                         tree-shape-size
=====================  ========================================  ==================
variable / constant    one const gate                             1
``f(h1..hl)``          per tuple a (lex order): [const a_r, h_r,  1 + u^l * m,
                       eq] for each r, value, mul; then add       m = 2 + sum(s(h_r)+2)
``t1 + t2``, atoms     t1, t2, gate                               1 + s1 + s2
``sign(t)``            t, sign                                    1 + s
``sum/prod i t``       u copies of t, add/mul                     1 + u*s
``chi[psi]``           psi                                        s
``!psi``               const 1, psi, sign, sub                    3 + s
``psi &/| xi``         psi, xi, mul/add, sign                     2 + s1 + s2
``exists/forall y``    u copies, add/mul, sign                    2 + u*s
  (y not free)         psi                                        s
=====================  ========================================  ==================

The value of an application is a const gate for aux symbols (read from the
Arb tables) and an input slot for encoded symbols.  ``->`` and ``<->`` are
desugared first.
"""

from __future__ import annotations

from typing import Mapping, NamedTuple

from .circuit import Circuit, Gate, GateType
from .errors import (
    CompileError, FreeVariableError, MissingArbTableError, ShadowingError, StructureError,
)
from .logic import (
    APPLICATIONS, Add, And, AuxIndexApp, AuxNumApp, Char, Const, Exists, Forall, Formula, Iff, Implies,
    IndexEq, Max, Mul, Node, Not, NumEq, NumLt, Or, Prod, Sign, Signature, Sum,
    Var, check_wellformed, contains, free_vars, map_children, shadowed_variables,
)
from .structure import (
    ArbInterpretation, all_tuples, encoded_length, input_position, recover_universe_size,
    table_index,
)

T = GateType


def desugar(node: Node) -> Node:
    """Rewrite ``a -> b`` as ``!a | b`` and ``a <-> b`` as ``(!a | b) & (!b | a)``."""
    memo: dict[int, Node] = {}

    def go(n: Node) -> Node:
        key = id(n)
        if key not in memo:
            m = map_children(n, go)
            if isinstance(m, Implies):
                m = Or(Not(m.left), m.right)
            elif isinstance(m, Iff):
                m = And(Or(Not(m.left), m.right), Or(Not(m.right), m.left))
            memo[key] = m
        return memo[key]

    return go(node)


def prepare(phi: Node, sig: Signature, assignment: Mapping[str, int] | None = None) -> Node:
    """Check that ``phi`` can be compiled and return its desugared form."""
    check_wellformed(phi, sig)
    if contains(phi, Max):
        raise CompileError("max terms must be eliminated before compiling (see rewrite.eliminate_max)")
    shadowed = shadowed_variables(phi)
    if shadowed:
        raise ShadowingError(f"variable {shadowed[0]!r} is re-bound inside its own scope")
    missing = free_vars(phi) - set(assignment or {})
    if missing:
        raise FreeVariableError(f"free variable {sorted(missing)[0]!r} has no assigned value")
    return desugar(phi)


class TssTable:
    """Memoized tree-shape-size of each (desugared) AST node at universe size ``u``."""

    def __init__(self, u: int):
        if u < 1:
            raise CompileError("universe size must be at least 1")
        self.u = u
        self._memo: dict[int, tuple[Node, int]] = {}
        self._binds: dict[int, bool] = {}

    def binds(self, q: Node) -> bool:
        """Whether a quantifier's variable occurs free in its body."""
        key = id(q)
        if key not in self._binds:
            self._binds[key] = q.var in free_vars(q.body)
        return self._binds[key]

    def __call__(self, n: Node) -> int:
        hit = self._memo.get(id(n))
        if hit is not None and hit[0] is n:
            return hit[1]
        value = self._compute(n)
        self._memo[id(n)] = (n, value)
        return value

    def _compute(self, n: Node) -> int:
        u = self.u
        if isinstance(n, (Var, Const)):
            return 1
        if isinstance(n, APPLICATIONS):
            return 1 + u ** len(n.args) * block_size(self, n)
        if isinstance(n, (Add, Mul, IndexEq, NumEq, NumLt)):
            return 1 + self(n.left) + self(n.right)
        if isinstance(n, Sign):
            return 1 + self(n.arg)
        if isinstance(n, (Sum, Prod)):
            return 1 + u * self(n.body)
        if isinstance(n, Char):
            return self(n.formula)
        if isinstance(n, Not):
            return 3 + self(n.arg)
        if isinstance(n, (And, Or)):
            return 2 + self(n.left) + self(n.right)
        if isinstance(n, (Exists, Forall)):
            return 2 + u * self(n.body) if self.binds(n) else self(n.body)
        if isinstance(n, Max):
            raise CompileError("max terms have no circuit; eliminate them first")
        if isinstance(n, (Implies, Iff)):
            raise CompileError("desugar implications before measuring")
        raise TypeError(f"unexpected node {n!r}")


def block_size(tss: TssTable, app: Node) -> int:
    """Gates per argument tuple in the select construction."""
    return 2 + sum(tss(h) + 2 for h in app.args)


def tss_of(node: Node, sig: Signature | None, u: int) -> int:
    """Tree-shape-size of what ``compile`` builds for ``node``.

    For a formula that is the whole circuit, output gate included, so it
    equals ``tree_shape_size(compile(node, sig, u))``.  For a term it is the
    term's fragment.
    """
    fragment = TssTable(u)(desugar(node))
    return fragment + 1 if isinstance(node, Formula) else fragment


# -- materializing compiler -----------------------------------------------------

class _Builder:
    def __init__(self, sig: Signature, u: int, arb: ArbInterpretation | None, tss: TssTable,
                 total: int):
        self.sig = sig
        self.u = u
        self.arb = arb
        self.tss = tss
        self.total = total  # tss of the whole circuit; input i is total + i
        self.gates: list[Gate] = []
        self.last = 0
        self.tuples = {}

    def new(self, gtype: GateType, preds=(), payload=None) -> int:
        self.last += 1
        self.gates.append(Gate(self.last, gtype, payload, tuple(preds)))
        return self.last

    def arg_tuples(self, arity: int):
        if arity not in self.tuples:
            self.tuples[arity] = list(all_tuples(self.u, arity))
        return self.tuples[arity]

    def aux_table(self, name: str) -> tuple:
        if self.arb is None or name not in self.arb:
            raise MissingArbTableError(f"no Arb table for auxiliary symbol {name!r}")
        return self.arb[name]

    def select(self, n, env) -> int:
        aux = isinstance(n, (AuxIndexApp, AuxNumApp))
        table = self.aux_table(n.symbol) if aux else None
        products = []
        for tup in self.arg_tuples(len(n.args)):
            preds = []
            for a, h in zip(tup, n.args):
                rank = self.new(T.CONST, payload=a)
                preds.append(self.new(T.EQ, (rank, self.build(h, env))))
            if aux:
                preds.append(self.new(T.CONST, payload=table[table_index(tup, self.u)]))
            else:
                self.last += 1  # hole where the input slot sits
                preds.append(self.total + input_position(self.sig, self.u, n.symbol, tup))
            products.append(self.new(T.MUL, preds))
        return self.new(T.ADD, products)

    def copies(self, var: str, body, env) -> list[int]:
        saved = env.get(var)
        roots = []
        for a in range(self.u):
            env[var] = a
            roots.append(self.build(body, env))
        if saved is None:
            env.pop(var)
        else:
            env[var] = saved
        return roots

    def build(self, n: Node, env: dict) -> int:
        if isinstance(n, Var):
            return self.new(T.CONST, payload=env[n.name])
        if isinstance(n, Const):
            return self.new(T.CONST, payload=n.value)
        if isinstance(n, APPLICATIONS):
            return self.select(n, env)
        if isinstance(n, (Add, Mul, IndexEq, NumEq, NumLt)):
            left = self.build(n.left, env)
            right = self.build(n.right, env)
            gtype = {Add: T.ADD, Mul: T.MUL, IndexEq: T.EQ, NumEq: T.EQ, NumLt: T.LT}[type(n)]
            return self.new(gtype, (left, right))
        if isinstance(n, Sign):
            return self.new(T.SIGN, (self.build(n.arg, env),))
        if isinstance(n, (Sum, Prod)):
            return self.new(T.ADD if isinstance(n, Sum) else T.MUL, self.copies(n.var, n.body, env))
        if isinstance(n, Char):
            return self.build(n.formula, env)
        if isinstance(n, Not):
            one = self.new(T.CONST, payload=1)
            s = self.new(T.SIGN, (self.build(n.arg, env),))
            return self.new(T.SUB, (one, s))
        if isinstance(n, (And, Or)):
            left = self.build(n.left, env)
            right = self.build(n.right, env)
            top = self.new(T.MUL if isinstance(n, And) else T.ADD, (left, right))
            return self.new(T.SIGN, (top,))
        if isinstance(n, (Exists, Forall)):
            if not self.tss.binds(n):
                return self.build(n.body, env)
            roots = self.copies(n.var, n.body, env)
            return self.new(T.SIGN, (self.new(T.ADD if isinstance(n, Exists) else T.MUL, roots),))
        raise CompileError(f"cannot compile {type(n).__name__}")


def compile_numbered(phi: Node, sig: Signature, u: int, arb: ArbInterpretation | None = None,
                     assignment: Mapping[str, int] | None = None) -> Circuit:
    """Circuit deciding ``phi`` on encodings of size-``u`` structures, post-order numbered."""
    body = prepare(phi, sig, assignment)
    env = dict(assignment or {})
    for name, value in env.items():
        if not 0 <= value < u:
            raise CompileError(f"variable {name!r} assigned {value}, outside the universe")
    tss = TssTable(u)
    total = tss(body) + 1
    b = _Builder(sig, u, arb, tss, total)
    root = b.build(body, env)
    out = b.new(T.OUTPUT, (root,))
    assert out == total, (out, total)
    n = encoded_length(sig, u)
    b.gates.extend(Gate(total + i, T.INPUT, i) for i in range(1, n + 1))
    return Circuit(b.gates, n)


def compile(phi: Node, sig: Signature, u: int, arb: ArbInterpretation | None = None,
            assignment: Mapping[str, int] | None = None) -> Circuit:
    """Same circuit as ``compile_numbered``; the numbering is kept."""
    return compile_numbered(phi, sig, u, arb, assignment)


# -- direct-access gate oracle --------------------------------------------------

class GateRecord(NamedTuple):
    t: int
    p_nr: int
    c: object  # payload of const/input gates, else 0

    def __str__(self) -> str:
        return f"{self.t} {self.p_nr} {self.c}"


NO_GATE = GateRecord(0, 0, 0)


def _record(t: GateType, preds, p_idx: int, c=0) -> GateRecord:
    """Answer for a gate with the given (possibly lazy) predecessor list."""
    k = len(preds)
    p_nr = preds[p_idx - 1] if 1 <= p_idx <= k else 0
    if p_nr == 0 and t not in (T.CONST, T.INPUT):
        return GateRecord(int(t), 0, 0)
    return GateRecord(int(t), p_nr, c)


class _Stride:
    """Lazy list ``start + step * (k + 1)`` for ``k < count``."""

    def __init__(self, start: int, step: int, count: int):
        self.start, self.step, self.count = start, step, count

    def __len__(self) -> int:
        return self.count

    def __getitem__(self, k: int) -> int:
        return self.start + self.step * (k + 1)


def query_circuit(C: Circuit, v_nr: int, p_idx: int) -> GateRecord:
    """The record the oracle must return, read off a materialized circuit."""
    if v_nr not in C:
        return NO_GATE
    g = C[v_nr]
    c = g.payload if g.gtype in (T.CONST, T.INPUT) else 0
    return _record(g.gtype, g.preds, p_idx, c)


_CONTEXTS: dict[tuple[int, int, int], tuple[Node, Signature, Node, TssTable]] = {}


def _oracle_context(phi: Node, sig: Signature, u: int) -> tuple[Node, TssTable]:
    """Desugared sentence and its tss table, reused across queries on the same objects."""
    key = (id(phi), id(sig), u)
    hit = _CONTEXTS.get(key)
    if hit is not None and hit[0] is phi and hit[1] is sig:
        return hit[2], hit[3]
    node = prepare(phi, sig)
    tss = TssTable(u)
    if len(_CONTEXTS) >= 16:
        _CONTEXTS.clear()
    _CONTEXTS[key] = (phi, sig, node, tss)
    return node, tss


def gate_oracle(phi: Node, sig: Signature, n: int, v_nr: int, p_idx: int,
                arb: ArbInterpretation | None = None, *, u: int | None = None) -> GateRecord:
    """``(t, p_nr, c)`` for gate ``v_nr`` of the circuit for inputs of length ``n``.

    Walks down one root-to-gate path, locating subcircuits by their
    tree-shape-sizes; nothing else is built.
    """
    if u is None:
        u = recover_universe_size(sig, n)
    elif encoded_length(sig, u) != n:
        raise StructureError(f"universe size {u} does not encode to length {n}")
    node, tss = _oracle_context(phi, sig, u)
    total = tss(node) + 1
    if v_nr < 1 or v_nr > total + n:
        return NO_GATE
    if v_nr == total:
        return _record(T.OUTPUT, [total - 1], p_idx)
    if v_nr > total:
        return GateRecord(int(T.INPUT), 0, v_nr - total)

    env: dict[str, int] = {}
    base = 0
    while True:
        q = base + tss(node)  # id of the current subcircuit's root
        if isinstance(node, Var):
            return GateRecord(int(T.CONST), 0, env[node.name])
        if isinstance(node, Const):
            return GateRecord(int(T.CONST), 0, node.value)
        if isinstance(node, (Add, Mul, IndexEq, NumEq, NumLt)):
            sl = tss(node.left)
            if v_nr == q:
                gtype = {Add: T.ADD, Mul: T.MUL, IndexEq: T.EQ, NumEq: T.EQ, NumLt: T.LT}[type(node)]
                return _record(gtype, [base + sl, q - 1], p_idx)
            if v_nr > base + sl:
                base += sl
                node = node.right
            else:
                node = node.left
            continue
        if isinstance(node, Sign):
            if v_nr == q:
                return _record(T.SIGN, [q - 1], p_idx)
            node = node.arg
            continue
        if isinstance(node, Char):
            node = node.formula
            continue
        if isinstance(node, Not):
            if v_nr == q:
                return _record(T.SUB, [base + 1, q - 1], p_idx)
            if v_nr == q - 1:
                return _record(T.SIGN, [q - 2], p_idx)
            if v_nr == base + 1:
                return GateRecord(int(T.CONST), 0, 1)
            base += 1
            node = node.arg
            continue
        if isinstance(node, (And, Or)):
            sl, sr = tss(node.left), tss(node.right)
            if v_nr == q:
                return _record(T.SIGN, [q - 1], p_idx)
            if v_nr == q - 1:
                return _record(T.MUL if isinstance(node, And) else T.ADD, [base + sl, base + sl + sr], p_idx)
            if v_nr > base + sl:
                base += sl
                node = node.right
            else:
                node = node.left
            continue
        if isinstance(node, (Exists, Forall, Sum, Prod)):
            quantifier = isinstance(node, (Exists, Forall))
            if quantifier and not tss.binds(node):
                node = node.body
                continue
            s = tss(node.body)
            fan = T.ADD if isinstance(node, (Exists, Sum)) else T.MUL
            top = q - 1 if quantifier else q
            if quantifier and v_nr == q:
                return _record(T.SIGN, [q - 1], p_idx)
            if v_nr == top:
                return _record(fan, _Stride(base, s, u), p_idx)
            k = (v_nr - base - 1) // s
            env[node.var] = k
            base += k * s
            node = node.body
            continue
        if isinstance(node, APPLICATIONS):
            ell = len(node.args)
            m = block_size(tss, node)
            count = u ** ell
            if v_nr == q:
                return _record(T.ADD, _Stride(base, m, count), p_idx)
            j = (v_nr - base - 1) // m
            start = base + j * m
            tup = _digits(j, u, ell)
            if v_nr == start + m:
                preds = []
                pos = start
                for h in node.args:
                    pos += tss(h) + 2
                    preds.append(pos)
                preds.append(_value_id(node, tup, start + m - 1, total, sig, u))
                return _record(T.MUL, preds, p_idx)
            if v_nr == start + m - 1:
                if isinstance(node, (AuxIndexApp, AuxNumApp)):
                    if arb is None or node.symbol not in arb:
                        raise MissingArbTableError(f"no Arb table for auxiliary symbol {node.symbol!r}")
                    return GateRecord(int(T.CONST), 0, arb[node.symbol][table_index(tup, u)])
                return NO_GATE  # input slot
            pos = start
            for r, h in enumerate(node.args):
                sh = tss(h)
                if v_nr <= pos + sh + 2:
                    break
                pos += sh + 2
            if v_nr == pos + 1:
                return GateRecord(int(T.CONST), 0, tup[r])
            if v_nr == pos + sh + 2:
                return _record(T.EQ, [pos + 1, pos + 1 + sh], p_idx)
            base = pos + 1
            node = h
            continue
        raise CompileError(f"cannot locate gates of {type(node).__name__}")


def _value_id(app, tup, slot: int, total: int, sig: Signature, u: int) -> int:
    if isinstance(app, (AuxIndexApp, AuxNumApp)):
        return slot
    return total + input_position(sig, u, app.symbol, tup)


def _digits(j: int, u: int, ell: int) -> tuple[int, ...]:
    out = []
    for _ in range(ell):
        j, d = divmod(j, u)
        out.append(d)
    return tuple(reversed(out))
