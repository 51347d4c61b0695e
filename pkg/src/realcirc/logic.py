"""Signatures and the abstract syntax of first-order logic over the reals.

Formulas talk about a finite universe ``{0, ..., u-1}`` through two kinds of
terms: *index terms* denote universe elements, *number terms* denote exact
rationals.  Every node is an immutable dataclass so ASTs can be shared freely,
including as DAGs (the circuit-to-formula direction relies on that).
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Union

from .errors import WellFormednessError

INDEX = "index"
NUMBER = "number"


@dataclass(frozen=True)
class Symbol:
    name: str
    arity: int
    # "skeleton", "number", "aux-index" or "aux-number"
    role: str

    @property
    def index_valued(self) -> bool:
        return self.role in ("skeleton", "aux-index")

    @property
    def is_aux(self) -> bool:
        return self.role.startswith("aux")


@dataclass(frozen=True)
class Signature:
    """Ordered symbol lists ``(L_s, L_f, L_a)``.

    ``skeleton`` and ``numbers`` hold ``(name, arity)`` pairs; ``aux`` holds
    ``(name, arity, kind)`` with kind ``"index"`` or ``"number"``.  The order
    of each list is the order used by the encoding.
    """

    skeleton: tuple[tuple[str, int], ...] = ()
    numbers: tuple[tuple[str, int], ...] = ()
    aux: tuple[tuple[str, int, str], ...] = ()
    _table: dict = field(default=None, init=False, repr=False, compare=False, hash=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "skeleton", tuple((str(n), int(a)) for n, a in self.skeleton))
        object.__setattr__(self, "numbers", tuple((str(n), int(a)) for n, a in self.numbers))
        object.__setattr__(self, "aux", tuple((str(n), int(a), str(k)) for n, a, k in self.aux))
        table: dict[str, Symbol] = {}
        entries = [(n, a, "skeleton") for n, a in self.skeleton]
        entries += [(n, a, "number") for n, a in self.numbers]
        for n, a, kind in self.aux:
            if kind not in (INDEX, NUMBER):
                raise WellFormednessError(f"aux symbol {n!r} has unknown kind {kind!r}")
            entries.append((n, a, f"aux-{kind}"))
        for n, a, role in entries:
            if a < 0:
                raise WellFormednessError(f"symbol {n!r} has negative arity")
            if n in table:
                raise WellFormednessError(f"symbol {n!r} declared twice")
            table[n] = Symbol(n, a, role)
        object.__setattr__(self, "_table", table)

    def __contains__(self, name: str) -> bool:
        return name in self._table

    def symbol(self, name: str) -> Symbol:
        try:
            return self._table[name]
        except KeyError:
            raise WellFormednessError(f"undeclared symbol {name!r}") from None

    def get(self, name: str) -> Symbol | None:
        return self._table.get(name)

    @property
    def symbols(self) -> tuple[Symbol, ...]:
        return tuple(self._table.values())

    @property
    def encoded(self) -> tuple[tuple[str, int], ...]:
        """Symbols that appear in ``enc(D)``: skeleton functions first, then L_f."""
        return self.skeleton + self.numbers

    def with_aux(self, extra: Iterable[tuple[str, int, str]]) -> Signature:
        return Signature(self.skeleton, self.numbers, self.aux + tuple(extra))


class Node:
    __slots__ = ()


class IndexTerm(Node):
    __slots__ = ()


class NumberTerm(Node):
    __slots__ = ()


class Formula(Node):
    __slots__ = ()


def _as_fraction(value) -> Fraction:
    if isinstance(value, float):
        raise TypeError("number constants must be exact rationals, not floats")
    return Fraction(value)


# -- index terms ------------------------------------------------------------

@dataclass(frozen=True)
class Var(IndexTerm):
    name: str


@dataclass(frozen=True)
class SkeletonApp(IndexTerm):
    symbol: str
    args: tuple[IndexTerm, ...] = ()


@dataclass(frozen=True)
class AuxIndexApp(IndexTerm):
    symbol: str
    args: tuple[IndexTerm, ...] = ()


# -- number terms -----------------------------------------------------------

@dataclass(frozen=True)
class Const(NumberTerm):
    value: Fraction

    def __post_init__(self) -> None:
        object.__setattr__(self, "value", _as_fraction(self.value))


@dataclass(frozen=True)
class NumApp(NumberTerm):
    symbol: str
    args: tuple[IndexTerm, ...] = ()


@dataclass(frozen=True)
class AuxNumApp(NumberTerm):
    symbol: str
    args: tuple[IndexTerm, ...] = ()


@dataclass(frozen=True)
class Add(NumberTerm):
    left: NumberTerm
    right: NumberTerm


@dataclass(frozen=True)
class Mul(NumberTerm):
    left: NumberTerm
    right: NumberTerm


@dataclass(frozen=True)
class Sign(NumberTerm):
    arg: NumberTerm


@dataclass(frozen=True)
class Sum(NumberTerm):
    var: str
    body: NumberTerm


@dataclass(frozen=True)
class Prod(NumberTerm):
    var: str
    body: NumberTerm


@dataclass(frozen=True)
class Max(NumberTerm):
    var: str
    body: NumberTerm


@dataclass(frozen=True)
class Char(NumberTerm):
    """Characteristic number term: 1 if the formula holds, 0 otherwise."""

    formula: Formula


# -- formulas ---------------------------------------------------------------

@dataclass(frozen=True)
class IndexEq(Formula):
    left: IndexTerm
    right: IndexTerm


@dataclass(frozen=True)
class NumEq(Formula):
    left: NumberTerm
    right: NumberTerm


@dataclass(frozen=True)
class NumLt(Formula):
    left: NumberTerm
    right: NumberTerm


@dataclass(frozen=True)
class Not(Formula):
    arg: Formula


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Implies(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Iff(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Exists(Formula):
    var: str
    body: Formula


@dataclass(frozen=True)
class Forall(Formula):
    var: str
    body: Formula


AnyNode = Union[Formula, IndexTerm, NumberTerm]

APPLICATIONS = (SkeletonApp, AuxIndexApp, NumApp, AuxNumApp)
TERM_BINDERS = (Sum, Prod, Max)
QUANTIFIERS = (Exists, Forall)
BINDERS = TERM_BINDERS + QUANTIFIERS
ATOMS = (IndexEq, NumEq, NumLt)
BINARY_CONNECTIVES = (And, Or, Implies, Iff)


_FIELDS: dict[type, tuple[str, ...]] = {}


def _field_names(node: Node) -> tuple[str, ...]:
    names = _FIELDS.get(type(node))
    if names is None:
        names = _FIELDS[type(node)] = tuple(f.name for f in dataclasses.fields(node))
    return names


def children(node: Node) -> tuple[Node, ...]:
    """Direct sub-nodes in field order."""
    out: list[Node] = []
    for name in _field_names(node):
        value = getattr(node, name)
        if isinstance(value, Node):
            out.append(value)
        elif isinstance(value, tuple):
            out.extend(value)
    return tuple(out)


def map_children(node: Node, fn) -> Node:
    """Rebuild ``node`` with ``fn`` applied to every direct sub-node."""
    changes = {}
    for name in _field_names(node):
        value = getattr(node, name)
        if isinstance(value, Node):
            new = fn(value)
            if new is not value:
                changes[name] = new
        elif isinstance(value, tuple):
            new = tuple(fn(v) for v in value)
            if any(a is not b for a, b in zip(new, value)):
                changes[name] = new
    return dataclasses.replace(node, **changes) if changes else node


def walk(node: Node) -> Iterator[Node]:
    """Pre-order traversal visiting each distinct (by identity) node once."""
    seen: set[int] = set()
    stack = [node]
    while stack:
        n = stack.pop()
        if id(n) in seen:
            continue
        seen.add(id(n))
        yield n
        stack.extend(reversed(children(n)))


def contains(node: Node, kinds) -> bool:
    return any(isinstance(n, kinds) for n in walk(node))


def free_vars(node: Node) -> frozenset[str]:
    """Free variables; quantifiers and sum/prod/max bind their variable."""
    memo: dict[int, frozenset[str]] = {}

    def fv(n: Node) -> frozenset[str]:
        key = id(n)
        if key in memo:
            return memo[key]
        if isinstance(n, Var):
            result = frozenset((n.name,))
        elif isinstance(n, BINDERS):
            result = fv(n.body) - {n.var}
        else:
            result = frozenset().union(*(fv(c) for c in children(n)))
        memo[key] = result
        return result

    return fv(node)


def variables(node: Node) -> set[str]:
    """Every variable name occurring in ``node``, bound or free."""
    names: set[str] = set()
    for n in walk(node):
        if isinstance(n, Var):
            names.add(n.name)
        elif isinstance(n, BINDERS):
            names.add(n.var)
    return names


def fresh_name(base: str, taken: set[str]) -> str:
    k = 1
    while f"{base}{k}" in taken:
        k += 1
    name = f"{base}{k}"
    taken.add(name)
    return name


def substitute(node: Node, var: str, term: IndexTerm) -> Node:
    """Replace free occurrences of ``var`` by ``term``.

    The caller guarantees that no binder inside ``node`` captures a variable
    of ``term`` (all rewrites here substitute fresh names).
    """
    memo: dict[int, Node] = {}

    def go(n: Node) -> Node:
        key = id(n)
        if key in memo:
            return memo[key]
        if isinstance(n, Var):
            result = term if n.name == var else n
        elif isinstance(n, BINDERS) and n.var == var:
            result = n
        else:
            result = map_children(n, go)
        memo[key] = result
        return result

    return go(node)


def check_wellformed(node: Node, sig: Signature) -> None:
    """Raise WellFormednessError on unknown symbols, wrong kinds or arities."""
    expected_role = {
        SkeletonApp: ("skeleton",),
        AuxIndexApp: ("aux-index",),
        NumApp: ("number",),
        AuxNumApp: ("aux-number",),
    }
    for n in walk(node):
        if isinstance(n, APPLICATIONS):
            sym = sig.symbol(n.symbol)
            if sym.role not in expected_role[type(n)]:
                raise WellFormednessError(
                    f"{type(n).__name__} uses {sym.role} symbol {n.symbol!r}")
            if len(n.args) != sym.arity:
                raise WellFormednessError(
                    f"symbol {n.symbol!r} has arity {sym.arity}, applied to {len(n.args)} arguments")


def shadowed_variables(node: Node) -> list[str]:
    """Names re-bound inside the scope of an enclosing binder of the same name."""
    found: list[str] = []

    def go(n: Node, bound: frozenset[str]) -> None:
        if isinstance(n, BINDERS):
            if n.var in bound:
                found.append(n.var)
            go(n.body, bound | {n.var})
            return
        for c in children(n):
            go(c, bound)

    go(node, frozenset())
    return found


# -- printing ---------------------------------------------------------------

def _fmt_const(value: Fraction) -> str:
    return str(value)


def print_term(t: Node) -> str:
    if isinstance(t, Var):
        return t.name
    if isinstance(t, APPLICATIONS):
        return f"{t.symbol}({', '.join(print_term(a) for a in t.args)})"
    if isinstance(t, Const):
        return _fmt_const(t.value)
    if isinstance(t, Add):
        return f"({print_term(t.left)} + {print_term(t.right)})"
    if isinstance(t, Mul):
        return f"({print_term(t.left)} * {print_term(t.right)})"
    if isinstance(t, Sign):
        return f"sign({print_term(t.arg)})"
    if isinstance(t, TERM_BINDERS):
        return f"{type(t).__name__.lower()} {t.var} ({print_term(t.body)})"
    if isinstance(t, Char):
        return f"chi[{print_formula(t.formula)}]"
    raise TypeError(f"not a term: {t!r}")


_BINOP = {And: "&", Or: "|", Implies: "->", Iff: "<->"}


def print_formula(phi: Formula) -> str:
    """Canonical text; ``parse_formula(print_formula(phi), sig) == phi``."""
    return _pf(phi, top=True)


def _pf(phi: Node, top: bool = False) -> str:
    if isinstance(phi, IndexEq):
        return f"({print_term(phi.left)} == {print_term(phi.right)})"
    if isinstance(phi, NumEq):
        return f"({print_term(phi.left)} = {print_term(phi.right)})"
    if isinstance(phi, NumLt):
        return f"({print_term(phi.left)} < {print_term(phi.right)})"
    if isinstance(phi, Not):
        return "!" + _pf(phi.arg)
    if isinstance(phi, BINARY_CONNECTIVES):
        return f"({_pf(phi.left)} {_BINOP[type(phi)]} {_pf(phi.right)})"
    if isinstance(phi, QUANTIFIERS):
        text = f"{type(phi).__name__.lower()} {phi.var}. {_pf(phi.body, top=True)}"
        return text if top else f"({text})"
    raise TypeError(f"not a formula: {phi!r}")


def print_node(node: Node) -> str:
    return print_formula(node) if isinstance(node, Formula) else print_term(node)


# -- small constructors used by the rewrites ---------------------------------

def geq(a: NumberTerm, b: NumberTerm) -> Formula:
    """``a >= b`` spelled with the available atoms."""
    return Or(NumLt(b, a), NumEq(a, b))


def big_and(parts: list[Formula]) -> Formula:
    result = parts[-1]
    for p in reversed(parts[:-1]):
        result = And(p, result)
    return result
