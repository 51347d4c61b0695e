"""Formula rewrites: eliminating max terms and absorbing sums/products.

``eliminate_max`` replaces every ``max_i F`` by a witness variable: an atom
``A[max_i F]`` becomes ``exists x. forall y. (F[x] >= F[y]) & A[F[x]]``.
Atoms are rewritten outermost max first and the result is rewritten again,
so a nested max that depends on the outer bound variable gets its own
witness inside the comparison that needs it.

``absorb_sums`` moves each ``sum_i t`` / ``prod_i t`` (innermost first) into
a fresh auxiliary function symbol whose table ``build_aux_interpretation``
fills in from the structure.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import RealCircError
from .logic import (
    AuxNumApp, Char, Exists, Forall, Formula, IndexEq, Max, Node, NumberTerm, NumEq, NumLt,
    Prod, Signature, Sum, Var, big_and, children, fresh_name, free_vars, geq, map_children,
    substitute, variables,
)
from .semantics import Evaluator
from .structure import ArbInterpretation, RStructure, all_tuples


class UnsupportedMaxError(RealCircError, ValueError):
    """A max term depends on a variable bound by an enclosing sum or product."""


def eliminate_max(phi: Formula) -> Formula:
    """Return an equivalent formula without Max nodes."""
    taken = variables(phi)
    return _MaxEliminator(taken).formula(phi)


class _MaxEliminator:
    def __init__(self, taken: set[str]):
        self.taken = taken

    def formula(self, phi: Node) -> Node:
        if isinstance(phi, IndexEq):
            return phi
        if isinstance(phi, (NumEq, NumLt)):
            return self.atom(phi)
        return map_children(phi, self.formula)

    def clean_chars(self, t: Node) -> Node:
        if isinstance(t, Char):
            return Char(self.formula(t.formula))
        return map_children(t, self.clean_chars)

    def atom(self, atom: Formula) -> Formula:
        atom = self.clean_chars(atom)
        found: list[Max] = []
        for side in (atom.left, atom.right):
            self.outer_maxes(side, frozenset(), found)
        if not found:
            return atom
        witnesses: dict[int, NumberTerm] = {}
        prefix: list[tuple[str, str]] = []
        comparisons: list[Formula] = []
        for m in found:
            if id(m) in witnesses:
                continue
            x = fresh_name("x", self.taken)
            y = fresh_name("y", self.taken)
            at_x = substitute(m.body, m.var, Var(x))
            at_y = substitute(m.body, m.var, Var(y))
            witnesses[id(m)] = at_x
            prefix.append((x, y))
            comparisons.append(geq(at_x, at_y))
        hat = map_children(atom, lambda side: self.replace(side, witnesses))
        body = big_and(list(reversed(comparisons)) + [hat])
        for x, y in reversed(prefix):
            body = Exists(x, Forall(y, body))
        # Max nodes nested inside the witnessed bodies are handled by recursion.
        return self.formula(body)

    def outer_maxes(self, t: Node, bound: frozenset[str], found: list[Max]) -> None:
        if isinstance(t, Max):
            clash = free_vars(t) & bound
            if clash:
                raise UnsupportedMaxError(
                    f"max over {t.var!r} depends on {sorted(clash)} bound by an enclosing sum/product; "
                    "absorb the sum first")
            found.append(t)
            return
        if isinstance(t, Char):
            return
        if isinstance(t, (Sum, Prod)):
            self.outer_maxes(t.body, bound | {t.var}, found)
            return
        for c in children(t):
            self.outer_maxes(c, bound, found)

    def replace(self, t: Node, witnesses: dict[int, NumberTerm]) -> Node:
        if id(t) in witnesses:
            return witnesses[id(t)]
        if isinstance(t, Char):
            return t
        return map_children(t, lambda c: self.replace(c, witnesses))


@dataclass(frozen=True)
class AuxDef:
    """Definition of a fresh symbol introduced by ``absorb_sums``.

    ``name(params) := sum/prod over var of body``.
    """

    name: str
    params: tuple[str, ...]
    var: str
    body: NumberTerm
    kind: str  # "sum" or "prod"

    @property
    def arity(self) -> int:
        return len(self.params)

    def term(self) -> NumberTerm:
        return (Sum if self.kind == "sum" else Prod)(self.var, self.body)


def absorb_sums(phi: Formula) -> tuple[Formula, list[AuxDef]]:
    """Replace every Sum/Prod node by an application of a fresh aux symbol.

    Fresh names are ``sum$<k>`` / ``prod$<k>`` with one counter in rewrite
    order; ``$`` cannot occur in user identifiers.
    """
    defs: list[AuxDef] = []
    memo: dict[int, Node] = {}

    def go(n: Node) -> Node:
        key = id(n)
        if key in memo:
            return memo[key]
        rebuilt = map_children(n, go)
        if isinstance(rebuilt, (Sum, Prod)):
            kind = "sum" if isinstance(rebuilt, Sum) else "prod"
            params = tuple(sorted(free_vars(rebuilt.body) - {rebuilt.var}))
            name = f"{kind}${len(defs) + 1}"
            defs.append(AuxDef(name, params, rebuilt.var, rebuilt.body, kind))
            rebuilt = AuxNumApp(name, tuple(Var(p) for p in params))
        memo[key] = rebuilt
        return rebuilt

    return go(phi), defs


def aux_signature(sig: Signature, defs: list[AuxDef]) -> Signature:
    return sig.with_aux((d.name, d.arity, "number") for d in defs)


def build_aux_interpretation(defs: list[AuxDef], D: RStructure,
                             I: ArbInterpretation | None = None) -> ArbInterpretation:
    """Tabulate each fresh symbol over all argument tuples, inner definitions first."""
    current = I if I is not None else ArbInterpretation(D.u)
    for d in defs:
        ev = Evaluator(D, current)
        term = d.term()
        table = [ev.number(term, dict(zip(d.params, args))) for args in all_tuples(D.u, d.arity)]
        current = current.extended({d.name: table})
    return current
