"""Tarskian semantics of formulas over an R-structure.

This is the ground truth every circuit construction is checked against.
Each AST node is translated once into a Python closure over a mutable
variable environment; closures are cached by node identity so shared
sub-terms (DAG-shaped ASTs) are translated once.  Products stop at the
first zero factor and connectives at the first deciding operand; that is
exact because every term denotes a finite rational.
"""

from __future__ import annotations

from typing import Callable, Mapping

from .errors import StructureError, UnboundVariableError
from .logic import (
    Add, And, AuxIndexApp, AuxNumApp, Char, Const, Exists, Forall, Formula, Iff, Implies,
    IndexEq, IndexTerm, Max, Mul, Node, Not, NumApp, NumberTerm, NumEq, NumLt, Or, Prod,
    Sign, SkeletonApp, Sum, Var, free_vars,
)
from .structure import ArbInterpretation, RStructure, exact

Env = dict
_MISSING = object()


def sign(x) -> int:
    return 1 if x > 0 else (-1 if x < 0 else 0)


class Evaluator:
    """Evaluate nodes of any kind against a fixed structure and Arb tables."""

    def __init__(self, D: RStructure, I: ArbInterpretation | None = None):
        self.D = D
        self.u = D.u
        self.I = I if I is not None else ArbInterpretation(D.u)
        self._cache: dict[int, tuple[Node, Callable]] = {}

    # public entry points -----------------------------------------------------
    def index(self, h: IndexTerm, a: Mapping[str, int] | None = None) -> int:
        return self._run(h, a)

    def number(self, t: NumberTerm, a: Mapping[str, int] | None = None):
        return self._run(t, a)

    def holds(self, phi: Formula, a: Mapping[str, int] | None = None) -> bool:
        return self._run(phi, a)

    def _run(self, node: Node, a):
        env = dict(a or {})
        missing = free_vars(node) - env.keys()
        if missing:
            raise UnboundVariableError(sorted(missing)[0])
        for name, value in env.items():
            if not (0 <= value < self.u):
                raise StructureError(f"variable {name!r} assigned {value}, outside the universe")
        return self.closure(node)(env)

    # translation -------------------------------------------------------------
    def closure(self, node: Node) -> Callable[[Env], object]:
        hit = self._cache.get(id(node))
        if hit is not None and hit[0] is node:
            return hit[1]
        fn = self._translate(node)
        self._cache[id(node)] = (node, fn)
        return fn

    def _table(self, symbol: str, aux: bool) -> tuple:
        if aux:
            if symbol not in self.I:
                raise StructureError(f"no interpretation for auxiliary symbol {symbol!r}")
            return self.I[symbol]
        return self.D.table(symbol)

    def _lookup(self, table: tuple, args) -> Callable[[Env], object]:
        u = self.u
        fns = [self.closure(h) for h in args]
        if not fns:
            value = table[0]
            return lambda env: value
        if len(fns) == 1:
            (f0,) = fns
            return lambda env: table[f0(env)]
        if len(fns) == 2:
            f0, f1 = fns
            return lambda env: table[f0(env) * u + f1(env)]

        def lookup(env):
            idx = 0
            for f in fns:
                idx = idx * u + f(env)
            return table[idx]
        return lookup

    def _bind(self, var: str, body: Callable, combine: str) -> Callable[[Env], object]:
        u = self.u

        def run(env):
            saved = env.get(var, _MISSING)
            try:
                if combine == "sum":
                    total = 0
                    for value in range(u):
                        env[var] = value
                        total += body(env)
                    return total
                if combine == "prod":
                    total = 1
                    for value in range(u):
                        env[var] = value
                        total *= body(env)
                        if total == 0:
                            break
                    return total
                if combine == "max":
                    best = None
                    for value in range(u):
                        env[var] = value
                        x = body(env)
                        if best is None or x > best:
                            best = x
                    return best
                if combine == "exists":
                    for value in range(u):
                        env[var] = value
                        if body(env):
                            return True
                    return False
                for value in range(u):  # forall
                    env[var] = value
                    if not body(env):
                        return False
                return True
            finally:
                if saved is _MISSING:
                    env.pop(var, None)
                else:
                    env[var] = saved
        return run

    def _translate(self, n: Node) -> Callable[[Env], object]:
        c = self.closure
        if isinstance(n, Var):
            name = n.name

            def var(env):
                try:
                    return env[name]
                except KeyError:
                    raise UnboundVariableError(name) from None
            return var
        if isinstance(n, (SkeletonApp, NumApp)):
            return self._lookup(self._table(n.symbol, aux=False), n.args)
        if isinstance(n, (AuxIndexApp, AuxNumApp)):
            return self._lookup(self._table(n.symbol, aux=True), n.args)
        if isinstance(n, Const):
            value = exact(n.value)
            return lambda env: value
        if isinstance(n, Add):
            l, r = c(n.left), c(n.right)
            return lambda env: l(env) + r(env)
        if isinstance(n, Mul):
            l, r = c(n.left), c(n.right)

            def mul(env):
                x = l(env)
                return 0 if x == 0 else x * r(env)
            return mul
        if isinstance(n, Sign):
            f = c(n.arg)
            return lambda env: sign(f(env))
        if isinstance(n, Sum):
            return self._bind(n.var, c(n.body), "sum")
        if isinstance(n, Prod):
            return self._bind(n.var, c(n.body), "prod")
        if isinstance(n, Max):
            return self._bind(n.var, c(n.body), "max")
        if isinstance(n, Char):
            f = c(n.formula)
            return lambda env: 1 if f(env) else 0
        if isinstance(n, (IndexEq, NumEq)):
            l, r = c(n.left), c(n.right)
            return lambda env: l(env) == r(env)
        if isinstance(n, NumLt):
            l, r = c(n.left), c(n.right)
            return lambda env: l(env) < r(env)
        if isinstance(n, Not):
            f = c(n.arg)
            return lambda env: not f(env)
        if isinstance(n, And):
            l, r = c(n.left), c(n.right)
            return lambda env: l(env) and r(env)
        if isinstance(n, Or):
            l, r = c(n.left), c(n.right)
            return lambda env: l(env) or r(env)
        if isinstance(n, Implies):
            l, r = c(n.left), c(n.right)
            return lambda env: (not l(env)) or r(env)
        if isinstance(n, Iff):
            l, r = c(n.left), c(n.right)
            return lambda env: bool(l(env)) == bool(r(env))
        if isinstance(n, Exists):
            return self._bind(n.var, c(n.body), "exists")
        if isinstance(n, Forall):
            return self._bind(n.var, c(n.body), "forall")
        raise TypeError(f"cannot evaluate {n!r}")


def eval_index_term(h: IndexTerm, D: RStructure, I: ArbInterpretation | None = None,
                    a: Mapping[str, int] | None = None) -> int:
    return Evaluator(D, I).index(h, a)


def eval_number_term(t: NumberTerm, D: RStructure, I: ArbInterpretation | None = None,
                     a: Mapping[str, int] | None = None):
    return Evaluator(D, I).number(t, a)


def satisfies(phi: Formula, D: RStructure, I: ArbInterpretation | None = None,
              a: Mapping[str, int] | None = None) -> bool:
    """``D, I, a |= phi`` with exact rational comparisons."""
    return bool(Evaluator(D, I).holds(phi, a))
