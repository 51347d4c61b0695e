"""Seeded random signatures and formulas for property tests and the CLI.

Everything draws from a caller-supplied ``random.Random`` in a fixed order,
so a seed reproduces the same objects on every run.  Bound variables along
one branch get distinct names ``v1, v2, ...`` so nothing is shadowed.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from .logic import (
    Add, And, Char, Const, Exists, Forall, Formula, Iff, Implies, IndexEq, IndexTerm, Max, Mul,
    Not, NumApp, NumberTerm, NumEq, NumLt, Or, Prod, Sign, Signature, SkeletonApp, Sum, Var,
)


def random_signature(rng: random.Random, max_symbols: int = 2, max_arity: int = 2,
                     skeleton_chance: float = 0.0) -> Signature:
    """Between 1 and ``max_symbols`` symbols named f, g, h, ... (skeleton ones s1, s2, ...)."""
    count = rng.randint(1, max_symbols)
    numbers, skeleton = [], []
    for k in range(count):
        arity = rng.randint(0, max_arity)
        if k > 0 and rng.random() < skeleton_chance:
            skeleton.append((f"s{len(skeleton) + 1}", max(arity, 1)))
        else:
            numbers.append(("fgh"[len(numbers)] if len(numbers) < 3 else f"f{len(numbers)}", arity))
    return Signature(tuple(skeleton), tuple(numbers))


@dataclass
class FormulaShape:
    """Knobs for ``random_formula``."""

    max_depth: int = 4          # connective / term nesting
    max_quantifiers: int = 3    # quantifier depth bound
    sums: bool = False          # allow sum/prod terms
    max_terms: bool = False     # allow max terms
    char: bool = False          # allow chi[...] terms
    implications: bool = True   # allow -> and <->
    constants: tuple = (-2, -1, 0, 1, 2)
    max_binders: int = 4        # bound on variables in scope


class _Gen:
    def __init__(self, rng: random.Random, sig: Signature, shape: FormulaShape):
        self.rng = rng
        self.sig = sig
        self.shape = shape

    def fresh(self, scope: tuple[str, ...]) -> str:
        return f"v{len(scope) + 1}"

    def formula(self, depth: int, scope: tuple[str, ...], quants: int) -> Formula:
        rng, s = self.rng, self.shape
        if depth <= 0 or rng.random() < 0.25:
            return self.atom(depth, scope, quants)
        choices = ["not", "and", "or"]
        if s.implications:
            choices += ["implies", "iff"]
        if quants > 0 and len(scope) < s.max_binders:
            choices += ["exists", "forall"] * 3
        kind = rng.choice(choices)
        if kind == "not":
            return Not(self.formula(depth - 1, scope, quants))
        if kind in ("exists", "forall"):
            var = self.fresh(scope)
            cls = Exists if kind == "exists" else Forall
            return cls(var, self.formula(depth - 1, scope + (var,), quants - 1))
        cls = {"and": And, "or": Or, "implies": Implies, "iff": Iff}[kind]
        return cls(self.formula(depth - 1, scope, quants), self.formula(depth - 1, scope, quants))

    def atom(self, depth: int, scope, quants) -> Formula:
        rng = self.rng
        if scope and rng.random() < 0.2:
            return IndexEq(self.iterm(scope, 1), self.iterm(scope, 1))
        cls = rng.choice([NumEq, NumLt])
        return cls(self.nterm(2, scope, quants), self.nterm(2, scope, quants))

    def iterm(self, scope, depth: int) -> IndexTerm:
        rng = self.rng
        if self.sig.skeleton and depth > 0 and rng.random() < 0.3:
            name, arity = rng.choice(self.sig.skeleton)
            return SkeletonApp(name, tuple(self.iterm(scope, depth - 1) for _ in range(arity)))
        return Var(rng.choice(scope))

    def application(self, scope) -> NumberTerm | None:
        usable = [(n, a) for n, a in self.sig.numbers if a == 0 or scope]
        if not usable:
            return None
        name, arity = self.rng.choice(usable)
        return NumApp(name, tuple(self.iterm(scope, 1) for _ in range(arity)))

    def constant(self) -> Const:
        return Const(Fraction(self.rng.choice(self.shape.constants)))

    def nterm(self, depth: int, scope, quants) -> NumberTerm:
        rng, s = self.rng, self.shape
        if depth <= 0 or rng.random() < 0.4:
            if rng.random() < 0.7:
                app = self.application(scope)
                if app is not None:
                    return app
            return self.constant()
        choices = ["add", "mul", "sign"]
        if len(scope) < s.max_binders:
            if s.sums:
                choices += ["sum", "prod"]
            if s.max_terms:
                choices += ["max", "max"]
        if s.char:
            choices.append("chi")
        kind = rng.choice(choices)
        if kind == "add":
            return Add(self.nterm(depth - 1, scope, quants), self.nterm(depth - 1, scope, quants))
        if kind == "mul":
            return Mul(self.nterm(depth - 1, scope, quants), self.nterm(depth - 1, scope, quants))
        if kind == "sign":
            return Sign(self.nterm(depth - 1, scope, quants))
        if kind == "chi":
            return Char(self.formula(1, scope, min(quants, 1)))
        var = self.fresh(scope)
        cls = {"sum": Sum, "prod": Prod, "max": Max}[kind]
        return cls(var, self.nterm(depth - 1, scope + (var,), quants))


def random_formula(rng: random.Random, sig: Signature, shape: FormulaShape | None = None,
                   free: tuple[str, ...] = ()) -> Formula:
    """A random formula whose free variables are among ``free`` (a sentence by default)."""
    shape = shape or FormulaShape()
    return _Gen(rng, sig, shape).formula(shape.max_depth, tuple(free), shape.max_quantifiers)


def random_term(rng: random.Random, sig: Signature, shape: FormulaShape | None = None,
                free: tuple[str, ...] = ()) -> NumberTerm:
    """A random number term over the variables in ``free``."""
    shape = shape or FormulaShape()
    return _Gen(rng, sig, shape).nterm(shape.max_depth, tuple(free), shape.max_quantifiers)
