import itertools
import random

import pytest

from realcirc.generate import FormulaShape, random_formula, random_signature
from realcirc.logic import (
    Add, And, AuxNumApp, Const, Exists, Forall, Max, Mul, NumApp, NumEq, NumLt, Prod, Signature, Sum, Var,
    contains, geq,
)
from realcirc.rewrite import (
    UnsupportedMaxError, absorb_sums, aux_signature, build_aux_interpretation, eliminate_max,
)
from realcirc.semantics import satisfies
from realcirc.structure import binary_structures, random_structure

from helpers import structure

F = Signature(numbers=(("f", 1),))
F2 = Signature(numbers=(("f", 2),))
FG = Signature(numbers=(("f", 1), ("g", 2)))


def f(*args):
    return NumApp("f", tuple(Var(a) for a in args))


def g(*args):
    return NumApp("g", tuple(Var(a) for a in args))


class TestEliminateMax:
    def test_single_max(self):
        phi = NumEq(Max("i", f("i")), Const(5))
        expected = Exists("x1", Forall("y1", And(geq(f("x1"), f("y1")), NumEq(f("x1"), Const(5)))))
        assert eliminate_max(phi) == expected

    def test_max_free_unchanged(self):
        phi = Forall("x", NumLt(Const(0), f("x")))
        assert eliminate_max(phi) == phi

    def test_nested_max_equivalent(self):
        phi = NumLt(Const(0), Max("i", Max("j", NumApp("f", (Var("i"), Var("j"))))))
        out = eliminate_max(phi)
        assert not contains(out, Max)
        for u in range(1, 4):
            for D in binary_structures(F2, u):
                assert satisfies(out, D) == satisfies(phi, D)
        rng = random.Random(0)
        for _ in range(200):
            D = random_structure(F2, 4, rng)
            assert satisfies(out, D) == satisfies(phi, D)

    def test_inner_max_depends_on_outer_witness(self):
        # rows (1, 1) and (0, 5): with z = 0 the outer max is 0 + 5 on row 1,
        # which hoisting the inner max independently would miss
        inner = Max("j", NumApp("f", (Var("i"), Var("j"))))
        t = Max("i", Add(NumApp("f", (Var("i"), Var("z"))), inner))
        phi = Exists("z", NumEq(t, Const(5)))
        D = structure(F2, 2, f=(1, 1, 0, 5))
        assert satisfies(phi, D)
        assert satisfies(eliminate_max(phi), D)

    def test_max_under_sum_rejected(self):
        phi = NumEq(Sum("k", Max("i", NumApp("f", (Var("i"), Var("k"))))), Const(0))
        with pytest.raises(UnsupportedMaxError):
            eliminate_max(phi)

    def test_random_soundness(self):
        rng = random.Random(11)
        shape = FormulaShape(max_depth=3, max_quantifiers=2, max_terms=True)
        for _ in range(150):
            sig = random_signature(rng)
            phi = random_formula(rng, sig, shape)
            out = eliminate_max(phi)
            assert not contains(out, Max)
            for _ in range(3):
                D = random_structure(sig, rng.randint(1, 3), rng)
                assert satisfies(out, D) == satisfies(phi, D), phi


class TestAbsorbSums:
    def test_closed_sum(self):
        phi = NumEq(Sum("i", f("i")), Const(6))
        out, defs = absorb_sums(phi)
        assert out == NumEq(AuxNumApp("sum$1", ()), Const(6))
        assert len(defs) == 1 and defs[0].arity == 0 and defs[0].kind == "sum"

    def test_no_sums(self):
        phi = Exists("x", NumEq(f("x"), Const(1)))
        out, defs = absorb_sums(phi)
        assert out == phi and defs == []

    def test_nested_inner_first(self):
        phi = NumEq(Sum("i", Mul(f("i"), Sum("j", g("i", "j")))), Const(2))
        out, defs = absorb_sums(phi)
        assert [(d.name, d.params) for d in defs] == [("sum$1", ("i",)), ("sum$2", ())]
        assert not contains(out, Sum)
        for u in range(1, 4):
            rng = random.Random(u)
            for _ in range(30):
                D = random_structure(FG, u, rng)
                I = build_aux_interpretation(defs, D)
                assert satisfies(out, D, I) == satisfies(phi, D)

    def test_aux_signature(self):
        _, defs = absorb_sums(NumEq(Prod("i", f("i")), Const(6)))
        assert ("prod$1", 0, "number") in aux_signature(F, defs).aux


class TestAuxTables:
    def test_sum_table(self):
        _, defs = absorb_sums(NumEq(Sum("i", f("i")), Const(0)))
        I = build_aux_interpretation(defs, structure(F, 3, f=(2, 2, 2)))
        assert I["sum$1"] == (6,)

    def test_prod_table(self):
        _, defs = absorb_sums(NumEq(Prod("i", f("i")), Const(0)))
        I = build_aux_interpretation(defs, structure(F, 3, f=(1, 2, 3)))
        assert I["prod$1"] == (6,)

    def test_unary_table(self):
        sig = Signature(numbers=(("g", 2),))
        phi = Forall("w", NumEq(Sum("i", g("i", "w")), Const(0)))
        _, defs = absorb_sums(phi)
        D = structure(sig, 2, g=tuple(i * w for i, w in itertools.product(range(2), repeat=2)))
        assert build_aux_interpretation(defs, D)["sum$1"] == (0, 1)
