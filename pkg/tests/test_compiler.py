import random

import pytest

from realcirc.circuit import GateType as T, depth, evaluate, is_tree_like, tree_shape_size
from realcirc.compiler import (
    GateRecord, compile, compile_numbered, gate_oracle, query_circuit, tss_of,
)
from realcirc.errors import CompileError, FreeVariableError, MissingArbTableError, NoSolutionError, ShadowingError
from realcirc.generate import FormulaShape, random_formula, random_signature
from realcirc.logic import Const, Exists, Forall, NumApp, NumEq, NumLt, Signature, Var
from realcirc.normalize import eliminate_aux_gates
from realcirc.parser import parse_formula
from realcirc.semantics import satisfies
from realcirc.structure import ArbInterpretation, binary_structures, encode, encoded_length, random_structure

from helpers import structure

F = Signature(numbers=(("f", 1),))
F2 = Signature(numbers=(("f", 2),))


def decide(phi, sig, u, D, arb=None):
    C = eliminate_aux_gates(compile(phi, sig, u, arb))
    (out,) = evaluate(C, encode(D))
    assert out in (0, 1)
    return out == 1


class TestCompile:
    def test_exists(self):
        phi = parse_formula("exists x. f(x) = 5", F)
        assert decide(phi, F, 2, structure(F, 2, f=(3, 5)))
        assert not decide(phi, F, 2, structure(F, 2, f=(3, 4)))

    def test_tautology(self):
        phi = Forall("x", NumLt(Const(0), Const(1)))
        for u in (1, 2, 3):
            C = compile(phi, F, u)
            rng = random.Random(u)
            for _ in range(5):
                assert evaluate(C, [rng.randint(-5, 5) for _ in range(u)]) == [1]

    def test_symmetry_exhaustive(self):
        phi = parse_formula("forall x. forall y. f(x, y) = f(y, x)", F2)
        C = eliminate_aux_gates(compile(phi, F2, 2))
        seen = 0
        for D in binary_structures(F2, 2):
            seen += 1
            assert (evaluate(C, encode(D)) == [1]) == satisfies(phi, D)
        assert seen == 16

    def test_arb_symbols_read_constants(self):
        sig = F.with_aux([("a", 1, "number"), ("r", 1, "index")])
        phi = parse_formula("forall x. f(x) = a(r(x))", sig)
        arb = ArbInterpretation(2, {"a": (3, 5), "r": (1, 0)})
        assert decide(phi, sig, 2, structure(sig, 2, f=(5, 3)), arb)
        assert not decide(phi, sig, 2, structure(sig, 2, f=(3, 5)), arb)

    def test_skeleton_symbols(self):
        sig = Signature(skeleton=(("s", 1),), numbers=(("f", 1),))
        phi = parse_formula("forall x. f(s(x)) < f(x) | s(x) == x", sig)
        rng = random.Random(1)
        for u in (1, 2, 3):
            for _ in range(15):
                D = random_structure(sig, u, rng)
                assert decide(phi, sig, u, D) == satisfies(phi, D)

    def test_sums_and_chi(self):
        phi = parse_formula("sum i (f(i) * chi[f(i) < 0]) < -1 -> (exists x. prod j (f(j) + 1) = f(x))", F)
        rng = random.Random(2)
        for u in (1, 2, 3):
            for _ in range(20):
                D = random_structure(F, u, rng)
                assert decide(phi, F, u, D) == satisfies(phi, D)

    def test_tree_like(self):
        C = compile(parse_formula("exists x. forall y. f(x, y) < f(y, x)", F2), F2, 3)
        assert is_tree_like(C)


class TestErrors:
    def test_max_rejected(self):
        with pytest.raises(CompileError):
            compile(parse_formula("max i (f(i)) = 1", F), F, 2)

    def test_shadowing(self):
        with pytest.raises(ShadowingError):
            compile(Exists("x", Exists("x", NumEq(NumApp("f", (Var("x"),)), Const(1)))), F, 2)

    def test_free_variable(self):
        with pytest.raises(FreeVariableError):
            compile(NumEq(NumApp("f", (Var("x"),)), Const(1)), F, 2)

    def test_assignment_closes_formula(self):
        phi = NumEq(NumApp("f", (Var("x"),)), Const(1))
        C = compile(phi, F, 2, assignment={"x": 1})
        assert evaluate(C, [0, 1]) == [1] and evaluate(C, [1, 0]) == [0]

    def test_missing_arb(self):
        sig = F.with_aux([("a", 0, "number")])
        with pytest.raises(MissingArbTableError):
            compile(parse_formula("a() = 1", sig), sig, 2)


class TestNumbering:
    def test_hand_walk(self):
        # Per witness value: the select block for f(x) (two tuples of
        # [const a, const x, eq, hole, mul]), its add, const 5, eq.
        # Then add over both copies, sign, output; inputs at 30 and 31.
        C = compile_numbered(parse_formula("exists x. f(x) = 5", F), F, 2)
        expected = {}
        for x, base in ((0, 0), (1, 13)):
            for a, off in ((0, 0), (1, 5)):
                b = base + off
                expected[b + 1] = (T.CONST, a, ())
                expected[b + 2] = (T.CONST, x, ())
                expected[b + 3] = (T.EQ, None, (b + 1, b + 2))
                expected[b + 5] = (T.MUL, None, (b + 3, 30 + a))
            expected[base + 11] = (T.ADD, None, (base + 5, base + 10))
            expected[base + 12] = (T.CONST, 5, ())
            expected[base + 13] = (T.EQ, None, (base + 11, base + 12))
        expected[27] = (T.ADD, None, (13, 26))
        expected[28] = (T.SIGN, None, (27,))
        expected[29] = (T.OUTPUT, None, (28,))
        expected[30] = (T.INPUT, 1, ())
        expected[31] = (T.INPUT, 2, ())
        got = {g.id: (g.gtype, g.payload, g.preds) for g in C}
        assert got == expected

    def test_copy_roots(self):
        psi = parse_formula("exists x. f(x) < 1", F).body
        phi = Exists("x", psi)
        u, s = 3, tss_of(psi, F, 3) - 1
        C = compile_numbered(phi, F, u)
        q = C.output - 1  # the sign gate is the sentence's root
        add = C[q - 1]
        assert add.gtype == T.ADD
        assert list(add.preds) == [q - 2 - (u - i) * s for i in range(1, u + 1)]

    def test_ids_and_tss(self):
        rng = random.Random(3)
        shape = FormulaShape(max_depth=4, max_quantifiers=2, sums=True, char=True)
        for _ in range(60):
            sig = random_signature(rng)
            phi = random_formula(rng, sig, shape)
            u = rng.randint(1, 3)
            C = compile_numbered(phi, sig, u)
            total = tss_of(phi, sig, u)
            assert tree_shape_size(C) == total == C.output
            assert max(g.id for g in C if g.gtype != T.INPUT) == total
            for i in range(1, encoded_length(sig, u) + 1):
                assert C[total + i].payload == i
            for g in C:
                if g.gtype != T.INPUT:
                    assert all(p < g.id or C[p].gtype == T.INPUT for p in g.preds)


class TestOracle:
    PHI = "exists x. f(x) = 5"

    def test_output_gate(self):
        phi = parse_formula(self.PHI, F)
        assert gate_oracle(phi, F, 2, 29, 1) == GateRecord(6, 28, 0)

    def test_input_gate(self):
        phi = parse_formula("forall x. f(x) < 2", F)
        total = tss_of(phi, F, 4)
        assert gate_oracle(phi, F, 4, total + 3, 1) == (1, 0, 3)

    def test_past_the_end(self):
        phi = parse_formula(self.PHI, F)
        assert gate_oracle(phi, F, 2, 29 + 2 + 1, 1) == (0, 0, 0)
        assert gate_oracle(phi, F, 2, 0, 1) == (0, 0, 0)

    def test_hole_and_missing_predecessor(self):
        phi = parse_formula(self.PHI, F)
        assert gate_oracle(phi, F, 2, 4, 1) == (0, 0, 0)
        assert gate_oracle(phi, F, 2, 28, 2) == (5, 0, 0)

    def test_bad_length(self):
        with pytest.raises(NoSolutionError):
            gate_oracle(parse_formula("exists x. f(x, x) = 5", F2), F2, 5, 1, 1)

    def test_full_sweep(self):
        rng = random.Random(4)
        shape = FormulaShape(max_depth=4, max_quantifiers=2, sums=True, char=True)
        for _ in range(15):
            sig = random_signature(rng, skeleton_chance=0.3)
            phi = random_formula(rng, sig, shape)
            u = rng.randint(1, 3)
            C = compile_numbered(phi, sig, u)
            n = encoded_length(sig, u)
            fan = max(len(g.preds) for g in C)
            for v in range(0, C.output + n + 3):
                for p in range(1, fan + 2):
                    assert gate_oracle(phi, sig, n, v, p) == query_circuit(C, v, p), (v, p)


def test_depth_independent_of_u():
    phi = parse_formula("forall x. exists y. f(x) + sum i (f(i)) < f(y) * 2", F)
    depths = {depth(compile(phi, F, u)) for u in range(1, 7)}
    assert len(depths) == 1


def test_soundness_small():
    rng = random.Random(5)
    shape = FormulaShape(max_depth=4, max_quantifiers=3)
    for _ in range(80):
        sig = random_signature(rng)
        phi = random_formula(rng, sig, shape)
        u = rng.randint(1, 3)
        C = eliminate_aux_gates(compile(phi, sig, u))
        for _ in range(3):
            D = random_structure(sig, u, rng)
            assert (evaluate(C, encode(D)) == [1]) == satisfies(phi, D)
