"""Acceptance criteria, one test each.

Every test prints a single ``PASS``/``FAIL`` line before asserting, so
``pytest -s`` (or running this file directly) gives a one-screen summary.
"""

import random
import sys
import time

import pytest

from realcirc.circuit import (
    AUX_TYPES, Circuit, Gate, GateType as T, depth, evaluate, figure1, is_tree_like, size, tree_shape_size,
)
from realcirc.compiler import compile, compile_numbered, gate_oracle, query_circuit
from realcirc.generate import FormulaShape, random_formula, random_signature
from realcirc.logic import (
    APPLICATIONS, Exists, Forall, Max, Prod, Signature, Sum, children, contains, free_vars,
)
from realcirc.normalize import (
    AUX_GATE_DELTA, eliminate_aux_gates, level_paths, lower_gate, make_tree_like, normalize,
)
from realcirc.parser import parse_formula
from realcirc.reverse import build_sentence, descriptor_from_circuit
from realcirc.rewrite import absorb_sums, build_aux_interpretation, eliminate_max
from realcirc.semantics import satisfies
from realcirc.structure import (
    binary_structures, count_binary_structures, encode, encoded_length, random_arb, random_structure,
    recover_universe_size,
)

sys.path.insert(0, __file__.rsplit("/", 1)[0])
from helpers import ALL_OPS, random_circuit, random_inputs  # noqa: E402

VALUES = (-2, -1, 0, 1, 2)


def report(number, ok, detail):
    line = f"{'PASS' if ok else 'FAIL'} criterion {number}: {detail}"
    sys.__stdout__.write("\n" + line + "\n")
    sys.__stdout__.flush()
    assert ok, line


# 1 -----------------------------------------------------------------------------

@pytest.mark.slow
def test_forward_soundness():
    rng = random.Random(101)
    shape = FormulaShape(max_depth=4, max_quantifiers=3)
    start = time.perf_counter()
    pairs = disagreements = 0
    while pairs < 1200:
        sig = random_signature(rng, max_symbols=2, max_arity=2)
        u = rng.randint(1, 4)
        phi = random_formula(rng, sig, shape)
        C = eliminate_aux_gates(compile(phi, sig, u))
        for _ in range(4):
            D = random_structure(sig, u, rng, VALUES)
            pairs += 1
            disagreements += (evaluate(C, encode(D)) == [1]) != satisfies(phi, D)
    elapsed = time.perf_counter() - start
    report(1, disagreements == 0 and elapsed < 60,
           f"{pairs} pairs, {disagreements} disagreements, {elapsed:.1f}s (limit 60s)")


# 2 -----------------------------------------------------------------------------

REVERSE_GATE_LIMIT = 400


def _reverse_cases(rng):
    shapes = [FormulaShape(max_depth=2, max_quantifiers=1, implications=False),
              FormulaShape(max_depth=3, max_quantifiers=1)]
    while True:
        sig = random_signature(rng, max_symbols=2, max_arity=1)
        u = 2 if rng.random() < 0.85 else 3
        phi = random_formula(rng, sig, rng.choice(shapes))
        C = normalize(compile(phi, sig, u), include_constants=True)
        if len(C) <= (REVERSE_GATE_LIMIT if u == 2 else 81):
            yield sig, u, phi, C


@pytest.mark.slow
def test_reverse_soundness():
    rng = random.Random(202)
    circuits = checks = disagreements = 0
    start = time.perf_counter()
    for sig, u, phi, C in _reverse_cases(rng):
        desc = descriptor_from_circuit(C, sig, u)
        sentence = build_sentence(desc)
        arb = desc.arb()
        if count_binary_structures(sig, u) <= 4096:
            structures = binary_structures(sig, u)
        else:
            structures = (random_structure(sig, u, rng, (0, 1)) for _ in range(200))
        for D in structures:
            checks += 1
            disagreements += satisfies(sentence, D, arb) != satisfies(phi, D)
        circuits += 1
        if circuits == 50:
            break
    report(2, disagreements == 0,
           f"{circuits} circuits, {checks} structure checks, {disagreements} disagreements "
           f"({time.perf_counter() - start:.1f}s)")


# 3 -----------------------------------------------------------------------------

EXPECTED_DELTA = {T.SUB: 2, T.EQ: 9, T.LT: 6, T.GT: 6, T.LE: 3, T.GE: 3}


def test_aux_gate_deltas():
    rng = random.Random(303)
    problems = []
    for op in sorted(AUX_TYPES):
        C = Circuit([Gate(1, T.INPUT, 1), Gate(2, T.INPUT, 2), Gate(3, op, None, (1, 2)),
                     Gate(4, T.OUTPUT, None, (3,))], 2)
        lowered = lower_gate(C, 3)
        full = eliminate_aux_gates(C)
        if size(lowered) - size(C) != EXPECTED_DELTA[op] or AUX_GATE_DELTA[op] != EXPECTED_DELTA[op]:
            problems.append(f"{op.label}: +{size(lowered) - size(C)}")
        for k in range(100):
            x = [rng.choice(VALUES), rng.choice(VALUES)] if k % 3 else [rng.choice(VALUES)] * 2
            if not evaluate(lowered, x) == evaluate(full, x) == evaluate(C, x):
                problems.append(f"{op.label}: evaluation differs on {x}")
                break
    # one circuit holding all six codes; rewrite only the original gates
    gates = [Gate(1, T.INPUT, 1), Gate(2, T.INPUT, 2)]
    ids = []
    for k, op in enumerate(sorted(AUX_TYPES)):
        gates.append(Gate(3 + k, op, None, (1, 2)))
        ids.append(3 + k)
    gates.append(Gate(9, T.ADD, None, tuple(ids)))
    gates.append(Gate(10, T.OUTPUT, None, (9,)))
    C = Circuit(gates, 2)
    D = C
    for gid in ids:
        D = lower_gate(D, gid)
    combined = size(D) - size(C)
    if combined != sum(EXPECTED_DELTA.values()):
        problems.append(f"combined delta {combined}")
    E = eliminate_aux_gates(C)
    if any(g.gtype > T.OUTPUT for g in E):
        problems.append("aux gates left after elimination")
    for _ in range(100):
        x = random_inputs(rng, 2)
        if not evaluate(C, x) == evaluate(D, x) == evaluate(E, x):
            problems.append(f"combined evaluation differs on {x}")
            break
    deltas = ", ".join(f"{op.label} +{EXPECTED_DELTA[op]}" for op in sorted(AUX_TYPES))
    report(3, not problems, "; ".join(problems) or f"deltas {deltas}; combined +{combined}")


# 4 -----------------------------------------------------------------------------

def _all_path_lengths(C):
    """Exhaustive enumeration: lengths of every input-to-v path, for every v."""
    lengths = {gid: set() for gid in C.gates}
    succ = C.successors()

    def walk(v, k):
        lengths[v].add(k)
        for s in succ[v]:
            walk(s, k + 1)

    for g in C:
        if g.gtype == T.INPUT:
            walk(g.id, 0)
    return lengths


def test_tree_like_lemma():
    rng = random.Random(404)
    checked = tries = 0
    problems = []
    while checked < 200 and tries < 5000:
        tries += 1
        C = eliminate_aux_gates(random_circuit(rng, n_inputs=rng.randint(1, 3), n_gates=rng.randint(1, 10),
                                               types=ALL_OPS))
        L = level_paths(make_tree_like(C))
        if len(L) > 60:
            continue
        checked += 1
        bad = [v for v, ks in _all_path_lengths(L).items() if len(ks) > 1]
        if bad:
            problems.append(f"gate {bad[0]} has unequal path lengths")
        succ = L.successors()
        if any(len(succ[g.id]) > 1 for g in L if g.gtype != T.INPUT) or not is_tree_like(L):
            problems.append("non-input gate with outdegree > 1")
        if depth(L) != depth(C):
            problems.append(f"depth {depth(C)} -> {depth(L)}")
        for _ in range(5):
            x = random_inputs(rng, C.n_inputs)
            if evaluate(L, x) != evaluate(C, x):
                problems.append(f"evaluation differs on {x}")
        if problems:
            break
    report(4, not problems and checked >= 200,
           "; ".join(problems) or f"{checked} circuits (<= 60 gates after both passes), every path checked")


# 5 -----------------------------------------------------------------------------

def test_figure1_constants():
    C = figure1()
    report(5, (size(C), tree_shape_size(C)) == (7, 8),
           f"size {size(C)}, tree-shape-size {tree_shape_size(C)}")


# 6 -----------------------------------------------------------------------------

@pytest.mark.slow
def test_oracle_consistency():
    rng = random.Random(606)
    shape = FormulaShape(max_depth=4, max_quantifiers=2, sums=True, char=True)
    queries = mismatches = sentinels = 0
    for k in range(20):
        u = 1 + k % 4
        sig = random_signature(rng, max_symbols=2, max_arity=2, skeleton_chance=0.3)
        if k % 3 == 0:
            sig = sig.with_aux([("a", 1, "number"), ("r", 1, "index")])
        arb = random_arb(sig, u, rng) if sig.aux else None
        phi = random_formula(rng, sig, shape)
        C = compile_numbered(phi, sig, u, arb)
        n = encoded_length(sig, u)
        fan = max(len(g.preds) for g in C)
        for v in range(0, C.output + n + 3):
            for p in range(1, fan + 2):
                got = gate_oracle(phi, sig, n, v, p, arb)
                want = query_circuit(C, v, p)
                queries += 1
                mismatches += got != want
                sentinels += got.p_nr == 0 and got.t not in (T.CONST, T.INPUT)
    report(6, mismatches == 0,
           f"20 sentences, {queries} queries ({sentinels} sentinel rows), {mismatches} mismatches")


# 7 -----------------------------------------------------------------------------

def test_max_and_sum_rewrites():
    rng = random.Random(707)
    max_shape = FormulaShape(max_depth=3, max_quantifiers=2, max_terms=True, char=True)
    sum_shape = FormulaShape(max_depth=3, max_quantifiers=2, sums=True, char=True)
    problems = []
    counts = {"max": 0, "sum": 0}
    structures = 0
    while counts["max"] < 500:
        sig = random_signature(rng)
        phi = random_formula(rng, sig, max_shape)
        if not contains(phi, Max):
            continue
        out = eliminate_max(phi)
        counts["max"] += 1
        if contains(out, Max):
            problems.append("Max left after elimination")
        for _ in range(3):
            D = random_structure(sig, rng.randint(1, 4), rng, VALUES)
            structures += 1
            if satisfies(out, D) != satisfies(phi, D):
                problems.append(f"max rewrite disagrees: {phi}")
                break
    while counts["sum"] < 500:
        sig = random_signature(rng)
        phi = random_formula(rng, sig, sum_shape)
        if not contains(phi, (Sum, Prod)):
            continue
        out, defs = absorb_sums(phi)
        counts["sum"] += 1
        if contains(out, (Sum, Prod)):
            problems.append("Sum/Prod left after absorption")
        for _ in range(3):
            D = random_structure(sig, rng.randint(1, 4), rng, VALUES)
            structures += 1
            if satisfies(out, D, build_aux_interpretation(defs, D)) != satisfies(phi, D):
                problems.append(f"absorption disagrees: {phi}")
                break
    report(7, not problems,
           "; ".join(problems[:3]) or f"{counts['max']} max formulas, {counts['sum']} sum/prod formulas, "
                                       f"{structures} structure checks, 0 disagreements")


# 8 -----------------------------------------------------------------------------

def test_encoding_identities():
    rng = random.Random(808)
    problems = []
    for _ in range(50):
        sig = random_signature(rng, max_symbols=4, max_arity=2, skeleton_chance=0.3)
        for u in range(1, 65):
            n = sum(u ** max(a, 1) for _, a in sig.encoded)
            if encoded_length(sig, u) != n or recover_universe_size(sig, n) != u:
                problems.append(f"{sig} u={u}")
            if u <= 16 or u % 16 == 0:
                if len(encode(random_structure(sig, u, rng))) != n:
                    problems.append(f"encode length {sig} u={u}")
    report(8, not problems, "; ".join(problems[:3]) or "50 signatures x u = 1..64")


# 9 -----------------------------------------------------------------------------

DEPTH_SENTENCES = [
    "0 < 1",
    "exists x. f(x) = 5",
    "forall x. 0 < f(x)",
    "forall x. forall y. g(x, y) = g(y, x)",
    "exists x. forall y. f(y) < f(x) + 1",
    "sum i (f(i)) < 3",
    "prod i (f(i) + 1) = 2 | (exists x. f(x) < 0)",
    "forall x. exists y. g(x, y) = 1",
    "!(exists x. f(x) = 0) & (forall x. sign(f(x)) = 1)",
    "exists x. sum j (g(x, j)) = f(x)",
    "forall x. f(x) * f(x) < 4 -> f(x) < 2",
    "exists x. exists y. exists z. g(x, y) + g(y, z) = f(z)",
    "chi[exists x. f(x) = 1] + chi[forall x. f(x) = 1] = 1",
    "forall x. (f(x) = 1 <-> g(x, x) = 1)",
    "forall x. sum i (sum j (g(i, j))) < f(x)",
    "forall x. exists y. forall z. g(x, z) < g(y, z) | x == y",
    "exists x. f(x) < f(x) + 1",
    "prod i (sign(f(i))) = 1",
    "forall x. forall y. f(x) + f(y) < 5",
    "exists x. 1 < 0",
]
FG = Signature(numbers=(("f", 1), ("g", 2)))


def degree(n) -> int:
    """Syntactic exponent of u in the compiled size."""
    if isinstance(n, APPLICATIONS):
        return len(n.args) + max((degree(a) for a in n.args), default=0)
    if isinstance(n, (Exists, Forall)):
        return degree(n.body) + (1 if n.var in free_vars(n.body) else 0)
    if isinstance(n, (Sum, Prod)):
        return 1 + degree(n.body)
    return max((degree(c) for c in children(n)), default=0)


def test_depth_constancy():
    problems = []
    for text in DEPTH_SENTENCES:
        phi = parse_formula(text, FG)
        circuits = [compile(phi, FG, u) for u in range(1, 7)]
        depths = {depth(C) for C in circuits}
        if len(depths) != 1:
            problems.append(f"{text}: depths {sorted(depths)}")
        q = max(degree(phi), max(max(a, 1) for _, a in FG.encoded))
        ratios = [size(C) / u ** q for u, C in zip(range(1, 7), circuits)]
        if any(b > a for a, b in zip(ratios, ratios[1:])) or ratios[-1] <= 0:
            problems.append(f"{text}: size/u^{q} not monotone {ratios}")
    report(9, not problems, "; ".join(problems[:3]) or f"{len(DEPTH_SENTENCES)} sentences, u = 1..6")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-s"]))
