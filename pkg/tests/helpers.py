"""Small constructors shared by the test modules."""

from fractions import Fraction

from realcirc.circuit import Circuit, Gate, GateType
from realcirc.structure import RStructure


def structure(sig, u, **tables):
    skeleton = {n: tables[n] for n, _ in sig.skeleton}
    numbers = {n: tables[n] for n, _ in sig.numbers}
    return RStructure(sig, u, skeleton, numbers)


ALL_OPS = tuple(t for t in GateType if t not in (GateType.INPUT, GateType.CONST, GateType.OUTPUT))


def random_circuit(rng, n_inputs=3, n_gates=8, types=(GateType.ADD, GateType.MUL, GateType.SIGN),
                   constants=(-2, -1, 0, 1, 2), const_chance=0.15):
    """Inputs first, then ``n_gates`` random gates, then an output on the last one."""
    gates = [Gate(i, GateType.INPUT, i) for i in range(1, n_inputs + 1)]
    nid = n_inputs + 1
    for _ in range(n_gates):
        if rng.random() < const_chance:
            gates.append(Gate(nid, GateType.CONST, rng.choice(constants)))
        else:
            t = rng.choice(types)
            ids = [g.id for g in gates]
            if t == GateType.SIGN:
                preds = (rng.choice(ids),)
            elif t in (GateType.ADD, GateType.MUL):
                preds = tuple(rng.sample(ids, rng.randint(1, min(3, len(ids)))))
            else:
                preds = tuple(rng.sample(ids, 2)) if len(ids) > 1 else None
            if preds is None:
                t, preds = GateType.SIGN, (ids[0],)
            gates.append(Gate(nid, t, None, preds))
        nid += 1
    gates.append(Gate(nid, GateType.OUTPUT, None, (nid - 1,)))
    return Circuit(gates, n_inputs)


def random_inputs(rng, n, values=(-3, -2, -1, 0, 1, 2, 3, Fraction(1, 2), Fraction(-5, 3))):
    return [rng.choice(values) for _ in range(n)]
