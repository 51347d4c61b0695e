"""R-structures over the canonical universe ``{0, ..., u-1}`` and their encoding.

Tables are stored flat, in lexicographic argument order, which is exactly the
order in which they are concatenated by ``encode``.  Values are kept as ints
when integral and as ``Fraction`` otherwise; both compare exactly.
"""

from __future__ import annotations

import itertools
import random
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Sequence

from .errors import (
    LengthMismatchError, NoSolutionError, ParseError, RangeViolationError, StructureError,
)
from .logic import Signature


def exact(value) -> int | Fraction:
    """Normalize a rational-like value: ints stay ints, everything else a Fraction."""
    if isinstance(value, bool):
        return int(value)
    if isinstance(value, int):
        return value
    if isinstance(value, float):
        raise TypeError("floats are not allowed; use Fraction or a 'p/q' string")
    f = Fraction(value)
    return f.numerator if f.denominator == 1 else f


def table_index(args: Sequence[int], u: int) -> int:
    """Position of an argument tuple in lexicographic order."""
    idx = 0
    for a in args:
        idx = idx * u + a
    return idx


def all_tuples(u: int, arity: int) -> Iterator[tuple[int, ...]]:
    return itertools.product(range(u), repeat=arity)


def _check_table(name: str, values: Sequence, u: int, arity: int) -> tuple:
    if len(values) != u ** arity:
        raise StructureError(
            f"table {name!r} of arity {arity} needs {u ** arity} values, got {len(values)}")
    return tuple(exact(v) for v in values)


@dataclass(frozen=True)
class RStructure:
    """A functional R-structure ``D = (A, F)`` with ``A = {0..u-1}``.

    ``skeleton`` maps each L_s symbol to its flat table of universe elements;
    ``numbers`` maps each L_f symbol to its flat table of rationals.
    """

    sig: Signature
    u: int
    skeleton: Mapping[str, tuple[int, ...]] = field(default_factory=dict)
    numbers: Mapping[str, tuple] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.u < 1:
            raise StructureError("universe size must be at least 1")
        skel = {}
        for name, arity in self.sig.skeleton:
            if name not in self.skeleton:
                raise StructureError(f"missing table for skeleton symbol {name!r}")
            table = _check_table(name, self.skeleton[name], self.u, arity)
            for v in table:
                if not (isinstance(v, int) and 0 <= v < self.u):
                    raise RangeViolationError(
                        f"skeleton symbol {name!r} takes value {v} outside the universe")
            skel[name] = table
        nums = {}
        for name, arity in self.sig.numbers:
            if name not in self.numbers:
                raise StructureError(f"missing table for number symbol {name!r}")
            nums[name] = _check_table(name, self.numbers[name], self.u, arity)
        object.__setattr__(self, "skeleton", skel)
        object.__setattr__(self, "numbers", nums)

    def table(self, name: str) -> tuple:
        if name in self.skeleton:
            return self.skeleton[name]
        return self.numbers[name]

    def __eq__(self, other) -> bool:
        if not isinstance(other, RStructure):
            return NotImplemented
        return (self.sig == other.sig and self.u == other.u
                and dict(self.skeleton) == dict(other.skeleton)
                and dict(self.numbers) == dict(other.numbers))

    def __hash__(self) -> int:
        return hash((self.u, tuple(sorted(self.numbers.items())), tuple(sorted(self.skeleton.items()))))


@dataclass
class ArbInterpretation:
    """Tables for the auxiliary symbols L_a at one universe size."""

    u: int
    tables: dict[str, tuple] = field(default_factory=dict)

    def __contains__(self, name: str) -> bool:
        return name in self.tables

    def __getitem__(self, name: str) -> tuple:
        return self.tables[name]

    def extended(self, extra: Mapping[str, Sequence]) -> ArbInterpretation:
        merged = dict(self.tables)
        merged.update({k: tuple(exact(v) for v in vals) for k, vals in extra.items()})
        return ArbInterpretation(self.u, merged)

    def validate(self, sig: Signature) -> None:
        for name, arity, kind in sig.aux:
            if name not in self.tables:
                continue
            table = _check_table(name, self.tables[name], self.u, arity)
            if kind == "index":
                for v in table:
                    if not (isinstance(v, int) and 0 <= v < self.u):
                        raise RangeViolationError(
                            f"index-valued aux symbol {name!r} takes value {v} outside the universe")


EMPTY_ARB = ArbInterpretation(0)


# -- encoding ---------------------------------------------------------------

def encoded_length(sig: Signature, u: int) -> int:
    """``sum over encoded symbols of u ** max(arity, 1)``."""
    if u < 1:
        raise StructureError("universe size must be at least 1")
    return sum(u ** max(arity, 1) for _, arity in sig.encoded)


def input_layout(sig: Signature, u: int) -> dict[str, int]:
    """0-based offset of each encoded symbol's block inside ``enc(D)``."""
    offsets, pos = {}, 0
    for name, arity in sig.encoded:
        offsets[name] = pos
        pos += u ** max(arity, 1)
    return offsets


def input_position(sig: Signature, u: int, name: str, args: Sequence[int]) -> int:
    """1-based index of the input gate holding ``name(args)``.

    A 0-ary symbol is stored as ``u`` copies; its first copy is used.
    """
    return input_layout(sig, u)[name] + table_index(args, u) + 1


def encode(D: RStructure) -> tuple:
    out: list = []
    for name, arity in D.sig.encoded:
        table = D.table(name)
        out.extend(table * D.u if arity == 0 else table)
    return tuple(out)


def recover_universe_size(sig: Signature, n: int) -> int:
    """Invert ``encoded_length`` by binary search over ``u``."""
    if not sig.encoded:
        raise NoSolutionError("signature has no encoded symbols; universe size is not recoverable")
    if n < 1:
        raise NoSolutionError(f"no universe size encodes to length {n}")
    lo, hi = 1, n  # encoded_length(u) >= u, so u <= n
    while lo < hi:
        mid = (lo + hi) // 2
        if encoded_length(sig, mid) >= n:
            hi = mid
        else:
            lo = mid + 1
    if encoded_length(sig, lo) != n:
        raise NoSolutionError(f"no universe size encodes to length {n}")
    return lo


def decode(sig: Signature, vector: Sequence) -> RStructure:
    try:
        u = recover_universe_size(sig, len(vector))
    except NoSolutionError as err:
        raise LengthMismatchError(str(err)) from None
    values = [exact(v) for v in vector]
    skeleton, numbers, pos = {}, {}, 0
    for name, arity in sig.encoded:
        block = values[pos:pos + u ** max(arity, 1)]
        pos += len(block)
        if arity == 0:
            if any(v != block[0] for v in block):
                raise RangeViolationError(f"copies of 0-ary symbol {name!r} disagree")
            block = block[:1]
        if any(s == name for s, _ in sig.skeleton):
            for v in block:
                if not (isinstance(v, int) and 0 <= v < u):
                    raise RangeViolationError(
                        f"skeleton symbol {name!r} takes value {v} outside the universe")
            skeleton[name] = tuple(block)
        else:
            numbers[name] = tuple(block)
    return RStructure(sig, u, skeleton, numbers)


# -- random and exhaustive generation ----------------------------------------

def random_structure(sig: Signature, u: int, rng: random.Random,
                     values: Sequence = (-2, -1, 0, 1, 2)) -> RStructure:
    """Draw every table entry in encoding order.

    Skeleton entries use ``rng.randrange(u)``; number entries use
    ``rng.choice(values)``.  Cross-language ports reproduce this with the same
    Mersenne Twister stream.
    """
    skeleton = {n: tuple(rng.randrange(u) for _ in range(u ** a)) for n, a in sig.skeleton}
    numbers = {n: tuple(rng.choice(values) for _ in range(u ** a)) for n, a in sig.numbers}
    return RStructure(sig, u, skeleton, numbers)


def random_arb(sig: Signature, u: int, rng: random.Random,
               values: Sequence = (-2, -1, 0, 1, 2)) -> ArbInterpretation:
    tables = {}
    for name, arity, kind in sig.aux:
        if kind == "index":
            tables[name] = tuple(rng.randrange(u) for _ in range(u ** arity))
        else:
            tables[name] = tuple(rng.choice(values) for _ in range(u ** arity))
    return ArbInterpretation(u, tables)


def count_binary_structures(sig: Signature, u: int) -> int:
    """Number of structures whose number tables take values in {0, 1}."""
    cells = sum(u ** a for _, a in sig.numbers)
    skel = 1
    for _, a in sig.skeleton:
        skel *= u ** (u ** a)
    return skel * 2 ** cells


def binary_structures(sig: Signature, u: int) -> Iterator[RStructure]:
    """Every structure with {0,1}-valued number tables (skeleton tables range freely)."""
    skel_shapes = [(n, u ** a) for n, a in sig.skeleton]
    num_shapes = [(n, u ** a) for n, a in sig.numbers]
    skel_space = itertools.product(*(itertools.product(range(u), repeat=k) for _, k in skel_shapes))
    for skel_vals in skel_space:
        skeleton = {n: v for (n, _), v in zip(skel_shapes, skel_vals)}
        total = sum(k for _, k in num_shapes)
        for bits in itertools.product((0, 1), repeat=total):
            numbers, pos = {}, 0
            for n, k in num_shapes:
                numbers[n] = bits[pos:pos + k]
                pos += k
            yield RStructure(sig, u, skeleton, numbers)


# -- text format --------------------------------------------------------------

_TABLE_LINE = re.compile(r"^([A-Za-z_][A-Za-z0-9_$]*)\s*/\s*(\d+)\s*:(.*)$")


def _parse_values(raw: str, lineno: int) -> list:
    out = []
    for tok in raw.split():
        try:
            out.append(exact(Fraction(tok)))
        except (ValueError, ZeroDivisionError):
            raise ParseError(f"bad rational {tok!r}", 0, lineno, 1) from None
    return out


def parse_structure(text: str, sig: Signature) -> tuple[RStructure, ArbInterpretation]:
    """Read the structure text format.

    ::

        universe 2
        f/1 : 3 5
        [arb]
        g/0 : 1/2
    """
    u = None
    main: dict[str, tuple[int, list]] = {}
    arb: dict[str, tuple[int, list]] = {}
    section = main
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("universe"):
            parts = line.split()
            if len(parts) != 2 or not parts[1].isdigit():
                raise ParseError(f"bad universe header {line!r}", 0, lineno, 1)
            u = int(parts[1])
            continue
        if line == "[arb]":
            section = arb
            continue
        m = _TABLE_LINE.match(line)
        if m is None:
            raise ParseError(f"bad table line {line!r}", 0, lineno, 1)
        name, arity, rest = m.group(1), int(m.group(2)), m.group(3)
        section[name] = (arity, _parse_values(rest, lineno))
    if u is None:
        raise ParseError("missing 'universe <u>' header", 0, 1, 1)

    def take(name: str, arity: int, source: dict) -> list:
        if name not in source:
            raise StructureError(f"no table for symbol {name!r}")
        declared, values = source[name]
        if declared != arity:
            raise StructureError(f"symbol {name!r} declared with arity {arity}, file says {declared}")
        return values

    skeleton = {n: take(n, a, main) for n, a in sig.skeleton}
    numbers = {n: take(n, a, main) for n, a in sig.numbers}
    D = RStructure(sig, u, skeleton, numbers)
    I = ArbInterpretation(u, {n: tuple(take(n, a, arb)) for n, a, _ in sig.aux if n in arb})
    I.validate(sig)
    return D, I


def _fmt(v) -> str:
    return str(v)


def format_tables(items: Iterable[tuple[str, int, Sequence]]) -> list[str]:
    return [f"{n}/{a} : {' '.join(_fmt(v) for v in vals)}" for n, a, vals in items]


def format_structure(D: RStructure, I: ArbInterpretation | None = None) -> str:
    lines = [f"universe {D.u}"]
    lines += format_tables((n, a, D.table(n)) for n, a in D.sig.encoded)
    if I is not None and I.tables:
        lines.append("[arb]")
        arities = {n: a for n, a, _ in D.sig.aux}
        lines += format_tables((n, arities.get(n, _arity_of(len(v), I.u)), v) for n, v in I.tables.items())
    return "\n".join(lines) + "\n"


def format_arb(I: ArbInterpretation, arities: Mapping[str, int]) -> str:
    lines = [f"universe {I.u}", "[arb]"]
    lines += format_tables((n, arities[n], v) for n, v in I.tables.items())
    return "\n".join(lines) + "\n"


def _arity_of(length: int, u: int) -> int:
    if u <= 1:
        return 0
    a = 0
    while u ** a < length:
        a += 1
    return a
