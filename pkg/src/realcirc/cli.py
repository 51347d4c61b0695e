"""Command-line front end: ``realcirc <subcommand> [flags]``.

Exit status is 0 on success, 1 when an input violates a contract (a
one-line ``error:`` diagnostic goes to stderr) and 2 on a usage error.
"""

from __future__ import annotations

import argparse
import random
import sys
from fractions import Fraction

from .circuit import evaluate, format_circuit, parse_circuit, to_dot
from .compiler import compile_numbered, gate_oracle
from .errors import RealCircError
from .logic import Max, Signature, contains, print_formula
from .normalize import eliminate_aux_gates, normalize
from .parser import format_signature, parse_formula, parse_signature
from .reverse import build_sentence, descriptor_from_circuit, printed_size
from .rewrite import eliminate_max
from .semantics import satisfies
from .structure import (
    ArbInterpretation, binary_structures, count_binary_structures, encode, exact, format_arb,
    parse_structure, random_structure,
)

EXHAUSTIVE_LIMIT = 4096
PRINT_LIMIT = 2_000_000  # refuse to print sentences longer than this (characters, estimated)


class UsageError(Exception):
    pass


def _read(path: str) -> str:
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _need(args, *names: str) -> None:
    for name in names:
        if getattr(args, name) is None:
            raise UsageError(f"--{name.replace('_', '-')} is required for {args.command}")


def _sig(args) -> Signature:
    _need(args, "sig")
    return parse_signature(_read(args.sig))


def _formula(args, sig: Signature):
    _need(args, "formula")
    return parse_formula(_read(args.formula), sig)


def _arb(args, sig: Signature, u: int) -> ArbInterpretation | None:
    if args.arb is None:
        return None
    _, arb = parse_structure(_read(args.arb), sig)
    if arb.u != u:
        raise RealCircError(f"Arb file is for universe size {arb.u}, not {u}")
    return arb


def _fmt(v) -> str:
    return str(exact(v))


def cmd_parse(args, out) -> int:
    sig = _sig(args)
    print(print_formula(_formula(args, sig)), file=out)
    return 0


def cmd_model_check(args, out) -> int:
    sig = _sig(args)
    phi = _formula(args, sig)
    _need(args, "structure")
    D, arb = parse_structure(_read(args.structure), sig)
    print("true" if satisfies(phi, D, arb) else "false", file=out)
    return 0


def cmd_compile(args, out) -> int:
    sig = _sig(args)
    phi = _formula(args, sig)
    _need(args, "u")
    C = compile_numbered(phi, sig, args.u, _arb(args, sig, args.u))
    print(to_dot(C) if args.emit_dot else format_circuit(C), file=out, end="")
    return 0


def _parse_values(text: str) -> list:
    parts = text.replace(",", " ").split()
    try:
        return [exact(Fraction(p)) for p in parts]
    except (ValueError, ZeroDivisionError):
        raise RealCircError(f"bad input vector {text!r}") from None


def cmd_eval_circuit(args, out) -> int:
    _need(args, "circuit")
    C = parse_circuit(_read(args.circuit))
    if args.values is not None:
        x = _parse_values(args.values)
    elif args.structure is not None:
        sig = _sig(args)
        D, _ = parse_structure(_read(args.structure), sig)
        x = list(encode(D))
    else:
        raise UsageError("eval-circuit needs --values or --structure with --sig")
    print(" ".join(_fmt(v) for v in evaluate(C, x)), file=out)
    return 0


def cmd_normalize(args, out) -> int:
    _need(args, "circuit")
    C = parse_circuit(_read(args.circuit))
    chosen = args.no_aux or args.tree_like or args.level
    C = normalize(C, aux=args.no_aux or not chosen, tree_like=args.tree_like or not chosen,
                  level=args.level or not chosen, include_constants=args.level_constants)
    print(to_dot(C) if args.emit_dot else format_circuit(C), file=out, end="")
    return 0


def cmd_oracle(args, out) -> int:
    sig = _sig(args)
    phi = _formula(args, sig)
    _need(args, "n", "gate", "pred")
    arb = None
    if args.arb is not None:
        _, arb = parse_structure(_read(args.arb), sig)
    print(gate_oracle(phi, sig, args.n, args.gate, args.pred, arb), file=out)
    return 0


def cmd_reverse(args, out) -> int:
    sig = _sig(args)
    _need(args, "circuit", "u")
    C = parse_circuit(_read(args.circuit))
    desc = descriptor_from_circuit(C, sig, args.u)
    sentence = build_sentence(desc)
    estimate = printed_size(sentence)
    if estimate > PRINT_LIMIT:
        raise RealCircError(f"sentence would print to roughly {estimate} characters "
                            f"(depth {desc.d}); limit is {PRINT_LIMIT}")
    arities = {n: a for n, a, _ in desc.aux_symbols()}
    print("# sentence", file=out)
    print(print_formula(sentence), file=out)
    print("# signature", file=out)
    print(format_signature(desc.signature()), file=out, end="")
    print("# arb", file=out)
    print(format_arb(desc.arb(), arities), file=out, end="")
    return 0


def cmd_encode(args, out) -> int:
    sig = _sig(args)
    _need(args, "structure")
    D, _ = parse_structure(_read(args.structure), sig)
    print(" ".join(_fmt(v) for v in encode(D)), file=out)
    return 0


def cmd_check_equiv(args, out) -> int:
    sig = _sig(args)
    phi = _formula(args, sig)
    _need(args, "u")
    u = args.u
    arb = _arb(args, sig, u)
    compiled = eliminate_max(phi) if contains(phi, Max) else phi
    C = eliminate_aux_gates(compile_numbered(compiled, sig, u, arb))
    if args.exhaustive and count_binary_structures(sig, u) <= EXHAUSTIVE_LIMIT:
        structures = binary_structures(sig, u)
    else:
        rng = random.Random(args.seed)
        structures = (random_structure(sig, u, rng) for _ in range(args.count))
    total = agree = 0
    for D in structures:
        total += 1
        expected = satisfies(phi, D, arb)
        got = evaluate(C, encode(D))[0]
        agree += (got == 1) == expected
    print(f"{agree}/{total} agree", file=out)
    return 0 if agree == total else 1


COMMANDS = {
    "parse": cmd_parse,
    "model-check": cmd_model_check,
    "compile": cmd_compile,
    "eval-circuit": cmd_eval_circuit,
    "normalize": cmd_normalize,
    "oracle": cmd_oracle,
    "reverse": cmd_reverse,
    "encode": cmd_encode,
    "check-equiv": cmd_check_equiv,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="realcirc", description="First-order logic over the reals and arithmetic circuits.")
    p.add_argument("command", choices=sorted(COMMANDS), help="subcommand")
    p.add_argument("--formula", help="formula file")
    p.add_argument("--sig", help="signature file")
    p.add_argument("--structure", help="structure file (may carry an [arb] section)")
    p.add_argument("--circuit", help="circuit file")
    p.add_argument("--arb", help="structure file whose [arb] section supplies auxiliary tables")
    p.add_argument("--values", help="input vector for eval-circuit, comma or space separated")
    p.add_argument("--u", type=int, help="universe size")
    p.add_argument("--n", type=int, help="encoded input length (oracle)")
    p.add_argument("--gate", type=int, help="gate number (oracle)")
    p.add_argument("--pred", type=int, help="predecessor index (oracle)")
    p.add_argument("--seed", type=int, default=0, help="random seed (default 0)")
    p.add_argument("--count", type=int, default=100, help="random structures for check-equiv")
    p.add_argument("--exhaustive", action="store_true",
                   help=f"check-equiv over all {{0,1}}-valued structures when at most {EXHAUSTIVE_LIMIT}")
    p.add_argument("--numbered", action="store_true", help="compile: keep post-order gate numbers (always on)")
    p.add_argument("--no-aux", action="store_true", help="normalize: eliminate gate codes 7-12")
    p.add_argument("--tree-like", action="store_true", help="normalize: duplicate shared subcircuits")
    p.add_argument("--level", action="store_true", help="normalize: pad paths to equal length")
    p.add_argument("--level-constants", action="store_true",
                   help="normalize --level: treat constant gates as sources too")
    p.add_argument("--emit-dot", action="store_true", help="print circuits as DOT instead of text")
    return p


def main(argv: list[str] | None = None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args, out)
    except UsageError as err:
        parser.print_usage(sys.stderr)
        print(f"realcirc: error: {err}", file=sys.stderr)
        return 2
    except (RealCircError, OSError) as err:
        message = " ".join(str(err).split())
        print(f"error: {message}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
