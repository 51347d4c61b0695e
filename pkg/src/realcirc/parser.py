"""Recursive-descent parser for formulas and signature files.

Grammar (ASCII)::

    formula  := quant | iff
    quant    := ("exists" | "forall") IDENT "." formula
    iff      := impl { "<->" impl } ;  impl := disj { "->" disj }
    disj     := conj { "|" conj }   ;  conj := neg { "&" neg }
    neg      := "!" neg | atom
    atom     := "(" formula ")" | nterm ("=" | "<") nterm | iterm "==" iterm
    nterm    := factor { ("+" | "*") factor }
    factor   := RATIONAL | "sign" "(" nterm ")" | ("sum"|"prod"|"max") IDENT "(" nterm ")"
              | "chi" "[" formula "]" | IDENT "(" iterm-list ")" | "(" nterm ")"
    iterm    := IDENT | IDENT "(" iterm-list ")"

``*`` binds tighter than ``+``.  Whether an identifier starts an index term or
a number term is decided by the signature.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from .errors import ArityError, FormulaSyntaxError, ParseError, UndeclaredSymbolError
from .logic import (
    Add, And, AuxIndexApp, AuxNumApp, Char, Const, Exists, Forall, Formula, Iff,
    Implies, IndexEq, IndexTerm, Max, Mul, Not, NumApp, NumberTerm, NumEq, NumLt,
    Or, Prod, Sign, Signature, SkeletonApp, Sum, Var,
)

KEYWORDS = {"exists", "forall", "sign", "sum", "prod", "max", "chi"}

_TOKEN = re.compile(r"""
    (?P<ws>\s+)
  | (?P<rational>-?\d+(?:/\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_$]*)
  | (?P<op><->|->|==|[()\[\].,=<!&|+*])
""", re.VERBOSE)


@dataclass(frozen=True)
class Token:
    kind: str  # "rational", "ident", "kw", "op", "eof"
    text: str
    offset: int


def _position(text: str, offset: int) -> tuple[int, int]:
    line = text.count("\n", 0, offset) + 1
    start = text.rfind("\n", 0, offset) + 1
    return line, offset - start + 1


def tokenize(text: str) -> list[Token]:
    tokens: list[Token] = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            line, col = _position(text, pos)
            raise FormulaSyntaxError(f"unexpected character {text[pos]!r}", pos, line, col)
        kind = m.lastgroup
        if kind != "ws":
            value = m.group()
            if kind == "ident" and value in KEYWORDS:
                kind = "kw"
            tokens.append(Token(kind, value, pos))
        pos = m.end()
    tokens.append(Token("eof", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, sig: Signature):
        self.text = text
        self.sig = sig
        self.tokens = tokenize(text)
        self.pos = 0
        self.furthest: ParseError | None = None

    # -- helpers ------------------------------------------------------------
    @property
    def tok(self) -> Token:
        return self.tokens[self.pos]

    def error(self, cls, message: str, token: Token | None = None) -> ParseError:
        token = token or self.tok
        line, col = _position(self.text, token.offset)
        err = cls(message, token.offset, line, col)
        if self.furthest is None or err.offset >= self.furthest.offset:
            self.furthest = err
        return err

    def describe(self, token: Token) -> str:
        return "end of input" if token.kind == "eof" else repr(token.text)

    def at(self, text: str) -> bool:
        return self.tok.kind in ("op", "kw") and self.tok.text == text

    def expect(self, text: str) -> Token:
        if not self.at(text):
            raise self.error(FormulaSyntaxError,
                             f"expected {text!r}, found {self.describe(self.tok)}")
        token = self.tok
        self.pos += 1
        return token

    def ident(self) -> Token:
        if self.tok.kind != "ident":
            raise self.error(FormulaSyntaxError,
                             f"expected identifier, found {self.describe(self.tok)}")
        token = self.tok
        self.pos += 1
        return token

    def variable_name(self) -> str:
        token = self.ident()
        if "$" in token.text:
            raise self.error(FormulaSyntaxError, f"'$' is not allowed in variable {token.text!r}", token)
        if token.text in self.sig:
            raise self.error(FormulaSyntaxError,
                             f"symbol {token.text!r} used as a variable", token)
        return token.text

    # -- formulas -------------------------------------------------------------
    def formula(self) -> Formula:
        if self.at("exists") or self.at("forall"):
            cls = Exists if self.tok.text == "exists" else Forall
            self.pos += 1
            var = self.variable_name()
            self.expect(".")
            return cls(var, self.formula())
        return self.binary(0)

    _LEVELS = (("<->", Iff), ("->", Implies), ("|", Or), ("&", And))

    def binary(self, level: int) -> Formula:
        if level == len(self._LEVELS):
            return self.neg()
        op, cls = self._LEVELS[level]
        left = self.binary(level + 1)
        while self.at(op):
            self.pos += 1
            left = cls(left, self.binary(level + 1))
        return left

    def neg(self) -> Formula:
        if self.at("!"):
            self.pos += 1
            return Not(self.neg())
        return self.atom()

    def atom(self) -> Formula:
        start = self.pos
        if self.at("("):
            try:
                return self.comparison()
            except ParseError:
                self.pos = start
            self.expect("(")
            inner = self.formula()
            self.expect(")")
            return inner
        if self.starts_index_term():
            left = self.iterm()
            self.expect("==")
            return IndexEq(left, self.iterm())
        return self.comparison()

    def comparison(self) -> Formula:
        left = self.nterm()
        if self.at("="):
            self.pos += 1
            return NumEq(left, self.nterm())
        if self.at("<"):
            self.pos += 1
            return NumLt(left, self.nterm())
        raise self.error(FormulaSyntaxError,
                         f"expected '=' or '<', found {self.describe(self.tok)}")

    def starts_index_term(self) -> bool:
        if self.tok.kind != "ident":
            return False
        sym = self.sig.get(self.tok.text)
        return sym is None or sym.index_valued

    # -- terms ----------------------------------------------------------------
    def nterm(self) -> NumberTerm:
        left = self.product()
        while self.at("+"):
            self.pos += 1
            left = Add(left, self.product())
        return left

    def product(self) -> NumberTerm:
        left = self.factor()
        while self.at("*"):
            self.pos += 1
            left = Mul(left, self.factor())
        return left

    def factor(self) -> NumberTerm:
        tok = self.tok
        if tok.kind == "rational":
            self.pos += 1
            return Const(Fraction(tok.text))
        if self.at("sign"):
            self.pos += 1
            self.expect("(")
            arg = self.nterm()
            self.expect(")")
            return Sign(arg)
        if self.at("sum") or self.at("prod") or self.at("max"):
            cls = {"sum": Sum, "prod": Prod, "max": Max}[tok.text]
            self.pos += 1
            var = self.variable_name()
            self.expect("(")
            body = self.nterm()
            self.expect(")")
            return cls(var, body)
        if self.at("chi"):
            self.pos += 1
            self.expect("[")
            inner = self.formula()
            self.expect("]")
            return Char(inner)
        if self.at("("):
            self.pos += 1
            inner = self.nterm()
            self.expect(")")
            return inner
        if tok.kind == "ident":
            sym = self.sig.get(tok.text)
            if sym is None:
                if self.tokens[self.pos + 1].text == "(":
                    raise self.error(UndeclaredSymbolError, f"undeclared symbol {tok.text!r}")
                raise self.error(FormulaSyntaxError,
                                 f"expected number term, found variable {tok.text!r}")
            if sym.index_valued:
                raise self.error(FormulaSyntaxError,
                                 f"index-valued symbol {tok.text!r} used as a number term")
            args = self.application(sym.arity)
            return (AuxNumApp if sym.is_aux else NumApp)(tok.text, args)
        raise self.error(FormulaSyntaxError, f"expected number term, found {self.describe(tok)}")

    def iterm(self) -> IndexTerm:
        tok = self.tok
        if tok.kind != "ident":
            raise self.error(FormulaSyntaxError, f"expected index term, found {self.describe(tok)}")
        if self.tokens[self.pos + 1].text != "(":
            return Var(self.variable_name())
        sym = self.sig.get(tok.text)
        if sym is None:
            raise self.error(UndeclaredSymbolError, f"undeclared symbol {tok.text!r}")
        if not sym.index_valued:
            raise self.error(FormulaSyntaxError,
                             f"number-valued symbol {tok.text!r} used as an index term")
        args = self.application(sym.arity)
        return (AuxIndexApp if sym.is_aux else SkeletonApp)(tok.text, args)

    def application(self, arity: int) -> tuple[IndexTerm, ...]:
        name_tok = self.ident()
        self.expect("(")
        args: list[IndexTerm] = []
        if not self.at(")"):
            args.append(self.iterm())
            while self.at(","):
                self.pos += 1
                args.append(self.iterm())
        self.expect(")")
        if len(args) != arity:
            raise self.error(ArityError,
                             f"symbol {name_tok.text!r} has arity {arity}, got {len(args)} arguments",
                             name_tok)
        return tuple(args)


def parse_formula(text: str, sig: Signature) -> Formula:
    """Parse ``text`` against ``sig``; raises a ParseError subclass on failure."""
    p = _Parser(text, sig)
    try:
        phi = p.formula()
        if p.tok.kind != "eof":
            raise p.error(FormulaSyntaxError, f"unexpected {p.describe(p.tok)}")
    except ParseError as err:
        # Backtracking may have hidden the most informative failure.
        if isinstance(err, (UndeclaredSymbolError, ArityError)):
            raise
        best = p.furthest
        if best is not None and best.offset > err.offset:
            raise best from None
        raise
    return phi


def parse_term(text: str, sig: Signature) -> NumberTerm:
    p = _Parser(text, sig)
    t = p.nterm()
    if p.tok.kind != "eof":
        raise p.error(FormulaSyntaxError, f"unexpected {p.describe(p.tok)}")
    return t


_SIG_LINE = re.compile(r"^(skeleton|number|aux)\s+([A-Za-z_][A-Za-z0-9_]*)\s*/\s*(\d+)(?:\s+(index|number))?$")


def parse_signature(text: str) -> Signature:
    """Read a signature file.

    One declaration per line, ``#`` starts a comment::

        skeleton s/1
        number f/2
        aux g/1 number
        aux h/2 index
    """
    skeleton, numbers, aux = [], [], []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = _SIG_LINE.match(line)
        if m is None:
            raise ParseError(f"bad signature declaration {line!r}", 0, lineno, 1)
        role, name, arity, kind = m.groups()
        if name in KEYWORDS:
            raise ParseError(f"{name!r} is a reserved word", 0, lineno, 1)
        if role == "aux":
            if kind is None:
                raise ParseError(f"aux symbol {name!r} needs a kind (index or number)", 0, lineno, 1)
            aux.append((name, int(arity), kind))
        elif kind is not None:
            raise ParseError("only aux symbols take a kind", 0, lineno, 1)
        else:
            (skeleton if role == "skeleton" else numbers).append((name, int(arity)))
    return Signature(tuple(skeleton), tuple(numbers), tuple(aux))


def format_signature(sig: Signature) -> str:
    lines = [f"skeleton {n}/{a}" for n, a in sig.skeleton]
    lines += [f"number {n}/{a}" for n, a in sig.numbers]
    lines += [f"aux {n}/{a} {k}" for n, a, k in sig.aux]
    return "\n".join(lines) + "\n"
