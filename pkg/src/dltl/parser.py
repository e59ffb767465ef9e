"""
Concrete syntax for Data-LTL formulas.

Grammar, lowest precedence first:

    ->  (right-associative)
    until/since (Ug Uc Sg Sc, right-associative)
    |   (left-associative)
    &   (left-associative)
    prefix unary: ! Xg Xc Yg Yc Fg Fc Pg Pc Gg Gc Hg Hc
                  fF~ dP~ F~ P~ and their duals fG~ dH~ G~ H~
    atoms: true false S P, identifiers, ( ... )

Negation is unrestricted. G/H operators are read as negated F/P.

Example:
    >>> print(parse_dltl("a Uc b"))
    a Uc b
"""
import re
from typing import List, Tuple

from src.dltl.syntax import (
    DAnd,
    DConst,
    DEventually,
    DFar,
    DltlFormula,
    DNext,
    DNot,
    DOr,
    DProp,
    DUntil,
    DZero,
    d_always,
    d_not,
)
from src.utils.constants import (
    DLTL_ALWAYS_OPS,
    DLTL_EVENTUALLY_OPS,
    DLTL_KEYWORDS,
    FAR_DUALS,
    IDENTIFIER_PATTERN,
    MODALITIES,
    UNTIL_OPS,
)
from src.utils.exceptions import FormulaSyntaxError

_TOKEN_RE = re.compile(
    rf"""
    (?P<ws>\s+)
  | (?P<far>(?:fF|dP|fG|dH|F|P|G|H)~)
  | (?P<ident>{IDENTIFIER_PATTERN})
  | (?P<punct>->|[()|&!])
    """,
    re.VERBOSE,
)


def tokenize_dltl(text: str) -> List[Tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        match = _TOKEN_RE.match(text, pos)
        if not match:
            raise FormulaSyntaxError(text, pos, f"unexpected character '{text[pos]}'")
        kind = match.lastgroup
        if kind != "ws":
            tokens.append((kind, match.group(kind), pos))
        pos = match.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _DltlParser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = tokenize_dltl(text)
        self.index = 0

    def peek(self) -> Tuple[str, str, int]:
        return self.tokens[self.index]

    def advance(self) -> Tuple[str, str, int]:
        token = self.tokens[self.index]
        self.index += 1
        return token

    def accept(self, value: str) -> bool:
        kind, got, _ = self.peek()
        if kind == "punct" and got == value:
            self.index += 1
            return True
        return False

    def parse(self) -> DltlFormula:
        result = self.implication()
        kind, value, pos = self.peek()
        if kind != "end":
            raise FormulaSyntaxError(self.text, pos, f"unexpected '{value}'")
        return result

    def implication(self) -> DltlFormula:
        left = self.until()
        if self.accept("->"):
            return DOr(d_not(left), self.implication())
        return left

    def until(self) -> DltlFormula:
        left = self.disjunction()
        kind, value, _ = self.peek()
        if kind == "ident" and value in UNTIL_OPS:
            self.advance()
            return DUntil(value, left, self.until())
        return left

    def disjunction(self) -> DltlFormula:
        result = self.conjunction()
        while self.accept("|"):
            result = DOr(result, self.conjunction())
        return result

    def conjunction(self) -> DltlFormula:
        result = self.unary()
        while self.accept("&"):
            result = DAnd(result, self.unary())
        return result

    def unary(self) -> DltlFormula:
        kind, value, _ = self.peek()
        if self.accept("!"):
            return DNot(self.unary())
        if kind == "far":
            self.advance()
            if value in FAR_DUALS:
                return d_not(DFar(FAR_DUALS[value], d_not(self.unary())))
            return DFar(value, self.unary())
        if kind == "ident" and value in MODALITIES:
            self.advance()
            return DNext(value, self.unary())
        if kind == "ident" and value in DLTL_EVENTUALLY_OPS:
            self.advance()
            return DEventually(value, self.unary())
        if kind == "ident" and value in DLTL_ALWAYS_OPS:
            self.advance()
            return d_always(value, self.unary())
        return self.atom()

    def atom(self) -> DltlFormula:
        kind, value, pos = self.advance()
        if kind == "punct" and value == "(":
            inner = self.implication()
            if not self.accept(")"):
                _, got, where = self.peek()
                raise FormulaSyntaxError(self.text, where, f"expected ')', found '{got or 'end of input'}'")
            return inner
        if kind == "ident":
            if value in ("true", "false"):
                return DConst(value == "true")
            if value in ("S", "P"):
                return DZero(value)
            if value in DLTL_KEYWORDS:
                raise FormulaSyntaxError(self.text, pos, f"unexpected keyword '{value}'")
            return DProp(value)
        found = value or "end of input"
        raise FormulaSyntaxError(self.text, pos, f"expected an atom, found '{found}'")


def parse_dltl(text: str) -> DltlFormula:
    """Parse Data-LTL text; raises FormulaSyntaxError with the offending offset."""
    return _DltlParser(text).parse()


_PREC_UNTIL, _PREC_OR, _PREC_AND, _PREC_UNARY = 1, 2, 3, 4


def format_dltl(phi: DltlFormula) -> str:
    return _render(phi, 0)


def _render(phi: DltlFormula, context: int) -> str:
    if isinstance(phi, DConst):
        return "true" if phi.value else "false"
    if isinstance(phi, DProp):
        return phi.name
    if isinstance(phi, DZero):
        return phi.kind
    if isinstance(phi, DNot):
        return f"!{_render(phi.child, _PREC_UNARY)}"
    if isinstance(phi, (DNext, DEventually, DFar)):
        return _wrap(f"{phi.op} {_render(phi.child, _PREC_UNARY)}", _PREC_UNARY, context)
    if isinstance(phi, DAnd):
        text = f"{_render(phi.left, _PREC_AND)} & {_render(phi.right, _PREC_UNARY)}"
        return _wrap(text, _PREC_AND, context)
    if isinstance(phi, DOr):
        text = f"{_render(phi.left, _PREC_OR)} | {_render(phi.right, _PREC_AND)}"
        return _wrap(text, _PREC_OR, context)
    if isinstance(phi, DUntil):
        text = f"{_render(phi.left, _PREC_OR)} {phi.op} {_render(phi.right, _PREC_UNTIL)}"
        return _wrap(text, _PREC_UNTIL, context)
    raise TypeError(f"cannot render {type(phi).__name__}")


def _wrap(text: str, own: int, context: int) -> str:
    return f"({text})" if own < context else text
