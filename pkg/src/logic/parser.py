"""
Concrete syntax for mu-calculus formulas.

Grammar, lowest precedence first:

    until/since (Ug Uc Sg Sc, right-associative)
    |   (left-associative)
    &   (left-associative)
    prefix unary: Xg Xc Yg Yc ~Xg ~Xc ~Yg ~Yc Fg Fc Gg Gc Pg Pc Hg Hc,
                  and `mu x.` / `nu x.` extending as far right as possible
    !   (atoms only)
    atoms: true false S P nS nP firstg firstc lastg lastc, identifiers, ( ... )

Identifiers bound by an enclosing mu/nu are fixpoint variables, all others
are letter propositions. A variable bound twice is alpha-renamed so that
binder names are distinct in the parsed tree.

Example:
    >>> print(parse_formula("nu x. Xg Yc x"))
    nu x. Xg Yc x
"""
import re
from typing import Dict, List, Optional, Set, Tuple

from src.logic.syntax import (
    And,
    Const,
    DualMod,
    Fix,
    Formula,
    Mod,
    Or,
    Prop,
    Temporal,
    Until,
    Var,
    Zero,
    fresh_name,
    props,
    rename_apart,
    walk,
)
from src.utils.constants import (
    IDENTIFIER_PATTERN,
    KEYWORDS,
    MODALITIES,
    TEMPORAL_OPS,
    UNTIL_OPS,
    ZEROARIES,
)
from src.utils.exceptions import FormulaSyntaxError

_TOKEN_RE = re.compile(
    rf"""
    (?P<ws>\s+)
  | (?P<tilde>~(?:Xg|Xc|Yg|Yc)(?![A-Za-z0-9_]))
  | (?P<ident>{IDENTIFIER_PATTERN})
  | (?P<punct>[()|&!.])
    """,
    re.VERBOSE,
)

_ATOM_WORDS = {
    "true": Const(True),
    "false": Const(False),
    "nS": Zero("S", False),
    "nP": Zero("P", False),
}


def tokenize(text: str) -> List[Tuple[str, str, int]]:
    """Split text into (kind, value, offset) tokens."""
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


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = tokenize(text)
        self.index = 0
        self.scopes: List[Dict[str, str]] = []
        self.binders: Set[str] = set()
        self.used: Set[str] = {value for kind, value, _ in self.tokens if kind == "ident"}

    # Token helpers

    def peek(self) -> Tuple[str, str, int]:
        return self.tokens[self.index]

    def advance(self) -> Tuple[str, str, int]:
        token = self.tokens[self.index]
        self.index += 1
        return token

    def expect(self, value: str) -> None:
        kind, got, pos = self.advance()
        if got != value or kind == "end":
            raise FormulaSyntaxError(self.text, pos, f"expected '{value}', found '{got or 'end of input'}'")

    def error(self, reason: str) -> FormulaSyntaxError:
        return FormulaSyntaxError(self.text, self.peek()[2], reason)

    # Grammar

    def parse(self) -> Formula:
        result = self.until()
        kind, value, pos = self.peek()
        if kind != "end":
            raise FormulaSyntaxError(self.text, pos, f"unexpected '{value}'")
        return result

    def until(self) -> Formula:
        left = self.disjunction()
        kind, value, _ = self.peek()
        if kind == "ident" and value in UNTIL_OPS:
            self.advance()
            return Until(value, left, self.until())
        return left

    def disjunction(self) -> Formula:
        result = self.conjunction()
        while self.peek()[1] == "|" and self.peek()[0] == "punct":
            self.advance()
            result = Or(result, self.conjunction())
        return result

    def conjunction(self) -> Formula:
        result = self.unary()
        while self.peek()[1] == "&" and self.peek()[0] == "punct":
            self.advance()
            result = And(result, self.unary())
        return result

    def unary(self) -> Formula:
        kind, value, _ = self.peek()
        if kind == "tilde":
            self.advance()
            return DualMod(value[1:], self.unary())
        if kind == "ident" and value in MODALITIES:
            self.advance()
            return Mod(value, self.unary())
        if kind == "ident" and value in TEMPORAL_OPS:
            self.advance()
            return Temporal(value, self.unary())
        if kind == "ident" and value in ("mu", "nu"):
            return self.binder()
        return self.negation()

    def binder(self) -> Formula:
        _, fix_kind, _ = self.advance()
        kind, name, pos = self.advance()
        if kind != "ident" or name in KEYWORDS:
            raise FormulaSyntaxError(self.text, pos, f"expected a variable name after '{fix_kind}'")
        self.expect(".")
        bound = name
        if name in self.binders:
            bound = fresh_name(name, self.used)
        self.binders.add(bound)
        self.used.add(bound)
        self.scopes.append({name: bound})
        try:
            body = self.until()
        finally:
            self.scopes.pop()
        return Fix(fix_kind, bound, body)

    def negation(self) -> Formula:
        kind, value, pos = self.peek()
        if kind == "punct" and value == "!":
            self.advance()
            atom = self.atom()
            return _negate_atom(atom, self.text, pos)
        return self.atom()

    def atom(self) -> Formula:
        kind, value, pos = self.advance()
        if kind == "punct" and value == "(":
            inner = self.until()
            self.expect(")")
            return inner
        if kind == "ident":
            if value in _ATOM_WORDS:
                return _ATOM_WORDS[value]
            if value in ZEROARIES:
                return Zero(value)
            if value in KEYWORDS:
                raise FormulaSyntaxError(self.text, pos, f"unexpected keyword '{value}'")
            for scope in reversed(self.scopes):
                if value in scope:
                    return Var(scope[value])
            return Prop(value)
        found = value or "end of input"
        raise FormulaSyntaxError(self.text, pos, f"expected an atom, found '{found}'")


def _negate_atom(atom: Formula, text: str, pos: int) -> Formula:
    if isinstance(atom, Const):
        return Const(not atom.value)
    if isinstance(atom, Prop):
        return Prop(atom.name, not atom.positive)
    if isinstance(atom, Zero):
        return Zero(atom.kind, not atom.positive)
    raise FormulaSyntaxError(text, pos, "negation applies to atoms only")


def parse_formula(text: str) -> Formula:
    """Parse formula text; raises FormulaSyntaxError with the offending offset."""
    return _Parser(text).parse()


# Printing

_PREC_UNTIL, _PREC_OR, _PREC_AND, _PREC_UNARY, _PREC_ATOM = 1, 2, 3, 4, 5


def format_formula(phi: Formula) -> str:
    """Render a formula in the concrete syntax; the output reparses to an alpha-equal tree."""
    names = [node.var for node in walk(phi) if isinstance(node, Fix)]
    clashes = len(names) != len(set(names)) or set(names) & (props(phi) | set(phi.free_vars))
    if clashes:
        phi = rename_apart(phi)
    return _render(phi, 0, top=True)


def _render(phi: Formula, context: int, top: bool = False) -> str:
    if isinstance(phi, Const):
        return "true" if phi.value else "false"
    if isinstance(phi, Prop):
        return phi.name if phi.positive else f"!{phi.name}"
    if isinstance(phi, Zero):
        return phi.kind if phi.positive else f"!{phi.kind}"
    if isinstance(phi, Var):
        return phi.name
    if isinstance(phi, Fix):
        text = f"{phi.kind} {phi.var}. {_render(phi.body, _PREC_UNTIL)}"
        return text if top else f"({text})"
    if isinstance(phi, (Mod, Temporal)):
        return _wrap(f"{phi.op} {_render(phi.child, _PREC_UNARY)}", _PREC_UNARY, context)
    if isinstance(phi, DualMod):
        return _wrap(f"~{phi.op} {_render(phi.child, _PREC_UNARY)}", _PREC_UNARY, context)
    if isinstance(phi, And):
        text = f"{_render(phi.left, _PREC_AND)} & {_render(phi.right, _PREC_UNARY)}"
        return _wrap(text, _PREC_AND, context)
    if isinstance(phi, Or):
        text = f"{_render(phi.left, _PREC_OR)} | {_render(phi.right, _PREC_AND)}"
        return _wrap(text, _PREC_OR, context)
    if isinstance(phi, Until):
        text = f"{_render(phi.left, _PREC_OR)} {phi.op} {_render(phi.right, _PREC_UNTIL)}"
        return _wrap(text, _PREC_UNTIL, context)
    raise TypeError(f"cannot render {type(phi).__name__}")


def _wrap(text: str, own: int, context: int) -> str:
    return f"({text})" if own < context else text
