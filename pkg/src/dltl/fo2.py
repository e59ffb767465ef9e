"""
Two-variable first-order logic over data words.

Variables are x and y. Atomic formulas:

    a(x)      the letter at x is a
    x=y       same position
    x<y       x before y
    x+1=y     y is the next position
    x~+1=y    y is the class successor of x
    x<~y      same class, x before y
    x~y       same class

Grammar, lowest precedence first: `->` (right-associative), `|`, `&`,
prefix `!` and quantifiers `E x.` / `A x.` (extending as far right as
possible), atoms and parenthesized formulas.

Example:
    >>> print(parse_fo2("E y. (x~+1=y & a(y))"))
    E y. x~+1=y & a(y)
"""
import re
from dataclasses import dataclass, fields
from typing import FrozenSet, List, Mapping, Optional, Tuple

from src.logic.evaluator import PositionSet
from src.utils.constants import FO2_VARIABLES, IDENTIFIER_PATTERN
from src.utils.exceptions import FormulaSyntaxError, UnboundVariableError, ValidationError
from src.words.dataword import DataWord

RELATIONS = {
    "eq": "{}={}",
    "lt": "{}<{}",
    "succ": "{}+1={}",
    "csucc": "{}~+1={}",
    "clt": "{}<~{}",
    "same": "{}~{}",
}


class Fo2Formula:
    """Base class of FO2 nodes."""

    def _values(self) -> tuple:
        return tuple(getattr(self, f.name) for f in fields(self))

    def __hash__(self):
        return hash((type(self).__name__,) + self._values())

    def __eq__(self, other):
        return type(self) is type(other) and self._values() == other._values()

    def __str__(self):
        return format_fo2(self)

    def children(self) -> Tuple["Fo2Formula", ...]:
        return ()


@dataclass(frozen=True, eq=False)
class FoConst(Fo2Formula):
    value: bool


@dataclass(frozen=True, eq=False)
class FoPred(Fo2Formula):
    name: str
    var: str


@dataclass(frozen=True, eq=False)
class FoRel(Fo2Formula):
    rel: str
    left: str
    right: str

    def __post_init__(self):
        if self.rel not in RELATIONS:
            raise ValidationError("relation", self.rel, f"expected one of {sorted(RELATIONS)}")


@dataclass(frozen=True, eq=False)
class FoNot(Fo2Formula):
    child: Fo2Formula

    def children(self):
        return (self.child,)


@dataclass(frozen=True, eq=False)
class FoAnd(Fo2Formula):
    left: Fo2Formula
    right: Fo2Formula

    def children(self):
        return (self.left, self.right)


@dataclass(frozen=True, eq=False)
class FoOr(Fo2Formula):
    left: Fo2Formula
    right: Fo2Formula

    def children(self):
        return (self.left, self.right)


@dataclass(frozen=True, eq=False)
class FoExists(Fo2Formula):
    var: str
    body: Fo2Formula

    def children(self):
        return (self.body,)


@dataclass(frozen=True, eq=False)
class FoForall(Fo2Formula):
    var: str
    body: Fo2Formula

    def children(self):
        return (self.body,)


def fo_conj(*formulas: Fo2Formula) -> Fo2Formula:
    parts = [phi for phi in formulas if phi != FoConst(True)]
    if any(phi == FoConst(False) for phi in parts):
        return FoConst(False)
    if not parts:
        return FoConst(True)
    result = parts[0]
    for phi in parts[1:]:
        result = FoAnd(result, phi)
    return result


def fo_disj(*formulas: Fo2Formula) -> Fo2Formula:
    parts = [phi for phi in formulas if phi != FoConst(False)]
    if any(phi == FoConst(True) for phi in parts):
        return FoConst(True)
    if not parts:
        return FoConst(False)
    result = parts[0]
    for phi in parts[1:]:
        result = FoOr(result, phi)
    return result


def other_variable(var: str) -> str:
    return "y" if var == "x" else "x"


def free_variables(phi: Fo2Formula) -> FrozenSet[str]:
    if isinstance(phi, FoPred):
        return frozenset((phi.var,))
    if isinstance(phi, FoRel):
        return frozenset((phi.left, phi.right))
    if isinstance(phi, (FoExists, FoForall)):
        return free_variables(phi.body) - {phi.var}
    result: FrozenSet[str] = frozenset()
    for child in phi.children():
        result |= free_variables(child)
    return result


def quantifier_depth(phi: Fo2Formula) -> int:
    if isinstance(phi, (FoExists, FoForall)):
        return 1 + quantifier_depth(phi.body)
    return max((quantifier_depth(child) for child in phi.children()), default=0)


def fo2_size(phi: Fo2Formula) -> int:
    return 1 + sum(fo2_size(child) for child in phi.children())


# Parsing

_TOKEN_RE = re.compile(
    rf"""
    (?P<ws>\s+)
  | (?P<ident>{IDENTIFIER_PATTERN})
  | (?P<punct>->|~\+1|\+1|<~|[=<~()|&!.])
    """,
    re.VERBOSE,
)

_REL_TOKENS = {"=": "eq", "<": "lt", "<~": "clt", "~": "same"}


def _tokenize(text: str) -> List[Tuple[str, str, int]]:
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


class _Fo2Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.index = 0

    def peek(self, ahead: int = 0) -> Tuple[str, str, int]:
        return self.tokens[min(self.index + ahead, len(self.tokens) - 1)]

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

    def expect(self, value: str) -> None:
        if not self.accept(value):
            _, got, pos = self.peek()
            raise FormulaSyntaxError(self.text, pos, f"expected '{value}', found '{got or 'end of input'}'")

    def variable(self) -> str:
        kind, value, pos = self.advance()
        if kind != "ident" or value not in FO2_VARIABLES:
            raise FormulaSyntaxError(self.text, pos, f"expected a variable x or y, found '{value or 'end of input'}'")
        return value

    def parse(self) -> Fo2Formula:
        result = self.implication()
        kind, value, pos = self.peek()
        if kind != "end":
            raise FormulaSyntaxError(self.text, pos, f"unexpected '{value}'")
        return result

    def implication(self) -> Fo2Formula:
        left = self.disjunction()
        if self.accept("->"):
            return FoOr(FoNot(left), self.implication())
        return left

    def disjunction(self) -> Fo2Formula:
        result = self.conjunction()
        while self.accept("|"):
            result = FoOr(result, self.conjunction())
        return result

    def conjunction(self) -> Fo2Formula:
        result = self.unary()
        while self.accept("&"):
            result = FoAnd(result, self.unary())
        return result

    def unary(self) -> Fo2Formula:
        if self.accept("!"):
            return FoNot(self.unary())
        kind, value, _ = self.peek()
        if kind == "ident" and value in ("E", "A") and self.peek(1)[1] in FO2_VARIABLES:
            self.advance()
            var = self.variable()
            self.expect(".")
            body = self.implication()
            return FoExists(var, body) if value == "E" else FoForall(var, body)
        return self.atom()

    def atom(self) -> Fo2Formula:
        kind, value, pos = self.peek()
        if self.accept("("):
            inner = self.implication()
            self.expect(")")
            return inner
        if kind != "ident":
            raise FormulaSyntaxError(self.text, pos, f"expected an atom, found '{value or 'end of input'}'")
        if value in ("true", "false"):
            self.advance()
            return FoConst(value == "true")
        if self.peek(1)[1] == "(":
            self.advance()
            self.advance()
            var = self.variable()
            self.expect(")")
            return FoPred(value, var)
        left = self.variable()
        _, op, op_pos = self.advance()
        if op in ("+1", "~+1"):
            self.expect("=")
            return FoRel("succ" if op == "+1" else "csucc", left, self.variable())
        if op in _REL_TOKENS:
            return FoRel(_REL_TOKENS[op], left, self.variable())
        raise FormulaSyntaxError(self.text, op_pos, f"expected a relation after '{left}', found '{op or 'end of input'}'")


def parse_fo2(text: str) -> Fo2Formula:
    """Parse FO2 text; raises FormulaSyntaxError with the offending offset."""
    return _Fo2Parser(text).parse()


_PREC_IMPL, _PREC_OR, _PREC_AND, _PREC_UNARY = 1, 2, 3, 4


def format_fo2(phi: Fo2Formula) -> str:
    return _render(phi, 0)


def _render(phi: Fo2Formula, context: int) -> str:
    if isinstance(phi, FoConst):
        return "true" if phi.value else "false"
    if isinstance(phi, FoPred):
        return f"{phi.name}({phi.var})"
    if isinstance(phi, FoRel):
        return RELATIONS[phi.rel].format(phi.left, phi.right)
    if isinstance(phi, FoNot):
        return f"!{_render(phi.child, _PREC_UNARY)}"
    if isinstance(phi, (FoExists, FoForall)):
        letter = "E" if isinstance(phi, FoExists) else "A"
        text = f"{letter} {phi.var}. {_render(phi.body, _PREC_IMPL)}"
        return f"({text})" if context > 0 else text
    if isinstance(phi, FoAnd):
        text = f"{_render(phi.left, _PREC_AND)} & {_render(phi.right, _PREC_UNARY)}"
        return f"({text})" if _PREC_AND < context else text
    if isinstance(phi, FoOr):
        text = f"{_render(phi.left, _PREC_OR)} | {_render(phi.right, _PREC_AND)}"
        return f"({text})" if _PREC_OR < context else text
    raise TypeError(f"cannot render {type(phi).__name__}")


# Semantics

def _relation_holds(word: DataWord, rel: str, i: int, j: int) -> bool:
    if rel == "eq":
        return i == j
    if rel == "lt":
        return i < j
    if rel == "succ":
        return i + 1 == j
    if rel == "csucc":
        return word.class_successor(i) == j
    same = word.values[i - 1] == word.values[j - 1]
    if rel == "clt":
        return same and i < j
    return same


def eval_fo2(word: DataWord, phi: Fo2Formula, assignment: Optional[Mapping[str, int]] = None) -> bool:
    """Truth of phi on the word under a position assignment (1-based positions)."""
    env = dict(assignment or {})
    for var, i in env.items():
        if not 1 <= i <= len(word):
            raise ValidationError("position", i, f"{var} must lie in 1..{len(word)}")
    return _holds(word, phi, env)


def _lookup(env: Mapping[str, int], var: str) -> int:
    if var not in env:
        raise UnboundVariableError(var)
    return env[var]


def _holds(word: DataWord, phi: Fo2Formula, env: dict) -> bool:
    if isinstance(phi, FoConst):
        return phi.value
    if isinstance(phi, FoPred):
        return word.letters[_lookup(env, phi.var) - 1] == phi.name
    if isinstance(phi, FoRel):
        return _relation_holds(word, phi.rel, _lookup(env, phi.left), _lookup(env, phi.right))
    if isinstance(phi, FoNot):
        return not _holds(word, phi.child, env)
    if isinstance(phi, FoAnd):
        return _holds(word, phi.left, env) and _holds(word, phi.right, env)
    if isinstance(phi, FoOr):
        return _holds(word, phi.left, env) or _holds(word, phi.right, env)
    if isinstance(phi, (FoExists, FoForall)):
        want = isinstance(phi, FoExists)
        for i in range(1, len(word) + 1):
            if _holds(word, phi.body, {**env, phi.var: i}) == want:
                return want
        return not want
    raise TypeError(f"cannot evaluate {type(phi).__name__}")


def fo2_positions(word: DataWord, phi: Fo2Formula, var: str = "x") -> PositionSet:
    """Positions i such that phi holds with var := i."""
    return frozenset(i for i in range(1, len(word) + 1) if eval_fo2(word, phi, {var: i}))
