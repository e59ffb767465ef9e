"""
Abstract syntax of Data-LTL.

Data-LTL has letter propositions, the zeroary markings S and P, full
negation, the four next/previous modalities, the four until/since
operators and (as derived operators kept in the tree) reflexive F/P per
mode. Unary Data-LTL is the fragment without until/since.

The not-in-class modalities are kept as `DFar` nodes with their direct
semantics; `src.dltl.translate.expand_far` rewrites them into unary
Data-LTL.

    fF~ phi   some j > i+1 outside the class of i satisfies phi
    dP~ phi   some j < i-1 outside the class of i satisfies phi
    F~ phi    some j > i outside the class of i satisfies phi
    P~ phi    some j < i outside the class of i satisfies phi
"""
from dataclasses import dataclass, fields
from typing import Iterator, Set, Tuple

from src.utils.constants import (
    DLTL_EVENTUALLY_OPS,
    FAR_OPS,
    MODALITIES,
    UNTIL_OPS,
)
from src.utils.exceptions import ValidationError

MARKERS = ("S", "P")


class DltlFormula:
    """Base class of Data-LTL nodes."""

    def _values(self) -> tuple:
        return tuple(getattr(self, f.name) for f in fields(self))

    def __hash__(self):
        cached = self.__dict__.get("_hash")
        if cached is None:
            cached = hash((type(self).__name__,) + self._values())
            object.__setattr__(self, "_hash", cached)
        return cached

    def __eq__(self, other):
        if self is other:
            return True
        if type(self) is not type(other) or hash(self) != hash(other):
            return False
        return self._values() == other._values()

    def __str__(self):
        from src.dltl.parser import format_dltl
        return format_dltl(self)

    def children(self) -> Tuple["DltlFormula", ...]:
        return ()

    def with_children(self, children: Tuple["DltlFormula", ...]) -> "DltlFormula":
        return self


@dataclass(frozen=True, eq=False)
class DConst(DltlFormula):
    value: bool


@dataclass(frozen=True, eq=False)
class DProp(DltlFormula):
    name: str


@dataclass(frozen=True, eq=False)
class DZero(DltlFormula):
    kind: str

    def __post_init__(self):
        if self.kind not in MARKERS:
            raise ValidationError("marking", self.kind, f"expected one of {MARKERS}")


@dataclass(frozen=True, eq=False)
class DNot(DltlFormula):
    child: DltlFormula

    def children(self):
        return (self.child,)

    def with_children(self, children):
        return DNot(children[0])


@dataclass(frozen=True, eq=False)
class DAnd(DltlFormula):
    left: DltlFormula
    right: DltlFormula

    def children(self):
        return (self.left, self.right)

    def with_children(self, children):
        return DAnd(children[0], children[1])


@dataclass(frozen=True, eq=False)
class DOr(DltlFormula):
    left: DltlFormula
    right: DltlFormula

    def children(self):
        return (self.left, self.right)

    def with_children(self, children):
        return DOr(children[0], children[1])


@dataclass(frozen=True, eq=False)
class DNext(DltlFormula):
    """Xg Xc Yg Yc: strict next / previous position, globally or in the class."""
    op: str
    child: DltlFormula

    def __post_init__(self):
        if self.op not in MODALITIES:
            raise ValidationError("modality", self.op, f"expected one of {MODALITIES}")

    def children(self):
        return (self.child,)

    def with_children(self, children):
        return DNext(self.op, children[0])


@dataclass(frozen=True, eq=False)
class DEventually(DltlFormula):
    """Fg Fc Pg Pc, reflexive."""
    op: str
    child: DltlFormula

    def __post_init__(self):
        if self.op not in DLTL_EVENTUALLY_OPS:
            raise ValidationError("eventually operator", self.op, f"expected one of {DLTL_EVENTUALLY_OPS}")

    def children(self):
        return (self.child,)

    def with_children(self, children):
        return DEventually(self.op, children[0])


@dataclass(frozen=True, eq=False)
class DUntil(DltlFormula):
    """left Ug right: right now or later, left at every position before it."""
    op: str
    left: DltlFormula
    right: DltlFormula

    def __post_init__(self):
        if self.op not in UNTIL_OPS:
            raise ValidationError("until operator", self.op, f"expected one of {UNTIL_OPS}")

    def children(self):
        return (self.left, self.right)

    def with_children(self, children):
        return DUntil(self.op, children[0], children[1])


@dataclass(frozen=True, eq=False)
class DFar(DltlFormula):
    op: str
    child: DltlFormula

    def __post_init__(self):
        if self.op not in FAR_OPS:
            raise ValidationError("not-in-class modality", self.op, f"expected one of {FAR_OPS}")

    def children(self):
        return (self.child,)

    def with_children(self, children):
        return DFar(self.op, children[0])


D_TRUE = DConst(True)
D_FALSE = DConst(False)


def d_not(phi: DltlFormula) -> DltlFormula:
    if isinstance(phi, DConst):
        return DConst(not phi.value)
    if isinstance(phi, DNot):
        return phi.child
    return DNot(phi)


def d_conj(*formulas: DltlFormula) -> DltlFormula:
    """Conjunction dropping `true` and collapsing on `false`."""
    parts = []
    for phi in formulas:
        if phi == D_FALSE:
            return D_FALSE
        if phi != D_TRUE and phi not in parts:
            parts.append(phi)
    if not parts:
        return D_TRUE
    result = parts[0]
    for phi in parts[1:]:
        result = DAnd(result, phi)
    return result


def d_disj(*formulas: DltlFormula) -> DltlFormula:
    parts = []
    for phi in formulas:
        if phi == D_TRUE:
            return D_TRUE
        if phi != D_FALSE and phi not in parts:
            parts.append(phi)
    if not parts:
        return D_FALSE
    result = parts[0]
    for phi in parts[1:]:
        result = DOr(result, phi)
    return result


def d_always(op: str, phi: DltlFormula) -> DltlFormula:
    """Gg Gc Hg Hc as the negation of the matching eventually."""
    eventually = {"Gg": "Fg", "Gc": "Fc", "Hg": "Pg", "Hc": "Pc"}[op]
    return d_not(DEventually(eventually, d_not(phi)))


def d_walk(phi: DltlFormula) -> Iterator[DltlFormula]:
    stack = [phi]
    while stack:
        node = stack.pop()
        yield node
        stack.extend(reversed(node.children()))


def d_size(phi: DltlFormula) -> int:
    return sum(1 for _ in d_walk(phi))


def d_props(phi: DltlFormula) -> Set[str]:
    return {node.name for node in d_walk(phi) if isinstance(node, DProp)}


def modal_depth(phi: DltlFormula) -> int:
    """Nesting depth of modalities; S and P count as one modality, a far modality as one."""
    if isinstance(phi, DZero):
        return 1
    if isinstance(phi, (DNext, DEventually, DUntil, DFar)):
        return 1 + max(modal_depth(child) for child in phi.children())
    if isinstance(phi, (DNot, DAnd, DOr)):
        return max(modal_depth(child) for child in phi.children())
    return 0


def is_unary(phi: DltlFormula, allow_far: bool = False) -> bool:
    """True for unary Data-LTL: no until/since, far modalities only when allowed."""
    for node in d_walk(phi):
        if isinstance(node, DUntil):
            return False
        if isinstance(node, DFar) and not allow_far:
            return False
    return True


def map_dltl(phi: DltlFormula, fn) -> DltlFormula:
    """Rebuild bottom-up, applying fn to every rebuilt node."""
    children = tuple(map_dltl(child, fn) for child in phi.children())
    if children:
        phi = phi.with_children(children)
    return fn(phi)
