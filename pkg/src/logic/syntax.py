"""
Abstract syntax of the mu-calculus over data words.

Core nodes follow the grammar: constants, letter propositions and zeroary
modalities (negation only on these atoms), fixpoint variables, conjunction,
disjunction, the four unary modalities and their tilde duals, and the two
fixpoint binders. Temporal and until/since nodes are syntactic sugar that
`src.logic.transforms.desugar` expands.

Nodes are immutable and hash structurally; the hash and the free-variable
set of a node are computed once and cached on the instance.
"""
from dataclasses import dataclass, fields
from typing import Callable, Dict, FrozenSet, Iterable, Iterator, Mapping, Optional, Set, Tuple

from src.utils.constants import (
    FIXPOINT_KINDS,
    MODALITIES,
    MU,
    NU,
    TEMPORAL_OPS,
    UNTIL_OPS,
    ZEROARIES,
)
from src.utils.exceptions import ValidationError


class Formula:
    """Base class of all formula nodes."""

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
        from src.logic.parser import format_formula
        return format_formula(self)

    def children(self) -> Tuple["Formula", ...]:
        return ()

    def with_children(self, children: Tuple["Formula", ...]) -> "Formula":
        return self

    @property
    def free_vars(self) -> FrozenSet[str]:
        cached = self.__dict__.get("_free")
        if cached is None:
            cached = self._compute_free()
            object.__setattr__(self, "_free", cached)
        return cached

    def _compute_free(self) -> FrozenSet[str]:
        result: FrozenSet[str] = frozenset()
        for child in self.children():
            result |= child.free_vars
        return result


@dataclass(frozen=True, eq=False)
class Const(Formula):
    value: bool


@dataclass(frozen=True, eq=False)
class Prop(Formula):
    """Letter proposition; `positive=False` reads "letter differs from name"."""
    name: str
    positive: bool = True


@dataclass(frozen=True, eq=False)
class Zero(Formula):
    kind: str
    positive: bool = True

    def __post_init__(self):
        if self.kind not in ZEROARIES:
            raise ValidationError("zeroary modality", self.kind, f"expected one of {ZEROARIES}")


@dataclass(frozen=True, eq=False)
class Var(Formula):
    name: str

    def _compute_free(self):
        return frozenset((self.name,))


@dataclass(frozen=True, eq=False)
class And(Formula):
    left: Formula
    right: Formula

    def children(self):
        return (self.left, self.right)

    def with_children(self, children):
        return And(children[0], children[1])


@dataclass(frozen=True, eq=False)
class Or(Formula):
    left: Formula
    right: Formula

    def children(self):
        return (self.left, self.right)

    def with_children(self, children):
        return Or(children[0], children[1])


@dataclass(frozen=True, eq=False)
class Mod(Formula):
    op: str
    child: Formula

    def __post_init__(self):
        if self.op not in MODALITIES:
            raise ValidationError("modality", self.op, f"expected one of {MODALITIES}")

    def children(self):
        return (self.child,)

    def with_children(self, children):
        return Mod(self.op, children[0])


@dataclass(frozen=True, eq=False)
class DualMod(Formula):
    """Tilde modality: ~M phi holds where M phi holds or the neighbour is missing."""
    op: str
    child: Formula

    def __post_init__(self):
        if self.op not in MODALITIES:
            raise ValidationError("modality", self.op, f"expected one of {MODALITIES}")

    def children(self):
        return (self.child,)

    def with_children(self, children):
        return DualMod(self.op, children[0])


@dataclass(frozen=True, eq=False)
class Fix(Formula):
    kind: str
    var: str
    body: Formula

    def __post_init__(self):
        if self.kind not in FIXPOINT_KINDS:
            raise ValidationError("fixpoint kind", self.kind, "expected mu or nu")

    def children(self):
        return (self.body,)

    def with_children(self, children):
        return Fix(self.kind, self.var, children[0])

    def _compute_free(self):
        return self.body.free_vars - {self.var}


@dataclass(frozen=True, eq=False)
class Temporal(Formula):
    """Reflexive F/G/P/H sugar in global or class mode."""
    op: str
    child: Formula

    def __post_init__(self):
        if self.op not in TEMPORAL_OPS:
            raise ValidationError("temporal operator", self.op, f"expected one of {TEMPORAL_OPS}")

    def children(self):
        return (self.child,)

    def with_children(self, children):
        return Temporal(self.op, children[0])


@dataclass(frozen=True, eq=False)
class Until(Formula):
    op: str
    left: Formula
    right: Formula

    def __post_init__(self):
        if self.op not in UNTIL_OPS:
            raise ValidationError("until operator", self.op, f"expected one of {UNTIL_OPS}")

    def children(self):
        return (self.left, self.right)

    def with_children(self, children):
        return Until(self.op, children[0], children[1])


TRUE = Const(True)
FALSE = Const(False)

ATOMIC = (Const, Prop, Zero, Var)


def mu(var: str, body: Formula) -> Fix:
    return Fix(MU, var, body)


def nu(var: str, body: Formula) -> Fix:
    return Fix(NU, var, body)


def neg_prop(name: str) -> Prop:
    return Prop(name, False)


def conj(*formulas: Formula) -> Formula:
    """Conjunction with constant folding; empty conjunction is true."""
    parts = []
    for f in formulas:
        if f == TRUE:
            continue
        if f == FALSE:
            return FALSE
        if f not in parts:
            parts.append(f)
    if not parts:
        return TRUE
    result = parts[0]
    for f in parts[1:]:
        result = And(result, f)
    return result


def disj(*formulas: Formula) -> Formula:
    """Disjunction with constant folding; empty disjunction is false."""
    parts = []
    for f in formulas:
        if f == FALSE:
            continue
        if f == TRUE:
            return TRUE
        if f not in parts:
            parts.append(f)
    if not parts:
        return FALSE
    result = parts[0]
    for f in parts[1:]:
        result = Or(result, f)
    return result


# Traversal helpers

def walk(phi: Formula) -> Iterator[Formula]:
    """Pre-order traversal."""
    stack = [phi]
    while stack:
        node = stack.pop()
        yield node
        stack.extend(reversed(node.children()))


def nodes(phi: Formula) -> Iterator[Formula]:
    """Every distinct node object once; linear in the size of a shared DAG."""
    seen: Set[int] = set()
    stack = [phi]
    while stack:
        node = stack.pop()
        if id(node) in seen:
            continue
        seen.add(id(node))
        yield node
        stack.extend(reversed(node.children()))


def dag_size(phi: Formula) -> int:
    return sum(1 for _ in nodes(phi))


def size(phi: Formula) -> int:
    return sum(1 for _ in walk(phi))


def props(phi: Formula) -> Set[str]:
    return {node.name for node in nodes(phi) if isinstance(node, Prop)}


def zeroaries(phi: Formula) -> Set[str]:
    return {node.kind for node in nodes(phi) if isinstance(node, Zero)}


def binder_names(phi: Formula) -> Set[str]:
    return {node.var for node in nodes(phi) if isinstance(node, Fix)}


def all_names(phi: Formula) -> Set[str]:
    names: Set[str] = set()
    for node in nodes(phi):
        if isinstance(node, (Prop, Var)):
            names.add(node.name)
        elif isinstance(node, Fix):
            names.add(node.var)
    return names


def modalities(phi: Formula) -> Set[str]:
    return {node.op for node in nodes(phi) if isinstance(node, (Mod, DualMod))}


def fixpoint_kinds(phi: Formula) -> Set[str]:
    return {node.kind for node in nodes(phi) if isinstance(node, Fix)}


def is_sentence(phi: Formula) -> bool:
    return not phi.free_vars


def map_bottom_up(phi: Formula, fn: Callable[[Formula], Formula]) -> Formula:
    """Rebuild `phi` applying `fn` to every node after its children."""
    children = phi.children()
    if children:
        new_children = tuple(map_bottom_up(child, fn) for child in children)
        if new_children != children:
            phi = phi.with_children(new_children)
    return fn(phi)


def fresh_name(base: str, used: Set[str]) -> str:
    """First of base, base1, base2, ... not in `used`; the result is added to `used`."""
    stem = base.rstrip("0123456789") or base
    name = base
    k = 1
    while name in used:
        name = f"{stem}{k}"
        k += 1
    used.add(name)
    return name


# Substitution and renaming

def substitute(phi: Formula, mapping: Mapping[str, Formula]) -> Formula:
    """Capture-avoiding substitution of free variables."""
    mapping = {k: v for k, v in mapping.items() if k in phi.free_vars}
    if not mapping:
        return phi
    incoming: Set[str] = set()
    for value in mapping.values():
        incoming |= value.free_vars
    used = all_names(phi) | incoming | set(mapping)
    for value in mapping.values():
        used |= all_names(value)
    return _substitute(phi, mapping, incoming, used)


def _substitute(phi: Formula, mapping: Dict[str, Formula], incoming: Set[str], used: Set[str]) -> Formula:
    if not mapping or not (phi.free_vars & mapping.keys()):
        return phi
    if isinstance(phi, Var):
        return mapping.get(phi.name, phi)
    if isinstance(phi, Fix):
        inner = {k: v for k, v in mapping.items() if k != phi.var}
        var, body = phi.var, phi.body
        if var in incoming:
            new_var = fresh_name(var, used)
            body = _substitute(body, {var: Var(new_var)}, {new_var}, used)
            var = new_var
        return Fix(phi.kind, var, _substitute(body, inner, incoming, used))
    return phi.with_children(tuple(_substitute(c, mapping, incoming, used) for c in phi.children()))


SubstitutionMemo = Dict[Tuple[Formula, FrozenSet[str]], Formula]


def plain_substitute(
    phi: Formula,
    mapping: Mapping[str, Formula],
    memo: Optional[SubstitutionMemo] = None,
) -> Formula:
    """Textual substitution of variables, ignoring capture.

    Subterms without a free mapped variable are kept as they are and shared
    subterms are rewritten once, so the result shares what `phi` shares.
    Calls may share `memo` as long as their mappings agree on common names.
    """
    return _plain(phi, dict(mapping), {} if memo is None else memo)


def _plain(phi: Formula, mapping: Dict[str, Formula], memo: SubstitutionMemo) -> Formula:
    relevant = phi.free_vars & mapping.keys()
    if not relevant:
        return phi
    key = (phi, frozenset(relevant))
    cached = memo.get(key)
    if cached is not None:
        return cached
    if isinstance(phi, Var):
        result = mapping[phi.name]
    elif isinstance(phi, Fix):
        inner = {k: v for k, v in mapping.items() if k != phi.var}
        result = Fix(phi.kind, phi.var, _plain(phi.body, inner, memo))
    else:
        result = phi.with_children(tuple(_plain(c, mapping, memo) for c in phi.children()))
    memo[key] = result
    return result


def rename_apart(phi: Formula, avoid: Iterable[str] = ()) -> Formula:
    """Alpha-rename binders so that they are pairwise distinct and avoid `avoid`.

    Binders already unique keep their names.
    """
    taken: Set[str] = set(avoid) | set(phi.free_vars) | props(phi)
    return _rename(phi, {}, taken)


def _rename(phi: Formula, env: Dict[str, str], taken: Set[str]) -> Formula:
    if isinstance(phi, Var):
        return Var(env[phi.name]) if phi.name in env else phi
    if isinstance(phi, Fix):
        new_var = fresh_name(phi.var, taken) if phi.var in taken else phi.var
        taken.add(new_var)
        inner = dict(env)
        inner[phi.var] = new_var
        return Fix(phi.kind, new_var, _rename(phi.body, inner, taken))
    children = phi.children()
    if not children:
        return phi
    return phi.with_children(tuple(_rename(c, env, taken) for c in children))


def alpha_equal(left: Formula, right: Formula) -> bool:
    """Structural equality up to consistent renaming of bound variables."""
    return _alpha(left, right, {}, {}, 0)


def _alpha(a: Formula, b: Formula, env_a: Dict[str, int], env_b: Dict[str, int], depth: int) -> bool:
    if type(a) is not type(b):
        return False
    if isinstance(a, Var):
        if a.name in env_a or b.name in env_b:
            return env_a.get(a.name) == env_b.get(b.name)
        return a.name == b.name
    if isinstance(a, Fix):
        if a.kind != b.kind:
            return False
        inner_a = dict(env_a)
        inner_b = dict(env_b)
        inner_a[a.var] = depth
        inner_b[b.var] = depth
        return _alpha(a.body, b.body, inner_a, inner_b, depth + 1)
    if not a.children():
        return a == b
    if isinstance(a, (Mod, DualMod, Temporal, Until)) and a.op != b.op:
        return False
    return all(_alpha(x, y, env_a, env_b, depth) for x, y in zip(a.children(), b.children()))


def binder_scopes(phi: Formula) -> Iterator[Tuple[Formula, FrozenSet[str]]]:
    """Yield every node with the set of binder variables enclosing it."""
    stack = [(phi, frozenset())]
    while stack:
        node, scope = stack.pop()
        yield node, scope
        inner = scope | {node.var} if isinstance(node, Fix) else scope
        for child in reversed(node.children()):
            stack.append((child, inner))


def subformula_at(phi: Formula, path: Tuple[int, ...]) -> Optional[Formula]:
    node = phi
    for index in path:
        children = node.children()
        if index >= len(children):
            return None
        node = children[index]
    return node
