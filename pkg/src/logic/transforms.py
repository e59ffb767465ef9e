"""
Syntactic transformations of formulas.

    desugar        expand F/G/P/H, until/since and (optionally) tilde modalities
    dualize        negation pushed to the atoms: swaps and/or, mu/nu, M/~M
    mirror         swap future and past (X/Y, first/last, S/P)
    to_guarded     equivalent formula where every bound variable sits under a modality
    bekic          linearize one component of a vectorial fixpoint
    bekic_all      linearize every component at once, with shared subterms
"""
from dataclasses import dataclass
from typing import Dict, List, Mapping, Optional, Sequence, Set, Tuple

from src.logic.syntax import (
    FALSE,
    TRUE,
    And,
    Const,
    DualMod,
    Fix,
    Formula,
    Mod,
    Or,
    Prop,
    SubstitutionMemo,
    Temporal,
    Until,
    Var,
    Zero,
    all_names,
    binder_names,
    conj,
    disj,
    fresh_name,
    plain_substitute,
    rename_apart,
    substitute,
)
from src.utils.constants import (
    BOUNDARY_OF,
    DUAL_TEMPORAL,
    MIRROR_MODALITY,
    MIRROR_TEMPORAL,
    MIRROR_ZEROARY,
    MU,
    NU,
    STEP_OF,
)
from src.utils.exceptions import FreeVariableError, UnknownComponentError, ValidationError
from src.utils.logger import get_logger

logger = get_logger(__name__)


# Desugaring

def desugar(phi: Formula, expand_duals: bool = True) -> Formula:
    """Expand sugar into core syntax.

    F/P are reflexive: Fg p = mu x. p | Xg x, Gg p = nu x. p & (lastg | Xg x).
    With `expand_duals=False` the tilde modalities are kept as nodes.
    """
    used = all_names(phi)
    return _desugar(phi, expand_duals, used, {})


def _desugar(phi: Formula, expand_duals: bool, used: Set[str], memo: Dict[int, Formula]) -> Formula:
    children = phi.children()
    if not children:
        return phi
    cached = memo.get(id(phi))
    if cached is None:
        cached = memo[id(phi)] = _desugar_node(phi, expand_duals, used, memo, children)
    return cached


def _desugar_node(phi, expand_duals, used, memo, children) -> Formula:
    new_children = tuple(_desugar(c, expand_duals, used, memo) for c in children)
    if isinstance(phi, Temporal):
        body = new_children[0]
        step = STEP_OF[phi.op]
        var = fresh_name("x", used)
        if phi.op[0] in "FP":
            return Fix(MU, var, Or(body, Mod(step, Var(var))))
        return Fix(NU, var, And(body, Or(Zero(BOUNDARY_OF[step]), Mod(step, Var(var)))))
    if isinstance(phi, Until):
        left, right = new_children
        var = fresh_name("x", used)
        return Fix(MU, var, Or(right, And(left, Mod(STEP_OF[phi.op], Var(var)))))
    if isinstance(phi, DualMod) and expand_duals:
        return Or(Zero(BOUNDARY_OF[phi.op]), Mod(phi.op, new_children[0]))
    return phi.with_children(new_children) if new_children != children else phi


# Dualization

def dualize(phi: Formula) -> Formula:
    """Negation of a sentence, with negation pushed to the atoms."""
    if phi.free_vars:
        raise FreeVariableError(phi.free_vars, "dualize")
    return _dual(phi, {})


def _dual(phi: Formula, memo: Dict[int, Formula]) -> Formula:
    cached = memo.get(id(phi))
    if cached is None:
        cached = memo[id(phi)] = _dual_node(phi, memo)
    return cached


def _dual_node(phi: Formula, memo: Dict[int, Formula]) -> Formula:
    if isinstance(phi, Const):
        return Const(not phi.value)
    if isinstance(phi, Prop):
        return Prop(phi.name, not phi.positive)
    if isinstance(phi, Zero):
        return Zero(phi.kind, not phi.positive)
    if isinstance(phi, Var):
        return phi
    if isinstance(phi, And):
        return Or(_dual(phi.left, memo), _dual(phi.right, memo))
    if isinstance(phi, Or):
        return And(_dual(phi.left, memo), _dual(phi.right, memo))
    if isinstance(phi, Mod):
        return DualMod(phi.op, _dual(phi.child, memo))
    if isinstance(phi, DualMod):
        return Mod(phi.op, _dual(phi.child, memo))
    if isinstance(phi, Fix):
        return Fix(NU if phi.kind == MU else MU, phi.var, _dual(phi.body, memo))
    if isinstance(phi, Temporal):
        return Temporal(DUAL_TEMPORAL[phi.op], _dual(phi.child, memo))
    if isinstance(phi, Until):
        return _dual(desugar(phi, expand_duals=False), {})
    raise TypeError(f"cannot dualize {type(phi).__name__}")


def dualize_open(phi: Formula) -> Formula:
    """Dualization that keeps free variables positive (used on layer skeletons)."""
    return _dual(phi, {})


# Mirroring and binder swaps

def mirror(phi: Formula) -> Formula:
    """Time reversal: evaluating mirror(phi) on the reversed word mirrors positions."""
    if isinstance(phi, Zero):
        return Zero(MIRROR_ZEROARY[phi.kind], phi.positive)
    if isinstance(phi, Mod):
        return Mod(MIRROR_MODALITY[phi.op], mirror(phi.child))
    if isinstance(phi, DualMod):
        return DualMod(MIRROR_MODALITY[phi.op], mirror(phi.child))
    if isinstance(phi, Temporal):
        return Temporal(MIRROR_TEMPORAL[phi.op], mirror(phi.child))
    if isinstance(phi, Until):
        return Until(MIRROR_TEMPORAL[phi.op], mirror(phi.left), mirror(phi.right))
    children = phi.children()
    if not children:
        return phi
    return phi.with_children(tuple(mirror(c) for c in children))


def swap_fixpoints(phi: Formula, kind: str) -> Formula:
    """Replace every binder by a binder of the given kind."""
    if isinstance(phi, Fix):
        return Fix(kind, phi.var, swap_fixpoints(phi.body, kind))
    children = phi.children()
    if not children:
        return phi
    return phi.with_children(tuple(swap_fixpoints(c, kind) for c in children))


def substitute_props(
    phi: Formula,
    mapping: Mapping[str, Formula],
    duals: Optional[Dict[str, Formula]] = None,
) -> Formula:
    """Replace propositions by sentences; a negated proposition gets the dual.

    The mapped sentences are inserted as shared subterms. Duals are computed
    once per name and stored in `duals`; pass the same dict to reuse them
    across calls.
    """
    return _substitute_props(phi, mapping, {} if duals is None else duals, {})


def _substitute_props(phi, mapping, duals: Dict[str, Formula], memo: Dict[int, Formula]) -> Formula:
    if isinstance(phi, Prop) and phi.name in mapping:
        if phi.positive:
            return mapping[phi.name]
        if phi.name not in duals:
            duals[phi.name] = dualize(mapping[phi.name])
        return duals[phi.name]
    children = phi.children()
    if not children:
        return phi
    cached = memo.get(id(phi))
    if cached is None:
        new_children = tuple(_substitute_props(c, mapping, duals, memo) for c in children)
        cached = phi.with_children(new_children) if new_children != children else phi
        memo[id(phi)] = cached
    return cached


# Guardedness

_GUARDS = (Mod, DualMod, Temporal, Until)


def is_guarded(phi: Formula) -> bool:
    """Every bound variable occurrence lies under a modality inside its binder."""
    return _guarded(phi, frozenset(), frozenset())


def _guarded(phi: Formula, bound: frozenset, unguarded: frozenset) -> bool:
    if isinstance(phi, Var):
        return phi.name not in unguarded
    if isinstance(phi, Fix):
        return _guarded(phi.body, bound | {phi.var}, unguarded | {phi.var})
    if isinstance(phi, _GUARDS):
        return all(_guarded(c, bound, frozenset()) for c in phi.children())
    return all(_guarded(c, bound, unguarded) for c in phi.children())


def occurs_unguarded(var: str, phi: Formula) -> bool:
    """Does `var` occur free in `phi` outside every modality."""
    if isinstance(phi, Var):
        return phi.name == var
    if isinstance(phi, Fix):
        return phi.var != var and occurs_unguarded(var, phi.body)
    if isinstance(phi, _GUARDS):
        return False
    return any(occurs_unguarded(var, c) for c in phi.children())


def to_guarded(phi: Formula) -> Formula:
    """Equivalent guarded formula.

    Inner binders are made guarded first; an inner fixpoint hiding an
    unguarded occurrence of the outer variable is unfolded once, then the
    body is put in conjunctive normal form with the variable as a literal:
        mu x.(x | a) & b  ->  mu x. a & b
        nu x.(x | a) & b  ->  nu x. b
    Tilde modalities are kept and count as guards.
    """
    core = desugar(phi, expand_duals=False)
    if is_guarded(core):
        return rename_apart(core) if core is not phi else phi
    result = rename_apart(_guard(core))
    logger.debug(f"to_guarded: {phi} -> {result}")
    return result


def _guard(phi: Formula) -> Formula:
    if isinstance(phi, Fix):
        body = _expose(_guard(phi.body), phi.var)
        return _cnf_rewrite(phi.kind, phi.var, body)
    children = phi.children()
    if not children:
        return phi
    return phi.with_children(tuple(_guard(c) for c in children))


def _expose(phi: Formula, var: str) -> Formula:
    """Unfold inner fixpoints at unguarded positions that hide an unguarded `var`."""
    if isinstance(phi, (And, Or)):
        return phi.with_children(tuple(_expose(c, var) for c in phi.children()))
    if isinstance(phi, Fix) and phi.var != var and occurs_unguarded(var, phi.body):
        unfolded = substitute(phi.body, {phi.var: phi})
        return _expose(unfolded, var)
    return phi


def _clauses(phi: Formula) -> List[Tuple[Formula, ...]]:
    if isinstance(phi, And):
        return _clauses(phi.left) + _clauses(phi.right)
    if isinstance(phi, Or):
        result = []
        for left in _clauses(phi.left):
            for right in _clauses(phi.right):
                merged = left + tuple(lit for lit in right if lit not in left)
                if merged not in result:
                    result.append(merged)
        return result
    if phi == TRUE:
        return []
    if phi == FALSE:
        return [()]
    return [(phi,)]


def _cnf_rewrite(kind: str, var: str, body: Formula) -> Formula:
    if not occurs_unguarded(var, body):
        return Fix(kind, var, body)
    x = Var(var)
    clauses = _clauses(body)
    with_x = [c for c in clauses if x in c]
    without_x = [c for c in clauses if x not in c]
    beta = conj(*(disj(*c) for c in without_x))
    if kind == NU:
        return Fix(kind, var, beta)
    alpha = conj(*(disj(*(lit for lit in c if lit != x)) for c in with_x))
    return Fix(kind, var, conj(alpha, beta))


# Vectorial fixpoints

@dataclass(frozen=True)
class VectorialFormula:
    """Simultaneous fixpoint system x_i = body_i, one binder kind per component."""
    equations: Tuple[Tuple[str, Formula], ...]
    kinds: Tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "equations", tuple(self.equations))
        object.__setattr__(self, "kinds", tuple(self.kinds))
        names = [name for name, _ in self.equations]
        if len(set(names)) != len(names):
            raise ValidationError("vectorial formula", names, "component variables must be distinct")
        if len(self.kinds) != len(self.equations):
            raise ValidationError("vectorial formula", self.kinds, "one binder kind per component")

    @classmethod
    def uniform(cls, equations: Sequence[Tuple[str, Formula]], kind: str) -> "VectorialFormula":
        return cls(tuple(equations), tuple(kind for _ in equations))

    @property
    def names(self) -> Tuple[str, ...]:
        return tuple(name for name, _ in self.equations)

    def body(self, name: str) -> Formula:
        for component, body in self.equations:
            if component == name:
                return body
        raise UnknownComponentError(name)


def _single_kind(system: VectorialFormula) -> str:
    if len(set(system.kinds)) > 1:
        raise ValidationError("vectorial formula", system.kinds, "components must share one binder kind")
    return system.kinds[0]


def bekic(system: VectorialFormula, component: str) -> Formula:
    """Scalar formula for one component, by Gauss elimination of the others."""
    if component not in system.names:
        raise UnknownComponentError(component)
    kind = _single_kind(system)
    bodies: Dict[str, Formula] = dict(system.equations)
    remaining = [name for name in system.names if name != component]
    for name in remaining:
        solution = Fix(kind, name, bodies.pop(name))
        for other in bodies:
            bodies[other] = substitute(bodies[other], {name: solution})
    return rename_apart(Fix(kind, component, bodies[component]))


def bekic_all(system: VectorialFormula) -> Dict[str, Formula]:
    """Scalar formulas for every component, sharing their common subterms.

    One elimination from the last component to the first leaves the first
    closed; the others are closed by substituting the earlier solutions
    back. Eliminated components are inserted as shared subterms, so the
    result is a DAG polynomial in the size of the system. Binders of shared
    subterms may shadow one another; `rename_apart` turns a component into
    a tree with distinct binders.
    """
    kind = _single_kind(system)
    names = list(system.names)
    avoid: Set[str] = set(names)
    for _, body in system.equations:
        avoid |= body.free_vars
    bodies = {
        name: rename_apart(body, avoid) if binder_names(body) & avoid else body
        for name, body in system.equations
    }
    partial: Dict[str, Formula] = {}
    eliminated: SubstitutionMemo = {}
    for index in range(len(names) - 1, -1, -1):
        name = names[index]
        partial[name] = Fix(kind, name, bodies.pop(name))
        for other in names[:index]:
            bodies[other] = plain_substitute(bodies[other], {name: partial[name]}, eliminated)
    solutions: Dict[str, Formula] = {}
    closed: SubstitutionMemo = {}
    for name in names:
        solutions[name] = plain_substitute(partial[name], solutions, closed)
    return solutions
