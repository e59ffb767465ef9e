"""
Translations between FO2 and unary Data-LTL.

udltl_to_fo2 is the standard translation, alternating the two variables;
its size is linear and its quantifier depth equals the modal depth (S and
P each cost one quantifier).

fo2_to_udltl works on a formula phi(v) bottom-up. For E u. psi(v, u) the
body is brought to disjunctive normal form over three kinds of literals:
formulas in v alone, formulas in u alone, and order atoms between v and u.
Each clause alpha(v) & beta(u) & (order literals) is split over the order
types of the pair (v, u) consistent with its literals; the types are
exhaustive and mutually exclusive, so negated order atoms need no special
treatment. Each type contributes alpha' & T(beta'):

    u relative to v          class relation           T(beta')
    same position            same position            beta'
    v+1                      class successor          S & Xg beta'
    v+1                      other class              !S & Xg beta'
    beyond v+1               class successor          !S & Xc beta'
    beyond v+1               later in the class       Xc Xc Fc beta'
    beyond v+1               other class              fF~ beta'

and the mirrored rows with P, Yg, Yc, Pc and dP~.
"""
import itertools
from typing import Dict, List, Tuple

from src.dltl.fo2 import (
    Fo2Formula,
    FoAnd,
    FoConst,
    FoExists,
    FoForall,
    FoNot,
    FoOr,
    FoPred,
    FoRel,
    free_variables,
    fo_conj,
    fo_disj,
    other_variable,
    quantifier_depth,
)
from src.dltl.syntax import (
    D_FALSE,
    DConst,
    DEventually,
    DFar,
    DltlFormula,
    DNext,
    DNot,
    DOr,
    DAnd,
    DProp,
    DZero,
    d_conj,
    d_disj,
    d_not,
    modal_depth,
)
from src.dltl.translate import expand_far
from src.utils.constants import MODAL_DEPTH_FACTOR
from src.utils.exceptions import FragmentError, FreeVariableError
from src.utils.logger import get_logger

logger = get_logger(__name__)

# (where u lies relative to v, class relation of u to v)
ORDER_TYPES: Tuple[Tuple[str, str], ...] = (
    ("same", "same"),
    ("next", "class-next"),
    ("next", "apart"),
    ("after", "class-next"),
    ("after", "class-after"),
    ("after", "apart"),
    ("prev", "class-prev"),
    ("prev", "apart"),
    ("before", "class-prev"),
    ("before", "class-before"),
    ("before", "apart"),
)

_SWAP = {
    "same": "same", "apart": "apart",
    "next": "prev", "prev": "next", "after": "before", "before": "after",
    "class-next": "class-prev", "class-prev": "class-next",
    "class-after": "class-before", "class-before": "class-after",
}


def _forward_relation(rel: str, order: str, cls: str) -> bool:
    """Truth of `v rel u` for a pair of the given order type."""
    if rel == "eq":
        return order == "same"
    if rel == "lt":
        return order in ("next", "after")
    if rel == "succ":
        return order == "next"
    if rel == "csucc":
        return cls == "class-next"
    if rel == "clt":
        return cls in ("class-next", "class-after")
    return cls != "apart"


_REFLEXIVE = {"eq": True, "lt": False, "succ": False, "csucc": False, "clt": False, "same": True}


def relation_on_type(atom: FoRel, v: str, order_type: Tuple[str, str]) -> bool:
    """Truth of an order atom over {v, u} for a pair (v, u) of the given type."""
    order, cls = order_type
    if atom.left == atom.right:
        return _REFLEXIVE[atom.rel]
    if atom.left == v:
        return _forward_relation(atom.rel, order, cls)
    return _forward_relation(atom.rel, _SWAP[order], _SWAP[cls])


def type_modality(order_type: Tuple[str, str], beta: DltlFormula) -> DltlFormula:
    """Unary Data-LTL formula for "some u of this type relative to the current position satisfies beta"."""
    table: Dict[Tuple[str, str], DltlFormula] = {
        ("same", "same"): beta,
        ("next", "class-next"): d_conj(DZero("S"), DNext("Xg", beta)),
        ("next", "apart"): d_conj(d_not(DZero("S")), DNext("Xg", beta)),
        ("after", "class-next"): d_conj(d_not(DZero("S")), DNext("Xc", beta)),
        ("after", "class-after"): DNext("Xc", DNext("Xc", DEventually("Fc", beta))),
        ("after", "apart"): DFar("fF~", beta),
        ("prev", "class-prev"): d_conj(DZero("P"), DNext("Yg", beta)),
        ("prev", "apart"): d_conj(d_not(DZero("P")), DNext("Yg", beta)),
        ("before", "class-prev"): d_conj(d_not(DZero("P")), DNext("Yc", beta)),
        ("before", "class-before"): DNext("Yc", DNext("Yc", DEventually("Pc", beta))),
        ("before", "apart"): DFar("dP~", beta),
    }
    return table[order_type]


# FO2 to unary Data-LTL

Literal = Tuple[str, Fo2Formula, bool]


def _literals(phi: Fo2Formula, v: str, u: str, positive: bool) -> List[List[Literal]]:
    """DNF of phi as clauses of (kind, formula, polarity), kind in v / u / order."""
    free = free_variables(phi)
    if free <= {v}:
        return [[("v", phi, positive)]]
    if free <= {u}:
        return [[("u", phi, positive)]]
    if isinstance(phi, FoRel):
        return [[("order", phi, positive)]]
    if isinstance(phi, FoNot):
        return _literals(phi.child, v, u, not positive)
    if isinstance(phi, (FoAnd, FoOr)):
        left = _literals(phi.left, v, u, positive)
        right = _literals(phi.right, v, u, positive)
        if isinstance(phi, FoAnd) == positive:
            return [a + b for a, b in itertools.product(left, right)]
        return left + right
    raise TypeError(f"unexpected {type(phi).__name__} with free variables {sorted(free)}")


def _exists(body: Fo2Formula, v: str, u: str) -> DltlFormula:
    disjuncts = []
    for clause in _literals(body, v, u, True):
        alpha = d_conj(*(_polar(_translate(phi, v), pos) for kind, phi, pos in clause if kind == "v"))
        if alpha == D_FALSE:
            continue
        beta = d_conj(*(_polar(_translate(phi, u), pos) for kind, phi, pos in clause if kind == "u"))
        order = [(phi, pos) for kind, phi, pos in clause if kind == "order"]
        types = [
            t for t in ORDER_TYPES
            if all(relation_on_type(atom, v, t) == pos for atom, pos in order)
        ]
        disjuncts.append(d_conj(alpha, d_disj(*(type_modality(t, beta) for t in types))))
    return d_disj(*disjuncts)


def _polar(phi: DltlFormula, positive: bool) -> DltlFormula:
    return phi if positive else d_not(phi)


def _translate(phi: Fo2Formula, v: str) -> DltlFormula:
    """Unary Data-LTL formula for phi(v); free variables of phi lie in {v}."""
    if isinstance(phi, FoConst):
        return DConst(phi.value)
    if isinstance(phi, FoPred):
        return DProp(phi.name)
    if isinstance(phi, FoRel):
        return DConst(_REFLEXIVE[phi.rel])
    if isinstance(phi, FoNot):
        return d_not(_translate(phi.child, v))
    if isinstance(phi, FoAnd):
        return d_conj(_translate(phi.left, v), _translate(phi.right, v))
    if isinstance(phi, FoOr):
        return d_disj(_translate(phi.left, v), _translate(phi.right, v))
    if isinstance(phi, FoForall):
        return d_not(_translate(FoExists(phi.var, FoNot(phi.body)), v))
    if isinstance(phi, FoExists):
        if phi.var == v:
            # closed: true everywhere or nowhere
            return DEventually("Pg", DEventually("Fg", _translate(phi.body, v)))
        return _exists(phi.body, v, phi.var)
    raise TypeError(f"cannot translate {type(phi).__name__}")


def fo2_to_udltl(phi: Fo2Formula, keep_far: bool = False) -> DltlFormula:
    """Unary Data-LTL formula holding at i iff phi holds with x := i.

    With `keep_far` the not-in-class modalities stay as single nodes;
    otherwise they are expanded into unary Data-LTL.
    """
    extra = free_variables(phi) - {"x"}
    if extra:
        raise FreeVariableError(extra, "fo2_to_udltl")
    result = _translate(phi, "x")
    if not keep_far:
        result = expand_far(result)
    logger.debug(f"fo2_to_udltl: quantifier depth {quantifier_depth(phi)}, modal depth {modal_depth(result)}")
    return result


def depth_report(phi: Fo2Formula) -> dict:
    """Quantifier depth against the modal depth of the translation."""
    kept = fo2_to_udltl(phi, keep_far=True)
    qd = quantifier_depth(phi)
    md = modal_depth(kept)
    return {
        "quantifierDepth": qd,
        "modalDepth": md,
        "expandedModalDepth": modal_depth(expand_far(kept)),
        "factor": MODAL_DEPTH_FACTOR,
        "withinFactor": md <= MODAL_DEPTH_FACTOR * qd,
    }


# Unary Data-LTL to FO2

_STEP_RELATION = {
    "Xg": ("succ", False), "Yg": ("succ", True),
    "Xc": ("csucc", False), "Yc": ("csucc", True),
}
_EVENTUALLY_RELATION = {
    "Fg": ("lt", False), "Pg": ("lt", True),
    "Fc": ("clt", False), "Pc": ("clt", True),
}


def _oriented(rel: str, v: str, u: str, backward: bool) -> FoRel:
    return FoRel(rel, u, v) if backward else FoRel(rel, v, u)


def udltl_to_fo2(phi: DltlFormula, var: str = "x") -> Fo2Formula:
    """Standard translation of a unary Data-LTL formula into FO2 with free variable var."""
    if isinstance(phi, DConst):
        return FoConst(phi.value)
    if isinstance(phi, DProp):
        return FoPred(phi.name, var)
    u = other_variable(var)
    if isinstance(phi, DZero):
        backward = phi.kind == "P"
        return FoExists(u, fo_conj(
            _oriented("succ", var, u, backward), _oriented("csucc", var, u, backward),
        ))
    if isinstance(phi, DNot):
        return FoNot(udltl_to_fo2(phi.child, var))
    if isinstance(phi, DAnd):
        return FoAnd(udltl_to_fo2(phi.left, var), udltl_to_fo2(phi.right, var))
    if isinstance(phi, DOr):
        return FoOr(udltl_to_fo2(phi.left, var), udltl_to_fo2(phi.right, var))
    if isinstance(phi, DNext):
        rel, backward = _STEP_RELATION[phi.op]
        return FoExists(u, FoAnd(_oriented(rel, var, u, backward), udltl_to_fo2(phi.child, u)))
    if isinstance(phi, DEventually):
        rel, backward = _EVENTUALLY_RELATION[phi.op]
        reach = fo_disj(FoRel("eq", var, u), _oriented(rel, var, u, backward))
        return FoExists(u, FoAnd(reach, udltl_to_fo2(phi.child, u)))
    raise FragmentError("unary Data-LTL", "udltl_to_fo2", str(phi))
