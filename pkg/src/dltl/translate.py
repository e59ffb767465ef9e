"""
Data-LTL into the mu-calculus, and the not-in-class modalities into unary Data-LTL.

The far-future modality is rewritten around the last position satisfying
phi, last = phi & !Xg Fg phi. Some j > i+1 outside the class of i satisfies
phi exactly when

    last lies beyond i+1 in another class:   Xg Xg Fg last & !Fc last
    or last is in the class of i and some
    phi-position beyond i+1 is not:          Fc last & Xg Xg Fg (phi & !Fc last)

The deep-past modality is the mirror image around the first position
satisfying phi. F~ and P~ add the immediate neighbour when it changes class.
"""
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
    d_conj,
    d_disj,
    d_not,
    map_dltl,
)
from src.logic.library import eventually, until
from src.logic.syntax import FALSE, TRUE, And, Formula, Mod, Or, Prop, Zero
from src.logic.transforms import dualize
from src.utils.constants import FAR_OPS
from src.utils.exceptions import ValidationError
from src.utils.logger import get_logger

logger = get_logger(__name__)

_FORWARD = {"step": "Xg", "global": "Fg", "class": "Fc", "marker": "S"}
_BACKWARD = {"step": "Yg", "global": "Pg", "class": "Pc", "marker": "P"}


def _beyond_neighbour(phi: DltlFormula, ops: dict) -> DltlFormula:
    step, ev_global, ev_class = ops["step"], ops["global"], ops["class"]
    extreme = d_conj(phi, d_not(DNext(step, DEventually(ev_global, phi))))
    in_extreme_class = DEventually(ev_class, extreme)

    def two_away(psi: DltlFormula) -> DltlFormula:
        return DNext(step, DNext(step, DEventually(ev_global, psi)))

    elsewhere = d_conj(two_away(extreme), d_not(in_extreme_class))
    same_class = d_conj(in_extreme_class, two_away(d_conj(phi, d_not(in_extreme_class))))
    return d_disj(elsewhere, same_class)


def expand_not_in_class(kind: str, phi: DltlFormula) -> DltlFormula:
    """Unary Data-LTL formula equivalent to DFar(kind, phi) on finite data words.

    kind is one of fF~, dP~, F~, P~ (the short names fF, dP, F, P are accepted).
    """
    if kind in ("fF", "dP", "F", "P"):
        kind = kind + "~"
    if kind not in FAR_OPS:
        raise ValidationError("not-in-class modality", kind, f"expected one of {FAR_OPS}")
    ops = _FORWARD if kind in ("fF~", "F~") else _BACKWARD
    far = _beyond_neighbour(phi, ops)
    if kind in ("fF~", "dP~"):
        return far
    neighbour = d_conj(d_not(DZero(ops["marker"])), DNext(ops["step"], phi))
    return d_disj(neighbour, far)


def expand_far(phi: DltlFormula) -> DltlFormula:
    """Replace every not-in-class modality by its unary expansion, innermost first."""
    def expand(node: DltlFormula) -> DltlFormula:
        if isinstance(node, DFar):
            return expand_not_in_class(node.op, node.child)
        return node

    return map_dltl(phi, expand)


def dltl_to_mu(phi: DltlFormula) -> Formula:
    """Mu-calculus formula with the same positions as phi on every data word.

    Negation is pushed to the atoms with `dualize`; F/P and until/since use
    least fixpoints, not-in-class modalities are expanded first.
    """
    result = _to_mu(phi)
    logger.debug(f"dltl_to_mu: {phi} -> {result}")
    return result


def _to_mu(phi: DltlFormula) -> Formula:
    if isinstance(phi, DConst):
        return TRUE if phi.value else FALSE
    if isinstance(phi, DProp):
        return Prop(phi.name)
    if isinstance(phi, DZero):
        return Zero(phi.kind)
    if isinstance(phi, DNot):
        return dualize(_to_mu(phi.child))
    if isinstance(phi, DAnd):
        return And(_to_mu(phi.left), _to_mu(phi.right))
    if isinstance(phi, DOr):
        return Or(_to_mu(phi.left), _to_mu(phi.right))
    if isinstance(phi, DNext):
        return Mod(phi.op, _to_mu(phi.child))
    if isinstance(phi, DEventually):
        return eventually(phi.op, _to_mu(phi.child))
    if isinstance(phi, DUntil):
        return until(phi.op, _to_mu(phi.left), _to_mu(phi.right))
    if isinstance(phi, DFar):
        return _to_mu(expand_not_in_class(phi.op, phi.child))
    raise TypeError(f"cannot translate {type(phi).__name__}")
