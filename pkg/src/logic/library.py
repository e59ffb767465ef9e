"""
Ready-made formulas used across the workbench.

Temporal builders take the fixpoint kind explicitly: on finite words a
guarded single-direction fixpoint has a unique solution, so F/G/P/H can be
written with either binder.
"""
from typing import Dict

from src.logic.syntax import (
    And,
    DualMod,
    Fix,
    Formula,
    Mod,
    Or,
    Prop,
    Var,
    Zero,
    all_names,
    fresh_name,
    mu,
    nu,
)
from src.logic.transforms import dualize
from src.utils.constants import BOUNDARY_OF, MU, NU, STEP_OF


def _fresh(*formulas: Formula, base: str = "x") -> str:
    used = set()
    for f in formulas:
        used |= all_names(f)
    return fresh_name(base, used)


def eventually(op: str, phi: Formula, kind: str = MU) -> Formula:
    """Reflexive F/P in mode g or c: op in Fg, Fc, Pg, Pc."""
    var = _fresh(phi)
    return Fix(kind, var, Or(phi, Mod(STEP_OF[op], Var(var))))


def always(op: str, phi: Formula, kind: str = NU) -> Formula:
    """Reflexive G/H in mode g or c: op in Gg, Gc, Hg, Hc."""
    var = _fresh(phi)
    step = STEP_OF[op]
    return Fix(kind, var, And(phi, Or(Zero(BOUNDARY_OF[step]), Mod(step, Var(var)))))


def until(op: str, left: Formula, right: Formula, kind: str = MU) -> Formula:
    var = _fresh(left, right)
    return Fix(kind, var, Or(right, And(left, Mod(STEP_OF[op], Var(var)))))


def successor_marking_formula() -> Formula:
    """nu x. Xg Yc x, equivalent to S."""
    return nu("x", Mod("Xg", Mod("Yc", Var("x"))))


def predecessor_marking_formula() -> Formula:
    """Yg S written with unary modalities only; equivalent to P."""
    return Mod("Yg", successor_marking_formula())


def odd_positions() -> Formula:
    return mu("x", Or(Zero("firstg"), Mod("Yg", Mod("Yg", Var("x")))))


def even_positions() -> Formula:
    return mu("x", Or(Mod("Yg", Zero("firstg")), Mod("Yg", Mod("Yg", Var("x")))))


def class_successor_two_ahead() -> Formula:
    """Positions i whose class successor is i+2.

    A parity bit keeps the chain of class predecessors of i+2, i+4, ...
    from wandering onto positions of the other parity.
    """
    even = even_positions()
    odd = dualize(even)

    def chain(parity: Formula) -> Formula:
        step = Mod("Xg", Mod("Xg", Mod("Yc", And(parity, Var("y")))))
        return nu("y", And(parity, step))

    return Or(chain(even), chain(odd))


def exactly_one_in_class(phi: Formula, kind: str = MU) -> Formula:
    """Exactly one position of the current class satisfies the sentence phi."""
    not_phi = dualize(phi)
    alone = And(
        phi,
        And(
            DualMod("Xc", always("Gc", not_phi, kind=kind)),
            DualMod("Yc", always("Hc", not_phi, kind=kind)),
        ),
    )
    return eventually("Fc", eventually("Pc", alone, kind=kind), kind=kind)


def bridge(k: int) -> Formula:
    """(Xg Xc)^k a: a global step then a class step, k times."""
    phi: Formula = Prop("a")
    for _ in range(k):
        phi = Mod("Xg", Mod("Xc", phi))
    return phi


def bridge_closure() -> Formula:
    """mu x.(Xg Xc x | a): some number of bridge steps reaches an a."""
    return mu("x", Or(Mod("Xg", Mod("Xc", Var("x"))), Prop("a")))


def fragment_examples(max_bridge: int = 3) -> Dict[str, Formula]:
    """Named formulas separating the BR and BMA fragments, in table order."""
    examples = {
        "phi1": nu("x", Or(DualMod("Xc", Var("x")), Mod("Xg", mu("y", And(Prop("q"), DualMod("Yc", Var("y"))))))),
        "phi2": nu("x", Or(Mod("Xc", Zero("lastg")), Mod("Xc", Mod("Yg", Var("x"))))),
        "phi3": mu("x", Or(Or(nu("y", Or(Prop("q"), Mod("Xc", Var("y")))), Mod("Xg", Var("x"))), Mod("Yg", Var("x")))),
        "phi4": mu("x", Or(Mod("Xc", Mod("Xg", Var("x"))), Prop("p"))),
    }
    for k in range(1, max_bridge + 1):
        examples[f"bridge{k}"] = bridge(k)
    examples["bridge"] = bridge_closure()
    return examples
