"""
Seeded random sentences for property tests.

Fragments:
    any       every modality, both fixpoint kinds
    nuOnly    every modality, greatest fixpoints only
    muOnly    every modality, least fixpoints only
    pure:g    global modalities only (likewise pure:c, pure:X, pure:Y)
    BR        pure X or pure Y layers; closed subsentences may switch direction
    BMA       pure g or pure c layers; closed subsentences may switch mode

Zeroary modalities are allowed in every fragment.
"""
import random
from typing import FrozenSet, Sequence, Tuple

from src.logic.syntax import And, Const, DualMod, Fix, Formula, Mod, Or, Prop, Var, Zero
from src.utils.constants import DIRECTION_OF, FIXPOINT_KINDS, MODALITIES, MODE_OF, MU, NU, ZEROARIES
from src.utils.exceptions import ValidationError

PURE_KINDS = ("g", "c", "X", "Y")
FRAGMENTS = ("any", "nuOnly", "muOnly", "BR", "BMA") + tuple(f"pure:{k}" for k in PURE_KINDS)

_LAYER_KINDS = {"BR": ("X", "Y"), "BMA": ("g", "c")}
_SWITCH_PROBABILITY = 0.2


def _ops_of_kind(kind: str) -> Tuple[str, ...]:
    table = MODE_OF if kind in ("g", "c") else DIRECTION_OF
    return tuple(op for op in MODALITIES if table[op] == kind)


class _Generator:
    def __init__(self, rng: random.Random, letters: Sequence[str], kinds: Tuple[str, ...], guarded: bool):
        self.rng = rng
        self.letters = tuple(letters)
        self.kinds = kinds
        self.guarded = guarded
        self.counter = 0

    def fresh(self) -> str:
        self.counter += 1
        return f"x{self.counter}"

    def atom(self, bound: Tuple[str, ...], unguarded: FrozenSet[str]) -> Formula:
        usable = [v for v in bound if not (self.guarded and v in unguarded)]
        roll = self.rng.random()
        if usable and roll < 0.35:
            return Var(self.rng.choice(usable))
        if roll < 0.7:
            return Prop(self.rng.choice(self.letters), self.rng.random() < 0.75)
        if roll < 0.9:
            return Zero(self.rng.choice(ZEROARIES), self.rng.random() < 0.5)
        return Const(self.rng.random() < 0.5)

    def formula(
        self,
        depth: int,
        ops: Tuple[str, ...],
        bound: Tuple[str, ...],
        unguarded: FrozenSet[str],
        switch_to: Tuple[Tuple[str, ...], ...] = (),
    ) -> Formula:
        if depth <= 0:
            return self.atom(bound, unguarded)
        roll = self.rng.random()
        if switch_to and roll < _SWITCH_PROBABILITY:
            # closed subsentence of another layer kind
            other = self.rng.choice(switch_to)
            return self.formula(depth - 1, other, (), frozenset(), switch_to)
        roll = self.rng.random()
        if roll < 0.3:
            cls = And if self.rng.random() < 0.5 else Or
            return cls(
                self.formula(depth - 1, ops, bound, unguarded, switch_to),
                self.formula(depth - 1, ops, bound, unguarded, switch_to),
            )
        if roll < 0.65:
            cls = Mod if self.rng.random() < 0.75 else DualMod
            return cls(self.rng.choice(ops), self.formula(depth - 1, ops, bound, frozenset(), switch_to))
        if roll < 0.9:
            var = self.fresh()
            body = self.formula(depth - 1, ops, bound + (var,), unguarded | {var}, switch_to)
            return Fix(self.rng.choice(self.kinds), var, body)
        return self.atom(bound, unguarded)


def random_formula(
    fragment: str,
    depth: int,
    seed: int,
    letters: Sequence[str] = ("a", "b"),
    guarded: bool = False,
) -> Formula:
    """Random sentence of the fragment with nesting depth at most `depth`; deterministic per seed.

    With `guarded`, every variable occurrence lies under a modality inside its binder.
    """
    if fragment not in FRAGMENTS:
        raise ValidationError("fragment", fragment, f"expected one of {', '.join(FRAGMENTS)}")
    if depth < 0:
        raise ValidationError("depth", depth, "must be nonnegative")
    if not letters:
        raise ValidationError("letters", letters, "need at least one letter")
    rng = random.Random(seed)
    kinds = {"nuOnly": (NU,), "muOnly": (MU,)}.get(fragment, FIXPOINT_KINDS)
    generator = _Generator(rng, letters, kinds, guarded)
    if fragment.startswith("pure:"):
        return generator.formula(depth, _ops_of_kind(fragment[5:]), (), frozenset())
    if fragment in _LAYER_KINDS:
        layers = tuple(_ops_of_kind(k) for k in _LAYER_KINDS[fragment])
        return generator.formula(depth, rng.choice(layers), (), frozenset(), layers)
    return generator.formula(depth, MODALITIES, (), frozenset())
