"""
Compile a single-mode formula into a functional position-marking transducer.

A formula whose modalities all belong to one mode (global: Xg/Yg, class:
Xc/Yc) is a formula about a plain word: the marked string projection for
the global mode, or one marked class projection for the class mode. Its
letters are valuations over a LetterSpace: at most one letter proposition,
plus independent bits for holes, S/P and the zeroaries of the other mode.

The compiler works MSO-style. Each subformula psi becomes an automaton over
letters (valuation, tracks) accepting exactly the track assignments where
the output track equals the truth set of psi, given the tracks of the
enclosing fixpoint variables:

    mu x.psi    O is a prefixpoint, and no prefixpoint Z misses a position of O
    nu x.psi    O is a postfixpoint, and no postfixpoint Z has a position outside O

Existentially quantified tracks are projected away and every intermediate
automaton is minimized.
"""
import itertools
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Tuple

from src.automata.nfa import Nfa
from src.automata.transducers import WordTransducer
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
    Var,
    Zero,
    conj,
    disj,
    modalities,
    props,
    rename_apart,
    walk,
    zeroaries,
)
from src.logic.transforms import desugar
from src.utils.constants import BOUNDARY_OF, DIRECTION_OF, MODALITY_OF, MODE_OF, MU
from src.utils.exceptions import FragmentError, ValidationError
from src.utils.logger import get_logger

logger = get_logger(__name__)

Valuation = FrozenSet[str]
TrackLetter = Tuple[Valuation, FrozenSet[str]]

OUT = "#o"


def intrinsic_zeroaries(mode: str) -> Dict[str, str]:
    """Zeroaries that a word formula of this mode can express itself: first/last of the word."""
    return {
        BOUNDARY_OF[MODALITY_OF[("Y", mode)]]: "first",
        BOUNDARY_OF[MODALITY_OF[("X", mode)]]: "last",
    }


@dataclass(frozen=True)
class LetterSpace:
    """Valuations read by a word formula: one exclusive letter (or none) times a set of bits."""
    exclusive: Tuple[str, ...]
    bits: Tuple[str, ...]

    @classmethod
    def for_formula(cls, phi: Formula, mode: str, extra_bits: Iterable[str] = ()) -> "LetterSpace":
        intrinsic = intrinsic_zeroaries(mode)
        bits = set(extra_bits) | set(phi.free_vars)
        bits |= {z for z in zeroaries(phi) if z not in intrinsic}
        return cls(tuple(sorted(props(phi))), tuple(sorted(bits)))

    @cached_property
    def valuations(self) -> Tuple[Valuation, ...]:
        letters = [frozenset()] + [frozenset((p,)) for p in self.exclusive]
        result = []
        for letter in letters:
            for k in range(len(self.bits) + 1):
                for chosen in itertools.combinations(self.bits, k):
                    result.append(letter | frozenset(chosen))
        return tuple(result)

    def valuation(self, facts: Iterable[str]) -> Valuation:
        facts = set(facts)
        letters = [p for p in self.exclusive if p in facts]
        if len(letters) > 1:
            raise ValidationError("valuation", sorted(facts), "more than one letter proposition")
        return frozenset(letters) | frozenset(b for b in self.bits if b in facts)

    def formula_for(
        self,
        valuations: Iterable[Valuation],
        atom: Callable[[str, bool], Formula],
    ) -> Formula:
        """Formula true exactly on the given valuations, by Shannon expansion over the facts."""
        return self._expand(frozenset(valuations), 0, atom)

    def _expand(self, chosen: FrozenSet[Valuation], depth: int, atom) -> Formula:
        if not chosen:
            return FALSE
        remaining = self._completions(depth)
        if len(chosen) == remaining:
            return TRUE
        if depth == 0:
            branches = []
            none_branch = frozenset(v for v in chosen if not v & set(self.exclusive))
            if none_branch:
                guard = conj(*(atom(p, False) for p in self.exclusive))
                branches.append(conj(guard, self._expand(none_branch, 1, atom)))
            for p in self.exclusive:
                part = frozenset(v for v in chosen if p in v)
                if part:
                    branches.append(conj(atom(p, True), self._expand(part, 1, atom)))
            return disj(*branches)
        bit = self.bits[depth - 1]
        with_bit = frozenset(v for v in chosen if bit in v)
        without_bit = frozenset(v for v in chosen if bit not in v)
        return disj(
            conj(atom(bit, True), self._expand(with_bit, depth + 1, atom)),
            conj(atom(bit, False), self._expand(without_bit, depth + 1, atom)),
        )

    def _completions(self, depth: int) -> int:
        """Number of valuations agreeing on the facts decided before `depth`."""
        free_bits = len(self.bits) - max(depth - 1, 0)
        return (len(self.exclusive) + 1 if depth == 0 else 1) * 2 ** free_bits

    def to_dict(self) -> dict:
        return {"letters": list(self.exclusive), "bits": list(self.bits)}


def default_atom(fact: str, positive: bool) -> Formula:
    if fact in BOUNDARY_OF.values() or fact in ("S", "P"):
        return Zero(fact, positive)
    return Prop(fact, positive)


class MarkingTransducer(WordTransducer):
    """Functional transducer outputting 1 exactly where its formula holds."""

    def __init__(self, nfa: Nfa, space: LetterSpace, mode: str, formula: Formula):
        super().__init__(nfa, space.valuations, (0, 1))
        self.space = space
        self.mode = mode
        self.formula = formula

    def marking(self, valuations: Sequence[Valuation]) -> Optional[Tuple[int, ...]]:
        return self.transduce(list(valuations))

    def to_dict(self, encode=None) -> dict:
        data = super().to_dict(encode=lambda v: ",".join(sorted(v)) if isinstance(v, frozenset) else v)
        data.update({"mode": self.mode, "formula": str(self.formula), "space": self.space.to_dict()})
        return data


class _Compiler:
    def __init__(self, space: LetterSpace, mode: str):
        self.space = space
        self.mode = mode
        self.next_op = MODALITY_OF[("X", mode)]
        self.prev_op = MODALITY_OF[("Y", mode)]
        self.intrinsic = intrinsic_zeroaries(mode)
        self._alphabets: Dict[Tuple[str, ...], Tuple[TrackLetter, ...]] = {}

    # Alphabet plumbing

    def alphabet(self, tracks: Tuple[str, ...]) -> Tuple[TrackLetter, ...]:
        key = tuple(sorted(tracks))
        if key not in self._alphabets:
            subsets = [
                frozenset(chosen)
                for k in range(len(key) + 1)
                for chosen in itertools.combinations(key, k)
            ]
            self._alphabets[key] = tuple((v, s) for v in self.space.valuations for s in subsets)
        return self._alphabets[key]

    def local(self, tracks, test: Callable[[Valuation, FrozenSet[str]], bool]) -> Nfa:
        alphabet = self.alphabet(tracks)
        return Nfa(alphabet, [(0, letter, 0) for letter in alphabet if test(*letter)], [0], [0], [0])

    def exists_position(self, tracks, test) -> Nfa:
        alphabet = self.alphabet(tracks)
        transitions = [(0, letter, 0) for letter in alphabet] + [(1, letter, 1) for letter in alphabet]
        transitions += [(0, letter, 1) for letter in alphabet if test(*letter)]
        return Nfa(alphabet, transitions, [0], [1], [0, 1])

    def lift(self, automaton: Nfa, source: Tuple[str, ...], target: Tuple[str, ...], rename: Mapping[str, str]) -> Nfa:
        """Read `automaton` over a wider track set; source track s reads target track rename.get(s, s)."""
        reading = {s: rename.get(s, s) for s in source}

        def down(letter: TrackLetter) -> TrackLetter:
            valuation, on = letter
            return valuation, frozenset(s for s, t in reading.items() if t in on)

        return automaton.pullback(down, self.alphabet(target))

    def project(self, automaton: Nfa, target: Tuple[str, ...]) -> Nfa:
        keep = frozenset(target)
        projected = automaton.project(lambda letter: (letter[0], letter[1] & keep), self.alphabet(target))
        return projected.minimize()

    @staticmethod
    def meet(*automata: Nfa) -> Nfa:
        result = automata[0]
        for other in automata[1:]:
            result = result.product(other)
        return result.minimize()

    # Compilation

    def compile(self, phi: Formula, scope: Tuple[str, ...]) -> Nfa:
        tracks = scope + (OUT,)
        if isinstance(phi, Const):
            return self.local(tracks, lambda v, on: (OUT in on) == phi.value)
        if isinstance(phi, Prop):
            return self.local(tracks, lambda v, on: (OUT in on) == ((phi.name in v) == phi.positive))
        if isinstance(phi, Zero):
            if phi.kind in self.intrinsic:
                return self.boundary(tracks, self.intrinsic[phi.kind], phi.positive)
            return self.local(tracks, lambda v, on: (OUT in on) == ((phi.kind in v) == phi.positive))
        if isinstance(phi, Var):
            if phi.name in scope:
                return self.local(tracks, lambda v, on: (OUT in on) == (phi.name in on))
            return self.local(tracks, lambda v, on: (OUT in on) == (phi.name in v))
        if isinstance(phi, (And, Or)):
            return self.boolean(phi, scope)
        if isinstance(phi, (Mod, DualMod)):
            return self.modal(phi, scope)
        if isinstance(phi, Fix):
            return self.fixpoint(phi, scope)
        raise TypeError(f"cannot compile {type(phi).__name__}; desugar first")

    def boundary(self, tracks, which: str, positive: bool) -> Nfa:
        alphabet = self.alphabet(tracks)
        on = [letter for letter in alphabet if (OUT in letter[1]) == positive]
        off = [letter for letter in alphabet if (OUT in letter[1]) != positive]
        if which == "first":
            transitions = [(0, a, 1) for a in on] + [(1, a, 1) for a in off]
            return Nfa(alphabet, transitions, [0], [0, 1], [0, 1])
        transitions = [(s, a, 1) for s in (0, 1) for a in off] + [(s, a, 2) for s in (0, 1) for a in on]
        return Nfa(alphabet, transitions, [0], [0, 2], [0, 1, 2])

    def boolean(self, phi, scope) -> Nfa:
        tracks = scope + (OUT,)
        wide = tracks + ("#l", "#r")
        left = self.lift(self.compile(phi.left, scope), tracks, wide, {OUT: "#l"})
        right = self.lift(self.compile(phi.right, scope), tracks, wide, {OUT: "#r"})
        if isinstance(phi, And):
            check = self.local(wide, lambda v, on: (OUT in on) == ("#l" in on and "#r" in on))
        else:
            check = self.local(wide, lambda v, on: (OUT in on) == ("#l" in on or "#r" in on))
        return self.project(self.meet(left, right, check), tracks)

    def modal(self, phi, scope) -> Nfa:
        if MODE_OF[phi.op] != self.mode:
            raise FragmentError(f"single-mode ({self.mode})", "marking_transducer", f"modality {phi.op}")
        tracks = scope + (OUT,)
        wide = tracks + ("#t",)
        child = self.lift(self.compile(phi.child, scope), tracks, wide, {OUT: "#t"})
        at_boundary = isinstance(phi, DualMod)
        if DIRECTION_OF[phi.op] == "X":
            shift = self.next_checker(wide, at_boundary)
        else:
            shift = self.prev_checker(wide, at_boundary)
        return self.project(self.meet(child, shift), tracks)

    def next_checker(self, tracks, at_boundary: bool) -> Nfa:
        """o(i) = t(i+1), and o(n) = at_boundary."""
        alphabet = self.alphabet(tracks)
        transitions = []
        for letter in alphabet:
            o, t = OUT in letter[1], "#t" in letter[1]
            transitions.append(("s", letter, o))
            for b in (False, True):
                if t == b:
                    transitions.append((b, letter, o))
        return Nfa(alphabet, transitions, ["s"], ["s", at_boundary], ["s", False, True])

    def prev_checker(self, tracks, at_boundary: bool) -> Nfa:
        """o(i) = t(i-1), and o(1) = at_boundary."""
        alphabet = self.alphabet(tracks)
        transitions = []
        for letter in alphabet:
            o, t = OUT in letter[1], "#t" in letter[1]
            for b in (False, True):
                if o == b:
                    transitions.append((b, letter, t))
        return Nfa(alphabet, transitions, [at_boundary], [False, True], [False, True])

    def fixpoint(self, phi: Fix, scope) -> Nfa:
        tracks = scope + (OUT,)
        inner = scope + (phi.var,)
        body = self.compile(phi.body, inner)
        body_tracks = inner + (OUT,)
        least = phi.kind == MU

        # O itself is a pre- (mu) or post- (nu) fixpoint
        wide = tracks + ("#t",)
        closed = self.lift(body, body_tracks, wide, {phi.var: OUT, OUT: "#t"})
        if least:
            check = self.local(wide, lambda v, on: "#t" not in on or OUT in on)
        else:
            check = self.local(wide, lambda v, on: OUT not in on or "#t" in on)
        is_fixpoint = self.project(self.meet(closed, check), tracks)

        # some other pre/post fixpoint Z escapes O
        wider = tracks + ("#z", "#t")
        other = self.lift(body, body_tracks, wider, {phi.var: "#z", OUT: "#t"})
        if least:
            z_check = self.local(wider, lambda v, on: "#t" not in on or "#z" in on)
            escape = self.exists_position(wider, lambda v, on: OUT in on and "#z" not in on)
        else:
            z_check = self.local(wider, lambda v, on: "#z" not in on or "#t" in on)
            escape = self.exists_position(wider, lambda v, on: "#z" in on and OUT not in on)
        beaten = self.project(self.meet(other, z_check, escape), tracks)
        return self.meet(is_fixpoint, beaten.complement())


def check_single_mode(phi: Formula, mode: str) -> None:
    for op in modalities(phi):
        if MODE_OF[op] != mode:
            raise FragmentError(f"single-mode ({mode})", "marking_transducer", f"modality {op}")


def marking_transducer(phi: Formula, mode: str, space: Optional[LetterSpace] = None) -> MarkingTransducer:
    """Transducer outputting 1 at exactly the positions of a word where phi holds.

    Free variables of phi are read as bits of the letter space (layer holes).
    """
    core = rename_apart(desugar(phi, expand_duals=False))
    check_single_mode(core, mode)
    space = space or LetterSpace.for_formula(core, mode)
    missing = (props(core) - set(space.exclusive)) | (core.free_vars - set(space.bits))
    if missing:
        raise ValidationError("letter space", sorted(missing), "facts used by the formula are missing")
    compiler = _Compiler(space, mode)
    tracked = compiler.compile(core, ()).minimize()
    nfa = Nfa(
        [(v, b) for v in space.valuations for b in (0, 1)],
        ((p, (v, int(OUT in on)), q) for p, (v, on), q in tracked.transitions()),
        tracked.initial,
        tracked.final,
        tracked.states,
    )
    logger.debug(f"marking_transducer[{mode}] {phi}: {len(nfa.states)} states")
    return MarkingTransducer(nfa, space, mode, phi)
