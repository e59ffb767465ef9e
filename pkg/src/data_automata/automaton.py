"""
Data automata over finite data words.

A data automaton is a letter-to-letter transducer B reading the marked
string projection, followed by a word automaton C that must accept the
relabeled letters of every class. B and C are used through a small
interface so that explicit automata and lazily built ones mix freely:

    B: initial, moves_on(state, letter) -> [(output, state)], is_final(state)
    C: initial, successors(state, letter) -> states, is_final(state)

`from_nu_formula` builds both lazily from the atoms of a nu-only sentence:
B guesses an atom per position, checking letters, markings and the global
modalities between neighbours; C checks the class modalities along each
class.
"""
from dataclasses import dataclass
from typing import Dict, FrozenSet, Hashable, Iterable, List, Optional, Sequence, Set, Tuple

from src.automata.nfa import Nfa
from src.automata.transducers import WordTransducer
from src.data_automata.closure import Atom, AtomTable
from src.logic.syntax import Formula, fixpoint_kinds, size
from src.logic.transforms import desugar, to_guarded
from src.utils.constants import MU
from src.utils.exceptions import FragmentError, FreeVariableError, ValidationError
from src.utils.logger import get_logger
from src.words.dataword import MARKINGS, DataWord, Marking, enumerate_up_to

logger = get_logger(__name__)

START = "start"


class NuTransducer:
    """B for a nu-only sentence: states are the previously emitted atom."""

    def __init__(self, table: AtomTable):
        self.table = table
        self.initial = frozenset((START,))
        self._moves: Dict[Tuple[Hashable, Hashable], List[Tuple[Atom, Atom]]] = {}
        self._last = [(i, z.positive) for i, z in table.zeros.items() if z.kind == "lastg"]

    def _holds(self, atom: Atom, literals, value: bool) -> bool:
        return all(self.table.has(atom, i) == (value == positive) for i, positive in literals)

    def _letter_leaves(self, letter: Tuple[Hashable, Marking]) -> Dict[int, bool]:
        sigma, marking = letter
        fixed: Dict[int, bool] = {}
        for i, prop in self.table.props.items():
            fixed[i] = (sigma == prop.name) == prop.positive
        for i, zero in self.table.zeros.items():
            if zero.kind == "S":
                fixed[i] = marking.succ == zero.positive
            elif zero.kind == "P":
                fixed[i] = marking.pred == zero.positive
        return fixed

    def _fixed(self, state, letter) -> Dict[int, bool]:
        table = self.table
        fixed = self._letter_leaves(letter)
        first = state == START
        for i, zero in table.zeros.items():
            if zero.kind == "firstg":
                fixed[i] = first == zero.positive
        for i, child in table.modal["Yg"]:
            fixed[i] = False if first else table.has(state, child)
        return fixed

    def moves_on(self, state, letter) -> List[Tuple[Atom, Atom]]:
        key = (state, letter)
        if key in self._moves:
            return self._moves[key]
        table = self.table
        moves: List[Tuple[Atom, Atom]] = []
        if state == START or self._holds(state, self._last, False):
            for atom in table.candidates(self._fixed(state, letter)):
                if state != START and any(table.has(state, i) != table.has(atom, c) for i, c in table.modal["Xg"]):
                    continue
                moves.append((atom, atom))
        self._moves[key] = moves
        return moves

    def is_final(self, state) -> bool:
        if state == START:
            return False
        if not self._holds(state, self._last, True):
            return False
        return not any(self.table.has(state, i) for i, _ in self.table.modal["Xg"])


class NuClassAutomaton:
    """C for a nu-only sentence: deterministic, state is the previous atom of the class."""

    def __init__(self, table: AtomTable):
        self.table = table
        self.initial = frozenset((START,))
        self._first = [(i, z.positive) for i, z in table.zeros.items() if z.kind == "firstc"]
        self._last = [(i, z.positive) for i, z in table.zeros.items() if z.kind == "lastc"]

    def _holds(self, atom: Atom, literals, value: bool) -> bool:
        return all(self.table.has(atom, i) == (value == positive) for i, positive in literals)

    def successors(self, state, atom: Atom) -> FrozenSet:
        table = self.table
        if state == START:
            if not self._holds(atom, self._first, True):
                return frozenset()
            if any(table.has(atom, i) for i, _ in table.modal["Yc"]):
                return frozenset()
            return frozenset((atom,))
        if not self._holds(atom, self._first, False) or not self._holds(state, self._last, False):
            return frozenset()
        if any(table.has(state, i) != table.has(atom, c) for i, c in table.modal["Xc"]):
            return frozenset()
        if any(table.has(atom, i) != table.has(state, c) for i, c in table.modal["Yc"]):
            return frozenset()
        return frozenset((atom,))

    def is_final(self, state) -> bool:
        if state == START:
            return True
        if not self._holds(state, self._last, True):
            return False
        return not any(self.table.has(state, i) for i, _ in self.table.modal["Xc"])


class _ExplicitTransducer:
    def __init__(self, t: WordTransducer):
        self.t = t
        self.initial = t.initial

    def moves_on(self, state, letter):
        return self.t.moves_on(state, letter)

    def is_final(self, state) -> bool:
        return state in self.t.final


@dataclass
class DataRun:
    """Witness of membership: B's output letters, one per position."""
    outputs: Tuple[Hashable, ...]


class DataAutomaton:
    def __init__(self, transducer, class_automaton, acceptance=None, description: str = ""):
        if isinstance(transducer, WordTransducer):
            transducer = _ExplicitTransducer(transducer)
        self.transducer = transducer
        self.class_automaton = class_automaton
        # extra condition on the output at position 1
        self.acceptance = acceptance
        self.description = description

    def __repr__(self):
        return f"DataAutomaton({self.description or type(self.transducer).__name__})"

    @classmethod
    def universal(cls, alphabet: Iterable[Hashable]) -> "DataAutomaton":
        alphabet = tuple(alphabet)
        inputs = [(a, m) for a in alphabet for m in MARKINGS]
        copy = WordTransducer.from_moves(((0, (a, m), a, 0) for a, m in inputs), [0], [0], inputs, alphabet)
        return cls(copy, Nfa.universal(alphabet), description="universal")

    def membership(self, word: DataWord) -> bool:
        return self.run(word) is not None

    def accepts(self, word: DataWord) -> bool:
        return self.membership(word)

    def run(self, word: DataWord) -> Optional[DataRun]:
        """Accepting run, searched depth-first over B with failure memo on (position, state, class progress)."""
        n = len(word)
        msp = list(zip(word.letters, word.markings()))
        class_of: List[int] = [0] * n
        is_last: List[bool] = [False] * n
        for k, cls in enumerate(word.classes()):
            for i in cls:
                class_of[i - 1] = k
            is_last[cls[-1] - 1] = True
        classes = len(word.classes())
        B, C = self.transducer, self.class_automaton
        failed: Set[tuple] = set()
        outputs: List[Hashable] = []

        def search(i: int, state, progress: Tuple[Optional[FrozenSet], ...]) -> bool:
            if i == n:
                return B.is_final(state)
            key = (i, state, progress)
            if key in failed:
                return False
            k = class_of[i]
            current = progress[k] if progress[k] is not None else C.initial
            for out, nxt in B.moves_on(state, msp[i]):
                if i == 0 and self.acceptance is not None and not self.acceptance(out):
                    continue
                c_next = frozenset(s for c in current for s in C.successors(c, out))
                if not c_next:
                    continue
                if is_last[i] and not any(C.is_final(s) for s in c_next):
                    continue
                updated = progress[:k] + (c_next,) + progress[k + 1:]
                outputs.append(out)
                if search(i + 1, nxt, updated):
                    return True
                outputs.pop()
            failed.add(key)
            return False

        if n == 0:
            if any(B.is_final(s) for s in B.initial) and self.acceptance is None:
                return DataRun(())
            return None
        for start in B.initial:
            if search(0, start, (None,) * classes):
                return DataRun(tuple(outputs))
        return None

    def to_dict(self, alphabet: Iterable[Hashable]) -> dict:
        """Reachable part of B over the given letters, and of C over B's outputs."""
        inputs = [(a, m) for a in alphabet for m in MARKINGS]
        names: Dict[Hashable, str] = {}

        def name(state) -> str:
            return names.setdefault(state, str(len(names)) if state != START else START)

        b_moves, outs = [], []
        seen = list(self.transducer.initial)
        frontier = list(seen)
        while frontier:
            state = frontier.pop()
            for letter in inputs:
                for out, nxt in self.transducer.moves_on(state, letter):
                    b_moves.append([name(state), f"{letter[0]}{letter[1]}", _label(out), name(nxt)])
                    if out not in outs:
                        outs.append(out)
                    if nxt not in seen:
                        seen.append(nxt)
                        frontier.append(nxt)
        c_moves = []
        c_seen = list(self.class_automaton.initial)
        frontier = list(c_seen)
        while frontier:
            state = frontier.pop()
            for out in outs:
                for nxt in self.class_automaton.successors(state, out):
                    c_moves.append([f"c{name(state)}", _label(out), f"c{name(nxt)}"])
                    if nxt not in c_seen:
                        c_seen.append(nxt)
                        frontier.append(nxt)
        return {
            "description": self.description,
            "transducer": {
                "initial": [name(s) for s in self.transducer.initial],
                "final": sorted(name(s) for s in seen if self.transducer.is_final(s)),
                "transitions": sorted(b_moves),
            },
            "classAutomaton": {
                "initial": [f"c{name(s)}" for s in self.class_automaton.initial],
                "final": sorted(f"c{name(s)}" for s in c_seen if self.class_automaton.is_final(s)),
                "transitions": sorted(c_moves),
            },
        }


def _label(letter: Hashable) -> str:
    return f"#{letter}" if isinstance(letter, int) else str(letter)


def from_nu_formula(phi: Formula) -> DataAutomaton:
    """Data automaton for a nu-only sentence; its language is the set of models of phi."""
    if phi.free_vars:
        raise FreeVariableError(phi.free_vars, "from_nu_formula")
    core = desugar(phi, expand_duals=False)
    if MU in fixpoint_kinds(core):
        raise FragmentError("nu-only", "from_nu_formula", "least fixpoint present")
    core = desugar(to_guarded(core), expand_duals=True)
    table = AtomTable(core)
    root = table.root
    logger.info(f"from_nu_formula: closure {len(table)} members, {len(table.leaves)} leaves, size {size(core)}")
    return DataAutomaton(
        NuTransducer(table),
        NuClassAutomaton(table),
        acceptance=lambda atom: bool(atom >> root & 1),
        description=f"nu-automaton for {phi}",
    )


def bounded_emptiness(automaton, alphabet: Sequence[Hashable], max_len: int) -> Optional[DataWord]:
    """First accepted word in enumeration order up to max_len; None does not certify emptiness."""
    if max_len < 0:
        raise ValidationError("max_len", max_len, "must be nonnegative")
    for word in enumerate_up_to(alphabet, max_len):
        if automaton.accepts(word):
            logger.info(f"bounded_emptiness: witness of length {len(word)}")
            return word
    return None
