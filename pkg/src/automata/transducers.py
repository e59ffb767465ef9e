"""
Letter-to-letter word transducers.

A transducer is an Nfa whose letters are (input, output) pairs. Runs are
read on input words; the transduction of a word is the output track of an
accepting run, and a functional transducer has at most one.

Sequential transducers are the deterministic kind: a left one reads the
word left to right, a right one reads it right to left. `sequentialize`
splits a functional transducer into a left pass that annotates each
letter with the subset of states reachable before it, and a right pass
that picks the unique output compatible with the co-reachable states.
"""
from collections import deque
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Hashable, Iterable, Iterator, List, Optional, Sequence, Set, Tuple

from src.automata.nfa import Nfa
from src.utils.exceptions import AlphabetMismatchError, NonFunctionalError, ValidationError
from src.utils.logger import get_logger

logger = get_logger(__name__)

State = Hashable
Letter = Hashable
Move = Tuple[State, Letter, Letter, State]


class WordTransducer:
    def __init__(self, nfa: Nfa, inputs: Iterable[Letter], outputs: Iterable[Letter]):
        self.nfa = nfa
        self.inputs: Tuple[Letter, ...] = tuple(dict.fromkeys(inputs))
        self.outputs: Tuple[Letter, ...] = tuple(dict.fromkeys(outputs))
        self._in = frozenset(self.inputs)
        self._by_input: Dict[State, Dict[Letter, List[Tuple[Letter, State]]]] = {}
        for src, (a, b), dst in nfa.transitions():
            self._by_input.setdefault(src, {}).setdefault(a, []).append((b, dst))

    @classmethod
    def from_moves(
        cls,
        moves: Iterable[Move],
        initial: Iterable[State],
        final: Iterable[State],
        inputs: Iterable[Letter],
        outputs: Iterable[Letter],
        states: Iterable[State] = (),
    ) -> "WordTransducer":
        inputs, outputs = tuple(inputs), tuple(outputs)
        alphabet = [(a, b) for a in inputs for b in outputs]
        nfa = Nfa(alphabet, ((p, (a, b), q) for p, a, b, q in moves), initial, final, states)
        return cls(nfa, inputs, outputs)

    @classmethod
    def identity(cls, alphabet: Iterable[Letter]) -> "WordTransducer":
        alphabet = tuple(alphabet)
        return cls.from_moves(((0, a, a, 0) for a in alphabet), [0], [0], alphabet, alphabet)

    def __repr__(self):
        return f"WordTransducer(states={len(self.states)}, moves={self.nfa.transition_count})"

    @property
    def states(self) -> FrozenSet[State]:
        return self.nfa.states

    @property
    def initial(self) -> FrozenSet[State]:
        return self.nfa.initial

    @property
    def final(self) -> FrozenSet[State]:
        return self.nfa.final

    def moves(self) -> Iterator[Move]:
        for src, (a, b), dst in self.nfa.transitions():
            yield src, a, b, dst

    def moves_on(self, state: State, letter: Letter) -> List[Tuple[Letter, State]]:
        return self._by_input.get(state, {}).get(letter, [])

    def _check_word(self, word: Sequence[Letter]) -> None:
        for letter in word:
            if letter not in self._in:
                raise AlphabetMismatchError(self.inputs, letter)

    # Running

    def transduce(self, word: Sequence[Letter]) -> Optional[Tuple[Letter, ...]]:
        """Output of the accepting runs on `word`, None if there is no accepting run.

        Raises NonFunctionalError when two accepting runs disagree.
        """
        self._check_word(word)
        n = len(word)
        forward: List[FrozenSet[State]] = [self.initial]
        for letter in word:
            forward.append(frozenset(q for p in forward[-1] for _, q in self.moves_on(p, letter)))
        backward: List[FrozenSet[State]] = [frozenset()] * (n + 1)
        backward[n] = self.final
        for i in range(n - 1, -1, -1):
            backward[i] = frozenset(
                p for p in self.states if any(q in backward[i + 1] for _, q in self.moves_on(p, word[i]))
            )
        if not forward[0] & backward[0]:
            return None
        output = []
        for i, letter in enumerate(word):
            choices = {
                b for p in forward[i] for b, q in self.moves_on(p, letter) if q in backward[i + 1]
            }
            if len(choices) != 1:
                raise NonFunctionalError(f"position {i + 1} admits outputs {sorted(map(repr, choices))}")
            output.append(choices.pop())
        return tuple(output)

    def accepts(self, word: Sequence[Letter], output: Sequence[Letter]) -> bool:
        return len(word) == len(output) and self.nfa.accepts(list(zip(word, output)))

    # Properties

    def domain(self) -> Nfa:
        return self.nfa.project(lambda pair: pair[0], self.inputs)

    def is_total(self) -> bool:
        return self.domain().complement().is_empty()

    def is_functional(self) -> bool:
        """No input word has two accepting runs with different outputs (self-product check)."""
        start = [(p, q, False) for p in self.initial for q in self.initial]
        seen = set(start)
        queue = deque(start)
        while queue:
            p, q, differs = queue.popleft()
            if differs and p in self.final and q in self.final:
                return False
            for a, left in self._by_input.get(p, {}).items():
                for b1, p2 in left:
                    for b2, q2 in self.moves_on(q, a):
                        node = (p2, q2, differs or b1 != b2)
                        if node not in seen:
                            seen.add(node)
                            queue.append(node)
        return True

    def is_input_deterministic(self) -> bool:
        if len(self.initial) > 1:
            return False
        return all(len(options) <= 1 for row in self._by_input.values() for options in row.values())

    # Combinators

    def product(self, other: "WordTransducer") -> "WordTransducer":
        """Reads the same input, outputs the pair of outputs."""
        if self._in != other._in:
            raise AlphabetMismatchError(self.inputs, other.inputs)
        outputs = [(b1, b2) for b1 in self.outputs for b2 in other.outputs]
        initial = [(p, q) for p in self.initial for q in other.initial]
        seen = set(initial)
        queue = deque(initial)
        moves = []
        while queue:
            p, q = queue.popleft()
            for a, options in self._by_input.get(p, {}).items():
                for b1, p2 in options:
                    for b2, q2 in other.moves_on(q, a):
                        moves.append(((p, q), a, (b1, b2), (p2, q2)))
                        if (p2, q2) not in seen:
                            seen.add((p2, q2))
                            queue.append((p2, q2))
        final = [s for s in seen if s[0] in self.final and s[1] in other.final]
        return WordTransducer.from_moves(moves, initial, final, self.inputs, outputs, seen).renumbered()

    def compose(self, other: "WordTransducer") -> "WordTransducer":
        """Feed this transducer's output into `other`."""
        if not set(self.outputs) <= other._in:
            raise AlphabetMismatchError(other.inputs, self.outputs)
        initial = [(p, q) for p in self.initial for q in other.initial]
        seen = set(initial)
        queue = deque(initial)
        moves = []
        while queue:
            p, q = queue.popleft()
            for a, options in self._by_input.get(p, {}).items():
                for b, p2 in options:
                    for c, q2 in other.moves_on(q, b):
                        moves.append(((p, q), a, c, (p2, q2)))
                        if (p2, q2) not in seen:
                            seen.add((p2, q2))
                            queue.append((p2, q2))
        final = [s for s in seen if s[0] in self.final and s[1] in other.final]
        return WordTransducer.from_moves(moves, initial, final, self.inputs, other.outputs, seen).renumbered()

    def trim(self) -> "WordTransducer":
        return WordTransducer(self.nfa.trim_or_sink(), self.inputs, self.outputs)

    def renumbered(self) -> "WordTransducer":
        return WordTransducer(self.nfa.renumber(), self.inputs, self.outputs)

    def to_dict(self, encode=str) -> dict:
        return {
            "states": sorted(str(s) for s in self.states),
            "inputs": [encode(a) for a in self.inputs],
            "outputs": [encode(b) for b in self.outputs],
            "transitions": sorted(
                ([str(p), encode(a), encode(b), str(q)] for p, a, b, q in self.moves()), key=repr
            ),
            "initial": sorted(str(s) for s in self.initial),
            "final": sorted(str(s) for s in self.final),
        }


@dataclass
class SequentialTransducer:
    """Deterministic letter-to-letter transducer reading left-to-right or right-to-left."""
    direction: str
    initial: State
    transitions: Dict[Tuple[State, Letter], Tuple[Letter, State]]
    final: FrozenSet[State]
    inputs: Tuple[Letter, ...] = field(default=())

    def __post_init__(self):
        if self.direction not in ("left", "right"):
            raise ValidationError("direction", self.direction, "expected 'left' or 'right'")

    @classmethod
    def identity(cls, alphabet: Iterable[Letter], direction: str = "right") -> "SequentialTransducer":
        alphabet = tuple(alphabet)
        return cls(direction, 0, {(0, a): (a, 0) for a in alphabet}, frozenset({0}), alphabet)

    @classmethod
    def from_deterministic(cls, t: WordTransducer) -> "SequentialTransducer":
        if not t.is_input_deterministic():
            raise ValidationError("transducer", repr(t), "not input-deterministic")
        transitions = {}
        for p, a, b, q in t.moves():
            transitions[(p, a)] = (b, q)
        return cls("left", next(iter(t.initial)), transitions, t.final, t.inputs)

    @property
    def states(self) -> Set[State]:
        result = {self.initial} | set(self.final)
        for (p, _), (_, q) in self.transitions.items():
            result.add(p)
            result.add(q)
        return result

    def run(self, word: Sequence[Letter]) -> Optional[Tuple[Letter, ...]]:
        letters = list(word) if self.direction == "left" else list(reversed(word))
        state = self.initial
        output = []
        for letter in letters:
            step = self.transitions.get((state, letter))
            if step is None:
                return None
            out, state = step
            output.append(out)
        if state not in self.final:
            return None
        return tuple(output) if self.direction == "left" else tuple(reversed(output))

    def to_dict(self) -> dict:
        return {
            "direction": self.direction,
            "initial": str(self.initial),
            "final": sorted(str(s) for s in self.final),
            "transitions": sorted(
                ([str(p), repr(a), repr(b), str(q)] for (p, a), (b, q) in self.transitions.items()), key=repr
            ),
        }


def sequentialize(t: WordTransducer) -> Tuple[SequentialTransducer, SequentialTransducer]:
    """Left-sequential then right-sequential pass computing the same function as `t`."""
    if not t.is_functional():
        raise NonFunctionalError("cannot sequentialize a non-functional transducer")
    if t.is_input_deterministic():
        left = SequentialTransducer.from_deterministic(t)
        return left, SequentialTransducer.identity(t.outputs)

    # left pass: subset construction on the input projection
    start = frozenset(t.initial)
    left_moves: Dict[Tuple[State, Letter], Tuple[Letter, State]] = {}
    seen = {start}
    queue = deque([start])
    annotated: List[Tuple[Letter, FrozenSet[State]]] = []
    while queue:
        reach = queue.popleft()
        for a in t.inputs:
            nxt = frozenset(q for p in reach for _, q in t.moves_on(p, a))
            if not nxt:
                continue
            left_moves[(reach, a)] = ((a, reach), nxt)
            annotated.append((a, reach))
            if nxt not in seen:
                seen.add(nxt)
                queue.append(nxt)
    left = SequentialTransducer("left", start, left_moves, frozenset(seen), t.inputs)

    # right pass: co-reachable sets, read from the end
    end = frozenset(t.final)
    right_moves: Dict[Tuple[State, Letter], Tuple[Letter, State]] = {}
    seen_right = {end}
    queue = deque([end])
    while queue:
        coreach = queue.popleft()
        for a, reach in annotated:
            choices = {b for p in reach for b, q in t.moves_on(p, a) if q in coreach}
            if not choices:
                continue
            if len(choices) > 1:
                raise NonFunctionalError(f"letter {a!r} admits outputs {sorted(map(repr, choices))}")
            prev = frozenset(p for p in t.states if any(q in coreach for _, q in t.moves_on(p, a)))
            right_moves[(coreach, (a, reach))] = (choices.pop(), prev)
            if prev not in seen_right:
                seen_right.add(prev)
                queue.append(prev)
    final = frozenset(c for c in seen_right if c & t.initial)
    right = SequentialTransducer("right", end, right_moves, final, tuple(dict.fromkeys(annotated)))
    logger.debug(f"sequentialize: left {len(left.states)} states, right {len(right.states)} states")
    return left, right


def run_sequential(left: SequentialTransducer, right: SequentialTransducer, word: Sequence[Letter]):
    middle = left.run(word)
    if middle is None:
        return None
    return right.run(middle)
