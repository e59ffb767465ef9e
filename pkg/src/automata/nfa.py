"""
Nondeterministic finite automata over arbitrary hashable letters.

Supports the usual algebra (product, union, complement via subset
construction, projection and inverse projection along a letter map), plus
trimming, reversal and Moore minimization. States are arbitrary hashables;
constructions that build new state spaces renumber states as integers.

Example:
    >>> a = Nfa.single_letter_loop(("a", "b"), "a")
    >>> a.accepts(["a", "a"]), a.accepts(["a", "b"])
    (True, False)
"""
import itertools
from collections import deque
from typing import (
    Callable,
    Dict,
    FrozenSet,
    Hashable,
    Iterable,
    Iterator,
    List,
    Optional,
    Sequence,
    Set,
    Tuple,
)

from src.utils.exceptions import AlphabetMismatchError, SerializationError

State = Hashable
Letter = Hashable


class Nfa:
    def __init__(
        self,
        alphabet: Iterable[Letter],
        transitions: Iterable[Tuple[State, Letter, State]],
        initial: Iterable[State],
        final: Iterable[State],
        states: Iterable[State] = (),
    ):
        self.alphabet: Tuple[Letter, ...] = tuple(dict.fromkeys(alphabet))
        self._letters = frozenset(self.alphabet)
        self.initial: FrozenSet[State] = frozenset(initial)
        self.final: FrozenSet[State] = frozenset(final)
        self._delta: Dict[State, Dict[Letter, Set[State]]] = {}
        all_states = set(states) | self.initial | self.final
        for src, letter, dst in transitions:
            if letter not in self._letters:
                raise AlphabetMismatchError(self.alphabet, letter)
            self._delta.setdefault(src, {}).setdefault(letter, set()).add(dst)
            all_states.add(src)
            all_states.add(dst)
        self.states: FrozenSet[State] = frozenset(all_states)

    def __repr__(self):
        return f"Nfa(states={len(self.states)}, letters={len(self.alphabet)}, transitions={self.transition_count})"

    # Basic queries

    @property
    def transition_count(self) -> int:
        return sum(len(dsts) for row in self._delta.values() for dsts in row.values())

    def transitions(self) -> Iterator[Tuple[State, Letter, State]]:
        for src, row in self._delta.items():
            for letter, dsts in row.items():
                for dst in dsts:
                    yield src, letter, dst

    def successors(self, state: State, letter: Letter) -> FrozenSet[State]:
        return frozenset(self._delta.get(state, {}).get(letter, ()))

    def is_final(self, state: State) -> bool:
        return state in self.final

    def step(self, states: Iterable[State], letter: Letter) -> FrozenSet[State]:
        result: Set[State] = set()
        for state in states:
            result |= self._delta.get(state, {}).get(letter, set())
        return frozenset(result)

    def accepts(self, word: Sequence[Letter]) -> bool:
        current = self.initial
        for letter in word:
            current = self.step(current, letter)
            if not current:
                return False
        return bool(current & self.final)

    def is_deterministic(self) -> bool:
        if len(self.initial) > 1:
            return False
        return all(len(dsts) <= 1 for row in self._delta.values() for dsts in row.values())

    def is_empty(self) -> bool:
        return not (self.reachable() & self.final)

    def reachable(self) -> FrozenSet[State]:
        seen = set(self.initial)
        queue = deque(self.initial)
        while queue:
            state = queue.popleft()
            for dsts in self._delta.get(state, {}).values():
                for dst in dsts:
                    if dst not in seen:
                        seen.add(dst)
                        queue.append(dst)
        return frozenset(seen)

    def language(self, max_len: int) -> Set[Tuple[Letter, ...]]:
        """All accepted words up to max_len (testing helper)."""
        return {
            word
            for n in range(max_len + 1)
            for word in itertools.product(self.alphabet, repeat=n)
            if self.accepts(word)
        }

    # Constructions

    def _check_alphabet(self, other: "Nfa") -> None:
        if self._letters != other._letters:
            raise AlphabetMismatchError(self.alphabet, other.alphabet)

    def product(self, other: "Nfa") -> "Nfa":
        """Intersection, exploring reachable pairs only."""
        self._check_alphabet(other)
        return self._pairs(other, lambda a, b: a and b)

    def union(self, other: "Nfa") -> "Nfa":
        self._check_alphabet(other)
        left = self.renumber(offset=0)
        right = other.renumber(offset=len(left.states))
        return Nfa(
            self.alphabet,
            itertools.chain(left.transitions(), right.transitions()),
            left.initial | right.initial,
            left.final | right.final,
            left.states | right.states,
        )

    def _pairs(self, other: "Nfa", accept: Callable[[bool, bool], bool]) -> "Nfa":
        start = [(p, q) for p in self.initial for q in other.initial]
        index: Dict[Tuple[State, State], int] = {}
        queue = deque()
        for pair in start:
            index.setdefault(pair, len(index))
            queue.append(pair)
        transitions = []
        while queue:
            p, q = queue.popleft()
            row_p = self._delta.get(p, {})
            row_q = other._delta.get(q, {})
            for letter, dsts_p in row_p.items():
                dsts_q = row_q.get(letter)
                if not dsts_q:
                    continue
                for pair in itertools.product(dsts_p, dsts_q):
                    if pair not in index:
                        index[pair] = len(index)
                        queue.append(pair)
                    transitions.append((index[(p, q)], letter, index[pair]))
        final = [i for (p, q), i in index.items() if accept(p in self.final, q in other.final)]
        return Nfa(self.alphabet, transitions, [index[p] for p in start], final, index.values())

    def determinize(self) -> "Nfa":
        """Subset construction, complete over the alphabet."""
        start = self.initial
        index: Dict[FrozenSet[State], int] = {start: 0}
        queue = deque([start])
        transitions = []
        while queue:
            subset = queue.popleft()
            for letter in self.alphabet:
                nxt = self.step(subset, letter)
                if nxt not in index:
                    index[nxt] = len(index)
                    queue.append(nxt)
                transitions.append((index[subset], letter, index[nxt]))
        final = [i for subset, i in index.items() if subset & self.final]
        return Nfa(self.alphabet, transitions, [0], final, index.values())

    def complement(self) -> "Nfa":
        dfa = self.determinize()
        return Nfa(dfa.alphabet, dfa.transitions(), dfa.initial, dfa.states - dfa.final, dfa.states)

    def project(self, letter_map: Callable[[Letter], Letter], alphabet: Iterable[Letter]) -> "Nfa":
        """Image under a letter-to-letter map (existential projection)."""
        return Nfa(
            alphabet,
            ((src, letter_map(letter), dst) for src, letter, dst in self.transitions()),
            self.initial,
            self.final,
            self.states,
        )

    def pullback(self, letter_map: Callable[[Letter], Letter], alphabet: Iterable[Letter]) -> "Nfa":
        """Inverse image: reads b by moving on letter_map(b)."""
        alphabet = tuple(alphabet)
        transitions = []
        for state, row in self._delta.items():
            for letter in alphabet:
                for dst in row.get(letter_map(letter), ()):
                    transitions.append((state, letter, dst))
        return Nfa(alphabet, transitions, self.initial, self.final, self.states)

    def reverse(self) -> "Nfa":
        return Nfa(
            self.alphabet,
            ((dst, letter, src) for src, letter, dst in self.transitions()),
            self.final,
            self.initial,
            self.states,
        )

    def trim(self) -> "Nfa":
        """Keep states both reachable and co-reachable."""
        useful = self.reachable() & self.reverse().reachable()
        return Nfa(
            self.alphabet,
            ((s, a, d) for s, a, d in self.transitions() if s in useful and d in useful),
            self.initial & useful,
            self.final & useful,
            useful,
        )

    def minimize(self) -> "Nfa":
        """Minimal complete DFA (subset construction, then Moore refinement)."""
        dfa = self.determinize()
        states = sorted(dfa.states)
        block = {s: int(s in dfa.final) for s in states}
        while True:
            signature = {
                s: (block[s],) + tuple(block[next(iter(dfa.successors(s, a)))] for a in dfa.alphabet)
                for s in states
            }
            numbering: Dict[tuple, int] = {}
            for s in states:
                numbering.setdefault(signature[s], len(numbering))
            refined = {s: numbering[signature[s]] for s in states}
            if len(set(refined.values())) == len(set(block.values())):
                block = refined
                break
            block = refined
        transitions = {(block[s], a, block[d]) for s, a, d in dfa.transitions()}
        return Nfa(
            dfa.alphabet,
            sorted(transitions, key=repr),
            {block[s] for s in dfa.initial},
            {block[s] for s in dfa.final},
            set(block.values()),
        ).trim_or_sink()

    def trim_or_sink(self) -> "Nfa":
        """Trim, keeping one state when the language is empty."""
        trimmed = self.trim()
        if trimmed.initial:
            return trimmed
        start = next(iter(self.initial))
        return Nfa(self.alphabet, (), [start], [], [start])

    def renumber(self, offset: int = 0) -> "Nfa":
        order = sorted(self.states, key=repr)
        index = {s: offset + i for i, s in enumerate(order)}
        return Nfa(
            self.alphabet,
            ((index[s], a, index[d]) for s, a, d in self.transitions()),
            (index[s] for s in self.initial),
            (index[s] for s in self.final),
            index.values(),
        )

    # Named automata

    @classmethod
    def universal(cls, alphabet: Iterable[Letter]) -> "Nfa":
        alphabet = tuple(alphabet)
        return cls(alphabet, ((0, a, 0) for a in alphabet), [0], [0], [0])

    @classmethod
    def single_letter_loop(cls, alphabet: Iterable[Letter], letter: Letter) -> "Nfa":
        return cls(alphabet, [(0, letter, 0)], [0], [0], [0])

    # Serialisation

    def to_dict(self, encode: Callable[[Letter], object] = str) -> dict:
        return {
            "states": sorted(str(s) for s in self.states),
            "alphabet": [encode(a) for a in self.alphabet],
            "transitions": sorted(([str(s), encode(a), str(d)] for s, a, d in self.transitions()), key=repr),
            "initial": sorted(str(s) for s in self.initial),
            "final": sorted(str(s) for s in self.final),
        }

    @classmethod
    def from_dict(cls, data: dict, decode: Callable[[object], Letter] = lambda x: x) -> "Nfa":
        try:
            return cls(
                [decode(a) for a in data["alphabet"]],
                [(s, decode(a), d) for s, a, d in data["transitions"]],
                data["initial"],
                data["final"],
                data.get("states", ()),
            )
        except (KeyError, TypeError, ValueError) as e:
            raise SerializationError("automaton", str(e))

    def __and__(self, other: "Nfa") -> "Nfa":
        return self.product(other)

    def __or__(self, other: "Nfa") -> "Nfa":
        return self.union(other)

    def __invert__(self) -> "Nfa":
        return self.complement()
