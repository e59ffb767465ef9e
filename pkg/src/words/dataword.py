"""
Finite data words, their class structure and 1-type markings.

A data word is a sequence of (letter, data value) pairs. Positions are
1-based throughout the public API. Two positions belong to the same class
when they carry the same data value; the class successor of a position is
the next position of its class.

Example:
    >>> w = DataWord.from_text("a:1 b:2 a:2 a:1 b:3 a:1 b:2")
    >>> w.class_successor(1)
    4
    >>> str(w.one_type(2))
    '(¬P,S)'
"""
import itertools
import re
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Dict, Hashable, Iterator, List, Optional, Sequence, Tuple

from src.utils.constants import IDENTIFIER_PATTERN
from src.utils.exceptions import SerializationError, ValidationError

_TOKEN = re.compile(rf"^({IDENTIFIER_PATTERN}):(\d+)$")


@dataclass(frozen=True)
class Marking:
    """1-type of a position: does the predecessor / successor stay in the class."""
    pred: bool
    succ: bool

    def __str__(self):
        return f"({'P' if self.pred else '¬P'},{'S' if self.succ else '¬S'})"

    @property
    def code(self) -> str:
        return ("P" if self.pred else "-") + ("S" if self.succ else "-")

    @classmethod
    def from_code(cls, code: str) -> "Marking":
        if len(code) != 2 or code[0] not in "P-" or code[1] not in "S-":
            raise SerializationError("marking", f"bad code '{code}'")
        return cls(code[0] == "P", code[1] == "S")


MARKINGS = tuple(Marking(pred, succ) for pred in (False, True) for succ in (False, True))


@dataclass(frozen=True)
class MarkedWord:
    """Letters paired with markings, remembering the source positions."""
    letters: Tuple[Hashable, ...]
    markings: Tuple[Marking, ...]
    positions: Tuple[int, ...]

    def __len__(self):
        return len(self.letters)

    def __iter__(self) -> Iterator[Tuple[Hashable, Marking]]:
        return iter(zip(self.letters, self.markings))


@dataclass(frozen=True)
class DataWord:
    letters: Tuple[Hashable, ...]
    values: Tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "letters", tuple(self.letters))
        object.__setattr__(self, "values", tuple(self.values))
        if len(self.letters) != len(self.values):
            raise ValidationError(
                "data word", f"{len(self.letters)} letters / {len(self.values)} values",
                "letters and values must have equal length",
            )
        for value in self.values:
            if not isinstance(value, int) or value < 0:
                raise ValidationError("data value", value, "must be a nonnegative integer")

    def __len__(self):
        return len(self.letters)

    def __str__(self):
        return self.to_text()

    # Class structure

    @cached_property
    def _links(self) -> Tuple[Tuple[Optional[int], ...], Tuple[Optional[int], ...]]:
        n = len(self)
        succ: List[Optional[int]] = [None] * n
        pred: List[Optional[int]] = [None] * n
        last_seen: Dict[int, int] = {}
        for i, value in enumerate(self.values):
            if value in last_seen:
                j = last_seen[value]
                succ[j] = i
                pred[i] = j
            last_seen[value] = i
        return tuple(succ), tuple(pred)

    def _check(self, i: int) -> int:
        if not isinstance(i, int) or not 1 <= i <= len(self):
            raise ValidationError("position", i, f"must lie in 1..{len(self)}")
        return i - 1

    def class_successor(self, i: int) -> Optional[int]:
        """Least j > i with the same data value, or None."""
        j = self._links[0][self._check(i)]
        return None if j is None else j + 1

    def class_predecessor(self, i: int) -> Optional[int]:
        """Greatest j < i with the same data value, or None."""
        j = self._links[1][self._check(i)]
        return None if j is None else j + 1

    def one_type(self, i: int) -> Marking:
        k = self._check(i)
        succ, pred = self._links
        return Marking(pred=pred[k] == k - 1, succ=succ[k] == k + 1)

    def markings(self) -> Tuple[Marking, ...]:
        return tuple(self.one_type(i) for i in range(1, len(self) + 1))

    def classes(self) -> Tuple[Tuple[int, ...], ...]:
        """Position sets of the classes, ordered by first occurrence."""
        groups: Dict[int, List[int]] = {}
        for i, value in enumerate(self.values, start=1):
            groups.setdefault(value, []).append(i)
        return tuple(tuple(group) for group in groups.values())

    # Projections

    def marked_string_projection(self) -> MarkedWord:
        return MarkedWord(self.letters, self.markings(), tuple(range(1, len(self) + 1)))

    def projections(self) -> Tuple[MarkedWord, List[MarkedWord]]:
        """Marked string projection and one marked class projection per class."""
        msp = self.marked_string_projection()
        class_words = [
            MarkedWord(
                tuple(self.letters[i - 1] for i in cls),
                tuple(msp.markings[i - 1] for i in cls),
                cls,
            )
            for cls in self.classes()
        ]
        return msp, class_words

    # Transforms

    def canonicalize(self) -> "DataWord":
        """Rename data values by first occurrence (restricted-growth form)."""
        renaming: Dict[int, int] = {}
        for value in self.values:
            renaming.setdefault(value, len(renaming) + 1)
        return DataWord(self.letters, tuple(renaming[v] for v in self.values))

    def reversed(self) -> "DataWord":
        return DataWord(self.letters[::-1], self.values[::-1])

    def relabel(self, letters: Sequence[Hashable]) -> "DataWord":
        return DataWord(tuple(letters), self.values)

    # Serialisation

    def to_text(self) -> str:
        return " ".join(f"{letter}:{value}" for letter, value in zip(self.letters, self.values))

    def to_dict(self) -> dict:
        return {"letters": list(self.letters), "values": list(self.values)}

    @classmethod
    def from_text(cls, text: str) -> "DataWord":
        letters, values = [], []
        for token in text.split():
            match = _TOKEN.match(token)
            if not match:
                raise SerializationError("data word", f"bad token '{token}', expected letter:value")
            letters.append(match.group(1))
            values.append(int(match.group(2)))
        return cls(tuple(letters), tuple(values))

    @classmethod
    def from_dict(cls, data: dict) -> "DataWord":
        try:
            return cls(tuple(data["letters"]), tuple(data["values"]))
        except (KeyError, TypeError) as e:
            raise SerializationError("data word", str(e))


EMPTY_WORD = DataWord((), ())


@lru_cache(maxsize=None)
def restricted_growth(n: int) -> Tuple[Tuple[int, ...], ...]:
    """All set partitions of 1..n as restricted-growth strings, lexicographic."""
    if n == 0:
        return ((),)
    result = []
    for prefix in restricted_growth(n - 1):
        top = max(prefix, default=0)
        for value in range(1, top + 2):
            result.append(prefix + (value,))
    return tuple(sorted(result))


def bell_number(n: int) -> int:
    """Number of set partitions of n elements (Bell triangle)."""
    row = [1]
    for _ in range(n):
        nxt = [row[-1]]
        for value in row:
            nxt.append(nxt[-1] + value)
        row = nxt
    return row[0]


def enumerate_words(alphabet: Sequence[Hashable], n: int) -> Iterator[DataWord]:
    """One canonical representative per data-permutation class of length-n words.

    Letter words vary slowest (lexicographic in the alphabet order), value
    partitions fastest.
    """
    if n < 0:
        raise ValidationError("length", n, "must be nonnegative")
    partitions = restricted_growth(n)
    for letters in itertools.product(tuple(alphabet), repeat=n):
        for values in partitions:
            yield DataWord(letters, values)


def enumerate_up_to(alphabet: Sequence[Hashable], max_len: int) -> Iterator[DataWord]:
    for n in range(max_len + 1):
        yield from enumerate_words(alphabet, n)


def word_count(alphabet_size: int, max_len: int) -> int:
    return sum(alphabet_size ** m * bell_number(m) for m in range(max_len + 1))
