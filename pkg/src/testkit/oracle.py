"""
Exhaustive equivalence oracle.

Words are visited in canonical enumeration order (length first, then
`enumerate_words` order). With several workers each length is cut into
contiguous chunks handed to a thread pool; the earliest disagreement over
all chunks is reported, so results do not depend on the worker count.
Acceptors are closures over compiled objects and are not picklable, so the
pool holds threads: chunks only overlap where an acceptor releases the GIL,
and for the pure-Python acceptors of this package `workers` changes the
partition, not the running time.
"""
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import List, Optional, Sequence

from src.testkit.acceptors import Acceptor
from src.utils.exceptions import ValidationError
from src.utils.logger import get_logger
from src.words.dataword import DataWord, enumerate_up_to, enumerate_words

logger = get_logger(__name__)


@dataclass(frozen=True)
class Counterexample:
    word: DataWord
    lhs: bool
    rhs: bool

    def to_dict(self) -> dict:
        return {"word": self.word.to_text(), "lhs": self.lhs, "rhs": self.rhs}


@dataclass
class EquivalenceReport:
    counterexample: Optional[Counterexample]
    visited: int

    @property
    def equivalent(self) -> bool:
        return self.counterexample is None


def _first_disagreement(words: Sequence[DataWord], lhs: Acceptor, rhs: Acceptor) -> Optional[int]:
    for index, word in enumerate(words):
        if lhs(word) != rhs(word):
            return index
    return None


def _chunks(words: List[DataWord], workers: int) -> List[List[DataWord]]:
    size = max(1, -(-len(words) // workers))
    return [words[k:k + size] for k in range(0, len(words), size)]


def check_equivalence(
    lhs: Acceptor,
    rhs: Acceptor,
    alphabet: Sequence[str],
    max_len: int,
    workers: int = 1,
) -> EquivalenceReport:
    """Compare two acceptors on every word up to max_len; report the first disagreement."""
    if max_len < 0:
        raise ValidationError("max_len", max_len, "must be nonnegative")
    if workers < 1:
        raise ValidationError("workers", workers, "must be at least 1")
    visited = 0
    for n in range(max_len + 1):
        words = list(enumerate_words(alphabet, n))
        if workers == 1:
            found = _first_disagreement(words, lhs, rhs)
            visited += len(words) if found is None else found + 1
        else:
            chunks = _chunks(words, workers)
            with ThreadPoolExecutor(max_workers=workers) as pool:
                results = list(pool.map(lambda chunk: _first_disagreement(chunk, lhs, rhs), chunks))
            found = None
            offset = 0
            for chunk, result in zip(chunks, results):
                if result is not None:
                    found = offset + result
                    break
                offset += len(chunk)
            visited += len(words) if found is None else found + 1
        if found is not None:
            word = words[found]
            logger.info(f"check_equivalence: counterexample {word} after {visited} words")
            return EquivalenceReport(Counterexample(word, lhs(word), rhs(word)), visited)
        logger.debug(f"check_equivalence: length {n} agrees ({len(words)} words)")
    logger.info(f"check_equivalence: {lhs.name} and {rhs.name} agree on {visited} words")
    return EquivalenceReport(None, visited)


def equivalence_check(
    lhs: Acceptor,
    rhs: Acceptor,
    alphabet: Sequence[str],
    max_len: int,
    workers: int = 1,
) -> Optional[Counterexample]:
    """First word in enumeration order on which the acceptors disagree, or None."""
    return check_equivalence(lhs, rhs, alphabet, max_len, workers).counterexample


def shrink(
    counterexample: Counterexample,
    lhs: Acceptor,
    rhs: Acceptor,
    alphabet: Optional[Sequence[str]] = None,
) -> Counterexample:
    """Least disagreeing word under (length, enumeration order), never longer than the input."""
    word = counterexample.word
    if alphabet is None:
        alphabet = sorted(set(word.letters))
    for n in range(len(word) + 1):
        for candidate in enumerate_words(alphabet, n):
            left, right = lhs(candidate), rhs(candidate)
            if left != right:
                return Counterexample(candidate, left, right)
    return counterexample


def count_words(alphabet: Sequence[str], max_len: int) -> int:
    """Number of words the oracle visits for this alphabet and bound."""
    return sum(1 for _ in enumerate_up_to(alphabet, max_len))
