"""
Formula builders for the increasing-bijection property and for PCP instances.

For marker letters A and B, R relates every A-position to the B-positions
of its class. R is an increasing bijection when every class holding an A
or a B holds exactly one of each, and no A-position x reaches itself
through

    x R x' < y' R^-1 y < z        (a "big witness" chain of such steps)

The chain is a nu-fragment formula; its dual, conjoined with the bijection
check, is a mu-fragment sentence.

A PCP solution i0 ... in with common word w is encoded by inserting A at
the boundaries of u_i0 ... u_in in w and B at those of v_i0 ... v_in; the
k-th A and the k-th B share a data value, every other letter has a value
of its own.
"""
import itertools
from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence, Tuple

from src.logic.evaluator import FormulaChecker
from src.logic.library import always, eventually, exactly_one_in_class, until
from src.logic.syntax import Formula, Mod, Prop, Var, Zero, conj, disj, fresh_name, nu
from src.logic.transforms import dualize
from src.utils.constants import DEFAULT_PCP_MARKERS, MU, NU
from src.utils.exceptions import SerializationError, ValidationError
from src.utils.logger import get_logger
from src.words.dataword import DataWord

logger = get_logger(__name__)


def _check_markers(la: str, lb: str) -> None:
    if la == lb:
        raise ValidationError("marker letters", (la, lb), "must be distinct")


def big_witness_formula(la: str, lb: str) -> Formula:
    """Nu-fragment sentence: some la-position starts an endless chain of crossing steps."""
    _check_markers(la, lb)
    a, b = Prop(la), Prop(lb)

    def f(op: str, phi: Formula) -> Formula:
        return eventually(op, phi, kind=NU)

    def in_class(phi: Formula) -> Formula:
        return f("Fc", f("Pc", phi))

    def later(phi: Formula) -> Formula:
        return Mod("Xg", f("Fg", phi))

    w = fresh_name("w", {la, lb})
    chain = conj(a, in_class(conj(b, later(conj(b, in_class(conj(a, later(Var(w)))))))))
    return f("Fg", nu(w, chain))


def bijection_formula(la: str, lb: str) -> Formula:
    """Mu-fragment sentence: every class with an la or an lb has exactly one of each."""
    _check_markers(la, lb)
    one_each = conj(exactly_one_in_class(Prop(la), MU), exactly_one_in_class(Prop(lb), MU))
    neither = conj(Prop(la, False), Prop(lb, False))
    return always("Gg", disj(neither, one_each), kind=MU)


def monotone_bijection_formula(la: str, lb: str) -> Formula:
    """Mu-fragment sentence: the class relation is an increasing bijection from la- to lb-positions."""
    return conj(bijection_formula(la, lb), dualize(big_witness_formula(la, lb)))


def is_monotone_bijection(word: DataWord, la: str, lb: str) -> bool:
    """Direct check of the increasing-bijection property."""
    partner = {}
    for members in word.classes():
        a_side = [i for i in members if word.letters[i - 1] == la]
        b_side = [i for i in members if word.letters[i - 1] == lb]
        if not a_side and not b_side:
            continue
        if len(a_side) != 1 or len(b_side) != 1:
            return False
        partner[a_side[0]] = b_side[0]
    images = [partner[i] for i in sorted(partner)]
    return all(x < y for x, y in zip(images, images[1:]))


@dataclass(frozen=True)
class PcpInstance:
    """PCP instance: nonempty word pairs over single-character letters, plus two marker letters."""
    pairs: Tuple[Tuple[str, str], ...]
    markers: Tuple[str, str] = DEFAULT_PCP_MARKERS

    def __post_init__(self):
        object.__setattr__(self, "pairs", tuple((u, v) for u, v in self.pairs))
        object.__setattr__(self, "markers", tuple(self.markers))
        if not self.pairs:
            raise ValidationError("PCP instance", self.pairs, "needs at least one pair")
        for u, v in self.pairs:
            if not u or not v:
                raise ValidationError("PCP pair", (u, v), "words must be nonempty")
            for ch in u + v:
                if not ch.isalpha():
                    raise ValidationError("PCP letter", ch, "letters must be alphabetic characters")
        _check_markers(*self.markers)
        for marker in self.markers:
            if marker in self.alphabet:
                raise ValidationError("marker", marker, "occurs in the instance alphabet")

    @property
    def alphabet(self) -> Tuple[str, ...]:
        return tuple(sorted({ch for u, v in self.pairs for ch in u + v}))

    @property
    def letters(self) -> Tuple[str, ...]:
        """Instance letters followed by the two markers."""
        return self.alphabet + self.markers

    def is_solution(self, indices: Sequence[int]) -> bool:
        """True for a nonempty sequence of 1-based indices with equal concatenations."""
        if not indices or any(not 1 <= i <= len(self.pairs) for i in indices):
            return False
        top = "".join(self.pairs[i - 1][0] for i in indices)
        bottom = "".join(self.pairs[i - 1][1] for i in indices)
        return top == bottom

    @classmethod
    def from_json(cls, data, markers: Optional[Sequence[str]] = None) -> "PcpInstance":
        """Instance from a list of [u, v] pairs, or an object with "pairs" and optional "markers"."""
        if isinstance(data, dict):
            markers = markers or data.get("markers")
            data = data.get("pairs")
        if not isinstance(data, list) or not all(
            isinstance(p, (list, tuple)) and len(p) == 2 and all(isinstance(s, str) for s in p) for p in data
        ):
            raise SerializationError("PCP instance", "expected a list of [u, v] string pairs")
        return cls(tuple(tuple(p) for p in data), tuple(markers) if markers else DEFAULT_PCP_MARKERS)

    def to_dict(self) -> dict:
        return {"pairs": [list(p) for p in self.pairs], "markers": list(self.markers)}


def _read_segment(word: str, marker: str, skip: str) -> Formula:
    """At a marker: ignoring `skip` letters, the next letters spell word followed by the marker."""
    def next_kept(phi: Formula) -> Formula:
        return Mod("Xg", until("Ug", Prop(skip), phi, kind=MU))

    tail: Formula = Prop(marker)
    for ch in reversed(word):
        tail = conj(Prop(ch), next_kept(tail))
    return conj(Prop(marker), next_kept(tail))


def pcp_formula(instance: PcpInstance) -> Formula:
    """Mu-fragment sentence satisfied exactly by the words encoding a solution."""
    ma, mb = instance.markers
    a, b = Prop(ma), Prop(mb)
    frame = conj(
        a,
        Mod("Xg", conj(b, Mod("Xg", eventually("Fg", conj(a, Mod("Xg", conj(b, Zero("lastg")))))))),
    )
    segments = disj(*(
        conj(
            _read_segment(u, ma, mb),
            eventually("Fc", eventually("Pc", conj(b, _read_segment(v, mb, ma)))),
        )
        for u, v in instance.pairs
    ))
    last_marker = dualize(Mod("Xg", eventually("Fg", a, kind=NU)))
    steps = always("Gg", disj(Prop(ma, False), last_marker, segments), kind=MU)
    phi = conj(frame, monotone_bijection_formula(ma, mb), steps)
    logger.info(f"pcp_formula: {len(instance.pairs)} pairs, markers {ma}/{mb}")
    return phi


def encode_solution(instance: PcpInstance, indices: Sequence[int]) -> DataWord:
    """Data word encoding the solution given by 1-based indices."""
    indices = list(indices)
    if not instance.is_solution(indices):
        raise ValidationError("PCP solution", indices, "not a nonempty sequence with equal concatenations")
    ma, mb = instance.markers
    common = "".join(instance.pairs[i - 1][0] for i in indices)
    top_cuts = set(itertools.accumulate([0] + [len(instance.pairs[i - 1][0]) for i in indices]))
    bottom_cuts = set(itertools.accumulate([0] + [len(instance.pairs[i - 1][1]) for i in indices]))
    letters: List[str] = []
    for p in range(len(common) + 1):
        if p in top_cuts:
            letters.append(ma)
        if p in bottom_cuts:
            letters.append(mb)
        if p < len(common):
            letters.append(common[p])
    return DataWord(tuple(letters), _marker_values(letters, ma, mb, None))


def _marker_values(letters: Sequence[str], ma: str, mb: str, matching: Optional[Sequence[int]]) -> Tuple[int, ...]:
    """Values pairing the k-th ma with the matching[k]-th mb (identity by default); other letters fresh."""
    count = sum(1 for ch in letters if ch == ma)
    matching = list(matching) if matching is not None else list(range(count))
    fresh = count + 1
    seen = {ma: 0, mb: 0}
    inverse = {m: k for k, m in enumerate(matching)}
    values = []
    for ch in letters:
        if ch == ma:
            values.append(1 + seen[ma])
            seen[ma] += 1
        elif ch == mb:
            values.append(1 + inverse[seen[mb]])
            seen[mb] += 1
        else:
            values.append(fresh)
            fresh += 1
    return tuple(values)


def candidate_words(instance: PcpInstance, max_len: int) -> Iterable[DataWord]:
    """Words starting and ending with the marker pair, equal marker counts, every marker bijection."""
    if max_len < 0:
        raise ValidationError("max_len", max_len, "must be nonnegative")
    ma, mb = instance.markers
    for n in range(4, max_len + 1):
        for middle in itertools.product(instance.letters, repeat=n - 4):
            letters = (ma, mb) + middle + (ma, mb)
            count = letters.count(ma)
            if count != letters.count(mb):
                continue
            for matching in itertools.permutations(range(count)):
                yield DataWord(letters, _marker_values(letters, ma, mb, matching)).canonicalize()


def search_solution_word(instance: PcpInstance, max_len: int) -> Optional[DataWord]:
    """Shortest candidate word of length <= max_len satisfying pcp_formula, or None."""
    checker = FormulaChecker(pcp_formula(instance))
    visited = 0
    for word in candidate_words(instance, max_len):
        visited += 1
        if checker.models(word):
            logger.info(f"search_solution_word: witness of length {len(word)} after {visited} candidates")
            return word
    logger.info(f"search_solution_word: no witness up to length {max_len} ({visited} candidates)")
    return None


def _segments(letters: Sequence[str], marker: str, skip: str) -> List[str]:
    kept = [ch for ch in letters if ch != skip]
    cuts = [k for k, ch in enumerate(kept) if ch == marker]
    return ["".join(kept[start + 1:end]) for start, end in zip(cuts, cuts[1:])]


def decode_word(instance: PcpInstance, word: DataWord) -> List[int]:
    """Index sequence spelled by a satisfying word, matching top and bottom segments pairwise."""
    ma, mb = instance.markers
    tops = _segments(word.letters, ma, mb)
    bottoms = _segments(word.letters, mb, ma)
    indices = []
    for top, bottom in zip(tops, bottoms):
        matches = [i for i, pair in enumerate(instance.pairs, start=1) if pair == (top, bottom)]
        if not matches:
            raise ValidationError("encoding", word.to_text(), f"segment pair ({top}, {bottom}) is not in the instance")
        indices.append(matches[0])
    return indices
