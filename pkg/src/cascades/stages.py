"""
Cascades of global, class and class-memory transducers.

Letters flowing through a cascade are sets of facts: the original letter,
plus the facts each stage adds. A stage reads, at every position, a view
of the current letter (a valuation over its LetterSpace, completed with
the zeroary facts of the position, or the value a previous stage tagged
the letter with), runs its machine and adds its output to the letter:

    frozenset output      the facts are added as they are (labels)
    any other output      added as a (tag, output) pair, for a later TagView

Stage kinds:
    global    one run of the machine on the whole marked word
    class     one run per class, on the marked class projection
    cmt       a ClassMemoryTransducer over the whole word
"""
from dataclasses import dataclass, field
from typing import Any, FrozenSet, Hashable, List, Optional, Sequence, Tuple, Union

from src.automata.marking import LetterSpace
from src.logic.evaluator import letter_facts
from src.utils.exceptions import CascadeError
from src.utils.logger import get_logger
from src.words.dataword import DataWord

logger = get_logger(__name__)

STAGE_KINDS = ("global", "class", "cmt")


def position_facts(word: DataWord) -> List[FrozenSet[str]]:
    """Zeroary facts (S, P, first/last in the word and in the class) per position."""
    n = len(word)
    result = []
    for i in range(1, n + 1):
        marking = word.one_type(i)
        facts = set()
        if marking.succ:
            facts.add("S")
        if marking.pred:
            facts.add("P")
        if i == 1:
            facts.add("firstg")
        if i == n:
            facts.add("lastg")
        if word.class_predecessor(i) is None:
            facts.add("firstc")
        if word.class_successor(i) is None:
            facts.add("lastc")
        result.append(frozenset(facts))
    return result


@dataclass(frozen=True)
class AtomView:
    """Valuation of the letter's facts and the position's zeroaries over a LetterSpace."""
    space: LetterSpace

    def read(self, letter: Hashable, position: FrozenSet[str]) -> Hashable:
        facts = {f for f in letter_facts(letter) if isinstance(f, str)} | position
        return self.space.valuation(facts)

    def to_dict(self) -> dict:
        return {"view": "space", **self.space.to_dict()}


@dataclass(frozen=True)
class TagView:
    """Value of the (tag, value) fact a previous stage added."""
    tag: str

    def read(self, letter: Hashable, position: FrozenSet[str]) -> Hashable:
        for fact in letter_facts(letter):
            if isinstance(fact, tuple) and len(fact) == 2 and fact[0] == self.tag:
                return fact[1]
        raise CascadeError(f"letter {letter!r} carries no '{self.tag}' tag")

    def to_dict(self) -> dict:
        return {"view": "tag", "tag": self.tag}


View = Union[AtomView, TagView]


@dataclass
class Stage:
    kind: str
    machine: Any
    view: View
    tag: Optional[str] = None
    labels: Tuple[str, ...] = ()
    note: str = ""

    def __post_init__(self):
        if self.kind not in STAGE_KINDS:
            raise CascadeError(f"unknown stage kind '{self.kind}'")

    def emit(self, letter: Hashable, out: Hashable) -> Hashable:
        if self.tag is not None:
            return letter_facts(letter) | {(self.tag, out)}
        if not isinstance(out, frozenset):
            raise CascadeError(f"untagged stage output {out!r} is not a set of labels")
        if not out:
            return letter
        return letter_facts(letter) | out

    def _transduce(self, inputs: Sequence[Hashable]) -> Optional[Tuple[Hashable, ...]]:
        if hasattr(self.machine, "transduce"):
            return self.machine.transduce(list(inputs))
        return self.machine.run(list(inputs))

    def outputs(self, word: DataWord) -> Optional[List[Hashable]]:
        """Machine output per position, or None when some run fails."""
        facts = position_facts(word)
        inputs = [self.view.read(letter, facts[i]) for i, letter in enumerate(word.letters)]
        if self.kind == "global":
            result = self._transduce(inputs)
            return None if result is None else list(result)
        if self.kind == "class":
            result: List[Hashable] = [None] * len(word)
            for cls in word.classes():
                out = self._transduce([inputs[i - 1] for i in cls])
                if out is None:
                    return None
                for i, b in zip(cls, out):
                    result[i - 1] = b
            return result
        run = self.machine.run(inputs, word)
        return None if run is None else list(run[1])

    def apply(self, word: DataWord) -> Optional[DataWord]:
        outs = self.outputs(word)
        if outs is None:
            return None
        return word.relabel(tuple(self.emit(letter, out) for letter, out in zip(word.letters, outs)))

    def to_dict(self) -> dict:
        machine = self.machine.to_dict() if hasattr(self.machine, "to_dict") else repr(self.machine)
        data = {"kind": self.kind, "labels": list(self.labels), **self.view.to_dict(), "machine": machine}
        if self.tag is not None:
            data["tag"] = self.tag
        if self.note:
            data["note"] = self.note
        return data


@dataclass
class Cascade:
    stages: List[Stage] = field(default_factory=list)
    accept_label: Optional[str] = None

    @property
    def height(self) -> int:
        return len(self.stages)

    def run(self, word: DataWord) -> Optional[DataWord]:
        """Output of the last stage, each stage reading the previous one's output."""
        for k, stage in enumerate(self.stages, start=1):
            word = stage.apply(word)
            if word is None:
                logger.debug(f"cascade stage {k} ({stage.kind}) has no successful run")
                return None
        return word

    def marking(self, word: DataWord, label: Optional[str] = None) -> Optional[FrozenSet[int]]:
        label = label or self.accept_label
        result = self.run(word)
        if result is None:
            return None
        return frozenset(i for i, letter in enumerate(result.letters, start=1) if label in letter_facts(letter))

    def accepts(self, word: DataWord) -> bool:
        if len(word) == 0:
            return False
        if self.accept_label is None:
            return self.run(word) is not None
        marked = self.marking(word)
        return marked is not None and 1 in marked

    def then(self, other: "Cascade") -> "Cascade":
        """Composition: run this cascade, then `other` on its output."""
        return Cascade(self.stages + other.stages, other.accept_label or self.accept_label)

    def to_dict(self) -> dict:
        return {
            "height": self.height,
            "accept": self.accept_label,
            "stages": [stage.to_dict() for stage in self.stages],
        }
