"""
Deterministic class-memory transducers.

A forward CMT reads the word left to right. At position i it knows its
previous state q (START at position 1) and the state r it was in at the
class predecessor of i (BOTTOM when i is first in its class):

    delta(q, r, letter) -> (next state, output)

A backward CMT is the same machine run on the reversed word, so r is the
state at the class successor (TOP when i is last in its class).

A run succeeds when every step is defined, the state at every class-final
position (last of the class forward, first of the class backward) is class
final, and the state at the end of the run is global final.
"""
from dataclasses import dataclass, field
from typing import Callable, Dict, FrozenSet, Hashable, List, Mapping, Optional, Sequence, Tuple

from src.automata.marking import LetterSpace
from src.data_automata.closure import Atom, AtomTable
from src.logic.syntax import Const, Formula
from src.utils.constants import MODALITY_OF
from src.utils.exceptions import CascadeError, ValidationError
from src.utils.logger import get_logger
from src.words.dataword import DataWord

logger = get_logger(__name__)

START = "start"
BOTTOM = "bottom"
TOP = "top"

ORIENTATIONS = ("forward", "backward")

Step = Optional[Tuple[Hashable, Hashable]]


@dataclass
class ClassMemoryTransducer:
    orientation: str
    delta: Callable[[Hashable, Hashable, Hashable], Step]
    class_final: Callable[[Hashable], bool] = lambda state: True
    global_final: Callable[[Hashable], bool] = lambda state: True
    initial: Hashable = START
    description: str = ""
    explored: Dict[Tuple[Hashable, Hashable, Hashable], Step] = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if self.orientation not in ORIENTATIONS:
            raise ValidationError("orientation", self.orientation, "expected 'forward' or 'backward'")

    @property
    def boundary(self) -> str:
        return BOTTOM if self.orientation == "forward" else TOP

    @classmethod
    def from_table(
        cls,
        orientation: str,
        table: Mapping[Tuple[Hashable, Hashable, Hashable], Tuple[Hashable, Hashable]],
        initial: Hashable = START,
        class_final: Optional[FrozenSet] = None,
        global_final: Optional[FrozenSet] = None,
        description: str = "",
    ) -> "ClassMemoryTransducer":
        """CMT given by an explicit transition table; unlisted steps are undefined."""
        table = dict(table)
        wrong = TOP if orientation == "forward" else BOTTOM
        for q, r, _ in table:
            if r == wrong:
                raise ValidationError("transition", (q, r), f"{wrong} is not a {orientation} class boundary")
        return cls(
            orientation,
            lambda q, r, a: table.get((q, r, a)),
            (lambda s: s in class_final) if class_final is not None else (lambda s: True),
            (lambda s: s in global_final) if global_final is not None else (lambda s: True),
            initial,
            description,
        )

    def step(self, state: Hashable, memory: Hashable, letter: Hashable) -> Step:
        key = (state, memory, letter)
        if key not in self.explored:
            self.explored[key] = self.delta(state, memory, letter)
        return self.explored[key]

    def run(self, inputs: Sequence[Hashable], word: DataWord) -> Optional[Tuple[List[Hashable], List[Hashable]]]:
        """(state per position, output per position) of the unique run, or None."""
        if len(inputs) != len(word):
            raise CascadeError(f"{len(inputs)} inputs for a word of length {len(word)}")
        if self.orientation == "backward":
            result = self._forward(list(reversed(inputs)), word.reversed())
            if result is None:
                return None
            states, outputs = result
            return states[::-1], outputs[::-1]
        return self._forward(list(inputs), word)

    def _forward(self, inputs: List[Hashable], word: DataWord):
        states: List[Hashable] = []
        outputs: List[Hashable] = []
        state = self.initial
        for i, letter in enumerate(inputs, start=1):
            j = word.class_predecessor(i)
            memory = self.boundary if j is None else states[j - 1]
            step = self.step(state, memory, letter)
            if step is None:
                return None
            state, out = step
            if word.class_successor(i) is None and not self.class_final(state):
                return None
            states.append(state)
            outputs.append(out)
        if not self.global_final(state):
            return None
        return states, outputs

    def with_fresh_initial(self) -> "ClassMemoryTransducer":
        """Equivalent CMT whose initial state has no incoming transitions.

        The new initial state copies the outgoing steps of the old one.
        """
        fresh = ("init", self.initial)
        delta, initial = self.delta, self.initial

        def split(q, r, a):
            return delta(initial if q == fresh else q, r, a)

        return ClassMemoryTransducer(
            self.orientation,
            split,
            self.class_final,
            lambda s: self.global_final(initial if s == fresh else s),
            fresh,
            (self.description + "; initial state split").lstrip("; "),
        )

    def reachable(self, letters: Sequence[Hashable]) -> Dict[Tuple[Hashable, Hashable, Hashable], Tuple[Hashable, Hashable]]:
        """Defined steps from reachable states over the given letters.

        The memory of a step is the class boundary or a state some step entered.
        """
        targets: List[Hashable] = []
        result: Dict[Tuple[Hashable, Hashable, Hashable], Tuple[Hashable, Hashable]] = {}
        grown = True
        while grown:
            grown = False
            for q in [self.initial] + targets:
                for r in [self.boundary] + targets:
                    for a in letters:
                        if (q, r, a) in result:
                            continue
                        step = self.step(q, r, a)
                        if step is None:
                            continue
                        result[(q, r, a)] = step
                        if step[0] not in targets:
                            targets.append(step[0])
                            grown = True
        return result

    def to_dict(self) -> dict:
        rows = sorted(
            ([str(q), str(r), _encode(a), str(step[0]), _encode(step[1])]
             for (q, r, a), step in self.explored.items() if step is not None),
            key=repr,
        )
        return {
            "orientation": self.orientation,
            "initial": str(self.initial),
            "description": self.description,
            "transitions": rows,
        }


def _encode(value: Hashable) -> str:
    if isinstance(value, frozenset):
        return "{" + ",".join(sorted(map(str, value))) + "}"
    return str(value)


class _AtomStep:
    """Transition function of a CMT whose states are atoms of guarded nu-only layers."""

    def __init__(self, table: AtomTable, direction: str, roots: Mapping[str, Formula], space: LetterSpace):
        self.table = table
        self.space = space
        self.roots = [(label, table.index[phi]) for label, phi in roots.items()]
        self.global_leaves = table.modal[MODALITY_OF[(direction, "g")]]
        self.class_leaves = table.modal[MODALITY_OF[(direction, "c")]]
        other = "X" if direction == "Y" else "Y"
        if table.modal[MODALITY_OF[(other, "g")]] or table.modal[MODALITY_OF[(other, "c")]]:
            raise CascadeError(f"layer reads both directions: {[str(phi) for phi in roots.values()]}")

    def __call__(self, q: Hashable, r: Hashable, valuation: FrozenSet[str]) -> Tuple[Atom, FrozenSet[str]]:
        table = self.table
        fixed: Dict[int, bool] = {}
        for i, node in enumerate(table.members):
            if isinstance(node, Const):
                fixed[i] = node.value
        for i, prop in table.props.items():
            fixed[i] = (prop.name in valuation) == prop.positive
        for i, zero in table.zeros.items():
            fixed[i] = (zero.kind in valuation) == zero.positive
        for i, var in table.vars.items():
            fixed[i] = var.name in valuation
        for i, child in self.global_leaves:
            fixed[i] = q != START and table.has(q, child)
        for i, child in self.class_leaves:
            fixed[i] = r not in (BOTTOM, TOP) and table.has(r, child)
        atom = table.close(fixed)
        return atom, frozenset(label for label, i in self.roots if table.has(atom, i))


def layer_cmt(roots: Mapping[str, Formula], direction: str, space: LetterSpace) -> ClassMemoryTransducer:
    """CMT outputting, at every position, the labels whose formula holds there.

    The formulas must be guarded, nu-only, desugared with tilde modalities
    expanded, and read a single direction (Y: forward, X: backward). Their
    letters, zeroaries and free variables are read from the valuation.
    """
    formulas = list(roots.values())
    if not formulas:
        raise CascadeError("a CMT layer needs at least one formula")
    table = AtomTable(formulas[0], *formulas[1:])
    step = _AtomStep(table, direction, roots, space)
    orientation = "forward" if direction == "Y" else "backward"
    logger.debug(f"layer_cmt[{orientation}]: closure {len(table)} members for labels {sorted(roots)}")
    return ClassMemoryTransducer(orientation, step, description=f"atoms of {', '.join(sorted(roots))}")
