"""
Formulas to cascades, and cascades to data automata.

Both compilations start from a minimal decomposition. Cut children of a
layer always have the other kind, so kinds alternate along every path of
the decomposition and all layers at one depth share a kind. A layer at
depth d runs in stage k - d of a height-k cascade, after all its children;
its holes are read as labels added by earlier stages.

    bma_to_cascade          global / class marking transducers, one stage per depth
    br_to_cmt_cascade       forward (Y) / backward (X) class-memory transducers
    cascade_to_data_automaton
                            B guesses every stage output and the class
                            boundaries; it runs global stages itself and C
                            checks class stages along each class
"""
import itertools
from typing import Callable, Dict, FrozenSet, Hashable, List, Sequence, Set, Tuple

from src.automata.marking import LetterSpace, intrinsic_zeroaries, marking_transducer
from src.automata.transducers import WordTransducer, sequentialize
from src.cascades.cmt import layer_cmt
from src.cascades.stages import AtomView, Cascade, Stage, TagView
from src.data_automata.automaton import DataAutomaton
from src.fragments.classify import Basis, Layer, comp_height
from src.logic.syntax import Formula, all_names, fresh_name, props, zeroaries
from src.logic.transforms import desugar, swap_fixpoints, to_guarded
from src.utils.constants import NU
from src.utils.exceptions import CascadeError, FragmentError
from src.utils.logger import get_logger
from src.words.dataword import Marking

logger = get_logger(__name__)

STAGE_OF_MODE = {"g": "global", "c": "class"}


def _schedule(phi: Formula, basis: Basis, operation: str) -> Tuple[int, str, List[List[Tuple[str, Layer]]]]:
    """Height, root label and the labelled layers of each stage, first stage first."""
    height, root = comp_height(phi, basis)
    if height is None:
        raise FragmentError(basis.value.upper(), operation, str(phi))
    used = all_names(desugar(phi, expand_duals=False))
    for layer in root.layers():
        used |= {hole for hole, _ in layer.children}
    root_label = fresh_name("phi", used)
    stages: List[List[Tuple[str, Layer]]] = [[] for _ in range(height)]

    def place(label: str, layer: Layer, depth: int) -> None:
        stages[height - depth - 1].append((label, layer))
        for hole, child in layer.children:
            place(hole, child, depth + 1)

    place(root_label, root, 0)
    for group in stages:
        kinds = {layer.kind for _, layer in group}
        if len(kinds) > 1:
            raise CascadeError(f"layers of one stage have kinds {sorted(kinds)}")
    return height, root_label, stages


def _holes(group: Sequence[Tuple[str, Layer]]) -> Set[str]:
    return {hole for _, layer in group for hole, _ in layer.children}


def _relabel(t: WordTransducer, label_of: Callable[[Hashable], FrozenSet[str]]) -> WordTransducer:
    moves = [(p, a, label_of(b), q) for p, a, b, q in t.moves()]
    outputs = sorted({label_of(b) for b in t.outputs}, key=sorted)
    return WordTransducer.from_moves(moves, t.initial, t.final, t.inputs, outputs, t.states)


def stage_transducer(group: Sequence[Tuple[str, Layer]], mode: str) -> Tuple[WordTransducer, LetterSpace]:
    """Product of the marking transducers of one stage, outputting the set of labels that hold."""
    intrinsic = intrinsic_zeroaries(mode)
    letters: Set[str] = set()
    bits: Set[str] = _holes(group)
    for _, layer in group:
        core = desugar(layer.skeleton, expand_duals=False)
        letters |= props(core)
        bits |= {z for z in zeroaries(core) if z not in intrinsic}
    space = LetterSpace(tuple(sorted(letters)), tuple(sorted(bits)))
    result = None
    for label, layer in group:
        marked = marking_transducer(layer.skeleton, mode, space)
        labelled = _relabel(marked, lambda b, label=label: frozenset((label,)) if b == 1 else frozenset())
        if result is None:
            result = labelled
        else:
            result = _relabel(result.product(labelled), lambda pair: pair[0] | pair[1])
    return result, space


def bma_to_cascade(phi: Formula, sequential: bool = False) -> Cascade:
    """Cascade of global and class transducers marking the positions where phi holds.

    With `sequential`, every stage is split into a left and a right
    sequential pass.
    """
    height, root_label, groups = _schedule(phi, Basis.BMA, "bma_to_cascade")
    stages: List[Stage] = []
    for index, group in enumerate(groups, start=1):
        mode = group[0][1].kind
        kind = STAGE_OF_MODE[mode]
        labels = tuple(label for label, _ in group)
        t, space = stage_transducer(group, mode)
        logger.debug(f"bma_to_cascade stage {index} ({kind}): {len(t.states)} states, labels {labels}")
        if not sequential:
            stages.append(Stage(kind, t, AtomView(space), labels=labels))
            continue
        left, right = sequentialize(t)
        tag = f"{labels[0]}#l"
        stages.append(Stage(kind, left, AtomView(space), tag=tag, note="left pass"))
        stages.append(Stage(kind, right, TagView(tag), labels=labels, note="right pass"))
    logger.info(f"bma_to_cascade: BMA height {height}, cascade height {len(stages)}")
    return Cascade(stages, root_label)


def _nu_layer(skeleton: Formula) -> Formula:
    return desugar(swap_fixpoints(to_guarded(skeleton), NU), expand_duals=True)


def br_to_cmt_cascade(phi: Formula) -> Cascade:
    """Cascade of class-memory transducers marking the positions where phi holds.

    Each layer is made guarded and nu-only first; Y layers become forward
    CMTs and X layers backward ones.
    """
    height, root_label, groups = _schedule(phi, Basis.BR, "br_to_cmt_cascade")
    stages: List[Stage] = []
    for index, group in enumerate(groups, start=1):
        direction = group[0][1].kind
        roots = {label: _nu_layer(layer.skeleton) for label, layer in group}
        letters: Set[str] = set()
        bits: Set[str] = _holes(group)
        for formula in roots.values():
            letters |= props(formula)
            bits |= zeroaries(formula)
        space = LetterSpace(tuple(sorted(letters)), tuple(sorted(bits)))
        machine = layer_cmt(roots, direction, space)
        stages.append(Stage("cmt", machine, AtomView(space), labels=tuple(roots)))
        logger.debug(f"br_to_cmt_cascade stage {index}: {machine.orientation}, labels {sorted(roots)}")
    logger.info(f"br_to_cmt_cascade: BR height {height}, cascade height {len(stages)}")
    return Cascade(stages, root_label)


# Data automaton simulation

FLAGS = ("firstc", "lastc", "lastg")


def _check_simulable(cascade: Cascade) -> None:
    for k, stage in enumerate(cascade.stages, start=1):
        if stage.kind == "cmt" or stage.tag is not None or not isinstance(stage.view, AtomView):
            raise CascadeError(f"stage {k} is not a plain global or class marking stage")
        if not isinstance(stage.machine, WordTransducer):
            raise CascadeError(f"stage {k} machine is not a word transducer")


def _position(marking: Marking, flags: FrozenSet[str], first: bool) -> FrozenSet[str]:
    facts = set(flags)
    if marking.succ:
        facts.add("S")
    if marking.pred:
        facts.add("P")
    if first:
        facts.add("firstg")
    return frozenset(facts)


# (letter, zeroary facts of the position, output of every stage)
DaLetter = Tuple[Hashable, FrozenSet[str], Tuple[FrozenSet[str], ...]]


class _CascadeTransducer:
    """B: guesses flags and every stage output, runs the global stages.

    State: (started, ended, state of each global stage).
    """

    def __init__(self, cascade: Cascade):
        self.stages = cascade.stages
        self.global_index = [k for k, s in enumerate(self.stages) if s.kind == "global"]
        starts = [sorted(self.stages[k].machine.initial, key=repr) for k in self.global_index]
        self.initial = frozenset((False, False, combo) for combo in itertools.product(*starts))
        self._cache: Dict[tuple, list] = {}

    def _flag_choices(self, marking: Marking) -> List[FrozenSet[str]]:
        result = []
        for bits in itertools.product((False, True), repeat=len(FLAGS)):
            flags = frozenset(f for f, on in zip(FLAGS, bits) if on)
            if marking.pred and "firstc" in flags:
                continue
            if marking.succ and ("lastc" in flags or "lastg" in flags):
                continue
            result.append(flags)
        return result

    def moves_on(self, state, letter) -> List[Tuple[DaLetter, tuple]]:
        key = (state, letter)
        if key in self._cache:
            return self._cache[key]
        started, ended, states = state
        sigma, marking = letter
        moves = []
        if not ended:
            for flags in self._flag_choices(marking):
                position = _position(marking, flags, not started)
                for outs, nxt in self._expand(0, frozenset((sigma,)), position, states, ()):
                    moves.append(((sigma, position, outs), (True, "lastg" in flags, nxt)))
        self._cache[key] = moves
        return moves

    def _expand(self, k: int, facts, position, states, outs):
        if k == len(self.stages):
            yield outs, states
            return
        stage = self.stages[k]
        valuation = stage.view.read(facts, position)
        if stage.kind == "global":
            g = self.global_index.index(k)
            for out, q in stage.machine.moves_on(states[g], valuation):
                updated = states[:g] + (q,) + states[g + 1:]
                yield from self._expand(k + 1, facts | out, position, updated, outs + (out,))
        else:
            for out in stage.machine.outputs:
                yield from self._expand(k + 1, facts | out, position, states, outs + (out,))

    def is_final(self, state) -> bool:
        started, ended, states = state
        if not started:
            return False
        return ended and all(
            q in self.stages[k].machine.final for k, q in zip(self.global_index, states)
        )


class _CascadeClassAutomaton:
    """C: checks the guessed class boundaries and runs the class stages along a class.

    State: (phase, state of each class stage), phase in fresh/open/closed.
    """

    def __init__(self, cascade: Cascade):
        self.stages = cascade.stages
        self.class_index = [k for k, s in enumerate(self.stages) if s.kind == "class"]
        starts = [sorted(self.stages[k].machine.initial, key=repr) for k in self.class_index]
        self.initial = frozenset(("fresh", combo) for combo in itertools.product(*starts))

    def successors(self, state, letter: DaLetter) -> FrozenSet:
        phase, states = state
        sigma, position, outs = letter
        if phase == "closed" or (phase == "fresh") != ("firstc" in position):
            return frozenset()
        options: List[tuple] = [()]
        facts = frozenset((sigma,))
        for k, stage in enumerate(self.stages):
            if stage.kind == "class":
                valuation = stage.view.read(facts, position)
                c = self.class_index.index(k)
                steps = [q for out, q in stage.machine.moves_on(states[c], valuation) if out == outs[k]]
                options = [prefix + (q,) for prefix in options for q in steps]
                if not options:
                    return frozenset()
            facts = facts | outs[k]
        nxt_phase = "closed" if "lastc" in position else "open"
        return frozenset((nxt_phase, combo) for combo in options)

    def is_final(self, state) -> bool:
        phase, states = state
        if phase == "fresh":
            return True
        return phase == "closed" and all(
            q in self.stages[k].machine.final for k, q in zip(self.class_index, states)
        )


def cascade_to_data_automaton(cascade: Cascade) -> DataAutomaton:
    """Data automaton accepting exactly the words the cascade accepts.

    The `firstg` fact is read from B's state; `firstc`, `lastc` and
    `lastg` are guessed by B and checked by C (class boundaries) and by
    B's final states (end of the word).
    """
    _check_simulable(cascade)
    label = cascade.accept_label
    if label is None:
        acceptance = None
    else:
        def acceptance(letter: DaLetter) -> bool:
            return any(label in out for out in letter[2])
    logger.info(f"cascade_to_data_automaton: {cascade.height} stages")
    return DataAutomaton(
        _CascadeTransducer(cascade),
        _CascadeClassAutomaton(cascade),
        acceptance=acceptance,
        description=f"simulation of a height-{cascade.height} cascade",
    )

