"""
Cascades back to formulas.

Stages are read in order. While a stage is read, the labels of earlier
stages are plain propositions; each label formula is then made closed by
substituting the formulas of those earlier labels. The result is the
formula of the accepting label, conjoined with one "the run exists"
formula per stage.

Marking stages (global, class) are read with `transducer_to_formulas`.

A CMT stage is read as a vectorial system, one component per state, true at
the positions where the run is in that state:

    psi_q = OR over p of  prev(p) & OR over r of  memory(r) & letters(p, r -> q)
    prev(p)    = first (p initial)  |  Y psi_p
    memory(r)  = firstc (r boundary) |  Yc psi_r

(X, last and lastc for backward CMTs). Every step depends on strictly
earlier positions, so the system has a single solution; it is linearized
with `bekic_all` as a nu system. Label and run formulas refer to the
solutions as shared subterms, so the result is a DAG whose printed form
may be far larger than the DAG itself. The initial state must have no
incoming steps; CMTs that violate this are split with `with_fresh_initial`
first, and congruent states are merged with `merge_states`.
"""
from collections import defaultdict
from typing import Dict, FrozenSet, Hashable, List, Set, Tuple

from src.automata.extraction import transducer_to_formulas
from src.automata.marking import default_atom
from src.automata.transducers import WordTransducer
from src.cascades.cmt import ClassMemoryTransducer
from src.cascades.stages import AtomView, Cascade, Stage
from src.logic.library import always
from src.logic.syntax import (
    FALSE,
    TRUE,
    Formula,
    Mod,
    Or,
    Var,
    Zero,
    all_names,
    conj,
    disj,
    fresh_name,
)
from src.logic.transforms import VectorialFormula, bekic_all, substitute_props
from src.utils.constants import BOUNDARY_OF, MODALITY_OF, NU
from src.utils.exceptions import CascadeError
from src.utils.logger import get_logger

logger = get_logger(__name__)

MODE_OF_STAGE = {"global": "g", "class": "c"}

Steps = Dict[Tuple[Hashable, Hashable, Hashable], Tuple[Hashable, Hashable]]


def _marking_stage(stage: Stage, labels: Dict[str, Formula], duals: Dict[str, Formula]) -> List[Formula]:
    """Label formulas of a global or class stage; returns the run-exists formulas."""
    t = stage.machine
    if not isinstance(t, WordTransducer) or not isinstance(stage.view, AtomView) or stage.tag is not None:
        raise CascadeError(f"{stage.kind} stage cannot be read back (tagged or sequential)")
    mode = MODE_OF_STAGE[stage.kind]
    space = stage.view.space
    per_output = transducer_to_formulas(t, mode, lambda letters: space.formula_for(letters, default_atom))
    for label in stage.labels:
        parts = [phi for out, phi in per_output.items() if isinstance(out, frozenset) and label in out]
        duals.pop(label, None)
        labels[label] = substitute_props(disj(*parts), labels, duals)
    some_output = substitute_props(disj(*per_output.values()), labels, duals)
    if stage.kind == "global":
        return [some_output]
    return [always("Gg", disj(Zero("firstc", False), some_output))]


def _balanced_disj(parts: List[Formula]) -> Formula:
    """Disjunction as a balanced tree, with the constant folding of `disj`."""
    parts = [phi for phi in parts if phi != FALSE]
    if any(phi == TRUE for phi in parts):
        return TRUE
    if len(parts) <= 2:
        return disj(*parts)
    middle = len(parts) // 2
    return Or(_balanced_disj(parts[:middle]), _balanced_disj(parts[middle:]))


def _factored(cells: Dict[Tuple[Hashable, Hashable], List[Hashable]], prev, memory, letter_formula) -> Formula:
    """OR over (p, r) of prev(p) & memory(r) & letters, with prev(p) written once per p."""
    rows: Dict[Hashable, List[Formula]] = defaultdict(list)
    for (p, r), letters in cells.items():
        rows[p].append(conj(memory(r), letter_formula(letters)))
    return _balanced_disj([conj(prev(p), _balanced_disj(row)) for p, row in rows.items()])


def merge_states(machine: ClassMemoryTransducer, steps: Steps, letters: List[Hashable]) -> Dict[Hashable, Hashable]:
    """Representative of every target state under the coarsest congruence.

    Merged states agree on both final flags, and on the block and output of
    every step in which they are the previous state or the memory. The
    initial state and the class boundary stay apart.
    """
    states: List[Hashable] = []
    for nxt, _ in steps.values():
        if nxt not in states:
            states.append(nxt)
    block: Dict[Hashable, Hashable] = {q: (machine.class_final(q), machine.global_final(q)) for q in states}
    count = len(set(block.values()))

    def after(p, r, a):
        step = steps.get((p, r, a))
        return None if step is None else (block[step[0]], step[1])

    while True:
        signature = {
            q: (
                block[q],
                tuple(after(q, r, a) for r in [machine.boundary] + states for a in letters),
                tuple(after(p, q, a) for p in [machine.initial] + states for a in letters),
            )
            for q in states
        }
        ids: Dict[tuple, int] = {}
        block = {q: ids.setdefault(signature[q], len(ids)) for q in states}
        if len(ids) == count:
            break
        count = len(ids)
    representative: Dict[int, Hashable] = {}
    return {q: representative.setdefault(block[q], q) for q in states}


def _cmt_stage(stage: Stage, labels: Dict[str, Formula], duals: Dict[str, Formula]) -> List[Formula]:
    machine: ClassMemoryTransducer = stage.machine
    if not isinstance(stage.view, AtomView):
        raise CascadeError("a CMT stage must read letter valuations")
    space = stage.view.space
    steps = machine.reachable(space.valuations)
    if any(nxt == machine.initial for nxt, _ in steps.values()):
        machine = machine.with_fresh_initial()
        steps = machine.reachable(space.valuations)
        logger.info("cascade_to_formula: CMT initial state split")
    representative = merge_states(machine, steps, space.valuations)
    steps = {
        (representative.get(p, p), representative.get(r, r), a): (representative[nxt], out)
        for (p, r, a), (nxt, out) in steps.items()
    }

    direction = "Y" if machine.orientation == "forward" else "X"
    global_op = MODALITY_OF[(direction, "g")]
    class_op = MODALITY_OF[(direction, "c")]
    global_start = Zero(BOUNDARY_OF[global_op])
    class_start = Zero(BOUNDARY_OF[class_op])
    global_end = BOUNDARY_OF[MODALITY_OF[("X" if direction == "Y" else "Y", "g")]]
    class_end = BOUNDARY_OF[MODALITY_OF[("X" if direction == "Y" else "Y", "c")]]

    states: List[Hashable] = []
    for nxt, _ in steps.values():
        if nxt not in states:
            states.append(nxt)
    if not states:
        return [FALSE]
    used: Set[str] = set(space.exclusive) | set(space.bits) | set(labels)
    for phi in labels.values():
        used |= all_names(phi)
    names = {q: fresh_name(f"q{i}", used) for i, q in enumerate(states)}

    earlier = dict(labels)
    letter_cache: Dict[FrozenSet[Hashable], Formula] = {}

    def letter_formula(letters: List[Hashable]) -> Formula:
        key = frozenset(letters)
        if key not in letter_cache:
            letter_cache[key] = substitute_props(space.formula_for(key, default_atom), earlier, duals)
        return letter_cache[key]

    def cells_where(keep) -> Dict[Tuple[Hashable, Hashable], List[Hashable]]:
        cells: Dict[Tuple[Hashable, Hashable], List[Hashable]] = defaultdict(list)
        for (p, r, a), (nxt, out) in steps.items():
            if keep(nxt, out):
                cells[(p, r)].append(a)
        return cells

    def reading(state_formula: Dict[Hashable, Formula]):
        prev_of = {q: Mod(global_op, state_formula[q]) for q in states}
        memory_of = {q: Mod(class_op, state_formula[q]) for q in states}

        def prev(p: Hashable) -> Formula:
            return global_start if p == machine.initial else prev_of[p]

        def memory(r: Hashable) -> Formula:
            return class_start if r == machine.boundary else memory_of[r]

        return prev, memory

    prev, memory = reading({q: Var(names[q]) for q in states})
    equations = [
        (names[q], _factored(cells_where(lambda nxt, _, q=q: nxt == q), prev, memory, letter_formula))
        for q in states
    ]
    solutions = bekic_all(VectorialFormula.uniform(equations, NU))
    psi: Dict[Hashable, Formula] = {q: solutions[names[q]] for q in states}

    prev, memory = reading(psi)
    for label in stage.labels:
        cells = cells_where(lambda _, out: isinstance(out, frozenset) and label in out)
        duals.pop(label, None)
        labels[label] = _factored(cells, prev, memory, letter_formula)

    alive = []
    for q in states:
        checks = [psi[q]]
        if not machine.class_final(q):
            checks.append(Zero(class_end, False))
        if not machine.global_final(q):
            checks.append(Zero(global_end, False))
        alive.append(conj(*checks))
    logger.debug(
        f"cascade_to_formula: CMT with {len(set(representative))} states merged to {len(states)}, {len(steps)} steps"
    )
    return [always("Gg", _balanced_disj(alive))]


def cascade_to_formula(cascade: Cascade) -> Formula:
    """Formula holding at position 1 of exactly the words the cascade accepts."""
    labels: Dict[str, Formula] = {}
    duals: Dict[str, Formula] = {}
    runs: List[Formula] = []
    for k, stage in enumerate(cascade.stages, start=1):
        if stage.kind == "cmt":
            runs.extend(_cmt_stage(stage, labels, duals))
        else:
            runs.extend(_marking_stage(stage, labels, duals))
        logger.debug(f"cascade_to_formula: stage {k} ({stage.kind}) read, labels {list(stage.labels)}")
    if cascade.accept_label is None:
        accept = TRUE
    elif cascade.accept_label in labels:
        accept = labels[cascade.accept_label]
    else:
        raise CascadeError(f"no stage outputs the accepting label '{cascade.accept_label}'")
    return conj(accept, *runs)
