"""
Read a functional transducer back as formulas.

For a move p -(a/b)-> q taken at position i, the run is consistent iff
the prefix before i leads from an initial state to p and the suffix after
i leads from q to a final state. Both conditions are single-direction
fixpoint systems in the transducer's mode:

    reach_p   = (first & p initial) | Y( OR over moves r -(a)-> p of reach_r & test(a) )
    coreach_q = (last & q final)    | X( OR over moves q -(a)-> s of test(a) & coreach_s )

Each system is guarded, so its least solution is its only one; it is
linearized with `bekic`. The formula for output b is the disjunction of
reach_p & test(letters of p -> q with output b) & coreach_q.
"""
from collections import defaultdict
from typing import Callable, Dict, FrozenSet, Hashable, Iterable, List, Set, Tuple

from src.automata.transducers import WordTransducer
from src.logic.syntax import FALSE, And, Formula, Mod, Var, Zero, all_names, conj, disj, fresh_name
from src.logic.transforms import VectorialFormula, bekic
from src.utils.constants import BOUNDARY_OF, MODALITY_OF, MU
from src.utils.exceptions import NonFunctionalError
from src.utils.logger import get_logger

logger = get_logger(__name__)

LetterTest = Callable[[FrozenSet[Hashable]], Formula]


def transducer_to_formulas(t: WordTransducer, mode: str, letter_test: LetterTest) -> Dict[Hashable, Formula]:
    """One formula per output letter, true exactly where `t` outputs that letter."""
    if not t.is_functional():
        raise NonFunctionalError("only functional transducers can be read back as formulas")
    t = t.trim()
    prev_op = MODALITY_OF[("Y", mode)]
    next_op = MODALITY_OF[("X", mode)]
    first = Zero(BOUNDARY_OF[prev_op])
    last = Zero(BOUNDARY_OF[next_op])

    states = sorted(t.states, key=repr)
    grouped: Dict[Tuple[Hashable, Hashable], Set[Hashable]] = defaultdict(set)
    by_output: Dict[Tuple[Hashable, Hashable, Hashable], Set[Hashable]] = defaultdict(set)
    for p, a, b, q in t.moves():
        grouped[(p, q)].add(a)
        by_output[(p, q, b)].add(a)
    tests = {key: letter_test(frozenset(letters)) for key, letters in grouped.items()}

    used: Set[str] = set()
    for formula in tests.values():
        used |= all_names(formula)
    reach_var = {p: fresh_name(f"r{i}", used) for i, p in enumerate(states)}
    coreach_var = {p: fresh_name(f"c{i}", used) for i, p in enumerate(states)}

    reach_eqs = []
    coreach_eqs = []
    for p in states:
        incoming = [
            And(Var(reach_var[r]), tests[(r, p)]) for r in states if (r, p) in tests
        ]
        start = [first] if p in t.initial else []
        reach_eqs.append((reach_var[p], disj(*start, Mod(prev_op, disj(*incoming)) if incoming else FALSE)))

        outgoing = [
            And(tests[(p, s)], Var(coreach_var[s])) for s in states if (p, s) in tests
        ]
        end = [last] if p in t.final else []
        coreach_eqs.append((coreach_var[p], disj(*end, Mod(next_op, disj(*outgoing)) if outgoing else FALSE)))

    reach_system = VectorialFormula.uniform(reach_eqs, MU)
    coreach_system = VectorialFormula.uniform(coreach_eqs, MU)
    reach: Dict[Hashable, Formula] = {}
    coreach: Dict[Hashable, Formula] = {}

    def reach_of(p) -> Formula:
        if p not in reach:
            reach[p] = bekic(reach_system, reach_var[p])
        return reach[p]

    def coreach_of(q) -> Formula:
        if q not in coreach:
            coreach[q] = bekic(coreach_system, coreach_var[q])
        return coreach[q]

    result: Dict[Hashable, Formula] = {}
    for b in t.outputs:
        parts = [
            conj(reach_of(p), letter_test(frozenset(letters)), coreach_of(q))
            for (p, q, out), letters in sorted(by_output.items(), key=repr)
            if out == b
        ]
        result[b] = disj(*parts)
    logger.debug(f"transducer_to_formulas[{mode}]: {len(states)} states, outputs {list(result)}")
    return result
