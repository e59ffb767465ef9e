"""
Denotational semantics of the mu-calculus on finite data words.

Position sets are Python integers used as bit-sets: bit i-1 stands for
position i. Least fixpoints iterate from the empty set, greatest fixpoints
from the full set, or from their previous result when the approximations
they depend on moved in the same direction. Results of subformulas are
memoized on the values of their free variables, so inner fixpoints are only
recomputed when an outer approximation they depend on changes.

Example:
    >>> w = DataWord.from_text("a:1 b:2 a:2 a:1 b:3 a:1 b:2")
    >>> sorted(evaluate(w, parse_formula("S")))
    [2]
"""
from typing import Dict, FrozenSet, Hashable, Iterable, List, Mapping, Optional, Tuple

from src.logic.syntax import (
    And,
    Const,
    DualMod,
    Fix,
    Formula,
    Mod,
    Or,
    Prop,
    Var,
    Zero,
)
from src.logic.transforms import VectorialFormula, desugar
from src.utils.constants import BOUNDARY_OF, MU
from src.utils.exceptions import UnboundVariableError
from src.words.dataword import DataWord

PositionSet = FrozenSet[int]


def letter_facts(letter: Hashable) -> FrozenSet[Hashable]:
    """Atomic facts carried by a letter; cascade stages use sets of facts as letters."""
    if isinstance(letter, frozenset):
        return letter
    return frozenset((letter,))


def to_mask(positions: Iterable[int]) -> int:
    mask = 0
    for i in positions:
        mask |= 1 << (i - 1)
    return mask


def to_positions(mask: int) -> PositionSet:
    result = []
    i = 1
    while mask:
        if mask & 1:
            result.append(i)
        mask >>= 1
        i += 1
    return frozenset(result)


class WordStructure:
    """Bit-set view of a data word: letter masks, zeroary masks and shifts."""

    def __init__(self, word: DataWord):
        self.word = word
        self.n = n = len(word)
        self.full = (1 << n) - 1
        self._letters: Dict[Hashable, int] = {}
        for i, letter in enumerate(word.letters):
            for fact in letter_facts(letter):
                self._letters[fact] = self._letters.get(fact, 0) | (1 << i)
        # class links as 0-based (i, class successor of i)
        self.links: List[Tuple[int, int]] = []
        for i in range(n):
            j = word.class_successor(i + 1)
            if j is not None:
                self.links.append((i, j - 1))
        has_succ = has_pred = same_next = same_prev = 0
        for i, j in self.links:
            has_succ |= 1 << i
            has_pred |= 1 << j
            if j == i + 1:
                same_next |= 1 << i
                same_prev |= 1 << j
        self.zero = {
            "S": same_next,
            "P": same_prev,
            "firstg": 1 if n else 0,
            "lastg": (1 << (n - 1)) if n else 0,
            "firstc": self.full & ~has_pred,
            "lastc": self.full & ~has_succ,
        }

    def letter(self, name: Hashable) -> int:
        return self._letters.get(name, 0)

    def shift(self, op: str, mask: int) -> int:
        """Positions whose op-neighbour lies in mask."""
        if op == "Xg":
            return mask >> 1
        if op == "Yg":
            return (mask << 1) & self.full
        result = 0
        if op == "Xc":
            for i, j in self.links:
                if mask >> j & 1:
                    result |= 1 << i
        else:
            for i, j in self.links:
                if mask >> i & 1:
                    result |= 1 << j
        return result


class Evaluator:
    """Evaluates one core formula (sugar expanded, tilde nodes allowed) on one word."""

    def __init__(self, word: DataWord):
        self.ws = WordStructure(word)
        self._memo: Dict[Tuple[int, Tuple[int, ...]], int] = {}
        self._keys: Dict[int, Tuple[str, ...]] = {}
        self._last: Dict[int, Tuple[Tuple[int, ...], int]] = {}

    def run(self, phi: Formula, env: Mapping[str, int]) -> int:
        return self._eval(phi, dict(env))

    def _eval(self, phi: Formula, env: Dict[str, int]) -> int:
        ws = self.ws
        if isinstance(phi, Const):
            return ws.full if phi.value else 0
        if isinstance(phi, Prop):
            mask = ws.letter(phi.name)
            return mask if phi.positive else ws.full & ~mask
        if isinstance(phi, Zero):
            mask = ws.zero[phi.kind]
            return mask if phi.positive else ws.full & ~mask
        if isinstance(phi, Var):
            if phi.name not in env:
                raise UnboundVariableError(phi.name)
            return env[phi.name]

        node_id = id(phi)
        names = self._keys.get(node_id)
        if names is None:
            names = tuple(sorted(phi.free_vars))
            self._keys[node_id] = names
        try:
            key = (node_id, tuple(env[name] for name in names))
        except KeyError as e:
            raise UnboundVariableError(e.args[0])
        cached = self._memo.get(key)
        if cached is not None:
            return cached

        if isinstance(phi, And):
            result = self._eval(phi.left, env) & self._eval(phi.right, env)
        elif isinstance(phi, Or):
            result = self._eval(phi.left, env) | self._eval(phi.right, env)
        elif isinstance(phi, Mod):
            result = ws.shift(phi.op, self._eval(phi.child, env))
        elif isinstance(phi, DualMod):
            result = ws.zero[BOUNDARY_OF[phi.op]] | ws.shift(phi.op, self._eval(phi.child, env))
        elif isinstance(phi, Fix):
            current = self._start(phi, node_id, key[1])
            inner = dict(env)
            while True:
                inner[phi.var] = current
                nxt = self._eval(phi.body, inner)
                if nxt == current:
                    break
                current = nxt
            result = current
            self._last[node_id] = (key[1], result)
        else:
            raise TypeError(f"cannot evaluate {type(phi).__name__}; desugar first")
        self._memo[key] = result
        return result

    def _start(self, phi: Fix, node_id: int, values: Tuple[int, ...]) -> int:
        """First approximation of a binder.

        The last result of the same binder is reused when every free variable
        has since grown (mu) or shrunk (nu); bodies are monotone, so iterating
        from there reaches the same fixpoint.
        """
        last = self._last.get(node_id)
        if last is not None:
            old_values, old_result = last
            if phi.kind == MU:
                if all(old & ~new == 0 for old, new in zip(old_values, values)):
                    return old_result
            elif all(new & ~old == 0 for old, new in zip(old_values, values)):
                return old_result
        return 0 if phi.kind == MU else self.ws.full


def evaluate(word: DataWord, phi: Formula, env: Optional[Mapping[str, Iterable[int]]] = None) -> PositionSet:
    """Positions of `word` where `phi` holds under `env`."""
    env = env or {}
    missing = phi.free_vars - set(env)
    if missing:
        raise UnboundVariableError(sorted(missing)[0])
    core = desugar(phi, expand_duals=False)
    masks = {name: to_mask(positions) for name, positions in env.items()}
    return to_positions(Evaluator(word).run(core, masks))


def models(word: DataWord, phi: Formula) -> bool:
    """w |= phi: position 1 exists and satisfies phi."""
    return len(word) >= 1 and 1 in evaluate(word, phi)


class FormulaChecker:
    """Desugars once, then evaluates many words."""

    def __init__(self, phi: Formula):
        if phi.free_vars:
            raise UnboundVariableError(sorted(phi.free_vars)[0])
        self.formula = phi
        self.core = desugar(phi, expand_duals=False)

    def mask(self, word: DataWord) -> int:
        return Evaluator(word).run(self.core, {})

    def evaluate(self, word: DataWord) -> PositionSet:
        return to_positions(self.mask(word))

    def models(self, word: DataWord) -> bool:
        return len(word) >= 1 and bool(self.mask(word) & 1)


def evaluate_vectorial(
    word: DataWord,
    system: VectorialFormula,
    env: Optional[Mapping[str, Iterable[int]]] = None,
) -> Dict[str, PositionSet]:
    """Simultaneous fixpoint of a vectorial system, by joint iteration.

    All components must share one binder kind.
    """
    kinds = set(system.kinds)
    if len(kinds) != 1:
        raise ValueError("simultaneous iteration needs a single binder kind")
    ws_full = (1 << len(word)) - 1
    start = 0 if kinds.pop() == MU else ws_full
    bodies = [(name, desugar(body, expand_duals=False)) for name, body in system.equations]
    base = {name: to_mask(positions) for name, positions in (env or {}).items()}
    current = {name: start for name, _ in bodies}
    evaluator = Evaluator(word)
    while True:
        values = {**base, **current}
        nxt = {name: evaluator.run(body, values) for name, body in bodies}
        if nxt == current:
            break
        current = nxt
    return {name: to_positions(mask) for name, mask in current.items()}
