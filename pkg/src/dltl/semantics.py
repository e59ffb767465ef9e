"""
Direct semantics of Data-LTL on finite data words.

Reuses the bit-set word view of the mu-calculus evaluator; until/since and
F/P are computed by iterating their one-step unfoldings, the not-in-class
modalities by their quantified definitions.
"""
from src.dltl.syntax import (
    DAnd,
    DConst,
    DEventually,
    DFar,
    DltlFormula,
    DNext,
    DNot,
    DOr,
    DProp,
    DUntil,
    DZero,
)
from src.logic.evaluator import PositionSet, WordStructure, to_positions
from src.utils.constants import STEP_OF
from src.words.dataword import DataWord

# position j qualifies for position i (both 1-based)
_FAR_TEST = {
    "fF~": lambda i, j: j > i + 1,
    "dP~": lambda i, j: j < i - 1,
    "F~": lambda i, j: j > i,
    "P~": lambda i, j: j < i,
}


class DltlEvaluator:
    def __init__(self, word: DataWord):
        self.word = word
        self.ws = WordStructure(word)

    def mask(self, phi: DltlFormula) -> int:
        ws = self.ws
        if isinstance(phi, DConst):
            return ws.full if phi.value else 0
        if isinstance(phi, DProp):
            return ws.letter(phi.name)
        if isinstance(phi, DZero):
            return ws.zero[phi.kind]
        if isinstance(phi, DNot):
            return ws.full & ~self.mask(phi.child)
        if isinstance(phi, DAnd):
            return self.mask(phi.left) & self.mask(phi.right)
        if isinstance(phi, DOr):
            return self.mask(phi.left) | self.mask(phi.right)
        if isinstance(phi, DNext):
            return ws.shift(phi.op, self.mask(phi.child))
        if isinstance(phi, DEventually):
            target = self.mask(phi.child)
            return self._unfold(STEP_OF[phi.op], ws.full, target)
        if isinstance(phi, DUntil):
            return self._unfold(STEP_OF[phi.op], self.mask(phi.left), self.mask(phi.right))
        if isinstance(phi, DFar):
            return self._far(phi.op, self.mask(phi.child))
        raise TypeError(f"cannot evaluate {type(phi).__name__}")

    def _unfold(self, step: str, hold: int, target: int) -> int:
        current = target
        while True:
            nxt = target | (hold & self.ws.shift(step, current))
            if nxt == current:
                return current
            current = nxt

    def _far(self, op: str, child: int) -> int:
        values = self.word.values
        test = _FAR_TEST[op]
        n = len(values)
        result = 0
        for i in range(1, n + 1):
            for j in range(1, n + 1):
                if child >> (j - 1) & 1 and values[j - 1] != values[i - 1] and test(i, j):
                    result |= 1 << (i - 1)
                    break
        return result


def eval_dltl(word: DataWord, phi: DltlFormula) -> PositionSet:
    """Positions of the word where phi holds."""
    return to_positions(DltlEvaluator(word).mask(phi))


def dltl_models(word: DataWord, phi: DltlFormula) -> bool:
    """phi holds at position 1; false on the empty word."""
    return len(word) > 0 and bool(DltlEvaluator(word).mask(phi) & 1)
