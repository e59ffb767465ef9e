"""
Closure and atoms of a guarded nu-only sentence.

The closure is the Fischer-Ladner closure: subformulas, with every
fixpoint also contributing its one-step unfolding. All members are
sentences in negation normal form, so a member's negation never needs to be
stored: an atom is the set of members it contains, as an int bitmask over
member indices, and a missing member stands for its negation.

Leaves (constants, letters, zeroaries, free variables and modal
members) are chosen; the value of every other member follows from the
leaves because the formula is guarded:

    a & b    in A  iff  a in A and b in A
    a | b    in A  iff  a in A or b in A
    nu x.b   in A  iff  b[nu x.b / x] in A
"""
import itertools
from typing import Dict, Iterator, List, Mapping, Optional, Tuple

from src.logic.syntax import And, Const, Fix, Formula, Mod, Or, Prop, Var, Zero, substitute
from src.utils.constants import DIRECTION_OF, MODE_OF

Atom = int


class AtomTable:
    def __init__(self, phi: Formula, *roots: Formula):
        self.formula = phi
        self.members: List[Formula] = []
        self.index: Dict[Formula, int] = {}
        self._unfold: Dict[int, int] = {}
        queue = [phi, *roots]
        while queue:
            node = queue.pop()
            if node in self.index:
                continue
            self.index[node] = len(self.members)
            self.members.append(node)
            if isinstance(node, Fix):
                unfolded = substitute(node.body, {node.var: node})
                queue.append(unfolded)
            else:
                queue.extend(node.children())
        for node, i in self.index.items():
            if isinstance(node, Fix):
                self._unfold[i] = self.index[substitute(node.body, {node.var: node})]

        self.leaves: List[int] = [
            i for i, node in enumerate(self.members) if isinstance(node, (Const, Prop, Zero, Var, Mod))
        ]
        self.modal: Dict[str, List[Tuple[int, int]]] = {op: [] for op in ("Xg", "Yg", "Xc", "Yc")}
        for i, node in enumerate(self.members):
            if isinstance(node, Mod):
                self.modal[node.op].append((i, self.index[node.child]))
        self.props: Dict[int, Prop] = {i: n for i, n in enumerate(self.members) if isinstance(n, Prop)}
        self.zeros: Dict[int, Zero] = {i: n for i, n in enumerate(self.members) if isinstance(n, Zero)}
        self.vars: Dict[int, Var] = {i: n for i, n in enumerate(self.members) if isinstance(n, Var)}
        self.root = self.index[phi]

    def __len__(self):
        return len(self.members)

    def contains(self, atom: Atom, member: Formula) -> bool:
        return bool(atom >> self.index[member] & 1)

    def has(self, atom: Atom, i: int) -> bool:
        return bool(atom >> i & 1)

    def close(self, leaves: Mapping[int, bool]) -> Atom:
        """Atom determined by a value for every leaf."""
        values: Dict[int, bool] = dict(leaves)

        def value(i: int) -> bool:
            if i in values:
                return values[i]
            node = self.members[i]
            if isinstance(node, And):
                result = value(self.index[node.left]) and value(self.index[node.right])
            elif isinstance(node, Or):
                result = value(self.index[node.left]) or value(self.index[node.right])
            elif isinstance(node, Fix):
                result = value(self._unfold[i])
            else:
                raise KeyError(f"leaf {node} has no value")
            values[i] = result
            return result

        atom = 0
        for i in range(len(self.members)):
            if value(i):
                atom |= 1 << i
        return atom

    def candidates(self, fixed: Mapping[int, bool]) -> Iterator[Atom]:
        """All atoms agreeing with `fixed` on the given leaves; free leaves range over both values."""
        free = [i for i in self.leaves if i not in fixed]
        base = dict(fixed)
        for i in free:
            node = self.members[i]
            if isinstance(node, Const):
                base[i] = node.value
        free = [i for i in free if i not in base]
        for bits in itertools.product((False, True), repeat=len(free)):
            yield self.close({**base, **dict(zip(free, bits))})

    def is_atom(self, atom: Atom) -> bool:
        """Local consistency: the leaves of `atom` close to `atom` itself."""
        leaves = {i: self.has(atom, i) for i in self.leaves}
        for i, node in enumerate(self.members):
            if isinstance(node, Const) and leaves[i] != node.value:
                return False
        return self.close(leaves) == atom

    def describe(self, atom: Atom) -> List[str]:
        return [str(self.members[i]) for i in range(len(self.members)) if atom >> i & 1]

    def modal_by(self, mode: str, direction: str) -> List[Tuple[int, int]]:
        for op, pairs in self.modal.items():
            if MODE_OF[op] == mode and DIRECTION_OF[op] == direction:
                return pairs
        return []

    def to_dict(self) -> dict:
        return {"closure": [str(m) for m in self.members], "root": self.root}
