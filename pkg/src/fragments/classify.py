"""
Fragment membership and minimal composition height.

A formula is in BMA (resp. BR) when it can be written as a tree of layers,
each layer using the modalities of a single mode (global or class) resp. a
single direction (future or past), children substituted into holes of
their parent. The composition height is the depth of the shallowest such
tree.

Minimal height is computed by a dynamic program over the syntax tree:

    H(phi)     = 1 + min over kinds m of c_m(phi)
    c_m(node)  = 0 at atoms and variables, max over children for booleans
                 and binders, pass-through for same-kind modalities,
                 infinity for other-kind modalities; at a subformula whose
                 free variables are not bound above it, c_m may instead
                 take H(subformula) (a cut).

The returned decomposition is checked independently by
`verify_decomposition`.
"""
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, FrozenSet, List, Optional, Set, Tuple

from src.logic.syntax import (
    And,
    Const,
    DualMod,
    Fix,
    Formula,
    Mod,
    Or,
    Prop,
    Temporal,
    Until,
    Var,
    Zero,
    all_names,
    alpha_equal,
    fixpoint_kinds,
    fresh_name,
    plain_substitute,
    walk,
)
from src.logic.transforms import desugar
from src.utils.constants import BASIS_KINDS, DIRECTION_OF, MODE_OF, MU, NU
from src.utils.logger import get_logger

logger = get_logger(__name__)

INF = float("inf")


class Basis(str, Enum):
    BMA = "bma"
    BR = "br"

    @property
    def kinds(self) -> Tuple[str, str]:
        return BASIS_KINDS[self.value]

    def kind_of(self, op: str) -> str:
        return MODE_OF[op] if self is Basis.BMA else DIRECTION_OF[op]


@dataclass(frozen=True)
class Layer:
    """One node of a decomposition: a pure skeleton whose holes are filled by children."""
    skeleton: Formula
    kind: str
    children: Tuple[Tuple[str, "Layer"], ...] = ()

    @property
    def height(self) -> int:
        return 1 + max((child.height for _, child in self.children), default=0)

    def recompose(self) -> Formula:
        mapping = {hole: child.recompose() for hole, child in self.children}
        return plain_substitute(self.skeleton, mapping)

    def layers(self) -> List["Layer"]:
        """All layers, children before parents."""
        result: List[Layer] = []
        for _, child in self.children:
            result.extend(child.layers())
        result.append(self)
        return result

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "skeleton": str(self.skeleton),
            "children": {hole: child.to_dict() for hole, child in self.children},
        }


Decomposition = Layer


class _HeightSolver:
    def __init__(self, phi: Formula, basis: Basis):
        self.phi = phi
        self.basis = basis
        self._c: Dict[Tuple[int, str, FrozenSet[str], bool], float] = {}
        self._h: Dict[int, float] = {}
        self.used = all_names(phi)
        self._holes = 0

    def height(self, node: Formula) -> float:
        key = id(node)
        if key not in self._h:
            self._h[key] = 1 + min(self.cost(node, m, frozenset(), True) for m in self.basis.kinds)
        return self._h[key]

    def cuttable(self, node: Formula, scope: FrozenSet[str], root: bool) -> bool:
        if root or isinstance(node, (Const, Prop, Zero, Var)):
            return False
        return not (node.free_vars & scope)

    def cost(self, node: Formula, kind: str, scope: FrozenSet[str], root: bool = False) -> float:
        key = (id(node), kind, node.free_vars & scope, root)
        if key in self._c:
            return self._c[key]
        value = self._uncut(node, kind, scope)
        if self.cuttable(node, scope, root):
            value = min(value, self.height(node))
        self._c[key] = value
        return value

    def _uncut(self, node: Formula, kind: str, scope: FrozenSet[str]) -> float:
        if isinstance(node, (Const, Prop, Zero, Var)):
            return 0
        if isinstance(node, (And, Or)):
            return max(self.cost(node.left, kind, scope), self.cost(node.right, kind, scope))
        if isinstance(node, Fix):
            return self.cost(node.body, kind, scope | {node.var})
        if isinstance(node, (Mod, DualMod)):
            if self.basis.kind_of(node.op) != kind:
                return INF
            return self.cost(node.child, kind, scope)
        raise TypeError(f"unexpected node {type(node).__name__}; desugar first")

    def best_kind(self, node: Formula) -> str:
        return min(self.basis.kinds, key=lambda m: self.cost(node, m, frozenset(), True))

    def build(self, node: Formula) -> Layer:
        kind = self.best_kind(node)
        children: List[Tuple[str, Layer]] = []
        skeleton = self._skeleton(node, kind, frozenset(), True, children)
        return Layer(skeleton, kind, tuple(children))

    def _skeleton(self, node, kind, scope, root, children) -> Formula:
        if self.cuttable(node, scope, root) and self.height(node) < self._uncut(node, kind, scope):
            self._holes += 1
            hole = fresh_name(f"h{self._holes}", self.used)
            children.append((hole, self.build(node)))
            return Var(hole)
        if isinstance(node, Fix):
            return Fix(node.kind, node.var, self._skeleton(node.body, kind, scope | {node.var}, False, children))
        if not node.children():
            return node
        return node.with_children(tuple(self._skeleton(c, kind, scope, False, children) for c in node.children()))


def comp_height(phi: Formula, basis: Basis) -> Tuple[Optional[int], Optional[Layer]]:
    """Minimal composition height and a witness decomposition, or (None, None)."""
    basis = Basis(basis)
    core = desugar(phi, expand_duals=False)
    solver = _HeightSolver(core, basis)
    height = solver.height(core)
    if height == INF:
        return None, None
    witness = solver.build(core)
    logger.debug(f"comp_height[{basis.value}] of {phi} = {int(height)}")
    return int(height), witness


def _pure(skeleton: Formula, kind: str, basis: Basis) -> bool:
    for node in walk(skeleton):
        if isinstance(node, (Temporal, Until)):
            return False
        if isinstance(node, (Mod, DualMod)) and basis.kind_of(node.op) != kind:
            return False
    return True


def _hole_scopes(skeleton: Formula, holes: Set[str]) -> Optional[List[Tuple[str, FrozenSet[str]]]]:
    """Enclosing binders for each hole occurrence; None if a binder reuses a hole name."""
    found = []
    stack = [(skeleton, frozenset())]
    while stack:
        node, scope = stack.pop()
        if isinstance(node, Var) and node.name in holes and node.name not in scope:
            found.append((node.name, scope))
        if isinstance(node, Fix):
            if node.var in holes:
                return None
            scope = scope | {node.var}
        for child in node.children():
            stack.append((child, scope))
    return found


def _verify_layer(layer: Layer, basis: Basis) -> bool:
    if layer.kind not in basis.kinds or not _pure(layer.skeleton, layer.kind, basis):
        return False
    holes = {hole for hole, _ in layer.children}
    if len(holes) != len(layer.children):
        return False
    if not holes <= layer.skeleton.free_vars:
        return False
    scopes = _hole_scopes(layer.skeleton, holes)
    if scopes is None:
        return False
    recomposed = {hole: child.recompose() for hole, child in layer.children}
    for hole, scope in scopes:
        if recomposed[hole].free_vars & scope:
            return False
    return all(_verify_layer(child, basis) for _, child in layer.children)


def verify_decomposition(phi: Formula, decomposition: Layer, basis: Basis, height: Optional[int] = None) -> bool:
    """Check purity, the substitution condition and that recomposition gives phi back."""
    basis = Basis(basis)
    if not _verify_layer(decomposition, basis):
        return False
    if height is not None and decomposition.height != height:
        return False
    return alpha_equal(decomposition.recompose(), desugar(phi, expand_duals=False))


@dataclass
class FragmentReport:
    br: Optional[int]
    bma: Optional[int]
    nu_only: bool
    mu_only: bool
    witnesses: Dict[str, Optional[Layer]] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "br": self.br,
            "bma": self.bma,
            "nuOnly": self.nu_only,
            "muOnly": self.mu_only,
            "witness": {
                name: (layer.to_dict() if layer is not None else None)
                for name, layer in self.witnesses.items()
            },
        }


def classify(phi: Formula) -> FragmentReport:
    core = desugar(phi, expand_duals=False)
    kinds = fixpoint_kinds(core)
    br, br_witness = comp_height(core, Basis.BR)
    bma, bma_witness = comp_height(core, Basis.BMA)
    return FragmentReport(
        br=br,
        bma=bma,
        nu_only=MU not in kinds,
        mu_only=NU not in kinds,
        witnesses={"br": br_witness, "bma": bma_witness},
    )
