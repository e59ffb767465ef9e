"""
Fragment rewrites.

    br_to_nu     BR formula -> nu-only formula (guard each layer, then mu := nu)
    bma_to_br    BMA formula -> BR formula of height at most k+1, layer by layer
                 through marking transducers
"""
from typing import Dict

from src.automata.extraction import transducer_to_formulas
from src.automata.marking import LetterSpace, default_atom, marking_transducer
from src.fragments.classify import Basis, Layer, comp_height
from src.logic.syntax import FALSE, Formula, fixpoint_kinds, plain_substitute, size
from src.logic.transforms import desugar, dualize, is_guarded, swap_fixpoints, to_guarded
from src.utils.constants import MU, NU
from src.utils.exceptions import FragmentError
from src.utils.logger import get_logger

logger = get_logger(__name__)


def _guard_layers(layer: Layer) -> Formula:
    children = {hole: _guard_layers(child) for hole, child in layer.children}
    return plain_substitute(to_guarded(layer.skeleton), children)


def br_to_nu(phi: Formula) -> Formula:
    height, decomposition = comp_height(phi, Basis.BR)
    if height is None:
        raise FragmentError("BR", "br_to_nu", str(phi))
    core = desugar(phi, expand_duals=False)
    if MU not in fixpoint_kinds(core) and is_guarded(core):
        return phi
    result = swap_fixpoints(_guard_layers(decomposition), NU)
    logger.info(f"br_to_nu: height {height}, size {size(core)} -> {size(result)}")
    return result


def bma_to_br(phi: Formula) -> Formula:
    """Equivalent BR formula; each single-mode layer is replaced by reach/coreach formulas."""
    height, decomposition = comp_height(phi, Basis.BMA)
    if height is None:
        raise FragmentError("BMA", "bma_to_br", str(phi))
    result = _layer_to_br(decomposition)
    logger.info(f"bma_to_br: BMA height {height}, size {size(result)}")
    return result


def _layer_to_br(layer: Layer) -> Formula:
    children: Dict[str, Formula] = {hole: _layer_to_br(child) for hole, child in layer.children}
    skeleton = to_guarded(layer.skeleton)
    space = LetterSpace.for_formula(skeleton, layer.kind, extra_bits=children)
    transducer = marking_transducer(skeleton, layer.kind, space)

    def atom(fact: str, positive: bool) -> Formula:
        if fact in children:
            return children[fact] if positive else dualize(children[fact])
        return default_atom(fact, positive)

    formulas = transducer_to_formulas(transducer, layer.kind, lambda letters: space.formula_for(letters, atom))
    logger.debug(f"bma_to_br layer {layer.kind}: {len(transducer.states)} states")
    return formulas.get(1, FALSE)
