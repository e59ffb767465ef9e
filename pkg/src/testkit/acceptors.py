"""
Uniform membership interface over every representation of a data language.

Spec strings select a backend and the source text; `@path` reads the text
from a UTF-8 file:

    mu:<formula>            evaluator on a mu-calculus sentence
    da:<formula>            data automaton of a nu-only (or BR) sentence
    cascade-bma:<formula>   marking cascade of a BMA sentence
    cascade-br:<formula>    class-memory cascade of a BR sentence
    dltl:<formula>          Data-LTL, position 1
    fo2:<formula>           FO2 with x := 1
"""
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Dict

from src.cascades.compile import br_to_cmt_cascade, bma_to_cascade
from src.cascades.stages import Cascade
from src.data_automata.automaton import DataAutomaton, from_nu_formula
from src.dltl.fo2 import Fo2Formula, eval_fo2, parse_fo2
from src.dltl.parser import parse_dltl
from src.dltl.semantics import dltl_models
from src.dltl.syntax import DltlFormula
from src.fragments.rewrite import br_to_nu
from src.logic.evaluator import FormulaChecker
from src.logic.parser import parse_formula
from src.logic.syntax import Formula, fixpoint_kinds
from src.logic.transforms import desugar
from src.utils.constants import MU
from src.utils.exceptions import SerializationError
from src.words.dataword import DataWord


@dataclass
class Acceptor:
    """A named membership test on data words."""
    name: str
    accepts: Callable[[DataWord], bool]

    def __call__(self, word: DataWord) -> bool:
        return self.accepts(word)


def formula_acceptor(phi: Formula, name: str = None) -> Acceptor:
    checker = FormulaChecker(phi)
    return Acceptor(name or f"mu:{phi}", checker.models)


def automaton_acceptor(automaton: DataAutomaton, name: str = None) -> Acceptor:
    return Acceptor(name or repr(automaton), automaton.accepts)


def nu_automaton(phi: Formula) -> DataAutomaton:
    """Data automaton of phi; BR sentences with least fixpoints are rewritten to nu-only first."""
    if MU in fixpoint_kinds(desugar(phi, expand_duals=False)):
        phi = br_to_nu(phi)
    return from_nu_formula(phi)


def nu_automaton_acceptor(phi: Formula, name: str = None) -> Acceptor:
    return automaton_acceptor(nu_automaton(phi), name or f"da:{phi}")


def cascade_acceptor(cascade: Cascade, name: str = None) -> Acceptor:
    return Acceptor(name or f"cascade of height {cascade.height}", cascade.accepts)


def dltl_acceptor(phi: DltlFormula, name: str = None) -> Acceptor:
    return Acceptor(name or f"dltl:{phi}", lambda word: dltl_models(word, phi))


def fo2_acceptor(phi: Fo2Formula, name: str = None) -> Acceptor:
    def accepts(word: DataWord) -> bool:
        return len(word) > 0 and eval_fo2(word, phi, {"x": 1})

    return Acceptor(name or f"fo2:{phi}", accepts)


_BACKENDS: Dict[str, Callable[[str], Acceptor]] = {
    "mu": lambda text: formula_acceptor(parse_formula(text)),
    "da": lambda text: nu_automaton_acceptor(parse_formula(text)),
    "cascade-bma": lambda text: cascade_acceptor(bma_to_cascade(parse_formula(text)), f"cascade-bma:{text}"),
    "cascade-br": lambda text: cascade_acceptor(br_to_cmt_cascade(parse_formula(text)), f"cascade-br:{text}"),
    "dltl": lambda text: dltl_acceptor(parse_dltl(text)),
    "fo2": lambda text: fo2_acceptor(parse_fo2(text)),
}

BACKENDS = tuple(_BACKENDS)


def acceptor_from_spec(spec: str) -> Acceptor:
    """Acceptor for a `backend:text` or `backend:@path` spec."""
    backend, sep, source = spec.partition(":")
    if not sep or backend not in _BACKENDS:
        raise SerializationError("acceptor", f"'{spec}': expected one of {', '.join(BACKENDS)} followed by ':'")
    if source.startswith("@"):
        path = Path(source[1:])
        try:
            source = path.read_text(encoding="utf-8")
        except OSError as e:
            raise SerializationError("acceptor", f"cannot read {path}: {e}")
    return _BACKENDS[backend](source.strip())
