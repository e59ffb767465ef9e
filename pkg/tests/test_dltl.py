import numpy as np
import pytest

from src.dltl.fo2 import fo2_positions, fo2_size, parse_fo2, quantifier_depth
from src.dltl.fo2_translate import depth_report, fo2_to_udltl, udltl_to_fo2
from src.dltl.parser import format_dltl, parse_dltl
from src.dltl.semantics import dltl_models, eval_dltl
from src.dltl.syntax import DFar, DNext, DProp, d_size, is_unary, modal_depth
from src.dltl.translate import dltl_to_mu, expand_far, expand_not_in_class
from src.logic.evaluator import FormulaChecker
from src.utils.constants import FAR_OPS
from src.utils.exceptions import FormulaSyntaxError, FragmentError, FreeVariableError, ValidationError
from src.words.dataword import DataWord, enumerate_up_to

AB = ("a", "b")
W0 = DataWord.from_text("a:1 b:2 a:2 a:1 b:3 a:1 b:2")

DLTL_SUITE = [
    "a Uc b",
    "a Sg (b & Yc a)",
    "!(Fg b) | Pc a",
    "Gc (a -> Xg b)",
    "fF~ a",
    "dP~ (b & S)",
    "F~ !a & P~ b",
    "Hg (P | a)",
]

FO2_SUITE = [
    "E y. (x~+1=y & a(y))",
    "A y. (x<y -> b(y))",
    "E y. (y<x & !(x~y) & a(y))",
    "E y. (x<y & !(x~y) & !(x+1=y) & a(y))",
    "A y. (x~y -> E x. (y<x & b(x)))",
    "E y. (x=y & b(y)) | E y. (y+1=x & y~+1=x)",
    "E y. (x<~y & E x. (x+1=y & a(x)))",
]


def far_positions(word, kind, letter):
    """Direct reading of the not-in-class modalities."""
    tests = {
        "fF~": lambda i, j: j > i + 1,
        "dP~": lambda i, j: j < i - 1,
        "F~": lambda i, j: j > i,
        "P~": lambda i, j: j < i,
    }
    values = word.values
    return {
        i for i in range(1, len(word) + 1)
        if any(
            tests[kind](i, j) and values[j - 1] != values[i - 1] and word.letters[j - 1] == letter
            for j in range(1, len(word) + 1)
        )
    }


# Syntax and semantics

def test_parse_and_format():
    """Test printing and parse errors"""
    assert format_dltl(parse_dltl("a Uc b")) == "a Uc b", "Round trip through the printer"
    assert isinstance(parse_dltl("fF~ a"), DFar), "Far modality kept as one node"
    with pytest.raises(FormulaSyntaxError):
        parse_dltl("a Uc")
    with pytest.raises(FormulaSyntaxError):
        parse_dltl("(a | b")


def test_semantics_on_running_example():
    """Test Data-LTL positions on the running example"""
    assert sorted(eval_dltl(W0, parse_dltl("Xc a"))) == [1, 2, 4], "Class successor carries an a"
    assert sorted(eval_dltl(W0, parse_dltl("Fc a"))) == [1, 2, 3, 4, 6], "Some a later in the class"
    assert sorted(eval_dltl(W0, parse_dltl("S"))) == [2], "Class continues at the next position"
    assert dltl_models(W0, parse_dltl("a & Xc a")), "Position 1 satisfies a & Xc a"
    assert not dltl_models(DataWord((), ()), parse_dltl("true")), "Nothing holds on the empty word"


def test_far_semantics_match_definition():
    """Test the far modalities against their quantified definitions"""
    for word in enumerate_up_to(AB, 5):
        for kind in FAR_OPS:
            got = set(eval_dltl(word, DFar(kind, DProp("a"))))
            assert got == far_positions(word, kind, "a"), f"{kind} a wrong on {word}"


def test_expand_not_in_class():
    """Test the unary expansions of the far modalities on all words up to length 6"""
    expansions = {kind: expand_not_in_class(kind, DProp("a")) for kind in FAR_OPS}
    for phi in expansions.values():
        assert is_unary(phi), "Expansion is unary Data-LTL"
    for word in enumerate_up_to(AB, 6):
        for kind, phi in expansions.items():
            assert set(eval_dltl(word, phi)) == far_positions(word, kind, "a"), f"{kind} expansion wrong on {word}"
    assert expand_not_in_class("fF", DProp("a")) == expansions["fF~"], "Short names accepted"
    with pytest.raises(ValidationError):
        expand_not_in_class("G~", DProp("a"))


@pytest.mark.parametrize("text", DLTL_SUITE)
def test_dltl_to_mu(text):
    """Test that the mu-calculus translation keeps every position set"""
    phi = parse_dltl(text)
    checker = FormulaChecker(dltl_to_mu(phi))
    for word in enumerate_up_to(AB, 5):
        assert set(checker.evaluate(word)) == set(eval_dltl(word, phi)), f"{text} differs on {word}"


# FO2

def test_fo2_parser_and_evaluation():
    """Test FO2 atoms on the running example"""
    phi = parse_fo2("E y. (x~+1=y & a(y))")
    assert sorted(fo2_positions(W0, phi)) == [1, 2, 4], "Same positions as Xc a"
    assert quantifier_depth(parse_fo2("A y. (x~y -> E x. (y<x & b(x)))")) == 2, "Two nested quantifiers"
    with pytest.raises(FormulaSyntaxError):
        parse_fo2("E z. a(z)")
    with pytest.raises(FormulaSyntaxError):
        parse_fo2("x ? y")


@pytest.mark.parametrize("text", FO2_SUITE)
def test_fo2_to_udltl(text):
    """Test the FO2 translation with and without expanding far modalities"""
    phi = parse_fo2(text)
    kept = fo2_to_udltl(phi, keep_far=True)
    expanded = fo2_to_udltl(phi)
    assert is_unary(expanded), "Expanded translation is unary Data-LTL"
    assert expanded == expand_far(kept), "Expansion happens after translation"
    for word in enumerate_up_to(AB, 4):
        expected = set(fo2_positions(word, phi))
        assert set(eval_dltl(word, kept)) == expected, f"{text} (far kept) differs on {word}"
        assert set(eval_dltl(word, expanded)) == expected, f"{text} differs on {word}"


@pytest.mark.parametrize("text", FO2_SUITE)
def test_depth_report(text):
    """Test that the modal depth stays within the factor of the quantifier depth"""
    report = depth_report(parse_fo2(text))
    assert report["withinFactor"], f"{text}: modal depth {report['modalDepth']} too deep"
    assert report["modalDepth"] <= report["expandedModalDepth"], "Expanding never makes formulas shallower"


def test_fo2_to_udltl_needs_one_free_variable():
    """Test that y must be bound"""
    with pytest.raises(FreeVariableError):
        fo2_to_udltl(parse_fo2("x<y"))


@pytest.mark.parametrize("text", ["Xc a", "Fg (b & Yc a)", "Pc (a | S) & !Xg P", "Gg (a -> Fc b)"])
def test_udltl_to_fo2(text):
    """Test the standard translation back into FO2"""
    phi = parse_dltl(text)
    fo = udltl_to_fo2(phi)
    assert quantifier_depth(fo) == modal_depth(phi), "Quantifier depth equals modal depth"
    for word in enumerate_up_to(AB, 4):
        assert set(fo2_positions(word, fo)) == set(eval_dltl(word, phi)), f"{text} differs on {word}"


def test_udltl_to_fo2_size_is_linear():
    """Test that translation size grows linearly with formula size"""
    sizes, fo_sizes = [], []
    phi = DProp("a")
    for k in range(1, 11):
        phi = DNext("Xc" if k % 2 else "Yg", phi)
        sizes.append(d_size(phi))
        fo_sizes.append(fo2_size(udltl_to_fo2(phi)))
    curvature = np.polyfit(sizes, fo_sizes, 2)[0]
    assert abs(curvature) < 1e-6, f"Quadratic term {curvature} in translation size"
    with pytest.raises(FragmentError):
        udltl_to_fo2(parse_dltl("a Ug b"))
