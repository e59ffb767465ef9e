import random

import pytest

from src.fragments.classify import Basis, Layer, classify, comp_height, verify_decomposition
from src.fragments.rewrite import bma_to_br, br_to_nu
from src.logic.evaluator import FormulaChecker, evaluate
from src.logic.library import fragment_examples
from src.logic.parser import parse_formula
from src.logic.syntax import And, Mod, Or, Prop, Var, fixpoint_kinds
from src.logic.transforms import desugar, is_guarded
from src.testkit.generators import random_formula
from src.utils.constants import MU
from src.utils.exceptions import FragmentError
from src.words.dataword import enumerate_up_to

EXAMPLES = fragment_examples(3)

EXPECTED_TABLE = {
    "phi1": (2, 3),
    "phi2": (None, None),
    "phi3": (None, 2),
    "phi4": (1, None),
    "bridge1": (1, 2),
    "bridge2": (1, 4),
    "bridge3": (1, 6),
    "bridge": (1, None),
}


def same_language(left, right, letters, max_len):
    lhs, rhs = FormulaChecker(left), FormulaChecker(right)
    for word in enumerate_up_to(letters, max_len):
        if lhs.models(word) != rhs.models(word):
            return word
    return None


def test_fragment_table():
    """Test BR and BMA heights of the separating examples"""
    for name, (br, bma) in EXPECTED_TABLE.items():
        report = classify(EXAMPLES[name])
        assert (report.br, report.bma) == (br, bma), f"{name}: got BR {report.br}, BMA {report.bma}"


def test_witnesses_verify():
    """Test that every reported height comes with a verifying witness"""
    for name, phi in EXAMPLES.items():
        for basis in (Basis.BR, Basis.BMA):
            height, witness = comp_height(phi, basis)
            if height is None:
                assert witness is None, f"{name}: no witness outside the fragment"
                continue
            assert verify_decomposition(phi, witness, basis, height), f"{name}: {basis.value} witness rejected"
            assert witness.height == height, f"{name}: witness depth equals height"


def test_verify_rejects_mixed_skeleton():
    """Test that a skeleton mixing modes fails under the BMA basis"""
    phi = parse_formula("Xg Xc a")
    bad = Layer(phi, "g")
    assert not verify_decomposition(phi, bad, Basis.BMA), "Mixed-mode skeleton must not verify"


def test_verify_rejects_capture():
    """Test that a child capturing a skeleton binder fails"""
    phi = parse_formula("nu x. Xg (a & Xc x)")
    skeleton = phi.with_children((Mod("Xg", Var("h")),))
    child = Layer(And(Prop("a"), Mod("Xc", Var("x"))), "c")
    bad = Layer(skeleton, "g", (("h", child),))
    assert not verify_decomposition(phi, bad, Basis.BMA), "Child with a free skeleton variable must not verify"


def test_classify_report_shape():
    """Test the JSON shape of the fragment report"""
    data = classify(parse_formula("mu x.(Xc Xg x | p)")).to_dict()
    assert data["br"] == 1 and data["bma"] is None, "phi4 is BR only"
    assert data["muOnly"] and not data["nuOnly"], "Only least fixpoints"
    assert data["witness"]["bma"] is None, "No BMA witness"
    assert data["witness"]["br"]["kind"] in ("X", "Y"), "BR witness layers are directions"


def test_br_to_nu_examples():
    """Test the binder swap on BR formulas"""
    phi4 = EXAMPLES["phi4"]
    result = br_to_nu(phi4)
    assert MU not in fixpoint_kinds(desugar(result)), "No least fixpoint remains"
    assert same_language(phi4, result, ("p", "q"), 5) is None, "phi4 preserved"
    fg = parse_formula("Fg a")
    assert same_language(fg, br_to_nu(fg), ("a", "b"), 5) is None, "Fg a preserved"
    nu_input = parse_formula("nu x. a & Xg x")
    assert br_to_nu(nu_input) is nu_input, "Guarded nu-only input returned unchanged"
    with pytest.raises(FragmentError):
        br_to_nu(EXAMPLES["phi2"])


def test_br_to_nu_positions():
    """Test that the rewrite keeps the full position set"""
    for text in ("Fc b", "Gg a", "mu x.(Xg Xc x | a)", "nu x.(x | a) & Yg b"):
        phi = parse_formula(text)
        result = br_to_nu(phi)
        assert is_guarded(desugar(result, expand_duals=False)), f"{text}: result guarded"
        for word in enumerate_up_to(("a", "b"), 5):
            assert evaluate(word, result) == evaluate(word, phi), f"{text} differs on {word}"


def test_bma_to_br_suite():
    """Test BMA to BR rewriting on small formulas"""
    for text in ("Gg a", "Gc a", "Xg Xc a", "Fg (b & Xc a)"):
        phi = parse_formula(text)
        bma, _ = comp_height(phi, Basis.BMA)
        result = bma_to_br(phi)
        br, _ = comp_height(result, Basis.BR)
        assert br is not None and br <= bma + 1, f"{text}: BR height {br} exceeds {bma} + 1"
        assert same_language(phi, result, ("a", "b"), 4) is None, f"{text}: language changed"
    with pytest.raises(FragmentError):
        bma_to_br(EXAMPLES["phi4"])


def test_bma_to_br_three_layers():
    """Test BMA to BR rewriting on a height-3 formula"""
    phi1 = EXAMPLES["phi1"]
    result = bma_to_br(phi1)
    br, _ = comp_height(result, Basis.BR)
    assert br is not None and br <= 4, f"BR height {br} exceeds 4"
    assert same_language(phi1, result, ("q", "r"), 4) is None, "phi1 language changed"


def test_random_formulas_stay_in_fragment():
    """Test generated BR and BMA formulas classify accordingly"""
    for seed in range(40):
        br_formula = random_formula("BR", 3, seed)
        bma_formula = random_formula("BMA", 3, seed)
        assert classify(br_formula).br is not None, f"Seed {seed}: {br_formula} not BR"
        assert classify(bma_formula).bma is not None, f"Seed {seed}: {bma_formula} not BMA"


def test_past_only_formula_ignores_deep_variable_at_start():
    """Test that a variable under k past steps cannot matter at positions 1..k"""
    k = 2
    phi = Or(Prop("a"), Mod("Yg", Mod("Yc", Var("x"))))
    rng = random.Random(7)
    for word in enumerate_up_to(("a", "b"), 5):
        n = len(word)
        baseline = evaluate(word, phi, {"x": []})
        for _ in range(3):
            valuation = [i for i in range(1, n + 1) if rng.random() < 0.5]
            result = evaluate(word, phi, {"x": valuation})
            for i in range(1, min(k, n) + 1):
                assert (i in result) == (i in baseline), f"Position {i} of {word} depends on x"
