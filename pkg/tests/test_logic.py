import pytest

from src.logic.evaluator import Evaluator, FormulaChecker, evaluate, evaluate_vectorial, models
from src.logic.library import (
    always,
    bridge,
    class_successor_two_ahead,
    eventually,
    exactly_one_in_class,
    predecessor_marking_formula,
    successor_marking_formula,
    until,
)
from src.logic.parser import format_formula, parse_formula
from src.logic.syntax import (
    And,
    Fix,
    Mod,
    Or,
    Prop,
    Temporal,
    Var,
    Zero,
    all_names,
    alpha_equal,
    dag_size,
    fixpoint_kinds,
    plain_substitute,
    props,
    rename_apart,
    substitute,
)
from src.logic.transforms import (
    VectorialFormula,
    bekic,
    bekic_all,
    desugar,
    dualize,
    is_guarded,
    mirror,
    substitute_props,
    swap_fixpoints,
    to_guarded,
)
from src.testkit.generators import random_formula
from src.utils.constants import MU, NU
from src.utils.exceptions import (
    FormulaSyntaxError,
    FreeVariableError,
    UnboundVariableError,
    UnknownComponentError,
)
from src.words.dataword import DataWord, enumerate_up_to

W0 = DataWord.from_text("a:1 b:2 a:2 a:1 b:3 a:1 b:2")


def positions(text: str, word: DataWord = W0):
    return sorted(evaluate(word, parse_formula(text)))


# Parser

def test_parse_and_print():
    """Test that printing reproduces the concrete syntax"""
    assert format_formula(parse_formula("nu x. Xg Yc x")) == "nu x. Xg Yc x", "Round trip through the printer"
    phi = parse_formula("mu x.(Xc Xg x | p)")
    assert isinstance(phi, Fix) and phi.kind == MU, "Binder parsed"
    assert phi.body == Or(Mod("Xc", Mod("Xg", Var("x"))), Prop("p")), "Body parsed with x as a variable"


def test_parse_rebinding_is_renamed():
    """Test that a variable bound twice gets distinct binder names"""
    phi = parse_formula("nu x. Xg x & (mu x. a | Xc x)")
    names = [phi.var, phi.body.right.var]
    assert len(set(names)) == 2, "Inner binder renamed apart"


def test_parse_errors():
    """Test that malformed text raises FormulaSyntaxError with an offset"""
    with pytest.raises(FormulaSyntaxError) as info:
        parse_formula("a &")
    assert info.value.position == 3, "Error points at the end of input"
    with pytest.raises(FormulaSyntaxError):
        parse_formula("!(a | b)")
    with pytest.raises(FormulaSyntaxError):
        parse_formula("a $ b")
    with pytest.raises(FormulaSyntaxError):
        parse_formula("mu . a")


# Evaluator on the running example

def test_running_example_sets():
    """Test zeroary modalities and class eventualities on the running example"""
    assert positions("S") == [2], "Only position 2 continues its class at the next position"
    assert positions("firstc") == [1, 2, 5], "Class starts"
    assert positions("lastc") == [5, 6, 7], "Class ends"
    assert positions("Fc a") == [1, 2, 3, 4, 6], "Some a later in the class"


def test_basic_modalities():
    """Test global and class steps"""
    assert positions("Xc a") == [1, 2, 4], "Class successor carries an a"
    assert positions("Yg b") == [3, 6], "Previous letter is b"
    assert positions("~Xc false") == [5, 6, 7], "Tilde step holds where no class successor exists"
    assert positions("a Ug b") == [1, 2, 3, 4, 5, 6, 7], "Every a-run ends in a b"


def test_models_and_empty_word():
    """Test sentence satisfaction at position 1"""
    assert models(W0, parse_formula("a")), "First letter is a"
    assert not models(DataWord((), ()), parse_formula("true")), "Nothing holds on the empty word"


def test_unbound_variable():
    """Test that free variables need an environment"""
    with pytest.raises(UnboundVariableError):
        evaluate(W0, Var("x"))
    assert sorted(evaluate(W0, Mod("Xg", Var("x")), {"x": [2]})) == [1], "Environment supplies x"


def test_marking_formulas_are_definable():
    """Test S = nu x. Xg Yc x and P = Yg S on every word up to length 7"""
    succ = FormulaChecker(successor_marking_formula())
    pred = FormulaChecker(predecessor_marking_formula())
    s, p = FormulaChecker(Zero("S")), FormulaChecker(Zero("P"))
    for word in enumerate_up_to(("a",), 7):
        assert succ.evaluate(word) == s.evaluate(word), f"S differs on {word}"
        assert pred.evaluate(word) == p.evaluate(word), f"P differs on {word}"


def test_class_successor_two_ahead():
    """Test the parity-based formula for 'class successor is two positions ahead'"""
    checker = FormulaChecker(class_successor_two_ahead())
    for word in enumerate_up_to(("a",), 6):
        expected = {i for i in range(1, len(word) + 1) if word.class_successor(i) == i + 2}
        assert checker.evaluate(word) == expected, f"Wrong positions on {word}"


def test_exactly_one_in_class():
    """Test that the class holds exactly one a"""
    checker = FormulaChecker(exactly_one_in_class(Prop("a")))
    for word in enumerate_up_to(("a", "b"), 4):
        expected = set()
        for cls in word.classes():
            if sum(1 for i in cls if word.letters[i - 1] == "a") == 1:
                expected |= set(cls)
        assert checker.evaluate(word) == expected, f"Wrong positions on {word}"


def test_temporal_builders_match_sugar():
    """Test library builders against the parsed sugar, with either binder kind"""
    for kind in (MU, NU):
        pairs = [
            (eventually("Fg", Prop("a"), kind), "Fg a"),
            (always("Gc", Prop("b"), kind), "Gc b"),
            (until("Uc", Prop("a"), Prop("b"), kind), "a Uc b"),
        ]
        for built, text in pairs:
            reference = FormulaChecker(parse_formula(text))
            checker = FormulaChecker(built)
            for word in enumerate_up_to(("a", "b"), 4):
                assert checker.evaluate(word) == reference.evaluate(word), f"{text} ({kind}) differs on {word}"


def test_bridge_formula():
    """Test the bridge builder"""
    assert str(bridge(2)) == "Xg Xc Xg Xc a", "Two global-then-class steps"


# Transforms

def test_desugar_eventually():
    """Test that F is the reflexive least fixpoint"""
    core = desugar(parse_formula("Fg a"))
    assert alpha_equal(core, parse_formula("mu y. a | Xg y")), "Fg a = mu x. a | Xg x"
    assert fixpoint_kinds(desugar(parse_formula("Gc a"))) == {NU}, "G uses a greatest fixpoint"


def test_dualize_is_complement():
    """Test that dualization complements the position set"""
    for text in ("Fc a", "nu x. Xg Yc x", "mu x.(Xg Xc x | a)", "a Sg !b"):
        phi = parse_formula(text)
        dual = dualize(phi)
        for word in enumerate_up_to(("a", "b"), 4):
            full = set(range(1, len(word) + 1))
            assert evaluate(word, dual) == full - evaluate(word, phi), f"dual of {text} wrong on {word}"
    with pytest.raises(FreeVariableError):
        dualize(Var("x"))


def test_mirror_reverses_positions():
    """Test eval(reverse w, mirror phi) = reversed eval(w, phi)"""
    for text in ("Fc a", "S & Xg b", "firstc | Yc a", "a Ug b", "nu x. Xg Yc x"):
        phi = parse_formula(text)
        mirrored = mirror(phi)
        for word in enumerate_up_to(("a", "b"), 4):
            n = len(word)
            expected = {n + 1 - i for i in evaluate(word, phi)}
            assert evaluate(word.reversed(), mirrored) == expected, f"mirror of {text} wrong on {word}"


def test_to_guarded_rewrites():
    """Test the two guarding identities"""
    mu_case = to_guarded(parse_formula("mu x.(x | a) & b"))
    nu_case = to_guarded(parse_formula("nu x.(x | a) & b"))
    assert is_guarded(mu_case) and is_guarded(nu_case), "Results are guarded"
    for word in enumerate_up_to(("a", "b"), 5):
        assert evaluate(word, mu_case) == evaluate(word, parse_formula("a & b")), f"mu identity on {word}"
        assert evaluate(word, nu_case) == evaluate(word, parse_formula("b")), f"nu identity on {word}"


def test_to_guarded_preserves_semantics_on_random_formulas():
    """Test guarding on 200 seeded random sentences"""
    words = list(enumerate_up_to(("a", "b"), 4))
    for seed in range(200):
        phi = random_formula("any", 3, seed)
        guarded = to_guarded(phi)
        assert is_guarded(guarded), f"Seed {seed} not guarded: {guarded}"
        original, rewritten = FormulaChecker(phi), FormulaChecker(guarded)
        for word in words:
            assert original.evaluate(word) == rewritten.evaluate(word), f"Seed {seed} differs on {word}"


def test_binder_swap_on_guarded_single_direction():
    """Test that mu and nu agree on guarded single-direction formulas"""
    words = list(enumerate_up_to(("a", "b"), 5))
    for seed in range(100):
        direction = "pure:X" if seed % 2 == 0 else "pure:Y"
        phi = random_formula(direction, 3, seed, guarded=True)
        least, greatest = FormulaChecker(swap_fixpoints(phi, MU)), FormulaChecker(swap_fixpoints(phi, NU))
        for word in words:
            assert least.evaluate(word) == greatest.evaluate(word), f"Seed {seed} differs on {word}"


def test_substitution_avoids_capture():
    """Test capture-avoiding substitution and renaming"""
    phi = Fix(NU, "y", And(Var("x"), Mod("Xg", Var("y"))))
    result = substitute(phi, {"x": Var("y")})
    assert "y" in result.free_vars, "Substituted y stays free"
    assert alpha_equal(rename_apart(phi), phi), "Renaming keeps alpha-equivalence"


def test_bekic_matches_simultaneous_iteration():
    """Test Bekic linearization against joint fixpoint iteration"""
    system = VectorialFormula.uniform(
        [("x", Or(Prop("a"), Mod("Xg", Var("y")))), ("y", Or(Prop("b"), Mod("Xc", Var("x"))))],
        MU,
    )
    for name in system.names:
        scalar = bekic(system, name)
        assert not scalar.free_vars, "Linearized component is a sentence"
        for word in enumerate_up_to(("a", "b", "c"), 4):
            assert evaluate(word, scalar) == evaluate_vectorial(word, system)[name], f"{name} differs on {word}"
    with pytest.raises(UnknownComponentError):
        bekic(system, "z")


def dense_system(k: int, kind: str) -> VectorialFormula:
    """k components, each reading every component one step back."""
    equations = []
    for i in range(k):
        back = [Mod("Yg" if j % 2 else "Yc", Var(f"x{j}")) for j in range(k)]
        step = back[0]
        for other in back[1:]:
            step = Or(step, other)
        equations.append((f"x{i}", Or(Prop("a" if i % 2 else "b"), And(Prop("b" if i % 3 else "a"), step))))
    return VectorialFormula.uniform(equations, kind)


@pytest.mark.parametrize("kind", [MU, NU])
def test_bekic_all_shares_components(kind):
    """Test that every component of a dense system is a small shared sentence with the joint solution"""
    system = dense_system(6, kind)
    solutions = bekic_all(system)
    assert set(solutions) == set(system.names), "One formula per component"
    for name, scalar in solutions.items():
        assert not scalar.free_vars, "Linearized component is a sentence"
        assert dag_size(scalar) < 50000, f"{name} has {dag_size(scalar)} distinct nodes"
    for word in enumerate_up_to(("a", "b"), 3):
        joint = evaluate_vectorial(word, system)
        for name, scalar in solutions.items():
            assert evaluate(word, scalar) == joint[name], f"{name} differs on {word}"


def test_evaluator_restarts_after_unordered_outer_values():
    """Test that a binder evaluated under incomparable outer values matches fresh evaluation"""
    word = DataWord.from_text("a:1 b:2 a:1 b:1 a:2")
    for kind in (MU, NU):
        phi = Fix(kind, "y", Or(And(Var("x"), Prop("a")), Mod("Xg", Var("y"))))
        shared = Evaluator(word)
        for mask in (0b11111, 0b00101, 0b11010, 0b00000, 0b10001, 0b11111):
            expected = Evaluator(word).run(phi, {"x": mask})
            assert shared.run(phi, {"x": mask}) == expected, f"{kind} differs for outer value {mask:05b}"


def test_rewrites_keep_shared_subterms():
    """Test that substitution, dualization and desugaring rewrite a shared subterm once"""
    shared = Temporal("Fg", Prop("a"))
    chain = shared
    for _ in range(40):
        chain = And(chain, chain)
    assert dag_size(chain) == 42, "Forty conjunctions over one subterm"
    assert dag_size(desugar(chain, expand_duals=False)) < 100, "Desugared once"
    assert dag_size(dualize(chain)) < 100, "Dualized once"
    assert dag_size(substitute_props(chain, {"a": parse_formula("Xc b")})) < 100, "Substituted once"
    open_chain = Mod("Xg", Var("x"))
    for _ in range(40):
        open_chain = Or(open_chain, open_chain)
    assert dag_size(plain_substitute(open_chain, {"x": Prop("b")})) < 100, "Plain substitution once"
    assert props(chain) == {"a"} and all_names(open_chain) == {"x"}, "Name collection visits each node once"
