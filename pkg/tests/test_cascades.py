import pytest

from src.cascades.compile import bma_to_cascade, br_to_cmt_cascade, cascade_to_data_automaton
from src.cascades.cmt import ClassMemoryTransducer
from src.cascades.decompile import cascade_to_formula, merge_states
from src.fragments.classify import classify
from src.logic.evaluator import FormulaChecker
from src.logic.library import fragment_examples
from src.logic.parser import parse_formula
from src.logic.syntax import dag_size
from src.utils.exceptions import CascadeError, FragmentError
from src.words.dataword import DataWord, enumerate_up_to

AB = ("a", "b")
AQ = ("a", "q")
EXAMPLES = fragment_examples(2)
BMA_SUITE = ["Fg a", "Gc (a | Xc b)", "Xg Xc a", "Fg (b & Xc a)"]
BR_SUITE = ["Fc b", "Gg a", "Yg a & Xc b", "mu x.(Xc Xg x | a)"]


def nonempty_words(max_len, sigma=AB):
    return [w for w in enumerate_up_to(sigma, max_len) if len(w) > 0]


def assert_marks_formula(cascade, phi, max_len=4, sigma=AB):
    checker = FormulaChecker(phi)
    for word in nonempty_words(max_len, sigma):
        assert cascade.marking(word) == frozenset(checker.evaluate(word)), f"{phi} marks differ on {word}"


@pytest.mark.parametrize("text", BMA_SUITE)
def test_bma_cascade_marks_formula(text):
    """Test that the marking cascade labels exactly the positions of the formula"""
    phi = parse_formula(text)
    cascade = bma_to_cascade(phi)
    assert cascade.height == classify(phi).bma, "One stage per BMA layer"
    assert_marks_formula(cascade, phi)


@pytest.mark.parametrize("name", ["phi3", "bridge2"])
def test_bma_cascade_marks_library_examples(name):
    """Test marking cascades of BMA examples of height 2 and 4"""
    phi = EXAMPLES[name]
    cascade = bma_to_cascade(phi)
    assert cascade.height == classify(phi).bma, "One stage per BMA layer"
    assert_marks_formula(cascade, phi, 4, AQ)


@pytest.mark.parametrize("text", BMA_SUITE[:2])
def test_sequential_cascade(text):
    """Test that splitting every stage into two sequential passes keeps the marking"""
    phi = parse_formula(text)
    cascade = bma_to_cascade(phi, sequential=True)
    assert cascade.height == 2 * classify(phi).bma, "Two passes per stage"
    assert_marks_formula(cascade, phi, 4)


@pytest.mark.parametrize("text", BR_SUITE)
def test_cmt_cascade_marks_formula(text):
    """Test that the class-memory cascade labels exactly the positions of the formula"""
    phi = parse_formula(text)
    cascade = br_to_cmt_cascade(phi)
    assert cascade.height == classify(phi).br, "One CMT per BR layer"
    assert_marks_formula(cascade, phi)


def test_cmt_cascade_marks_library_examples():
    """Test a two-layer BR example and a class past eventuality through class-memory cascades"""
    phi1 = EXAMPLES["phi1"]
    cascade = br_to_cmt_cascade(phi1)
    assert cascade.height == classify(phi1).br == 2, "Two CMT stages"
    assert_marks_formula(cascade, phi1, 4, AQ)
    past = parse_formula("Pc q")
    assert_marks_formula(br_to_cmt_cascade(past), past, 5, AQ)


def test_cascade_compilers_reject_other_fragments():
    """Test that formulas outside the basis are refused"""
    examples = fragment_examples(1)
    with pytest.raises(FragmentError):
        bma_to_cascade(examples["phi4"])
    with pytest.raises(FragmentError):
        br_to_cmt_cascade(examples["phi2"])


def test_cascade_acceptance_and_composition():
    """Test acceptance at position 1 and stage composition"""
    cascade = bma_to_cascade(parse_formula("Fg b"))
    assert cascade.accepts(DataWord.from_text("a:1 b:1")), "A b comes later"
    assert not cascade.accepts(DataWord.from_text("a:1 a:2")), "No b at all"
    assert not cascade.accepts(DataWord((), ())), "Empty word rejected"
    inner = bma_to_cascade(parse_formula("Gc a"))
    chained = inner.then(cascade)
    assert chained.height == inner.height + cascade.height, "Heights add up"
    assert chained.accept_label == cascade.accept_label, "Accepting label of the outer cascade"
    data = cascade.to_dict()
    assert data["height"] == 1 and len(data["stages"]) == 1, "JSON form lists the stages"


@pytest.mark.parametrize("text", ["Fg a", "Xg Xc a"])
def test_marking_cascade_to_formula(text):
    """Test reading a marking cascade back as a sentence"""
    phi = parse_formula(text)
    back = FormulaChecker(cascade_to_formula(bma_to_cascade(phi)))
    reference = FormulaChecker(phi)
    for word in nonempty_words(4):
        assert back.models(word) == reference.models(word), f"{text} read back differs on {word}"


@pytest.mark.parametrize(
    "text, sigma, max_len",
    [("Yg a", AB, 4), ("Xc b", AB, 4), ("Pc q", AQ, 4), ("phi1", AQ, 4), ("Gg a", AB, 5)],
)
def test_cmt_cascade_to_formula(text, sigma, max_len):
    """Test reading a class-memory cascade back as a sentence"""
    phi = EXAMPLES[text] if text in EXAMPLES else parse_formula(text)
    back = FormulaChecker(cascade_to_formula(br_to_cmt_cascade(phi)))
    reference = FormulaChecker(phi)
    for word in nonempty_words(max_len, sigma):
        assert back.models(word) == reference.models(word), f"{text} read back differs on {word}"


def test_cmt_read_back_shares_state_formulas():
    """Test that the read-back formula stays small for one- and two-stage cascades"""
    for phi in (parse_formula("Yg a"), EXAMPLES["phi1"]):
        back = cascade_to_formula(br_to_cmt_cascade(phi))
        assert dag_size(back) < 20000, f"{phi} read back has {dag_size(back)} distinct nodes"


def test_merge_states_keeps_distinguishable_states():
    """Test that congruent CMT states are merged and final flags keep states apart"""
    table = {("start", "bottom", "a"): ("s1", 0), ("start", "bottom", "b"): ("s2", 0)}
    for q in ("s1", "s2", "t"):
        for r in ("bottom", "s1", "s2", "t"):
            for a in AB:
                table[(q, r, a)] = ("t", 1)
    machine = ClassMemoryTransducer.from_table("forward", table, class_final=frozenset({"t"}))
    representative = merge_states(machine, machine.reachable(list(AB)), list(AB))
    assert representative["s1"] == representative["s2"], "Same steps as previous state and as memory"
    assert representative["t"] != representative["s1"], "Only t may end a class"
    assert representative["t"] == "t", "Blocks are named by their first member"


@pytest.mark.parametrize("text, sigma", [("Gc a", AB), ("Xg Xc a", AB), ("phi3", AQ)])
def test_cascade_to_data_automaton(text, sigma):
    """Test that the data automaton simulating a marking cascade accepts the models of its formula"""
    phi = EXAMPLES[text] if text in EXAMPLES else parse_formula(text)
    automaton = cascade_to_data_automaton(bma_to_cascade(phi))
    reference = FormulaChecker(phi)
    for word in nonempty_words(4, sigma):
        assert automaton.accepts(word) == reference.models(word), f"{text} simulation differs on {word}"


def test_cascade_to_data_automaton_needs_marking_stages():
    """Test that sequential and class-memory stages cannot be simulated"""
    with pytest.raises(CascadeError):
        cascade_to_data_automaton(bma_to_cascade(parse_formula("Fg a"), sequential=True))
    with pytest.raises(CascadeError):
        cascade_to_data_automaton(br_to_cmt_cascade(parse_formula("Fc b")))
