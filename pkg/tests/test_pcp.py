import pytest

from src.logic.evaluator import FormulaChecker
from src.logic.syntax import fixpoint_kinds
from src.logic.transforms import desugar
from src.reductions.pcp import (
    PcpInstance,
    big_witness_formula,
    candidate_words,
    decode_word,
    encode_solution,
    is_monotone_bijection,
    monotone_bijection_formula,
    pcp_formula,
    search_solution_word,
)
from src.utils.constants import MU, NU
from src.utils.exceptions import SerializationError, ValidationError
from src.words.dataword import DataWord, enumerate_up_to

MARKERS = ("x", "y")


@pytest.fixture
def instance():
    """Instance {(ab, a), (b, bb)}, solved by the index sequence 1 2."""
    return PcpInstance((("ab", "a"), ("b", "bb")), MARKERS)


def test_formula_fragments():
    """Test that the chain is nu-only and the monotone bijection check is mu-only"""
    assert fixpoint_kinds(desugar(big_witness_formula("a", "b"), expand_duals=False)) == {NU}, "Chain uses nu"
    assert fixpoint_kinds(desugar(monotone_bijection_formula("a", "b"), expand_duals=False)) == {MU}, "Check uses mu"
    with pytest.raises(ValidationError):
        big_witness_formula("a", "a")


def test_monotone_bijection_matches_direct_check():
    """Test the sentence against the direct check on all nonempty words up to length 6 over three letters"""
    checker = FormulaChecker(monotone_bijection_formula("a", "b"))
    for word in enumerate_up_to(("a", "b", "c"), 6):
        if len(word) == 0:
            continue
        assert checker.models(word) == is_monotone_bijection(word, "a", "b"), f"differs on {word}"


def test_crossing_pairs():
    """Test a monotone and a crossing pairing"""
    monotone = DataWord.from_text("a:1 a:2 b:1 b:2")
    crossing = DataWord.from_text("a:1 a:2 b:2 b:1")
    assert is_monotone_bijection(monotone, "a", "b"), "First a pairs with first b"
    assert not is_monotone_bijection(crossing, "a", "b"), "Pairs cross"
    checker = FormulaChecker(monotone_bijection_formula("a", "b"))
    assert checker.models(monotone) and not checker.models(crossing), "Sentence agrees"


def test_encode_solution(instance):
    """Test the encoding of the solution 1 2"""
    word = encode_solution(instance, [1, 2])
    assert "".join(word.letters) == "xyayb" + "xbxy", "Markers at the segment boundaries"
    assert len(word) == 9, "Nine positions"
    assert is_monotone_bijection(word, *MARKERS), "Markers pair up in order"
    assert FormulaChecker(pcp_formula(instance)).models(word), "Encoding satisfies the instance sentence"
    assert decode_word(instance, word) == [1, 2], "Decoding recovers the indices"
    with pytest.raises(ValidationError):
        encode_solution(instance, [2, 1])


def test_wrong_pairing_is_rejected(instance):
    """Test that crossing marker classes break the encoding"""
    word = encode_solution(instance, [1, 2])
    values = list(word.values)
    x_positions = [i for i, ch in enumerate(word.letters) if ch == "x"]
    values[x_positions[0]], values[x_positions[1]] = values[x_positions[1]], values[x_positions[0]]
    swapped = DataWord(word.letters, tuple(values))
    assert not FormulaChecker(pcp_formula(instance)).models(swapped), "Crossing pairs are not a solution"


def test_search_finds_shortest_witness(instance):
    """Test bounded search for a satisfying word"""
    assert search_solution_word(instance, 8) is None, "No encoding shorter than nine positions"
    witness = search_solution_word(instance, 9)
    assert witness is not None and len(witness) == 9, "Shortest witness has nine positions"
    assert decode_word(instance, witness) == [1, 2], "Witness spells the solution 1 2"


def test_unsolvable_instance():
    """Test that an instance whose top words are always shorter has no witness"""
    hopeless = PcpInstance((("a", "ab"),), MARKERS)
    assert not hopeless.is_solution([1]), "Top is shorter"
    assert search_solution_word(hopeless, 8) is None, "No witness up to length 8"


def test_candidate_words(instance):
    """Test the shape of search candidates"""
    words = list(candidate_words(instance, 6))
    assert words, "Some candidates exist"
    for word in words:
        assert word.letters[:2] == MARKERS and word.letters[-2:] == MARKERS, "Framed by the marker pair"
        assert word.letters.count("x") == word.letters.count("y"), "Equal marker counts"
    with pytest.raises(ValidationError):
        list(candidate_words(instance, -1))


def test_instance_validation():
    """Test instance construction and JSON input"""
    with pytest.raises(ValidationError):
        PcpInstance((("ab", "a"),))
    with pytest.raises(ValidationError):
        PcpInstance((), MARKERS)
    with pytest.raises(ValidationError):
        PcpInstance((("", "a"),), MARKERS)
    with pytest.raises(ValidationError):
        PcpInstance((("a", "b"),), ("x", "x"))
    loaded = PcpInstance.from_json({"pairs": [["ab", "a"], ["b", "bb"]], "markers": ["x", "y"]})
    assert loaded.to_dict() == {"pairs": [["ab", "a"], ["b", "bb"]], "markers": ["x", "y"]}, "JSON form"
    assert loaded.letters == ("a", "b", "x", "y"), "Instance letters, then markers"
    with pytest.raises(SerializationError):
        PcpInstance.from_json({"pairs": "ab"})
