import itertools

import pytest

from src.automata.extraction import transducer_to_formulas
from src.automata.marking import LetterSpace, default_atom, marking_transducer
from src.automata.nfa import Nfa
from src.automata.transducers import SequentialTransducer, WordTransducer, run_sequential, sequentialize
from src.logic.evaluator import evaluate
from src.logic.parser import parse_formula
from src.logic.syntax import FALSE, TRUE
from src.utils.exceptions import (
    AlphabetMismatchError,
    FragmentError,
    NonFunctionalError,
    SerializationError,
    ValidationError,
)
from src.words.dataword import enumerate_up_to

AB = ("a", "b")


def words(alphabet, max_len):
    for n in range(max_len + 1):
        yield from itertools.product(alphabet, repeat=n)


@pytest.fixture
def last_letter_guess():
    """Functional but nondeterministic: every position is labelled with the last letter."""
    moves = [("A", x, "A", "A") for x in AB] + [("B", x, "B", "B") for x in AB]
    moves += [("A", "a", "A", "FA"), ("B", "b", "B", "FB")]
    return WordTransducer.from_moves(moves, ["A", "B"], ["FA", "FB"], AB, ("A", "B"))


# Word automata

def test_nfa_boolean_operations():
    """Test product, union and complement against direct membership"""
    only_a = Nfa.single_letter_loop(AB, "a")
    ends_b = Nfa(AB, [(0, "a", 0), (0, "b", 0), (0, "b", 1)], [0], [1])
    both = only_a.product(ends_b)
    either = only_a.union(ends_b)
    not_a = only_a.complement()
    for w in words(AB, 4):
        assert both.accepts(w) == (only_a.accepts(w) and ends_b.accepts(w)), f"product wrong on {w}"
        assert either.accepts(w) == (only_a.accepts(w) or ends_b.accepts(w)), f"union wrong on {w}"
        assert not_a.accepts(w) != only_a.accepts(w), f"complement wrong on {w}"
    assert both.is_empty(), "No word is all a's and ends with b"


def test_nfa_minimize_and_reverse():
    """Test minimization, determinization and reversal"""
    ends_b = Nfa(AB, [(0, "a", 0), (0, "b", 0), (0, "b", 1)], [0], [1])
    minimal = ends_b.minimize()
    assert minimal.is_deterministic(), "Minimal automaton is deterministic"
    assert len(minimal.states) == 2, "Two states recognise 'ends with b'"
    assert minimal.language(4) == ends_b.language(4), "Minimization keeps the language"
    starts_b = ends_b.reverse()
    assert starts_b.language(3) == {w[::-1] for w in ends_b.language(3)}, "Reversal mirrors words"
    assert ends_b.determinize().language(4) == ends_b.language(4), "Subset construction keeps the language"


def test_nfa_projection_and_trim():
    """Test letter maps and trimming"""
    pairs = [(x, y) for x in AB for y in AB]
    diagonal = Nfa(pairs, [(0, ("a", "a"), 0), (0, ("b", "b"), 0), (0, ("a", "b"), 1)], [0], [0])
    first_track = diagonal.project(lambda p: p[0], AB)
    assert first_track.accepts("abba"), "Projection keeps the diagonal runs"
    assert len(diagonal.trim().states) == 1, "Dead state 1 trimmed"
    back = first_track.pullback(lambda p: p[0], pairs)
    assert back.accepts([("a", "b"), ("b", "a")]), "Pullback ignores the second track"


def test_nfa_alphabet_checks():
    """Test alphabet mismatches and serialisation errors"""
    with pytest.raises(AlphabetMismatchError):
        Nfa(AB, [(0, "c", 0)], [0], [0])
    with pytest.raises(AlphabetMismatchError):
        Nfa.universal(AB).product(Nfa.universal(("a",)))
    with pytest.raises(SerializationError):
        Nfa.from_dict({"alphabet": AB})
    data = Nfa.single_letter_loop(AB, "a").to_dict()
    assert Nfa.from_dict(data).accepts("aa"), "Dict form reads back"


# Transducers

def test_transduce_last_letter(last_letter_guess):
    """Test the transduction of a nondeterministic functional transducer"""
    assert last_letter_guess.transduce("aba") == ("A", "A", "A"), "Last letter a"
    assert last_letter_guess.transduce("ab") == ("B", "B"), "Last letter b"
    assert last_letter_guess.transduce("") is None, "Empty word has no accepting run"
    assert last_letter_guess.is_functional(), "At most one output per input"
    assert not last_letter_guess.is_input_deterministic(), "Guessing is nondeterministic"
    assert not last_letter_guess.is_total(), "Empty word is outside the domain"
    assert WordTransducer.identity(AB).is_total(), "Identity is total"


def test_non_functional_transducer():
    """Test detection of two outputs for one input"""
    t = WordTransducer.from_moves([(0, "a", "x", 0), (0, "a", "y", 0)], [0], [0], ("a",), ("x", "y"))
    assert not t.is_functional(), "Two outputs on 'a'"
    with pytest.raises(NonFunctionalError):
        t.transduce("a")
    with pytest.raises(NonFunctionalError):
        sequentialize(t)


def test_product_and_compose(last_letter_guess):
    """Test pairing and chaining of transducers"""
    identity = WordTransducer.identity(AB)
    paired = last_letter_guess.product(identity)
    assert paired.transduce("ba") == (("A", "b"), ("A", "a")), "Outputs paired position-wise"
    chained = identity.compose(last_letter_guess)
    for w in words(AB, 4):
        assert chained.transduce(w) == last_letter_guess.transduce(w), f"compose with identity changed {w}"


def test_sequentialize(last_letter_guess):
    """Test that the left pass then the right pass compute the transduction"""
    left, right = sequentialize(last_letter_guess)
    assert left.direction == "left" and right.direction == "right", "Pass directions"
    for w in words(AB, 5):
        expected = last_letter_guess.transduce(w)
        assert run_sequential(left, right, w) == expected, f"sequential runs disagree on {w}"


def test_sequential_identity():
    """Test right-to-left runs and direction validation"""
    t = SequentialTransducer.identity(AB)
    assert t.run("ab") == ("a", "b"), "Identity reads right to left and restores order"
    with pytest.raises(ValidationError):
        SequentialTransducer("up", 0, {}, frozenset({0}))


# Marking transducers and extraction

def _valuations(space, letters):
    return [space.valuation({letter}) for letter in letters]


@pytest.mark.parametrize("text", ["Fg a", "Xg b | Yg a", "nu x. a & ~Xg x", "mu x. b | Yg Yg x", "lastg | firstg"])
def test_global_marking_transducer(text):
    """Test that the global marking transducer marks the formula's positions"""
    phi = parse_formula(text)
    t = marking_transducer(phi, "g")
    for word in enumerate_up_to(AB, 4):
        if len(word) == 0:
            continue
        expected = evaluate(word, phi)
        marks = t.marking(_valuations(t.space, word.letters))
        assert marks == tuple(int(i in expected) for i in range(1, len(word) + 1)), f"{text} wrong on {word}"


def test_class_marking_transducer():
    """Test a class-mode transducer on every class projection"""
    phi = parse_formula("Fc a | ~Yc b")
    t = marking_transducer(phi, "c")
    for word in enumerate_up_to(AB, 4):
        expected = evaluate(word, phi)
        _, class_words = word.projections()
        for cw in class_words:
            marks = t.marking(_valuations(t.space, cw.letters))
            assert marks == tuple(int(i in expected) for i in cw.positions), f"class marks wrong on {word}"


def test_marking_rejects_mixed_modes():
    """Test that a global transducer refuses class modalities"""
    with pytest.raises(FragmentError):
        marking_transducer(parse_formula("Xg Xc a"), "g")


def test_letter_space_formula():
    """Test Shannon expansion of a valuation set"""
    space = LetterSpace(("a", "b"), ())
    assert len(space.valuations) == 3, "No letter, a or b"
    assert space.formula_for(space.valuations, default_atom) == TRUE, "Every valuation gives true"
    assert space.formula_for([], default_atom) == FALSE, "No valuation gives false"
    not_a = space.formula_for([frozenset(), frozenset({"b"})], default_atom)
    for word in enumerate_up_to(("a", "b", "c"), 3):
        expected = {i for i in range(1, len(word) + 1) if word.letters[i - 1] != "a"}
        assert evaluate(word, not_a) == expected, f"letter test wrong on {word}"
    with pytest.raises(ValidationError):
        space.valuation({"a", "b"})


@pytest.mark.parametrize("text", ["Fg a", "Gg (a | Xg b)", "Yg Yg a"])
def test_extraction_reproduces_formula(text):
    """Test reading a marking transducer back as a formula"""
    phi = parse_formula(text)
    t = marking_transducer(phi, "g")
    formulas = transducer_to_formulas(t, "g", lambda letters: t.space.formula_for(letters, default_atom))
    extracted = formulas[1]
    for word in enumerate_up_to(AB, 4):
        assert evaluate(word, extracted) == evaluate(word, phi), f"{text} extraction wrong on {word}"
