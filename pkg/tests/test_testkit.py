import pytest

from src.logic.syntax import fixpoint_kinds, modalities, props
from src.testkit.acceptors import BACKENDS, acceptor_from_spec
from src.testkit.generators import FRAGMENTS, random_formula
from src.testkit.oracle import Counterexample, check_equivalence, count_words, equivalence_check, shrink
from src.utils.constants import NU
from src.utils.exceptions import SerializationError, ValidationError
from src.words.dataword import DataWord

AB = ("a", "b")


# Oracle

def test_self_equivalence_visits_every_word():
    """Test that an acceptor agrees with itself on all 291 words up to length 4"""
    acceptor = acceptor_from_spec("mu:Fg a")
    report = check_equivalence(acceptor, acceptor, AB, 4)
    assert report.equivalent, "A sentence is equivalent to itself"
    assert report.visited == count_words(AB, 4) == 291, "Every word visited once"


def test_first_counterexample():
    """Test that the first disagreement in enumeration order is reported"""
    report = check_equivalence(acceptor_from_spec("mu:a"), acceptor_from_spec("mu:b"), AB, 3)
    assert not report.equivalent, "a and b differ"
    assert report.counterexample.to_dict() == {"word": "a:1", "lhs": True, "rhs": False}, "Shortest word a:1"
    assert report.visited == 2, "Empty word, then a:1"


def test_worker_count_does_not_change_result():
    """Test that parallel chunks report the same counterexample"""
    lhs, rhs = acceptor_from_spec("mu:Fg a"), acceptor_from_spec("mu:Xg a | a")
    sequential = check_equivalence(lhs, rhs, AB, 4)
    for workers in (2, 3, 8):
        parallel = check_equivalence(lhs, rhs, AB, 4, workers=workers)
        assert parallel.counterexample == sequential.counterexample, f"{workers} workers disagree"
        assert parallel.visited == sequential.visited, f"{workers} workers counted differently"


def test_oracle_validation():
    """Test bound and worker checks"""
    acceptor = acceptor_from_spec("mu:a")
    with pytest.raises(ValidationError):
        check_equivalence(acceptor, acceptor, AB, -1)
    with pytest.raises(ValidationError):
        equivalence_check(acceptor, acceptor, AB, 2, workers=0)


def test_shrink():
    """Test that shrinking finds the least disagreeing word"""
    lhs, rhs = acceptor_from_spec("mu:Fg a"), acceptor_from_spec("mu:a")
    long_word = DataWord.from_text("b:1 b:2 a:1")
    start = Counterexample(long_word, lhs(long_word), rhs(long_word))
    smaller = shrink(start, lhs, rhs)
    assert len(smaller.word) == 2, "A b then an a is the shortest difference"
    assert smaller.word.letters == ("b", "a"), "Least word in enumeration order"
    assert (smaller.lhs, smaller.rhs) == (True, False), "Outcomes recorded"
    same = shrink(start, lhs, lhs)
    assert same == start, "Nothing shorter to find when the acceptors agree"


# Acceptors

@pytest.mark.parametrize(
    "lhs,rhs",
    [
        ("mu:Fg a", "da:nu x. a | Xg x"),
        ("mu:Xc a", "dltl:Xc a"),
        ("dltl:Xc a", "fo2:E y. (x~+1=y & a(y))"),
        ("mu:Fg a", "cascade-bma:Fg a"),
        ("mu:Fc b", "cascade-br:Fc b"),
        ("mu:a Uc b", "dltl:a Uc b"),
    ],
)
def test_backends_agree(lhs, rhs):
    """Test that every representation accepts the same words"""
    assert equivalence_check(acceptor_from_spec(lhs), acceptor_from_spec(rhs), AB, 4) is None, f"{lhs} vs {rhs}"


def test_acceptor_from_file(tmp_path):
    """Test reading the formula text from a file"""
    path = tmp_path / "phi.txt"
    path.write_text("Gc (a | Xc b)\n", encoding="utf-8")
    from_file = acceptor_from_spec(f"mu:@{path}")
    inline = acceptor_from_spec("mu:Gc (a | Xc b)")
    assert equivalence_check(from_file, inline, AB, 3) is None, "File and inline text agree"
    with pytest.raises(SerializationError):
        acceptor_from_spec(f"mu:@{tmp_path / 'missing.txt'}")


def test_acceptor_spec_errors():
    """Test unknown backends and missing separators"""
    assert "mu" in BACKENDS and "cascade-br" in BACKENDS, "Backends listed"
    with pytest.raises(SerializationError):
        acceptor_from_spec("ltl:a")
    with pytest.raises(SerializationError):
        acceptor_from_spec("Fg a")


# Generators

def test_random_formula_is_deterministic():
    """Test that a seed fixes the formula"""
    assert str(random_formula("any", 3, 11)) == str(random_formula("any", 3, 11)), "Same seed, same formula"
    texts = {str(random_formula("any", 3, seed)) for seed in range(20)}
    assert len(texts) > 1, "Different seeds give different formulas"


def test_random_formula_respects_fragment():
    """Test fragment restrictions of generated sentences"""
    for seed in range(30):
        nu_only = random_formula("nuOnly", 3, seed)
        assert fixpoint_kinds(nu_only) <= {NU}, f"Seed {seed}: least fixpoint in {nu_only}"
        assert not nu_only.free_vars, f"Seed {seed}: free variable in {nu_only}"
        pure_class = random_formula("pure:c", 3, seed)
        assert modalities(pure_class) <= {"Xc", "Yc"}, f"Seed {seed}: global step in {pure_class}"
        letters = random_formula("any", 3, seed, letters=("p", "q"))
        assert props(letters) <= {"p", "q"}, f"Seed {seed}: unexpected letter in {letters}"


def test_random_formula_validation():
    """Test generator argument checks"""
    assert "BMA" in FRAGMENTS and "pure:Y" in FRAGMENTS, "Fragments listed"
    with pytest.raises(ValidationError):
        random_formula("LTL", 2, 0)
    with pytest.raises(ValidationError):
        random_formula("any", -1, 0)
    with pytest.raises(ValidationError):
        random_formula("any", 2, 0, letters=())
