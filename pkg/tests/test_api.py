import pytest
from fastapi.testclient import TestClient

from src.app import create_app
from src.logic.library import fragment_examples
from src.utils.constants import ERROR_EMPTY_FORMULA, MAX_API_LEN


@pytest.fixture
def client():
    """Test client on a fresh application"""
    with TestClient(create_app()) as test_client:
        yield test_client


def test_health(client):
    """Test the health check endpoint"""
    response = client.get("/api/health")
    assert response.status_code == 200, "Health check should succeed"
    assert response.json()["status"] == "healthy", "API should report healthy"


def test_eval(client):
    """Test evaluation on the running example"""
    response = client.post("/api/eval", json={"formula": "Xc a", "word": "a:1 b:2 a:2 a:1 b:3 a:1 b:2"})
    assert response.status_code == 200, "Evaluation should succeed"
    data = response.json()
    assert data["positions"] == [1, 2, 4], "Class successor carries an a"
    assert data["models"] is True, "Position 1 is among them"


def test_eval_bad_input(client):
    """Test that malformed formulas and words give 400"""
    assert client.post("/api/eval", json={"formula": "a &", "word": "a:1"}).status_code == 400, "Parse error"
    assert client.post("/api/eval", json={"formula": "a", "word": "a-1"}).status_code == 400, "Bad word"
    response = client.post("/api/eval", json={"formula": "   ", "word": "a:1"})
    assert response.status_code == 400 and response.json()["detail"] == ERROR_EMPTY_FORMULA, "Blank formula"
    assert client.post("/api/eval", json={"word": "a:1"}).status_code == 422, "Missing formula"


def test_classify(client):
    """Test the fragment report"""
    response = client.post("/api/classify", json={"formula": str(fragment_examples(1)["phi1"])})
    assert response.status_code == 200, "Classification should succeed"
    data = response.json()
    assert (data["br"], data["bma"]) == (2, 3), "phi1 heights"


def test_normalize(client):
    """Test normalization modes"""
    response = client.post("/api/normalize", json={"formula": "Fg a", "mode": "desugar"})
    assert response.status_code == 200, "Desugaring should succeed"
    assert response.json()["formula"].startswith("mu"), "F is a least fixpoint"
    response = client.post("/api/normalize", json={"formula": "Fg a", "mode": "sideways"})
    assert response.status_code == 400, "Unknown mode"


def test_equiv(client):
    """Test equivalence with and without a counterexample"""
    response = client.post("/api/equiv", json={"lhs": "Fg a", "rhs": "nu x. a | Xg x", "max_len": 3})
    assert response.status_code == 200, "Equivalence check should succeed"
    data = response.json()
    assert data["equivalent"] and data["counterexample"] is None, "Equivalent on finite words"
    response = client.post("/api/equiv", json={"lhs": "a", "rhs": "b", "max_len": 2, "workers": 2})
    data = response.json()
    assert not data["equivalent"], "Different letters"
    assert data["counterexample"] == {"word": "a:1", "lhs": True, "rhs": False}, "Shortest counterexample"
    response = client.post("/api/equiv", json={"lhs": "a", "rhs": "b", "max_len": MAX_API_LEN + 1})
    assert response.status_code == 422, "Bound above the API limit"


def test_translate(client):
    """Test translation pairs"""
    response = client.post("/api/translate", json={"formula": "E y. (x<y & a(y))", "source": "fo2", "target": "udltl"})
    assert response.status_code == 200, "FO2 translation should succeed"
    assert response.json()["depth"]["withinFactor"], "Depth report included"
    response = client.post("/api/translate", json={"formula": "Xc a", "source": "udltl", "target": "fo2"})
    assert response.status_code == 200 and response.json()["depth"] is None, "No depth report for FO2 output"
    response = client.post("/api/translate", json={"formula": "a", "source": "dltl", "target": "fo2"})
    assert response.status_code == 400, "Unsupported pair"
