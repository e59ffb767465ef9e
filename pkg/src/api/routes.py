"""
FastAPI routes for the data-word mu-calculus workbench.

Endpoints:
    Health Check:
        - GET /health: API health status

    Workbench:
        - POST /eval: positions of a word satisfying a formula
        - POST /classify: BR/BMA Comp-heights with witnesses
        - POST /normalize: guarded form, dual or desugared core
        - POST /equiv: exhaustive equivalence of two formulas
        - POST /translate: Data-LTL / FO2 / mu-calculus translations

Example:
    >>> POST /api/eval
    >>> {
    >>>     "formula": "S",
    >>>     "word": "a:1 b:2 a:2"
    >>> }
"""
from typing import Any, Dict, List, Literal, Optional

from fastapi import APIRouter, HTTPException
from pydantic import BaseModel, Field

from src.dltl.fo2 import parse_fo2
from src.dltl.fo2_translate import depth_report, fo2_to_udltl, udltl_to_fo2
from src.dltl.parser import parse_dltl
from src.dltl.translate import dltl_to_mu
from src.fragments.classify import classify
from src.logic.evaluator import evaluate
from src.logic.parser import parse_formula
from src.logic.transforms import desugar, dualize, to_guarded
from src.testkit.acceptors import formula_acceptor
from src.testkit.oracle import check_equivalence
from src.utils.constants import (
    DEFAULT_MAX_LEN,
    ERROR_EMPTY_FORMULA,
    ERROR_REQUEST_FAILED,
    ERROR_UNKNOWN_MODE,
    ERROR_UNKNOWN_TRANSLATION,
    HTTP_BAD_REQUEST,
    HTTP_INTERNAL_ERROR,
    MAX_API_LEN,
    MAX_API_WORKERS,
    MAX_FORMULA_LENGTH,
    SUCCESS_EQUIVALENT,
    WARNING_COUNTEREXAMPLE,
)
from src.utils.exceptions import WorkbenchError
from src.utils.logger import get_logger
from src.words.dataword import DataWord

logger = get_logger(__name__)

# Create routers
health_router = APIRouter()
workbench_router = APIRouter()

NORMALIZE_MODES = {"guarded": to_guarded, "dual": dualize, "desugar": desugar}


# Request/Response Models
class EvalRequest(BaseModel):
    """Request model for evaluation"""
    formula: str = Field(..., min_length=1, max_length=MAX_FORMULA_LENGTH, description="Formula text")
    word: str = Field(default="", description="Data word, e.g. 'a:1 b:2 a:1'")


class EvalResponse(BaseModel):
    formula: str
    positions: List[int]
    models: bool


class FormulaRequest(BaseModel):
    formula: str = Field(..., min_length=1, max_length=MAX_FORMULA_LENGTH, description="Formula text")


class NormalizeRequest(FormulaRequest):
    mode: str = Field(default="guarded", description="guarded, dual or desugar")


class NormalizeResponse(BaseModel):
    mode: str
    formula: str


class EquivRequest(BaseModel):
    """Request model for exhaustive equivalence"""
    lhs: str = Field(..., min_length=1, max_length=MAX_FORMULA_LENGTH, description="First formula")
    rhs: str = Field(..., min_length=1, max_length=MAX_FORMULA_LENGTH, description="Second formula")
    sigma: List[str] = Field(default_factory=lambda: ["a", "b"], min_length=1, description="Alphabet")
    max_len: int = Field(default=DEFAULT_MAX_LEN, ge=0, le=MAX_API_LEN, description="Largest word length")
    workers: int = Field(default=1, ge=1, le=MAX_API_WORKERS)


class EquivResponse(BaseModel):
    equivalent: bool
    counterexample: Optional[Dict[str, Any]]
    visited: int
    message: str


class TranslateRequest(FormulaRequest):
    source: Literal["dltl", "fo2", "udltl"]
    target: Literal["mu", "udltl", "fo2"]
    keep_far: bool = False


class TranslateResponse(BaseModel):
    formula: str
    depth: Optional[Dict[str, Any]] = None


class HealthResponse(BaseModel):
    """Response model for health check"""
    status: str
    message: str


def _require_text(text: str) -> str:
    if not text or not text.strip():
        raise HTTPException(status_code=HTTP_BAD_REQUEST, detail=ERROR_EMPTY_FORMULA)
    return text


# Health Check Endpoint
@health_router.get("/health", response_model=HealthResponse)
async def health_check():
    """
    Health check endpoint to verify API is running
    """
    return HealthResponse(
        status="healthy",
        message="Data-word mu-calculus workbench API is running"
    )


# Workbench Endpoints
@workbench_router.post("/eval", response_model=EvalResponse)
async def eval_formula(request: EvalRequest):
    """
    Evaluate a formula on a data word

    - **formula**: formula text
    - **word**: data word as letter:value tokens
    """
    try:
        phi = parse_formula(_require_text(request.formula))
        positions = sorted(evaluate(DataWord.from_text(request.word), phi))
        return EvalResponse(formula=str(phi), positions=positions, models=1 in positions)
    except HTTPException:
        raise
    except (WorkbenchError, ValueError) as e:
        raise HTTPException(status_code=HTTP_BAD_REQUEST, detail=str(e))
    except Exception as e:
        logger.error(f"Error in eval endpoint: {str(e)}")
        raise HTTPException(status_code=HTTP_INTERNAL_ERROR, detail=ERROR_REQUEST_FAILED.format(str(e)))


@workbench_router.post("/classify")
async def classify_formula(request: FormulaRequest) -> Dict[str, Any]:
    """
    Fragment report: BR and BMA Comp-heights, fixpoint kinds and witnesses
    """
    try:
        return classify(parse_formula(_require_text(request.formula))).to_dict()
    except HTTPException:
        raise
    except (WorkbenchError, ValueError) as e:
        raise HTTPException(status_code=HTTP_BAD_REQUEST, detail=str(e))
    except Exception as e:
        logger.error(f"Error in classify endpoint: {str(e)}")
        raise HTTPException(status_code=HTTP_INTERNAL_ERROR, detail=ERROR_REQUEST_FAILED.format(str(e)))


@workbench_router.post("/normalize", response_model=NormalizeResponse)
async def normalize_formula(request: NormalizeRequest):
    """
    Rewrite a formula

    - **mode**: guarded, dual or desugar
    """
    try:
        if request.mode not in NORMALIZE_MODES:
            raise HTTPException(status_code=HTTP_BAD_REQUEST, detail=ERROR_UNKNOWN_MODE.format(request.mode))
        phi = parse_formula(_require_text(request.formula))
        return NormalizeResponse(mode=request.mode, formula=str(NORMALIZE_MODES[request.mode](phi)))
    except HTTPException:
        raise
    except (WorkbenchError, ValueError) as e:
        raise HTTPException(status_code=HTTP_BAD_REQUEST, detail=str(e))
    except Exception as e:
        logger.error(f"Error in normalize endpoint: {str(e)}")
        raise HTTPException(status_code=HTTP_INTERNAL_ERROR, detail=ERROR_REQUEST_FAILED.format(str(e)))


@workbench_router.post("/equiv", response_model=EquivResponse)
async def equivalence(request: EquivRequest):
    """
    Compare two formulas on every data word up to max_len

    - **sigma**: letters of the alphabet
    - **max_len**: largest word length (0-7)
    """
    try:
        lhs = formula_acceptor(parse_formula(_require_text(request.lhs)))
        rhs = formula_acceptor(parse_formula(_require_text(request.rhs)))
        report = check_equivalence(lhs, rhs, request.sigma, request.max_len, request.workers)
        found = report.counterexample
        message = (
            SUCCESS_EQUIVALENT.format(request.max_len) if found is None
            else WARNING_COUNTEREXAMPLE.format(found.word.to_text())
        )
        return EquivResponse(
            equivalent=found is None,
            counterexample=found.to_dict() if found else None,
            visited=report.visited,
            message=message,
        )
    except HTTPException:
        raise
    except (WorkbenchError, ValueError) as e:
        raise HTTPException(status_code=HTTP_BAD_REQUEST, detail=str(e))
    except Exception as e:
        logger.error(f"Error in equiv endpoint: {str(e)}")
        raise HTTPException(status_code=HTTP_INTERNAL_ERROR, detail=ERROR_REQUEST_FAILED.format(str(e)))


@workbench_router.post("/translate", response_model=TranslateResponse)
async def translate(request: TranslateRequest):
    """
    Translate dltl -> mu, fo2 -> udltl or udltl -> fo2
    """
    try:
        text = _require_text(request.formula)
        pair = (request.source, request.target)
        if pair == ("dltl", "mu"):
            return TranslateResponse(formula=str(dltl_to_mu(parse_dltl(text))))
        if pair == ("udltl", "fo2"):
            return TranslateResponse(formula=str(udltl_to_fo2(parse_dltl(text))))
        if pair == ("fo2", "udltl"):
            phi = parse_fo2(text)
            return TranslateResponse(
                formula=str(fo2_to_udltl(phi, keep_far=request.keep_far)),
                depth=depth_report(phi),
            )
        raise HTTPException(status_code=HTTP_BAD_REQUEST, detail=ERROR_UNKNOWN_TRANSLATION.format(*pair))
    except HTTPException:
        raise
    except (WorkbenchError, ValueError) as e:
        raise HTTPException(status_code=HTTP_BAD_REQUEST, detail=str(e))
    except Exception as e:
        logger.error(f"Error in translate endpoint: {str(e)}")
        raise HTTPException(status_code=HTTP_INTERNAL_ERROR, detail=ERROR_REQUEST_FAILED.format(str(e)))
