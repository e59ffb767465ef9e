"""
Command-line entry point for the data-word mu-calculus workbench.

Every subcommand prints one JSON document on stdout (sorted keys, so equal
inputs give byte-identical output); logs go to stderr. Exit codes: 0 on
success, 1 when the checked property fails (a counterexample, a rejected
word, no witness), 2 on usage, parse or input errors.

Example:
    $ python scripts/workbench.py eval -f "S" -w "a:1 b:2 a:2"
    {"positions": [2]}
"""
import argparse
import json
import sys
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence

from src.cascades.compile import br_to_cmt_cascade, bma_to_cascade
from src.config.settings import get_settings
from src.data_automata.automaton import bounded_emptiness
from src.dltl.fo2 import parse_fo2
from src.dltl.fo2_translate import depth_report, fo2_to_udltl, udltl_to_fo2
from src.dltl.parser import parse_dltl
from src.dltl.translate import dltl_to_mu
from src.fragments.classify import classify
from src.logic.evaluator import evaluate, models
from src.logic.library import fragment_examples
from src.logic.parser import parse_formula
from src.logic.syntax import Formula
from src.logic.transforms import desugar, dualize, to_guarded
from src.reductions.pcp import PcpInstance, decode_word, encode_solution, pcp_formula, search_solution_word
from src.testkit.acceptors import acceptor_from_spec, nu_automaton
from src.testkit.oracle import check_equivalence, count_words, shrink
from src.utils.constants import (
    ERROR_UNKNOWN_TRANSLATION,
    EXIT_OK,
    EXIT_USAGE,
    EXIT_VIOLATION,
)
from src.utils.exceptions import SerializationError, ValidationError, WorkbenchError
from src.utils.logger import get_logger, set_level
from src.words.dataword import DataWord, enumerate_up_to

logger = get_logger(__name__)

TRANSLATIONS = {("dltl", "mu"), ("fo2", "udltl"), ("udltl", "fo2")}


class _ArgumentParser(argparse.ArgumentParser):
    """argparse that raises instead of exiting, so main() owns the exit code."""

    def error(self, message):
        raise ValidationError("arguments", " ".join(sys.argv[1:]), message)


# Input helpers

def _read_text(inline: Optional[str], path: Optional[str], what: str) -> str:
    if path:
        try:
            return Path(path).read_text(encoding="utf-8").strip()
        except OSError as e:
            raise SerializationError(what, f"cannot read {path}: {e}")
    if inline is None:
        raise ValidationError(what, None, "give it inline or as a file")
    return inline


def _formula(args) -> Formula:
    return parse_formula(_read_text(args.formula, args.formula_file, "formula"))


def _word(args) -> DataWord:
    return DataWord.from_text(_read_text(args.word, args.word_file, "data word"))


def _sigma(args) -> List[str]:
    letters = [ch.strip() for ch in args.sigma.split(",") if ch.strip()]
    if not letters:
        raise ValidationError("sigma", args.sigma, "needs at least one letter")
    return letters


# Subcommands; each returns (payload, exit code)

def cmd_eval(args):
    return {"positions": sorted(evaluate(_word(args), _formula(args)))}, EXIT_OK


def cmd_check(args):
    holds = models(_word(args), _formula(args))
    return {"models": holds}, EXIT_OK if holds else EXIT_VIOLATION


def cmd_classify(args):
    return classify(_formula(args)).to_dict(), EXIT_OK


def cmd_normalize(args):
    phi = _formula(args)
    if args.guarded:
        result = to_guarded(phi)
    elif args.dual:
        result = dualize(phi)
    else:
        result = desugar(phi)
    return {"formula": str(result)}, EXIT_OK


def cmd_to_da(args):
    return nu_automaton(_formula(args)).to_dict(_sigma(args)), EXIT_OK


def cmd_da_member(args):
    run = nu_automaton(_formula(args)).run(_word(args))
    payload = {"accepts": run is not None, "run": [str(out) for out in run.outputs] if run else None}
    return payload, EXIT_OK if run else EXIT_VIOLATION


def cmd_da_empty(args):
    witness = bounded_emptiness(nu_automaton(_formula(args)), _sigma(args), args.max_len)
    return {"maxLen": args.max_len, "witness": witness.to_text() if witness else None}, EXIT_OK


def _cascade(args):
    phi = _formula(args)
    if args.basis == "br":
        return br_to_cmt_cascade(phi)
    return bma_to_cascade(phi, sequential=args.sequential)


def cmd_to_cascade(args):
    return _cascade(args).to_dict(), EXIT_OK


def cmd_run_cascade(args):
    cascade = _cascade(args)
    word = _word(args)
    output = cascade.run(word)
    marking = cascade.marking(word)
    return {
        "accepts": cascade.accepts(word),
        "marking": sorted(marking) if marking is not None else None,
        "output": [str(letter) for letter in output.letters] if output is not None else None,
    }, EXIT_OK


def cmd_translate(args):
    pair = (args.source, args.target)
    if pair not in TRANSLATIONS:
        raise ValidationError("translation", f"{args.source}->{args.target}", ERROR_UNKNOWN_TRANSLATION.format(*pair))
    text = _read_text(args.formula, args.formula_file, "formula")
    if pair == ("dltl", "mu"):
        return {"formula": str(dltl_to_mu(parse_dltl(text)))}, EXIT_OK
    if pair == ("udltl", "fo2"):
        return {"formula": str(udltl_to_fo2(parse_dltl(text)))}, EXIT_OK
    phi = parse_fo2(text)
    return {"formula": str(fo2_to_udltl(phi, keep_far=args.keep_far)), "depth": depth_report(phi)}, EXIT_OK


def _load_instance(args) -> PcpInstance:
    try:
        data = json.loads(_read_text(None, args.instance, "PCP instance"))
    except json.JSONDecodeError as e:
        raise SerializationError("PCP instance", str(e))
    markers = args.markers.split(",") if args.markers else None
    return PcpInstance.from_json(data, markers)


def cmd_pcp(args):
    instance = _load_instance(args)
    phi = pcp_formula(instance)
    if args.encode:
        indices = [int(token) for token in args.encode.replace(",", " ").split()]
        word = encode_solution(instance, indices)
        holds = models(word, phi)
        return {"encoding": word.to_text(), "holds": holds}, EXIT_OK if holds else EXIT_VIOLATION
    max_len = args.max_len if args.max_len is not None else get_settings().search_max_len
    witness = search_solution_word(instance, max_len)
    payload = {
        "maxLen": max_len,
        "witness": witness.to_text() if witness else None,
        "solution": decode_word(instance, witness) if witness else None,
    }
    return payload, EXIT_OK if witness else EXIT_VIOLATION


def cmd_equiv(args):
    lhs, rhs = acceptor_from_spec(args.lhs), acceptor_from_spec(args.rhs)
    sigma = _sigma(args)
    report = check_equivalence(lhs, rhs, sigma, args.max_len, args.workers)
    found = report.counterexample
    if found is not None and args.shrink:
        found = shrink(found, lhs, rhs, sigma)
    payload = {"counterexample": found.to_dict() if found else None, "visited": report.visited}
    return payload, EXIT_OK if found is None else EXIT_VIOLATION


def cmd_enum(args):
    sigma = _sigma(args)
    payload = {"count": count_words(sigma, args.max_len)}
    if not args.count_only:
        payload["words"] = [word.to_text() for word in enumerate_up_to(sigma, args.max_len)]
    return payload, EXIT_OK


def cmd_table(args):
    rows = []
    for name, phi in fragment_examples(args.max_bridge).items():
        report = classify(phi)
        rows.append({"name": name, "formula": str(phi), "br": report.br, "bma": report.bma})
    return {"rows": rows}, EXIT_OK


# Parser

def _add_formula(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("-f", "--formula", help="Formula text")
    parser.add_argument("--formula-file", help="UTF-8 file holding the formula")


def _add_word(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("-w", "--word", help="Data word, e.g. 'a:1 b:2 a:1'")
    parser.add_argument("--word-file", help="File holding the data word")


def build_parser() -> argparse.ArgumentParser:
    settings = get_settings()
    parser = _ArgumentParser(prog="workbench", description="Mu-calculus workbench for finite data words")
    parser.add_argument("--pretty", action="store_true", help="Indented, human-readable output")
    parser.add_argument("--log-level", default=None, help=f"Logging level (default: {settings.log_level})")
    sub = parser.add_subparsers(dest="command", parser_class=_ArgumentParser)
    sub.required = True

    def command(name: str, handler: Callable, help_text: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help_text)
        p.set_defaults(handler=handler)
        return p

    def sigma_and_bound(p: argparse.ArgumentParser, default_len: int) -> None:
        p.add_argument("--sigma", default=settings.default_sigma, help="Comma-separated letters")
        p.add_argument("--max-len", type=int, default=default_len, help="Largest word length")

    p = command("eval", cmd_eval, "Positions satisfying a formula")
    _add_formula(p)
    _add_word(p)

    p = command("check", cmd_check, "Does the word satisfy the sentence at position 1")
    _add_formula(p)
    _add_word(p)

    p = command("classify", cmd_classify, "BR/BMA Comp-heights with witnesses")
    _add_formula(p)

    p = command("normalize", cmd_normalize, "Guarded form, dual or desugared core")
    _add_formula(p)
    mode = p.add_mutually_exclusive_group(required=True)
    mode.add_argument("--guarded", action="store_true")
    mode.add_argument("--dual", action="store_true")
    mode.add_argument("--desugar", action="store_true")

    p = command("to-da", cmd_to_da, "Data automaton of a nu-only or BR sentence")
    _add_formula(p)
    p.add_argument("--sigma", default=settings.default_sigma, help="Letters to tabulate")

    p = command("da-member", cmd_da_member, "Membership of a word in the data automaton")
    _add_formula(p)
    _add_word(p)

    p = command("da-empty", cmd_da_empty, "Bounded emptiness search")
    _add_formula(p)
    sigma_and_bound(p, settings.oracle_max_len)

    for name, handler, help_text in (
        ("to-cascade", cmd_to_cascade, "Compile to a transducer cascade"),
        ("run-cascade", cmd_run_cascade, "Compile to a cascade and run it on a word"),
    ):
        p = command(name, handler, help_text)
        _add_formula(p)
        p.add_argument("--basis", choices=("bma", "br"), default="bma")
        p.add_argument("--sequential", action="store_true", help="Sequential transducers (bma only)")
        if name == "run-cascade":
            _add_word(p)

    p = command("translate", cmd_translate, "Translate between Data-LTL, FO2 and the mu-calculus")
    _add_formula(p)
    p.add_argument("--from", dest="source", required=True, choices=("dltl", "fo2", "udltl"))
    p.add_argument("--to", dest="target", required=True, choices=("mu", "udltl", "fo2"))
    p.add_argument("--keep-far", action="store_true", help="Keep not-in-class modalities unexpanded")

    p = command("pcp", cmd_pcp, "PCP encoding check or bounded witness search")
    p.add_argument("--instance", required=True, help="JSON file: list of [u, v] pairs")
    p.add_argument("--encode", help="Solution indices, e.g. '1 2'")
    p.add_argument("--markers", help="Two marker letters, e.g. 'x,y'")
    p.add_argument("--max-len", type=int, default=None, help="Search bound")

    p = command("equiv", cmd_equiv, "Exhaustive equivalence of two acceptors")
    p.add_argument("--lhs", required=True, help="Acceptor spec, e.g. 'mu:Fg a' or 'da:@file'")
    p.add_argument("--rhs", required=True, help="Acceptor spec")
    sigma_and_bound(p, settings.oracle_max_len)
    p.add_argument(
        "--workers", type=int, default=settings.oracle_workers, help="Chunks per length for the thread pool; same result for any count"
    )
    p.add_argument("--shrink", action="store_true", help="Re-enumerate for a least counterexample")

    p = command("enum", cmd_enum, "Enumerate canonical data words")
    sigma_and_bound(p, settings.oracle_max_len)
    p.add_argument("--count-only", action="store_true")

    p = command("table", cmd_table, "Classify the fragment separation examples")
    p.add_argument("--max-bridge", type=int, default=3)

    return parser


def _render(payload: Dict, pretty: bool) -> str:
    if pretty:
        return json.dumps(payload, indent=2, sort_keys=True, ensure_ascii=False)
    return json.dumps(payload, sort_keys=True, separators=(", ", ": "))


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Run one subcommand; returns the exit code."""
    try:
        args = build_parser().parse_args(argv)
        if args.log_level:
            set_level(args.log_level)
        logger.debug(f"running {args.command}")
        payload, code = args.handler(args)
    except (WorkbenchError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    print(_render(payload, args.pretty))
    return code


if __name__ == "__main__":
    sys.exit(main())
