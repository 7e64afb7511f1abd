"""Command-line interface.

Every capability is exposed as a non-interactive subcommand.  Exit codes:
0 success, 1 domain failure (machine-readable JSON on stderr), 2 usage
error, 3 solver unavailable.  All randomness flows from --seed.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

from . import harness, metrics
from .clients import (
    FileMockDialogueClient,
    HttpDialogueClient,
    HttpEmbeddingClient,
    MappingEmbeddingClient,
)
from .dataset import ingest_dataset
from .equiv import SolverConfig, SolverNotFound, brute_force_check, solver_check
from .nlgen import translate
from .ontology import Instance, load_ontology, Signature, infer_signature
from .parser import parse_formula
from .syntax import FolbenchError, negate, print_formula, to_nnf
from .transform import (
    build_most_similar,
    build_ranking,
    enumerate_perturbations,
    equivalent_rewrite,
    sample_perturbations,
)

EXIT_OK = 0
EXIT_DOMAIN = 1
EXIT_USAGE = 2
EXIT_NO_SOLVER = 3


def _formula_to_dict(f) -> dict:
    from . import syntax

    if isinstance(f, syntax.Atom):
        return {"atom": f.predicate, "args": [_term_to_dict(t) for t in f.args]}
    if isinstance(f, syntax.Not):
        return {"not": _formula_to_dict(f.operand)}
    if isinstance(f, syntax.BINARY_TYPES):
        name = type(f).__name__.lower()
        return {name: [_formula_to_dict(f.left), _formula_to_dict(f.right)]}
    name = type(f).__name__.lower()
    return {name: {"var": f.var, "body": _formula_to_dict(f.body)}}


def _term_to_dict(t) -> dict:
    from . import syntax

    if isinstance(t, syntax.Variable):
        return {"var": t.name}
    if isinstance(t, syntax.Constant):
        return {"const": t.name}
    return {"func": t.name, "args": [_term_to_dict(a) for a in t.args]}


def _load_signature(args) -> Signature | None:
    if args.ontology:
        return load_ontology(args.ontology).signature
    return None


def _parse_arg_formula(text: str, args, expand_xor: bool = False):
    return parse_formula(text, _load_signature(args), expand_xor=expand_xor)


def _emit(args, payload: dict, plain: str) -> None:
    if args.json:
        print(json.dumps(payload, ensure_ascii=False, sort_keys=True))
    else:
        print(plain)


def _solver_config(args) -> SolverConfig:
    return SolverConfig(
        path=args.solver,
        args=tuple(args.solver_arg or ()),
        keep_smt_dir=args.keep_smt,
        max_domain=args.max_domain,
    )


# ---------------------------------------------------------------------------
# Subcommand handlers
# ---------------------------------------------------------------------------


def _cmd_parse(args) -> int:
    f = _parse_arg_formula(args.formula, args, expand_xor=args.expand_xor)
    _emit(args, {"formula": print_formula(f), "ast": _formula_to_dict(f)}, print_formula(f))
    return EXIT_OK


def _cmd_print(args) -> int:
    f = _parse_arg_formula(args.formula, args, expand_xor=args.expand_xor)
    _emit(args, {"formula": print_formula(f)}, print_formula(f))
    return EXIT_OK


def _cmd_nnf(args) -> int:
    f = to_nnf(_parse_arg_formula(args.formula, args))
    _emit(args, {"formula": print_formula(f)}, print_formula(f))
    return EXIT_OK


def _cmd_negate(args) -> int:
    f = negate(_parse_arg_formula(args.formula, args))
    _emit(args, {"formula": print_formula(f)}, print_formula(f))
    return EXIT_OK


def _cmd_translate(args) -> int:
    if not args.ontology:
        raise FolbenchError("translate needs --ontology for the glossary")
    ontology = load_ontology(args.ontology)
    f = parse_formula(args.formula, ontology.signature)
    text = translate(f, ontology.glossary, parenthesized=args.parenthesized)
    _emit(args, {"text": text}, text)
    return EXIT_OK


def _cmd_perturb(args) -> int:
    f = _parse_arg_formula(args.formula, args)
    available = enumerate_perturbations(f)
    chosen = sample_perturbations(f, args.k, args.seed)
    note = None
    if len(chosen) < args.k:
        note = f"only {len(available)} perturbation(s) exist; emitted {len(chosen)}"
        print(f"note: {note}", file=sys.stderr)
    payload = {
        "perturbations": [print_formula(g) for g in chosen],
        "available": len(available),
        "note": note,
    }
    _emit(args, payload, "\n".join(print_formula(g) for g in chosen))
    return EXIT_OK


def _cmd_rewrite_eq(args) -> int:
    f = _parse_arg_formula(args.formula, args)
    rewritten, rule = equivalent_rewrite(f, args.seed)
    _emit(
        args,
        {"formula": print_formula(rewritten), "rule": rule},
        f"{print_formula(rewritten)}  [{rule}]",
    )
    return EXIT_OK


def _cmd_check_equiv(args) -> int:
    sig = _load_signature(args)
    f1 = parse_formula(args.formula1, sig)
    f2 = parse_formula(args.formula2, sig)
    if sig is None:
        sig = infer_signature(f1).merge(infer_signature(f2))
    if args.oracle:
        verdict = brute_force_check(f1, f2, sig, max_domain=args.max_domain)
    else:
        verdict = solver_check(f1, f2, sig, config=_solver_config(args))
    words = {"equivalent": "equivalent", "not_equivalent": "not equivalent", "unknown": "unknown"}
    payload = {"verdict": verdict.kind, "method": verdict.method, "reason": verdict.reason}
    if verdict.counter_structure is not None:
        w = verdict.counter_structure
        payload["witness"] = {
            "domain_size": len(w.domain),
            "constants": dict(w.constant_interp),
            "predicates": {k: sorted(map(list, v)) for k, v in w.predicate_interp.items()},
        }
    _emit(args, payload, words[verdict.kind])
    return EXIT_OK


def _cmd_le_score(args) -> int:
    sig = _load_signature(args)
    f1 = parse_formula(args.formula1, sig)
    f2 = parse_formula(args.formula2, sig)
    if args.matching:
        with open(args.matching, encoding="utf-8") as fh:
            spec = json.load(fh)
        matching = metrics.PredicateMatching(
            spec.get("pairs", {}),
            tuple(spec.get("dummies_left", ())),
            tuple(spec.get("dummies_right", ())),
        )
    else:
        matching = metrics.default_matching(f1, f2)
    score = metrics.le_score(f1, f2, matching)
    payload = {
        "score": float(score),
        "fraction": f"{score.numerator}/{score.denominator}",
        "pairs": matching.pairs,
        "dummies_left": list(matching.dummies_left),
        "dummies_right": list(matching.dummies_right),
    }
    if args.table:
        names, assignments, row1, row2 = metrics.le_truth_table(f1, f2, matching)
        payload["table"] = {
            "variables": names,
            "assignments": [[int(b) for b in row] for row in assignments],
            "values1": [int(b) for b in row1],
            "values2": [int(b) for b in row2],
        }
    _emit(args, payload, str(float(score)))
    return EXIT_OK


def _cmd_bleu(args) -> int:
    sig = _load_signature(args)
    ref = parse_formula(args.reference, sig)
    cand = parse_formula(args.candidate, sig)
    score = metrics.bleu_formula(ref, cand)
    _emit(args, {"score": score}, f"{score:.4f}")
    return EXIT_OK


def _cmd_build_task(args) -> int:
    instances = ingest_dataset(args.dataset, args.format)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    builder = build_most_similar if args.task == "most-similar" else build_ranking
    kwargs = {}
    if args.task == "ranking" and args.verify:
        kwargs["verify_equivalent"] = lambda f, g, sig: solver_check(
            f, g, sig, config=_solver_config(args)
        )
    k = args.k if args.k is not None else (8 if args.task == "most-similar" else 3)
    with open(out / "candidates.jsonl", "w", encoding="utf-8") as pub, open(
        out / "answers.jsonl", "w", encoding="utf-8"
    ) as priv:
        for inst in instances:
            cset = builder(inst, k=k, seed=args.seed, variant=args.variant, **kwargs)
            pub.write(cset.to_json(include_answers=False) + "\n")
            priv.write(cset.to_json(include_answers=True) + "\n")
    print(f"wrote {len(instances)} candidate set(s) to {out}", file=sys.stderr)
    return EXIT_OK


def _make_client(args, kind: str):
    if args.mock_replies:
        if kind == "embedding":
            with open(args.mock_replies, encoding="utf-8") as fh:
                return MappingEmbeddingClient(json.load(fh))
        return FileMockDialogueClient(args.mock_replies)
    if not args.endpoint or not args.model:
        raise FolbenchError("run needs --endpoint and --model (or --mock-replies)")
    if kind == "embedding":
        return HttpEmbeddingClient(args.endpoint, args.model)
    return HttpDialogueClient(args.endpoint, args.model)


def _cmd_run(args) -> int:
    task = args.task.replace("-", "_")
    model = harness.ModelConfig(
        kind=args.kind,
        name=args.model or "mock",
        endpoint=args.endpoint,
        max_completion_tokens=args.max_tokens,
        embedding_instruction=args.embedding_instruction,
    )
    cfg = harness.RunConfig(
        dataset=args.dataset,
        task=task,
        variant=args.variant,
        k=args.k,
        seeds=tuple(int(s) for s in args.seeds.split(",")),
        model=model,
        solver=_solver_config(args),
        output_dir=args.out,
        run_id=args.run_id,
        dataset_format=args.format,
        concurrency=args.concurrency,
        compute_equiv_flags=args.equiv_flags,
    )
    client = _make_client(args, args.kind)
    report = harness.run(cfg, client)
    print(json.dumps(report.aggregates(), ensure_ascii=False, indent=2, sort_keys=True))
    return EXIT_OK


def _cmd_report(args) -> int:
    payload = harness.rebuild_report(args.run_dir)
    print(json.dumps(payload["aggregates"], ensure_ascii=False, indent=2, sort_keys=True))
    if "correlations" in payload:
        print(json.dumps({"correlations": payload["correlations"]}, ensure_ascii=False,
                         indent=2, sort_keys=True))
    return EXIT_OK


# ---------------------------------------------------------------------------
# Argument wiring
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="folbench",
        description="NL-to-FOL benchmark toolkit: formula tools, metrics, and runs.",
    )
    ap.add_argument("--seed", type=int, default=0, help="seed for all randomness")
    ap.add_argument("--ontology", help="ontology JSON file declaring the signature")
    ap.add_argument("--solver", help="path to an SMT solver executable")
    ap.add_argument("--solver-arg", action="append", help="extra solver argument (repeatable)")
    ap.add_argument("--max-domain", type=int, default=3, help="finite-model search bound")
    ap.add_argument("--keep-smt", metavar="DIR", help="write emitted SMT scripts here")
    ap.add_argument("--json", action="store_true", help="machine-readable output")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("parse", help="parse a formula and print its canonical form")
    p.add_argument("formula")
    p.add_argument("--expand-xor", action="store_true")
    p.set_defaults(fn=_cmd_parse)

    p = sub.add_parser("print", help="canonical rendering of a formula")
    p.add_argument("formula")
    p.add_argument("--expand-xor", action="store_true")
    p.set_defaults(fn=_cmd_print)

    p = sub.add_parser("nnf", help="negation normal form")
    p.add_argument("formula")
    p.set_defaults(fn=_cmd_nnf)

    p = sub.add_parser("negate", help="outright negation")
    p.add_argument("formula")
    p.set_defaults(fn=_cmd_negate)

    p = sub.add_parser("translate", help="render a formula in English via the glossary")
    p.add_argument("formula")
    p.add_argument("--parenthesized", action="store_true")
    p.set_defaults(fn=_cmd_translate)

    p = sub.add_parser("perturb", help="sample elementary perturbations")
    p.add_argument("formula")
    p.add_argument("--k", type=int, default=8)
    p.set_defaults(fn=_cmd_perturb)

    p = sub.add_parser("rewrite-eq", help="one equivalence-preserving rewrite")
    p.add_argument("formula")
    p.set_defaults(fn=_cmd_rewrite_eq)

    p = sub.add_parser("check-equiv", help="solver-backed equivalence check")
    p.add_argument("formula1")
    p.add_argument("formula2")
    p.add_argument("--oracle", action="store_true", help="use the finite-model oracle instead")
    p.set_defaults(fn=_cmd_check_equiv)

    p = sub.add_parser("le-score", help="truth-table agreement score")
    p.add_argument("formula1")
    p.add_argument("formula2")
    p.add_argument("--matching", help="JSON file with pairs/dummies_left/dummies_right")
    p.add_argument("--table", action="store_true", help="include the full truth table (with --json)")
    p.set_defaults(fn=_cmd_le_score)

    p = sub.add_parser("bleu", help="raw BLEU between two formulas")
    p.add_argument("reference")
    p.add_argument("candidate")
    p.set_defaults(fn=_cmd_bleu)

    p = sub.add_parser("build-task", help="generate candidate sets for a dataset")
    p.add_argument("--task", choices=["most-similar", "ranking"], required=True)
    p.add_argument("--dataset", required=True)
    p.add_argument("--format", default="triple_jsonl", choices=["triple_jsonl", "folio_like"])
    p.add_argument("--variant", default="fol", choices=["fol", "nl"])
    p.add_argument("--k", type=int)
    p.add_argument("--out", required=True)
    p.add_argument("--verify", action="store_true",
                   help="solver-check each equivalent rewrite (ranking only)")
    p.set_defaults(fn=_cmd_build_task)

    p = sub.add_parser("run", help="drive a model over a dataset and score it")
    p.add_argument("task", choices=["logical-translation", "most-similar", "ranking"])
    p.add_argument("--dataset", required=True)
    p.add_argument("--format", default="triple_jsonl", choices=["triple_jsonl", "folio_like"])
    p.add_argument("--variant", default="fol", choices=["fol", "nl"])
    p.add_argument("--k", type=int)
    p.add_argument("--seeds", default="3,12,26,85,107")
    p.add_argument("--kind", default="dialogue", choices=["dialogue", "embedding"])
    p.add_argument("--endpoint")
    p.add_argument("--model")
    p.add_argument("--max-tokens", type=int, default=2500)
    p.add_argument("--embedding-instruction")
    p.add_argument("--mock-replies", help="JSON file of canned replies (offline run)")
    p.add_argument("--out", default="runs")
    p.add_argument("--run-id")
    p.add_argument("--concurrency", type=int, default=8)
    p.add_argument("--equiv-flags", action="store_true",
                   help="oracle-flag perturbations that may be equivalent to the original")
    p.set_defaults(fn=_cmd_run)

    p = sub.add_parser("report", help="recompute aggregates from a run directory")
    p.add_argument("run_dir")
    p.set_defaults(fn=_cmd_report)

    return ap


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        return args.fn(args)
    except SolverNotFound as exc:
        print(json.dumps({"error": "SolverNotFound", "detail": str(exc)}), file=sys.stderr)
        return EXIT_NO_SOLVER
    except (FolbenchError, FileNotFoundError, ValueError) as exc:
        print(
            json.dumps({"error": type(exc).__name__, "detail": str(exc)}),
            file=sys.stderr,
        )
        return EXIT_DOMAIN


def entrypoint() -> None:
    sys.exit(main())
