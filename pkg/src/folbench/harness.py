"""Run orchestration: prompts out, replies parsed, verdicts scored, records kept.

A run is a pure function of (dataset, RunConfig) up to the model's replies:
candidate sets and shuffles derive from the config seeds, workers are
idempotent per (instance, seed), and outputs are sorted before writing, so
two runs against a deterministic client produce identical reports and
record files (wall times aside).

Output layout under <output_dir>/<run_id>/:

    config.json    the RunConfig that produced the run
    records.jsonl  one RunRecord per line
    report.json    aggregates (and metric correlations for translation runs)
    report.csv     one row per (instance, seed, task score)
    smt/           emitted solver scripts, when keep_smt is set
"""

from __future__ import annotations

import json
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Callable, Sequence

from . import metrics
from .clients import ClientError, DimensionMismatch, ModelClient, schema_for
from .dataset import ingest_dataset
from .equiv import EquivVerdict, SolverConfig, solver_check
from .ontology import Instance
from .parser import parse_formula
from .prompts import render_prompt
from .syntax import FolbenchError, print_formula
from .transform import (
    MOST_SIMILAR,
    RANKING,
    CandidateSet,
    build_most_similar,
    build_ranking,
)

DEFAULT_SEEDS = (3, 12, 26, 85, 107)

TASK_TRANSLATION = "logical_translation"


@dataclass(frozen=True)
class ModelConfig:
    kind: str  # "dialogue" | "embedding"
    name: str = "mock"
    endpoint: str | None = None
    max_completion_tokens: int = 2500
    embedding_instruction: str | None = None
    embedding_instruction_reference: str | None = None

    def __post_init__(self) -> None:
        if self.kind not in ("dialogue", "embedding"):
            raise ValueError(f"model kind must be dialogue or embedding, got {self.kind!r}")


@dataclass(frozen=True)
class RunConfig:
    dataset: str
    task: str  # logical_translation | most_similar | ranking
    variant: str = "fol"
    k: int | None = None  # defaults: 8 for most_similar, 3 for ranking
    seeds: tuple[int, ...] = DEFAULT_SEEDS
    model: ModelConfig = field(default_factory=lambda: ModelConfig("dialogue"))
    solver: SolverConfig = field(default_factory=SolverConfig)
    output_dir: str = "runs"
    run_id: str | None = None
    dataset_format: str = "triple_jsonl"
    concurrency: int = 8
    max_retries: int = 3
    retry_backoff_s: float = 0.5
    compute_equiv_flags: bool = False

    def __post_init__(self) -> None:
        if self.task not in (TASK_TRANSLATION, MOST_SIMILAR, RANKING):
            raise ValueError(f"unknown task {self.task!r}")
        if self.variant not in ("fol", "nl"):
            raise ValueError(f"variant must be fol or nl, got {self.variant!r}")
        seeds = tuple(self.seeds)
        if not seeds or len(set(seeds)) != len(seeds):
            raise ValueError("seeds must be non-empty and distinct")
        object.__setattr__(self, "seeds", seeds)
        if self.concurrency < 1:
            raise ValueError("concurrency must be at least 1")

    @property
    def effective_k(self) -> int:
        if self.k is not None:
            return self.k
        return 8 if self.task == MOST_SIMILAR else 3

    def to_json_dict(self) -> dict:
        data = asdict(self)
        data["k"] = self.effective_k
        return data


@dataclass
class RunRecord:
    instance_id: str
    seed: int
    task: str
    variant: str
    system_prompt: str
    user_prompt: str
    raw_reply: str
    answer: object
    verdict: str | None
    scores: dict
    flags: tuple[str, ...]
    wall_time: float

    def to_json_dict(self) -> dict:
        return {
            "instance_id": self.instance_id,
            "seed": self.seed,
            "task": self.task,
            "variant": self.variant,
            "prompts": {"system": self.system_prompt, "user": self.user_prompt},
            "raw_reply": self.raw_reply,
            "answer": self.answer,
            "verdict": self.verdict,
            "scores": self.scores,
            "flags": list(self.flags),
            "wall_time": self.wall_time,
        }


# ---------------------------------------------------------------------------
# Reply handling
# ---------------------------------------------------------------------------


def _chat_with_retry(client: ModelClient, cfg: RunConfig, system: str, user: str,
                     seed: int, schema: dict) -> dict:
    last: ClientError | None = None
    for attempt in range(cfg.max_retries):
        try:
            return client.chat(system, user, seed, cfg.model.max_completion_tokens, schema)
        except ClientError as exc:
            last = exc
            if attempt + 1 < cfg.max_retries:
                time.sleep(cfg.retry_backoff_s * (2**attempt))
    raise last  # type: ignore[misc]


_FORMULA_START = set("∀∃¬!(")


def extract_formula(answer: str, sig) -> "object":
    """Parse a reply's answer field, falling back to one bounded scan for the
    longest parseable formula substring."""
    from .parser import FormulaSyntaxError

    cleaned = answer.strip().strip("`").strip("$").strip()
    try:
        return parse_formula(cleaned, sig)
    except FolbenchError:
        pass
    text = cleaned[:800]
    best = None
    best_len = 0
    starts = [
        i
        for i, ch in enumerate(text)
        if ch in _FORMULA_START or (ch.isalpha() and (i == 0 or not text[i - 1].isalnum()))
    ]
    for start in starts:
        tail = text[start:]
        for candidate in _prefix_candidates(tail, sig):
            if candidate is not None and len(candidate[0]) > best_len:
                best, best_len = candidate[1], len(candidate[0])
    return best


def _prefix_candidates(tail: str, sig):
    from .parser import FormulaSyntaxError

    try:
        yield tail, parse_formula(tail, sig)
        return
    except FormulaSyntaxError as exc:
        cut = exc.position
    except FolbenchError:
        return
    if 0 < cut <= len(tail):
        prefix = tail[:cut].rstrip()
        if prefix:
            try:
                yield prefix, parse_formula(prefix, sig)
            except FolbenchError:
                return


def cosine(a: Sequence[float], b: Sequence[float]) -> float:
    if len(a) != len(b):
        raise DimensionMismatch(f"vector lengths differ: {len(a)} vs {len(b)}")
    dot = math.fsum(x * y for x, y in zip(a, b))
    na = math.sqrt(math.fsum(x * x for x in a))
    nb = math.sqrt(math.fsum(y * y for y in b))
    if na == 0 or nb == 0:
        return 0.0
    return dot / (na * nb)


# ---------------------------------------------------------------------------
# Workers
# ---------------------------------------------------------------------------


def _translation_worker(cfg: RunConfig, client: ModelClient, inst: Instance, seed: int) -> RunRecord:
    started = time.monotonic()
    system, user = render_prompt(1, inst)
    flags: list[str] = []
    verdict_name = None
    scores: dict = {"score": 0}
    answer_text = None
    raw = ""
    try:
        reply = _chat_with_retry(client, cfg, system, user, seed, schema_for("text"))
        raw = json.dumps(reply, ensure_ascii=False, sort_keys=True)
        answer_text = reply.get("answer")
    except ClientError:
        flags.append("client_error")
    parsed = None
    if answer_text is not None and isinstance(answer_text, str):
        parsed = extract_formula(answer_text, inst.ontology.signature)
    if parsed is None:
        if "client_error" not in flags:
            flags.append("malformed")
    else:
        scores["bleu"] = metrics.bleu_formula(inst.formula, parsed)
        try:
            matching = metrics.default_matching(inst.formula, parsed)
            scores["le"] = float(metrics.le_score(inst.formula, parsed, matching))
        except FolbenchError:
            scores["le"] = None
        sig = inst.ontology.signature
        verdict = solver_check(parsed, inst.formula, sig, config=cfg.solver)
        verdict_name = verdict.kind
        if verdict.is_equivalent:
            scores["score"] = 1
        elif verdict.is_unknown:
            flags.append("solver_unknown")
    return RunRecord(
        inst.id,
        seed,
        TASK_TRANSLATION,
        cfg.variant,
        system,
        user,
        raw,
        print_formula(parsed) if parsed is not None else answer_text,
        verdict_name,
        scores,
        tuple(flags),
        time.monotonic() - started,
    )


def _build_candidate_set(cfg: RunConfig, inst: Instance, seed: int) -> CandidateSet:
    kwargs = dict(
        k=cfg.effective_k,
        seed=seed,
        variant=cfg.variant,
        compute_equiv_flags=cfg.compute_equiv_flags,
    )
    if cfg.task == MOST_SIMILAR:
        return build_most_similar(inst, **kwargs)
    return build_ranking(inst, **kwargs)


def _choice_worker(cfg: RunConfig, client: ModelClient, inst: Instance, seed: int) -> RunRecord:
    started = time.monotonic()
    cset = _build_candidate_set(cfg, inst, seed)
    template = 3 if cfg.task == MOST_SIMILAR else 5
    system, user = render_prompt(template, inst, cset)
    answer_type = "integer" if cfg.task == MOST_SIMILAR else "integer_list"
    flags = list(cset.flags)
    raw = ""
    answer = None
    scores: dict = (
        {"score": 0} if cfg.task == MOST_SIMILAR else {"eq": 0, "neg": 0, "both": 0}
    )
    try:
        reply = _chat_with_retry(client, cfg, system, user, seed, schema_for(answer_type))
        raw = json.dumps(reply, ensure_ascii=False, sort_keys=True)
        answer = reply.get("answer")
    except ClientError:
        flags.append("client_error")
    if "client_error" not in flags:
        try:
            if cfg.task == MOST_SIMILAR:
                position = int(answer)
                scores["score"] = metrics.score_most_similar(position, cset)
                if scores["score"] == 0:
                    picked = cset.candidates[position - 1]
                    if picked.equiv_to_original:
                        flags.append("equiv_to_original")
            else:
                ranking = [int(x) for x in answer]
                eq, neg, both = metrics.score_ranking(ranking, cset)
                scores.update({"eq": eq, "neg": neg, "both": both})
        except (metrics.PositionOutOfRange, metrics.NotAPermutation,
                TypeError, ValueError):
            flags.append("malformed")
    return RunRecord(
        inst.id,
        seed,
        cfg.task,
        cfg.variant,
        system,
        user,
        raw,
        answer,
        None,
        scores,
        tuple(flags),
        time.monotonic() - started,
    )


def _embedding_worker(cfg: RunConfig, client: ModelClient, inst: Instance, seed: int) -> RunRecord:
    import hashlib

    started = time.monotonic()
    cset = _build_candidate_set(cfg, inst, seed)
    texts = cset.prompt_texts()
    flags = list(cset.flags)
    reference_instruction = (
        cfg.model.embedding_instruction_reference or cfg.model.embedding_instruction
    )
    reference = client.embed(inst.utterance, reference_instruction)
    vectors = [client.embed(t, cfg.model.embedding_instruction) for t in texts]
    for v in vectors:
        if len(v) != len(reference):
            raise DimensionMismatch(
                f"instance {inst.id!r}: embedding dimensions differ"
            )
    sims = [cosine(reference, v) for v in vectors]
    digest = hashlib.sha256(
        json.dumps([round(x, 8) for v in [reference, *vectors] for x in v]).encode()
    ).hexdigest()

    if len(set(sims)) < len(sims):
        flags.append("tie")
    # ties break toward the lower position index
    order = sorted(range(1, len(sims) + 1), key=lambda i: (-sims[i - 1], i))
    if cfg.task == MOST_SIMILAR:
        choice = order[0]
        scores = {"score": metrics.score_most_similar(choice, cset)}
        answer: object = {"embedding_digest": digest, "choice": choice}
    else:
        eq, neg, both = metrics.score_ranking(order, cset)
        scores = {"eq": eq, "neg": neg, "both": both}
        answer = {"embedding_digest": digest, "order": order}
    return RunRecord(
        inst.id,
        seed,
        cfg.task,
        cfg.variant,
        "",
        "",
        "",
        answer,
        None,
        scores,
        tuple(flags),
        time.monotonic() - started,
    )


# ---------------------------------------------------------------------------
# Run drivers
# ---------------------------------------------------------------------------


def _score_records(records: list[RunRecord]) -> metrics.ScoreReport:
    out: list[metrics.ScoreRecord] = []
    for r in records:
        if "score" in r.scores:
            out.append(
                metrics.ScoreRecord(r.instance_id, r.seed, r.task, r.variant,
                                    float(r.scores["score"]), r.flags)
            )
        else:
            for key, task in (("eq", "ranking_equivalence"), ("neg", "ranking_negation"),
                              ("both", "ranking_both")):
                out.append(
                    metrics.ScoreRecord(r.instance_id, r.seed, task, r.variant,
                                        float(r.scores[key]), r.flags)
                )
    return metrics.ScoreReport(tuple(out))


def _correlations(records: list[RunRecord]) -> dict | None:
    usable = [
        r for r in records
        if r.task == TASK_TRANSLATION and r.scores.get("bleu") is not None
    ]
    if len(usable) < 2:
        return None
    outcomes = [int(r.scores["score"]) for r in usable]
    result: dict = {"n": len(usable)}
    for key in ("bleu", "le"):
        values = [r.scores.get(key) for r in usable]
        if any(v is None for v in values):
            result[f"r_pb_{key}"] = None
            continue
        try:
            result[f"r_pb_{key}"] = metrics.point_biserial(outcomes, values)
        except metrics.DegenerateGroups:
            result[f"r_pb_{key}"] = None
    return result


def _execute(cfg: RunConfig, client: ModelClient, worker: Callable) -> tuple[list[RunRecord], Path]:
    instances = ingest_dataset(cfg.dataset, cfg.dataset_format)
    seeds = cfg.seeds if cfg.model.kind == "dialogue" else cfg.seeds[:1]
    jobs = [(inst, seed) for inst in instances for seed in seeds]
    results: dict[tuple[str, int], RunRecord] = {}
    with ThreadPoolExecutor(max_workers=cfg.concurrency) as pool:
        futures = {
            pool.submit(worker, cfg, client, inst, seed): (inst.id, seed)
            for inst, seed in jobs
        }
        for future, key in futures.items():
            results[key] = future.result()
    records = [results[key] for key in sorted(results)]

    run_id = cfg.run_id or time.strftime("%Y%m%d-%H%M%S")
    run_dir = Path(cfg.output_dir) / run_id
    run_dir.mkdir(parents=True, exist_ok=True)
    with open(run_dir / "config.json", "w", encoding="utf-8") as fh:
        json.dump(cfg.to_json_dict(), fh, ensure_ascii=False, indent=2, sort_keys=True)
        fh.write("\n")
    with open(run_dir / "records.jsonl", "w", encoding="utf-8") as fh:
        for r in records:
            fh.write(json.dumps(r.to_json_dict(), ensure_ascii=False, sort_keys=True) + "\n")
    report = _score_records(records)
    payload = {"config": cfg.to_json_dict(), **report.to_json_dict()}
    correlations = _correlations(records)
    if correlations is not None:
        payload["correlations"] = correlations
    with open(run_dir / "report.json", "w", encoding="utf-8") as fh:
        json.dump(payload, fh, ensure_ascii=False, indent=2, sort_keys=True)
        fh.write("\n")
    report.write_csv(run_dir / "report.csv")
    return records, run_dir


def run_logical_translation(cfg: RunConfig, client: ModelClient) -> metrics.ScoreReport:
    """Translate each utterance, solver-check against gold, score 0/1."""
    if cfg.task != TASK_TRANSLATION:
        raise ValueError("config task must be logical_translation")
    records, _ = _execute(cfg, client, _translation_worker)
    return _score_records(records)


def run_choice_task(cfg: RunConfig, client: ModelClient) -> metrics.ScoreReport:
    """Most-similar or ranking with a dialogue client."""
    if cfg.task not in (MOST_SIMILAR, RANKING):
        raise ValueError("config task must be most_similar or ranking")
    records, _ = _execute(cfg, client, _choice_worker)
    return _score_records(records)


def run_embedding_task(cfg: RunConfig, client: ModelClient) -> metrics.ScoreReport:
    """Most-similar or ranking by cosine similarity of embeddings.

    Embeddings are deterministic, so each instance is queried once (the first
    configured seed drives candidate generation)."""
    if cfg.task not in (MOST_SIMILAR, RANKING):
        raise ValueError("config task must be most_similar or ranking")
    if cfg.model.kind != "embedding":
        raise ValueError("embedding task needs an embedding model")
    records, _ = _execute(cfg, client, _embedding_worker)
    return _score_records(records)


def run(cfg: RunConfig, client: ModelClient) -> metrics.ScoreReport:
    """Dispatch on task and model kind."""
    if cfg.task == TASK_TRANSLATION:
        return run_logical_translation(cfg, client)
    if cfg.model.kind == "embedding":
        return run_embedding_task(cfg, client)
    return run_choice_task(cfg, client)


def load_records(run_dir: str | Path) -> list[RunRecord]:
    records = []
    with open(Path(run_dir) / "records.jsonl", encoding="utf-8") as fh:
        for line in fh:
            d = json.loads(line)
            records.append(
                RunRecord(
                    d["instance_id"],
                    d["seed"],
                    d["task"],
                    d["variant"],
                    d["prompts"]["system"],
                    d["prompts"]["user"],
                    d["raw_reply"],
                    d["answer"],
                    d["verdict"],
                    d["scores"],
                    tuple(d["flags"]),
                    d["wall_time"],
                )
            )
    return records


def rebuild_report(run_dir: str | Path) -> dict:
    """Recompute report.json and report.csv from stored records."""
    run_dir = Path(run_dir)
    records = load_records(run_dir)
    report = _score_records(records)
    with open(run_dir / "config.json", encoding="utf-8") as fh:
        config = json.load(fh)
    payload = {"config": config, **report.to_json_dict()}
    correlations = _correlations(records)
    if correlations is not None:
        payload["correlations"] = correlations
    with open(run_dir / "report.json", "w", encoding="utf-8") as fh:
        json.dump(payload, fh, ensure_ascii=False, indent=2, sort_keys=True)
        fh.write("\n")
    report.write_csv(run_dir / "report.csv")
    return payload
