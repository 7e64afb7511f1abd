"""Dataset ingestion.

Two layouts are understood, both JSON Lines:

triple_jsonl - one instance per line:

    {"id": "s1", "nl": "Some cube is small.",
     "fol": "∃x Cube(x) ∧ Small(x)",
     "ontology": {...} | "relative/path/to/ontology.json"}

folio_like - one story per line, premises sharing the story ontology:

    {"story_id": 8, "ontology": {...},
     "premises": [{"nl": ..., "fol": ...}, ...]}

Records whose formula uses XOR are dropped (the drop count is logged);
anything else malformed raises ParseFailure naming the record.
"""

from __future__ import annotations

import json
import logging
from pathlib import Path

from .ontology import Instance, Ontology, ontology_from_dict
from .parser import XorUnsupported, parse_formula
from .syntax import FolbenchError

log = logging.getLogger(__name__)


class ParseFailure(FolbenchError):
    def __init__(self, record_id: str, detail: str):
        self.record_id = record_id
        super().__init__(f"record {record_id!r}: {detail}")


class OntologyMismatch(FolbenchError):
    def __init__(self, record_id: str, detail: str):
        self.record_id = record_id
        super().__init__(f"record {record_id!r}: {detail}")


def _load_lines(path: Path) -> list[dict]:
    records = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                records.append(json.loads(line))
            except json.JSONDecodeError as exc:
                raise ParseFailure(f"{path.name}:{lineno}", f"invalid JSON: {exc}") from exc
    return records


def _resolve_ontology(spec, base: Path, cache: dict) -> Ontology:
    if isinstance(spec, str):
        key = str((base / spec).resolve())
        if key not in cache:
            with open(key, encoding="utf-8") as fh:
                cache[key] = ontology_from_dict(json.load(fh))
        return cache[key]
    key = json.dumps(spec, sort_keys=True)
    if key not in cache:
        cache[key] = ontology_from_dict(spec)
    return cache[key]


def _make_instance(record_id: str, nl: str, fol: str, ontology: Ontology) -> Instance | None:
    """Build one instance; None signals an XOR record to drop."""
    try:
        formula = parse_formula(fol, ontology.signature)
    except XorUnsupported:
        return None
    except FolbenchError as exc:
        raise ParseFailure(record_id, str(exc)) from exc
    try:
        return Instance(record_id, nl, formula, ontology)
    except (FolbenchError, ValueError) as exc:
        raise OntologyMismatch(record_id, str(exc)) from exc


def ingest_dataset(path: str | Path, format: str = "triple_jsonl") -> list[Instance]:
    """Parse a dataset file into instances, dropping XOR records."""
    path = Path(path)
    cache: dict = {}
    instances: list[Instance] = []
    dropped = 0

    if format == "triple_jsonl":
        for record in _load_lines(path):
            record_id = str(record.get("id", f"record{len(instances) + dropped}"))
            for field in ("nl", "fol", "ontology"):
                if field not in record:
                    raise ParseFailure(record_id, f"missing field {field!r}")
            ontology = _resolve_ontology(record["ontology"], path.parent, cache)
            inst = _make_instance(record_id, record["nl"], record["fol"], ontology)
            if inst is None:
                dropped += 1
            else:
                instances.append(inst)
    elif format == "folio_like":
        for record in _load_lines(path):
            story_id = record.get("story_id")
            if story_id is None or "ontology" not in record or "premises" not in record:
                raise ParseFailure(str(story_id), "story needs story_id, ontology, premises")
            ontology = _resolve_ontology(record["ontology"], path.parent, cache)
            for i, premise in enumerate(record["premises"], start=1):
                record_id = str(premise.get("id", f"{story_id}-p{i}"))
                if "nl" not in premise or "fol" not in premise:
                    raise ParseFailure(record_id, "premise needs nl and fol")
                inst = _make_instance(record_id, premise["nl"], premise["fol"], ontology)
                if inst is None:
                    dropped += 1
                else:
                    instances.append(inst)
    else:
        raise ValueError(f"unknown dataset format {format!r}")

    if dropped:
        log.info("dropped %d record(s) containing XOR from %s", dropped, path)
    return instances


def write_dataset(instances: list[Instance], path: str | Path) -> None:
    """Serialize instances as triple_jsonl with inline ontologies."""
    from .ontology import ontology_to_dict
    from .syntax import print_formula

    with open(path, "w", encoding="utf-8") as fh:
        for inst in instances:
            fh.write(
                json.dumps(
                    {
                        "id": inst.id,
                        "nl": inst.utterance,
                        "fol": print_formula(inst.formula),
                        "ontology": ontology_to_dict(inst.ontology),
                    },
                    ensure_ascii=False,
                    sort_keys=True,
                )
                + "\n"
            )
