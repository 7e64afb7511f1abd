"""Candidate generation: perturbations, equivalent rewrites, task sets.

A perturbation is one elementary edit: swapping a binary connective for one
of the other three, flipping a quantifier, or toggling the negation in front
of a literal.  An equivalent rewrite applies one named equivalence (De
Morgan, double negation, commutativity, distributivity, implication
expansion) at one subformula.  Candidate sets bundle the original formula
with such variants, shuffled deterministically.

All randomness is derived from explicit seeds through SHA-256, so a
candidate set is a pure function of (seed, instance id, task); adding
instances to a dataset never reshuffles the others, and serialization is
byte-stable.
"""

from __future__ import annotations

import hashlib
import json
import random
from dataclasses import dataclass

from .nlgen import translate
from .ontology import Instance
from .syntax import (
    And,
    Atom,
    BINARY_TYPES,
    Exists,
    FolbenchError,
    Forall,
    Formula,
    Iff,
    Implies,
    Not,
    Or,
    QUANTIFIER_TYPES,
    negate,
    print_formula,
    replace_at,
    subformulas,
    to_nnf,
)

MOST_SIMILAR = "most_similar"
RANKING = "ranking"

EDIT_CONNECTIVE = "connective_swap"
EDIT_QUANTIFIER = "quantifier_flip"
EDIT_LITERAL = "literal_negation"


class RewriteVerificationError(FolbenchError):
    pass


def derive_seed(*parts) -> int:
    """Stable 63-bit stream seed from arbitrary parts (SHA-256 based)."""
    text = "\x1f".join(str(p) for p in parts)
    digest = hashlib.sha256(text.encode()).digest()
    return int.from_bytes(digest[:8], "big") >> 1


# ---------------------------------------------------------------------------
# Elementary perturbations
# ---------------------------------------------------------------------------

_CONNECTIVES = (And, Or, Implies, Iff)


def enumerate_perturbations(f: Formula) -> list[tuple[Formula, str, int]]:
    """Every formula at elementary edit distance one from f.

    Results are deduplicated structurally and never include f itself; edits
    that happen to reproduce f (there are none for these three kinds, but the
    guard is cheap) are dropped.  Site indices are preorder positions.
    """
    out: list[tuple[Formula, str, int]] = []
    seen: set[Formula] = {f}
    nodes = list(subformulas(f))
    # parent of each site, for positive-literal detection
    node_at = dict(nodes)
    parent_of: dict[tuple[int, ...], Formula | None] = {
        path: (node_at[path[:-1]] if path else None) for path, _ in nodes
    }

    def emit(candidate: Formula, kind: str, site: int) -> None:
        if candidate not in seen:
            seen.add(candidate)
            out.append((candidate, kind, site))

    for site, (path, node) in enumerate(nodes):
        if isinstance(node, _CONNECTIVES):
            for other in _CONNECTIVES:
                if other is type(node):
                    continue
                emit(replace_at(f, path, other(node.left, node.right)), EDIT_CONNECTIVE, site)
        elif isinstance(node, Forall):
            emit(replace_at(f, path, Exists(node.var, node.body)), EDIT_QUANTIFIER, site)
        elif isinstance(node, Exists):
            emit(replace_at(f, path, Forall(node.var, node.body)), EDIT_QUANTIFIER, site)
        elif isinstance(node, Not) and isinstance(node.operand, Atom):
            emit(replace_at(f, path, node.operand), EDIT_LITERAL, site)
        elif isinstance(node, Atom) and not isinstance(parent_of[path], Not):
            emit(replace_at(f, path, Not(node)), EDIT_LITERAL, site)
    return out


def sample_perturbations(f: Formula, k: int, seed: int) -> list[Formula]:
    """Uniform sample without replacement of up to k perturbations."""
    return [g for g, _, _ in _sample_labeled_perturbations(f, k, seed)]


def _sample_labeled_perturbations(f: Formula, k: int, seed: int) -> list[tuple[Formula, str, int]]:
    if k < 1:
        raise ValueError("k must be at least 1")
    pool = enumerate_perturbations(f)
    rng = random.Random(seed)
    return rng.sample(pool, min(k, len(pool)))


# ---------------------------------------------------------------------------
# Equivalence-preserving rewrite
# ---------------------------------------------------------------------------

RULE_DE_MORGAN = "de_morgan"
RULE_DOUBLE_NEGATION = "double_negation"
RULE_COMMUTATIVITY = "commutativity"
RULE_DISTRIBUTIVITY = "distributivity"
RULE_IMPLICATION_EXPANSION = "implication_expansion"


def _rule_applications(node: Formula) -> list[tuple[str, Formula]]:
    apps: list[tuple[str, Formula]] = []
    if isinstance(node, Not) and isinstance(node.operand, And):
        apps.append((RULE_DE_MORGAN, Or(Not(node.operand.left), Not(node.operand.right))))
    if isinstance(node, Not) and isinstance(node.operand, Or):
        apps.append((RULE_DE_MORGAN, And(Not(node.operand.left), Not(node.operand.right))))
    # a == not(nnf(not a)), applicable anywhere
    apps.append((RULE_DOUBLE_NEGATION, Not(to_nnf(Not(node)))))
    if isinstance(node, And):
        apps.append((RULE_COMMUTATIVITY, And(node.right, node.left)))
        if isinstance(node.right, Or):
            apps.append(
                (
                    RULE_DISTRIBUTIVITY,
                    Or(
                        And(node.left, node.right.left),
                        And(node.left, node.right.right),
                    ),
                )
            )
    if isinstance(node, Or):
        apps.append((RULE_COMMUTATIVITY, Or(node.right, node.left)))
        if isinstance(node.right, And):
            apps.append(
                (
                    RULE_DISTRIBUTIVITY,
                    And(
                        Or(node.left, node.right.left),
                        Or(node.left, node.right.right),
                    ),
                )
            )
    if isinstance(node, Implies):
        apps.append((RULE_IMPLICATION_EXPANSION, Or(Not(node.left), node.right)))
    return apps


def equivalent_rewrite(f: Formula, seed: int) -> tuple[Formula, str]:
    """Apply one uniformly chosen applicable (subformula, rule) pair.

    The result is logically equivalent to f and structurally distinct from it
    (identity applications, such as commuting a & a or double-negating a
    negative literal, are excluded from the choice).  Double negation applies
    to every subformula, so the pool is never empty.
    """
    pool: list[tuple[Formula, str]] = []
    for path, node in subformulas(f):
        for rule, rewritten in _rule_applications(node):
            candidate = replace_at(f, path, rewritten)
            if candidate != f:
                pool.append((candidate, rule))
    rng = random.Random(seed)
    return rng.choice(pool)


# ---------------------------------------------------------------------------
# Candidate sets
# ---------------------------------------------------------------------------

LABEL_ORIGINAL = "original"
LABEL_PERTURBATION = "perturbation"
LABEL_NEGATION = "negation"
LABEL_NEGATION_NNF = "negation_nnf"
LABEL_EQUIVALENT = "equivalent"


@dataclass(frozen=True)
class CandidateLabel:
    kind: str
    edit_kind: str | None = None
    site_index: int | None = None
    rule_name: str | None = None

    @staticmethod
    def original() -> "CandidateLabel":
        return CandidateLabel(LABEL_ORIGINAL)

    @staticmethod
    def perturbation(edit_kind: str, site_index: int) -> "CandidateLabel":
        return CandidateLabel(LABEL_PERTURBATION, edit_kind=edit_kind, site_index=site_index)

    @staticmethod
    def negation() -> "CandidateLabel":
        return CandidateLabel(LABEL_NEGATION)

    @staticmethod
    def negation_nnf() -> "CandidateLabel":
        return CandidateLabel(LABEL_NEGATION_NNF)

    @staticmethod
    def equivalent(rule_name: str) -> "CandidateLabel":
        return CandidateLabel(LABEL_EQUIVALENT, rule_name=rule_name)


@dataclass(frozen=True)
class Candidate:
    text: str  # what the model sees: the formula string or its NL rendering
    formula: str  # canonical formula string, kept for provenance
    label: CandidateLabel
    equiv_to_original: bool | None = None  # oracle could not distinguish (bounded)


@dataclass(frozen=True)
class AnswerPositions:
    original: int
    equivalent: int | None = None
    negation: int | None = None
    negation_nnf: int | None = None


@dataclass(frozen=True)
class CandidateSet:
    instance_id: str
    task: str
    variant: str  # "fol" | "nl"
    k: int
    seed: int
    shuffle_seed: int
    candidates: tuple[Candidate, ...]
    answer_positions: AnswerPositions
    flags: tuple[str, ...] = ()

    def __len__(self) -> int:
        return len(self.candidates)

    def prompt_texts(self) -> list[str]:
        """Candidate texts in shuffled order; carries no labels or answers."""
        return [c.text for c in self.candidates]

    def to_dict(self, include_answers: bool = True) -> dict:
        data = {
            "instance_id": self.instance_id,
            "task": self.task,
            "variant": self.variant,
            "k": self.k,
            "seed": self.seed,
            "candidates": [c.text for c in self.candidates],
        }
        if include_answers:
            data["shuffle_seed"] = self.shuffle_seed
            data["flags"] = list(self.flags)
            data["labels"] = [
                {
                    "kind": c.label.kind,
                    "edit_kind": c.label.edit_kind,
                    "site_index": c.label.site_index,
                    "rule_name": c.label.rule_name,
                    "formula": c.formula,
                    "equiv_to_original": c.equiv_to_original,
                }
                for c in self.candidates
            ]
            data["answer_positions"] = {
                "original": self.answer_positions.original,
                "equivalent": self.answer_positions.equivalent,
                "negation": self.answer_positions.negation,
                "negation_nnf": self.answer_positions.negation_nnf,
            }
        return data

    def to_json(self, include_answers: bool = True) -> str:
        return json.dumps(
            self.to_dict(include_answers), ensure_ascii=False, sort_keys=True,
            separators=(",", ":"),
        )


def _render(formula: Formula, inst: Instance, variant: str) -> str:
    if variant == "nl":
        return translate(formula, inst.ontology.glossary)
    return print_formula(formula)


def _compute_equiv_flag(inst, original, candidate, max_domain, budget):
    from .equiv import brute_force_check  # local import keeps module load light

    verdict = brute_force_check(
        original, candidate, inst.ontology.signature, max_domain=max_domain, budget=budget
    )
    return not verdict.is_not_equivalent


def _assemble(
    inst: Instance,
    task: str,
    variant: str,
    k: int,
    seed: int,
    specials: list[tuple[Formula, CandidateLabel]],
    perturbations: list[tuple[Formula, str, int]],
    flags: list[str],
    compute_equiv_flags: bool,
    oracle_max_domain: int,
    oracle_budget: int,
) -> CandidateSet:
    if variant not in ("fol", "nl"):
        raise ValueError(f"variant must be 'fol' or 'nl', got {variant!r}")
    original = inst.formula
    entries: list[Candidate] = [
        Candidate(_render(original, inst, variant), print_formula(original), CandidateLabel.original())
    ]
    taken_texts = {entries[0].text}
    for formula, edit_kind, site in perturbations:
        text = _render(formula, inst, variant)
        if text in taken_texts:
            continue  # indistinguishable in this variant; the labeled entries win
        flag = None
        if compute_equiv_flags:
            flag = _compute_equiv_flag(inst, original, formula, oracle_max_domain, oracle_budget)
        taken_texts.add(text)
        entries.append(
            Candidate(text, print_formula(formula), CandidateLabel.perturbation(edit_kind, site), flag)
        )
    for formula, label in specials:
        entries.append(Candidate(_render(formula, inst, variant), print_formula(formula), label))

    shuffle_seed = derive_seed(seed, inst.id, task, variant, "shuffle")
    order = list(range(len(entries)))
    random.Random(shuffle_seed).shuffle(order)
    shuffled = tuple(entries[i] for i in order)

    def position(kind: str) -> int | None:
        for idx, cand in enumerate(shuffled, start=1):
            if cand.label.kind == kind:
                return idx
        return None

    positions = AnswerPositions(
        original=position(LABEL_ORIGINAL),
        equivalent=position(LABEL_EQUIVALENT),
        negation=position(LABEL_NEGATION),
        negation_nnf=position(LABEL_NEGATION_NNF),
    )
    return CandidateSet(
        instance_id=inst.id,
        task=task,
        variant=variant,
        k=k,
        seed=seed,
        shuffle_seed=shuffle_seed,
        candidates=shuffled,
        answer_positions=positions,
        flags=tuple(flags),
    )


def build_most_similar(
    inst: Instance,
    k: int = 8,
    seed: int = 0,
    variant: str = "fol",
    *,
    compute_equiv_flags: bool = False,
    oracle_max_domain: int = 2,
    oracle_budget: int = 2000,
) -> CandidateSet:
    """The original formula plus up to k sampled perturbations, shuffled."""
    sample_seed = derive_seed(seed, inst.id, MOST_SIMILAR, "sample")
    perturbations = _sample_labeled_perturbations(inst.formula, k, sample_seed)
    return _assemble(
        inst,
        MOST_SIMILAR,
        variant,
        k,
        seed,
        specials=[],
        perturbations=perturbations,
        flags=[],
        compute_equiv_flags=compute_equiv_flags,
        oracle_max_domain=oracle_max_domain,
        oracle_budget=oracle_budget,
    )


def build_ranking(
    inst: Instance,
    k: int = 3,
    seed: int = 0,
    variant: str = "fol",
    *,
    verify_equivalent=None,
    compute_equiv_flags: bool = False,
    oracle_max_domain: int = 2,
    oracle_budget: int = 2000,
) -> CandidateSet:
    """Original, up to k perturbations, the negation pair, and a rewrite.

    Perturbations are sampled freshly (a stream separate from the
    most-similar task).  When the negation is already in negation normal
    form, the two negation entries coincide; the pair is kept and the set is
    flagged "degenerate_negation_pair".  verify_equivalent, when given, is
    called with (formula, rewrite, signature) and must return an EquivVerdict;
    a NotEquivalent verdict aborts generation.
    """
    formula = inst.formula
    sample_seed = derive_seed(seed, inst.id, RANKING, "sample")
    rewrite_seed = derive_seed(seed, inst.id, RANKING, "rewrite")
    perturbations = _sample_labeled_perturbations(formula, k, sample_seed)

    negation = negate(formula)
    negation_nnf = to_nnf(negation)
    rewritten, rule = equivalent_rewrite(formula, rewrite_seed)
    if verify_equivalent is not None:
        verdict = verify_equivalent(formula, rewritten, inst.ontology.signature)
        if verdict.is_not_equivalent:
            raise RewriteVerificationError(
                f"rewrite by {rule!r} for instance {inst.id!r} was refuted: "
                f"{print_formula(rewritten)}"
            )

    flags = []
    if negation_nnf == negation:
        flags.append("degenerate_negation_pair")
    # Perturbations that collide with a labeled special are dropped; the
    # negation pair itself is exempt from text deduplication.
    special_texts = {
        _render(g, inst, variant) for g in (negation, negation_nnf, rewritten)
    }
    perturbations = [
        p for p in perturbations if _render(p[0], inst, variant) not in special_texts
    ]
    specials = [
        (negation, CandidateLabel.negation()),
        (negation_nnf, CandidateLabel.negation_nnf()),
        (rewritten, CandidateLabel.equivalent(rule)),
    ]
    return _assemble(
        inst,
        RANKING,
        variant,
        k,
        seed,
        specials=specials,
        perturbations=perturbations,
        flags=flags,
        compute_equiv_flags=compute_equiv_flags,
        oracle_max_domain=oracle_max_domain,
        oracle_budget=oracle_budget,
    )
