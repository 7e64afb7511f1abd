"""Reference metrics and task scoring.

le_score and bleu_formula reimplement the truth-table agreement metric and
raw BLEU over formula strings, the two similarity scores this harness exists
to contrast with solver-verified equivalence.  score_most_similar and
score_ranking implement the positional success criteria of the selection
tasks, and point_biserial is the correlation used to compare metrics against
binary task outcomes.
"""

from __future__ import annotations

import csv
import json
import math
import statistics
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Iterable, NamedTuple, Sequence

from .parser import tokenize_texts
from .syntax import (
    And,
    Atom,
    BINARY_TYPES,
    FolbenchError,
    Formula,
    Iff,
    Implies,
    Not,
    Or,
    QUANTIFIER_TYPES,
    print_formula,
    subformulas,
)
from .transform import CandidateSet


class MatchingIncomplete(FolbenchError):
    pass


class PositionOutOfRange(FolbenchError):
    pass


class NotAPermutation(FolbenchError):
    pass


class DegenerateGroups(FolbenchError):
    pass


# ---------------------------------------------------------------------------
# Predicate matching
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PredicateMatching:
    """Injective pairing between the predicate symbols of two formulas.

    Unmatched predicates on either side are paired with fresh dummy symbols,
    i.e. they become independent propositional variables.
    """

    pairs: dict[str, str] = field(default_factory=dict)
    dummies_left: tuple[str, ...] = ()
    dummies_right: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "pairs", dict(self.pairs))
        object.__setattr__(self, "dummies_left", tuple(self.dummies_left))
        object.__setattr__(self, "dummies_right", tuple(self.dummies_right))
        values = list(self.pairs.values())
        if len(values) != len(set(values)):
            raise MatchingIncomplete("matching is not injective")

    def inverted(self) -> "PredicateMatching":
        return PredicateMatching(
            {v: k for k, v in self.pairs.items()},
            self.dummies_right,
            self.dummies_left,
        )


def _predicates_in_order(f: Formula) -> list[str]:
    seen: dict[str, None] = {}
    for _, node in sorted(subformulas(f), key=lambda pn: pn[0]):
        if isinstance(node, Atom) and node.predicate not in seen:
            seen[node.predicate] = None
    return list(seen)


def _levenshtein(a: str, b: str) -> int:
    if len(a) < len(b):
        a, b = b, a
    previous = list(range(len(b) + 1))
    for i, ca in enumerate(a, start=1):
        current = [i]
        for j, cb in enumerate(b, start=1):
            current.append(
                min(previous[j] + 1, current[j - 1] + 1, previous[j - 1] + (ca != cb))
            )
        previous = current
    return previous[-1]


def _camel_tokens(name: str) -> frozenset[str]:
    import re

    parts = re.findall(r"[A-Z]+(?![a-z])|[A-Z][a-z0-9]*|[a-z0-9]+", name)
    return frozenset(p.casefold() for p in parts)


def name_similarity(a: str, b: str) -> float:
    """Casefolded Levenshtein ratio, boosted by camel-case token overlap.

    The token Jaccard term makes embedded words count: "InEU" sits inside
    "CountryInEU" as whole tokens and should outrank a merely long shared
    prefix.
    """
    fa, fb = a.casefold(), b.casefold()
    lev = 1.0 - _levenshtein(fa, fb) / max(len(fa), len(fb), 1)
    ta, tb = _camel_tokens(a), _camel_tokens(b)
    jaccard = len(ta & tb) / len(ta | tb) if ta | tb else 0.0
    return max(lev, jaccard)


def default_matching(f1: Formula, f2: Formula, threshold: float = 0.5) -> PredicateMatching:
    """Exact-name pairs first, then greedy pairing by descending similarity
    above the threshold; everything left over gets a dummy."""
    left = _predicates_in_order(f1)
    right = _predicates_in_order(f2)
    pairs: dict[str, str] = {}
    for name in list(left):
        if name in right:
            pairs[name] = name
    unmatched_left = [p for p in left if p not in pairs]
    unmatched_right = [p for p in right if p not in pairs.values()]
    scored = sorted(
        (
            (name_similarity(l, r), l, r)
                for l in unmatched_left
                for r in unmatched_right
        ),
        key=lambda t: (-t[0], t[1], t[2]),
    )
    for score, l, r in scored:
        if score <= threshold:
            break
        if l not in pairs and r not in pairs.values():
            pairs[l] = r
    dummies_left = tuple(p for p in left if p not in pairs)
    dummies_right = tuple(p for p in right if p not in pairs.values())
    return PredicateMatching(pairs, dummies_left, dummies_right)


# ---------------------------------------------------------------------------
# LE score (propositional truth-table agreement)
# ---------------------------------------------------------------------------


def _strip_quantifiers(f: Formula) -> Formula:
    if isinstance(f, QUANTIFIER_TYPES):
        return _strip_quantifiers(f.body)
    if isinstance(f, Atom):
        return f
    if isinstance(f, Not):
        return Not(_strip_quantifiers(f.operand))
    return type(f)(_strip_quantifiers(f.left), _strip_quantifiers(f.right))


def _prop_eval(f: Formula, values: dict[str, bool], var_of: dict[str, str]) -> bool:
    if isinstance(f, Atom):
        return values[var_of[f.predicate]]
    if isinstance(f, Not):
        return not _prop_eval(f.operand, values, var_of)
    if isinstance(f, And):
        return _prop_eval(f.left, values, var_of) and _prop_eval(f.right, values, var_of)
    if isinstance(f, Or):
        return _prop_eval(f.left, values, var_of) or _prop_eval(f.right, values, var_of)
    if isinstance(f, Implies):
        return (not _prop_eval(f.left, values, var_of)) or _prop_eval(f.right, values, var_of)
    if isinstance(f, Iff):
        return _prop_eval(f.left, values, var_of) == _prop_eval(f.right, values, var_of)
    raise AssertionError("quantifiers were stripped")


def _shared_variables(
    f1: Formula, f2: Formula, matching: PredicateMatching
) -> tuple[list[str], dict[str, str], dict[str, str]]:
    """Variable display names in column order plus per-side predicate maps.

    Variables are ordered by first appearance in f1, then f2-only dummies by
    first appearance in f2; the last variable toggles fastest (low bit
    rightmost)."""
    left_preds = _predicates_in_order(f1)
    right_preds = _predicates_in_order(f2)
    var_left: dict[str, str] = {}
    var_right: dict[str, str] = {}
    order: list[str] = []
    for p in left_preds:
        if p in matching.pairs:
            name = f"{p}-{matching.pairs[p]}"
            var_left[p] = name
            var_right[matching.pairs[p]] = name
        elif p in matching.dummies_left:
            name = f"{p}-Dummy"
            var_left[p] = name
        else:
            raise MatchingIncomplete(f"predicate {p!r} of the first formula is unmatched")
        if name not in order:
            order.append(name)
    for p in right_preds:
        if p in var_right:
            continue
        if p in matching.dummies_right:
            name = f"Dummy-{p}"
            var_right[p] = name
            if name not in order:
                order.append(name)
        else:
            raise MatchingIncomplete(f"predicate {p!r} of the second formula is unmatched")
    return order, var_left, var_right


def le_truth_table(
    f1: Formula, f2: Formula, matching: PredicateMatching
) -> tuple[list[str], list[tuple[bool, ...]], list[bool], list[bool]]:
    """Full truth table: variable names, assignments, and both value rows."""
    order, var_left, var_right = _shared_variables(f1, f2, matching)
    if len(order) > 20:
        raise MatchingIncomplete(f"too many propositional variables ({len(order)})")
    body1 = _strip_quantifiers(f1)
    body2 = _strip_quantifiers(f2)
    assignments: list[tuple[bool, ...]] = []
    row1: list[bool] = []
    row2: list[bool] = []
    n = len(order)
    for column in range(2**n):
        bits = tuple(bool(column >> (n - 1 - i) & 1) for i in range(n))
        values = dict(zip(order, bits))
        assignments.append(bits)
        row1.append(_prop_eval(body1, values, var_left))
        row2.append(_prop_eval(body2, values, var_right))
    return order, assignments, row1, row2


def le_score(f1: Formula, f2: Formula, matching: PredicateMatching) -> Fraction:
    """Fraction of truth-table columns on which the two bodies agree."""
    _, _, row1, row2 = le_truth_table(f1, f2, matching)
    agree = sum(a == b for a, b in zip(row1, row2))
    return Fraction(agree, len(row1))


# ---------------------------------------------------------------------------
# BLEU over formula tokens
# ---------------------------------------------------------------------------


def formula_tokens(f: Formula) -> list[str]:
    """One token per symbol of the canonical rendering: operators,
    quantifiers, identifiers, parentheses, and commas."""
    return tokenize_texts(print_formula(f))


def _ngrams(tokens: Sequence[str], n: int) -> Counter:
    return Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))


def bleu_formula(reference: Formula, candidate: Formula) -> float:
    """Raw BLEU of the candidate against the reference formula string.

    Geometric mean of the clipped n-gram precisions for n = 1..4 (orders the
    candidate is too short to populate are skipped so that identical tiny
    formulas still score 1), times the brevity penalty; any zero precision
    zeroes the score.  No smoothing.
    """
    ref = formula_tokens(reference)
    cand = formula_tokens(candidate)
    log_sum = 0.0
    used = 0
    for n in range(1, 5):
        cand_ngrams = _ngrams(cand, n)
        total = sum(cand_ngrams.values())
        if total == 0:
            continue
        ref_ngrams = _ngrams(ref, n)
        clipped = sum(min(count, ref_ngrams[g]) for g, count in cand_ngrams.items())
        if clipped == 0:
            return 0.0
        log_sum += math.log(clipped / total)
        used += 1
    if used == 0:
        return 0.0
    precision = math.exp(log_sum / used)
    c, r = len(cand), len(ref)
    brevity = 1.0 if c >= r else math.exp(1 - r / c)
    return precision * brevity


# ---------------------------------------------------------------------------
# Task scoring
# ---------------------------------------------------------------------------


def score_most_similar(answer_position: int, cset: CandidateSet) -> int:
    """1 exactly when the chosen position holds the original formula."""
    if not 1 <= answer_position <= len(cset):
        raise PositionOutOfRange(
            f"position {answer_position} outside 1..{len(cset)}"
        )
    return int(answer_position == cset.answer_positions.original)


class RankingScores(NamedTuple):
    eq: int
    neg: int
    both: int


def score_ranking(ranking: Sequence[int], cset: CandidateSet) -> RankingScores:
    """Success flags for a ranking, most to least similar.

    eq requires the first two ranks to hold the original and the equivalent
    rewrite in either order; neg requires the last two ranks to hold the two
    negation forms in either order; both is their conjunction.
    """
    n = len(cset)
    if sorted(ranking) != list(range(1, n + 1)):
        raise NotAPermutation(f"ranking {list(ranking)!r} is not a permutation of 1..{n}")
    pos = cset.answer_positions
    if None in (pos.equivalent, pos.negation, pos.negation_nnf):
        raise ValueError("candidate set does not carry ranking labels")
    eq = int({ranking[0], ranking[1]} == {pos.original, pos.equivalent})
    neg = int({ranking[-1], ranking[-2]} == {pos.negation, pos.negation_nnf})
    return RankingScores(eq, neg, eq * neg)


# ---------------------------------------------------------------------------
# Point-biserial correlation
# ---------------------------------------------------------------------------


def point_biserial(binary: Sequence[int], continuous: Sequence[float]) -> float:
    """r_pb = (M1 - M0) / s_n * sqrt(n1 n0 / n^2), population std.

    Raises DegenerateGroups when either class is empty or the continuous
    values are constant; callers report the value as absent in that case.
    """
    if len(binary) != len(continuous):
        raise ValueError("input lengths differ")
    if len(binary) < 2:
        raise ValueError("need at least two observations")
    if any(b not in (0, 1) for b in binary):
        raise ValueError("binary vector must be 0/1")
    ones = [x for b, x in zip(binary, continuous) if b == 1]
    zeros = [x for b, x in zip(binary, continuous) if b == 0]
    if not ones or not zeros:
        raise DegenerateGroups("one class is empty")
    sn = statistics.pstdev(continuous)
    if sn == 0:
        raise DegenerateGroups("continuous values are constant")
    n = len(binary)
    return (
        (statistics.fmean(ones) - statistics.fmean(zeros))
        / sn
        * math.sqrt(len(ones) * len(zeros) / n**2)
    )


# ---------------------------------------------------------------------------
# Score reports
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ScoreRecord:
    instance_id: str
    seed: int
    task: str
    variant: str
    score: float
    flags: tuple[str, ...] = ()


@dataclass(frozen=True)
class ScoreReport:
    records: tuple[ScoreRecord, ...]

    def __post_init__(self) -> None:
        object.__setattr__(
            self,
            "records",
            tuple(sorted(self.records, key=lambda r: (r.task, r.instance_id, r.seed))),
        )

    def tasks(self) -> list[str]:
        return sorted({r.task for r in self.records})

    def aggregates(self) -> dict:
        """Per task: overall mean, per-seed means, and the std across seeds."""
        out: dict[str, dict] = {}
        for task in self.tasks():
            records = [r for r in self.records if r.task == task]
            per_seed: dict[int, list[float]] = {}
            for r in records:
                per_seed.setdefault(r.seed, []).append(r.score)
            seed_means = {seed: statistics.fmean(v) for seed, v in sorted(per_seed.items())}
            out[task] = {
                "mean": statistics.fmean([r.score for r in records]),
                "std_across_seeds": (
                    statistics.pstdev(list(seed_means.values())) if len(seed_means) > 1 else 0.0
                ),
                "per_seed_mean": {str(k): v for k, v in seed_means.items()},
                "n_records": len(records),
            }
        return out

    def to_json_dict(self) -> dict:
        return {
            "aggregates": self.aggregates(),
            "records": [
                {
                    "instance_id": r.instance_id,
                    "seed": r.seed,
                    "task": r.task,
                    "variant": r.variant,
                    "score": r.score,
                    "flags": list(r.flags),
                }
                for r in self.records
            ],
        }

    def write_csv(self, path: str | Path) -> None:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["instance_id", "seed", "task", "variant", "score", "flags"])
            for r in self.records:
                writer.writerow(
                    [r.instance_id, r.seed, r.task, r.variant, r.score, ";".join(r.flags)]
                )

    def write_json(self, path: str | Path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_json_dict(), fh, ensure_ascii=False, indent=2, sort_keys=True)
            fh.write("\n")
