"""Prompt templates for the three tasks, in NL and FOL variants.

Template ids follow the published numbering: 1/2 are the logical-translation
system and user prompts, 3/4 the most-similar pair, 5/6 the ranking pair.
render_prompt accepts either member of a pair and returns both messages.
The NL templates are reproduced verbatim (including their original
typography); the FOL variants differ only in the words naming the candidate
kind.  Candidate lists are numbered from 1 in shuffled order, and prompt
payloads never carry labels or answer positions.
"""

from __future__ import annotations

from .ontology import Instance
from .syntax import FolbenchError
from .transform import MOST_SIMILAR, RANKING, CandidateSet


class MissingPlaceholder(FolbenchError):
    pass


TRANSLATION_SYSTEM = """You are an expert evaluator specializing in translating natural language sentences into a logical formalism. Your task is to formalize a given sentence in First Order Logic (FOL).

Instructions:
You can use the following symbols:
-  logical symbols: ∀ (for all), ∃ (exists), → (implies), ↔ (is equivalent to), ∧ (and), ∨ (or), ¬ (not)
- predicate symbols: <\\predicate_symbols\\>
- contant symbols: <\\constant_symbols\\>
- variable symbols: x,y,z,...
- non logical symbols: parenthesis ()

Output Format:
Return the First Order Logic sentence that best represents the meaning of the given sentence.

Input Format:
Sentence: {sentence}
"""

TRANSLATION_USER = "Sentence: <\\sentence\\>"

MOST_SIMILAR_SYSTEM_NL = """You are an expert evaluator specializing in semantic similarity assessment. Your task is to identify the rephrasing that best preserves the original meaning of a given sentence.
Instructions:

- You will receive one original sentence followed by multiple rephrased versions
- Evaluate each rephrasing based solely on semantic/logic equivalence (meaning preservation)
- Ignore differences in grammar, syntax, word order, or writing style
- Select and return the rephrasing that most accurately conveys the same meaning as the original sentence

Evaluation Criteria:

- Prioritize semantic accuracy over grammatical correctness
- Focus on whether the logical meaning is the same or not

Output Format:
Return only the  number of the selected rephrasing that best matches the original sentence's meaning.

Input Format:
Sentence: {sentence}

Rephrasing 1: {rephrasing_1}
Rephrasing 2: {rephrasing_2}
...
Rephrasing n: {rephrasing_n}
"""

MOST_SIMILAR_SYSTEM_FOL = """You are an expert evaluator specializing in semantic similarity assessment. Your task is to identify the First Order Logic (FOL) formula that best preserves the original meaning of a given sentence.
Instructions:

- You will receive one original sentence followed by multiple FOL formulas
- Evaluate each formula based solely on semantic/logic equivalence (meaning preservation)
- Ignore differences in grammar, syntax, word order, or writing style
- Select and return the formula that most accurately conveys the same meaning as the original sentence

Evaluation Criteria:

- Prioritize semantic accuracy over grammatical correctness
- Focus on whether the logical meaning is the same or not

Output Format:
Return only the  number of the selected formula that best matches the original sentence's meaning.

Input Format:
Sentence: {sentence}

Formula 1: {formula_1}
Formula 2: {formula_2}
...
Formula n: {formula_n}
"""

RANKING_SYSTEM_NL = """You are an expert evaluator specializing in ranking some NL sentences according to their semantic similarity. You will be given a reference and other sentences; your task is to rank these sentences depending on whether they convey the same meaning of the reference or not.

Instructions:
- Ignore difference in grammar, syntax, style, or word order. You are only interested in the semantic behind the sentences. It is possible that two sentences have a different logical structure but they convey the same logical meaning and this is the only thing you have to focus on;
- If one of the sentences is equivalent to the reference, it should be ranked first;
- If one of the sentences is equivalent to the negation of the reference, i.e. if it has the opposite meaning of the reference, it should be ranked last.
- If two sentences are equivalent, they should be ranked in adjacent positions

Input Format:
Reference: {reference}
Sentence1: {sentence1}
Sentence2: {sentence2}
...
SentenceN : {sentenceN}

Output Format:
Return, after a reasoning stage, the numbers of the sentences in order, from the number of the sentence that is the most similar to the reference to the one that is the least. ([number_of_the_statement_ranked_first, number_of_the_statement_ranked_second, ... number_of_the_statement_ranked_last]).
"""

RANKING_SYSTEM_FOL = """You are an expert evaluator specializing in ranking some First Order Logic (FOL) formulas according to their semantic similarity. You will be given a reference sentence and some formulas; your task is to rank these formulas depending on whether they convey the same meaning of the reference or not.

Instructions:
- Ignore difference in grammar, syntax, style, or word order. You are only interested in the semantic behind the formulas. It is possible that two formulas have a different logical structure but they convey the same logical meaning and this is the only thing you have to focus on;
- If one of the formulas is equivalent to the reference, it should be ranked first;
- If one of the formulas is equivalent to the negation of the reference, i.e. if it has the opposite meaning of the reference, it should be ranked last.
- If two formulas are equivalent, they should be ranked in adjacent positions

Input Format:
Reference: {reference}
Formula1: {formula1}
Formula2: {formula2}
...
FormulaN : {formulaN}

Output Format:
Return, after a reasoning stage, the numbers of the formulas in order, from the number of the formula that is the most similar to the reference to the one that is the least. ([number_of_the_formula_ranked_first, number_of_the_formula_ranked_second, ... number_of_the_formula_ranked_last]).
"""

EMBED_INSTRUCTION_FOL = (
    "Encode the first-order logic meaning of the following first-order formula: "
)
EMBED_INSTRUCTION_NL = (
    "Encode the first-order logic meaning of the following natural-language sentence: "
)


def _symbol_lines(inst: Instance) -> tuple[str, str]:
    sig = inst.ontology.signature
    glossary = inst.ontology.glossary
    pred_lines = [
        f"{name}/{arity}: {glossary.predicate_meanings[name].positive}"
        for name, arity in sorted(sig.predicates.items())
    ]
    const_lines = [
        f"{name}: {glossary.constant_meanings[name]}" for name in sorted(sig.constants)
    ]
    preds = "\n" + "\n".join(pred_lines) if pred_lines else "(none)"
    consts = "\n" + "\n".join(const_lines) if const_lines else "(none)"
    return preds, consts


def _candidate_block(cset: CandidateSet) -> str:
    word = "Formula" if cset.variant == "fol" else (
        "Rephrasing" if cset.task == MOST_SIMILAR else "Sentence"
    )
    if cset.task == MOST_SIMILAR:
        return "\n".join(f"{word} {i}: {text}" for i, text in enumerate(cset.prompt_texts(), 1))
    return "\n".join(f"{word}{i}: {text}" for i, text in enumerate(cset.prompt_texts(), 1))


def render_prompt(
    template_id: int, inst: Instance, cset: CandidateSet | None = None
) -> tuple[str, str]:
    """Instantiate a template pair; returns (system, user)."""
    if template_id in (1, 2):
        preds, consts = _symbol_lines(inst)
        system = TRANSLATION_SYSTEM.replace("<\\predicate_symbols\\>", preds).replace(
            "<\\constant_symbols\\>", consts
        )
        user = TRANSLATION_USER.replace("<\\sentence\\>", inst.utterance)
        return system, user
    if template_id in (3, 4):
        if cset is None or cset.task != MOST_SIMILAR:
            raise MissingPlaceholder("templates 3/4 need a most-similar candidate set")
        system = MOST_SIMILAR_SYSTEM_FOL if cset.variant == "fol" else MOST_SIMILAR_SYSTEM_NL
        user = f"Sentence: {inst.utterance}\n\n{_candidate_block(cset)}"
        return system, user
    if template_id in (5, 6):
        if cset is None or cset.task != RANKING:
            raise MissingPlaceholder("templates 5/6 need a ranking candidate set")
        system = RANKING_SYSTEM_FOL if cset.variant == "fol" else RANKING_SYSTEM_NL
        user = f"Sentence: {inst.utterance}\n\n{_candidate_block(cset)}"
        return system, user
    raise ValueError(f"unknown template id {template_id}; expected 1..6")
