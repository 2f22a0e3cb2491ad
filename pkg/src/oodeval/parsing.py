"""Extraction of (label, explanation) from raw generations, plus the prompt
templates used to produce model and evaluator inputs."""

from __future__ import annotations

import json
import re
from enum import Enum
from typing import Optional

from .labels import Label, normalize_label
from .records import Instance, ParsedOutput, ParseStatus

EXPLANATION_PATTERN = "explanation: "

_FIRST_WORD = re.compile(r"^\s*(\S+)\s*(.*)$", re.DOTALL)


def parse_nli_template(raw: str, instance_id: str = "") -> ParsedOutput:
    """Parse the text-template output: first word is the label; the text after
    the first "explanation: " is the explanation, falling back to everything
    after the first word when the pattern is absent. Total: never raises."""
    match = _FIRST_WORD.match(raw)
    if match is None:  # empty or whitespace-only
        return ParsedOutput(instance_id, None, None, ParseStatus.NONE)
    label = normalize_label(match.group(1))

    idx = raw.find(EXPLANATION_PATTERN)
    if idx >= 0:
        explanation: Optional[str] = raw[idx + len(EXPLANATION_PATTERN):] or None
        status = ParseStatus.CLEAN
    else:
        explanation = match.group(2) or None
        status = ParseStatus.FALLBACK
    if label is None and explanation is None:
        status = ParseStatus.NONE
    return ParsedOutput(instance_id, label, explanation, status)


def _balanced_objects(raw: str):
    """Yield every top-level balanced {...} substring, left to right."""
    depth = 0
    start = None
    in_string = False
    escaped = False
    for i, ch in enumerate(raw):
        if in_string:
            if escaped:
                escaped = False
            elif ch == "\\":
                escaped = True
            elif ch == '"':
                in_string = False
            continue
        if ch == '"':
            in_string = True
        elif ch == "{":
            if depth == 0:
                start = i
            depth += 1
        elif ch == "}" and depth > 0:
            depth -= 1
            if depth == 0:
                yield raw[start : i + 1]


def parse_json_template(raw: str, instance_id: str = "") -> ParsedOutput:
    """Parse the JSON-template output: the first well-formed object carrying
    both "relationship" and "explanation" keys wins; trailing prose around the
    object is ignored. Absent or malformed -> both fields none."""
    for candidate in _balanced_objects(raw):
        try:
            obj = json.loads(candidate)
        except json.JSONDecodeError:
            continue
        if not isinstance(obj, dict):
            continue
        if "relationship" not in obj or "explanation" not in obj:
            continue
        label = normalize_label(str(obj["relationship"]))
        explanation = obj["explanation"]
        explanation = str(explanation) if explanation is not None else None
        if label is None and explanation is None:
            return ParsedOutput(instance_id, None, None, ParseStatus.NONE)
        return ParsedOutput(instance_id, label, explanation, ParseStatus.CLEAN)
    return ParsedOutput(instance_id, None, None, ParseStatus.NONE)


def parse_generation(raw: str, template, instance_id: str = "") -> ParsedOutput:
    from .records import Template

    if template is Template.NLI or template == "nli_template":
        return parse_nli_template(raw, instance_id)
    return parse_json_template(raw, instance_id)


# Token standing for each three-way label in the generating model's first
# decoding step ("entailment" tokenizes to en/tail/ment, so "en" stands in).
LABEL_TOKENS = {
    "en": Label.ENTAILMENT,
    "neutral": Label.NEUTRAL,
    "contradiction": Label.CONTRADICTION,
}

_TIE_ORDER = (Label.ENTAILMENT, Label.NEUTRAL, Label.CONTRADICTION)


def resolve_label_from_probs(token_probs: dict[str, float]) -> Label:
    """Argmax over the three designated label tokens, ignoring all others.

    Ties break by the fixed order entailment > neutral > contradiction.
    """
    missing = [t for t in LABEL_TOKENS if t not in token_probs]
    if missing:
        raise ValueError(f"missing designated label tokens: {missing}")
    by_label = {label: token_probs[token] for token, label in LABEL_TOKENS.items()}
    best = _TIE_ORDER[0]
    for label in _TIE_ORDER[1:]:
        if by_label[label] > by_label[best]:
            best = label
    return best


class PromptTarget(str, Enum):
    ACCEPTABILITY = "acceptability"
    TIGERSCORE_AUTOJ = "tigerscore_autoj"
    THEMIS = "themis"
    NLI_FINETUNE = "nli_finetune"
    OLMO_FINETUNE = "olmo_finetune"


def _require_fields(target: PromptTarget, **fields) -> None:
    missing = [name for name, value in fields.items() if value in (None, "")]
    if missing:
        raise ValueError(f"{target.value}: missing placeholder fields: {missing}")


def render_prompt(
    instance: Instance,
    gold: Optional[Label] = None,
    explanation: Optional[str] = None,
    target: PromptTarget = PromptTarget.ACCEPTABILITY,
) -> str:
    """Render one of the fixed scorer / fine-tuning input templates byte-exactly."""
    target = PromptTarget(target)
    h, p = instance.hypothesis, instance.premise
    if target is PromptTarget.ACCEPTABILITY:
        _require_fields(target, hypothesis=h, premise=p, answer=gold, explanation=explanation)
        return f"premise: {p} hypothesis: {h} answer: {gold.value} explanation: {explanation}"
    if target is PromptTarget.TIGERSCORE_AUTOJ:
        _require_fields(target, hypothesis=h, premise=p, answer=gold)
        return (
            "Given a hypothesis and its premise, please explain why the "
            "hypothesis is entailment, neutral, or contradiction.\n"
            f"Hypothesis: {h}, Premise: {p}.\n"
            f"Please explain why the hypothesis is {gold.value}."
        )
    if target is PromptTarget.THEMIS:
        _require_fields(target, hypothesis=h, premise=p, answer=gold, explanation=explanation)
        return json.dumps(
            {
                "task": "Controllable Generation",
                "aspect": (
                    "Coherence: Given the explanation for the relationship "
                    "between the hypothesis and premise pair, how much does "
                    "the generated explanation make sense?"
                ),
                "source_des": "Hypothesis and Premise Pair",
                "source": (
                    f"Hypothesis: {h}, Premise: {p}, please explain why the "
                    f"Hypothesis is {gold.value}."
                ),
                "target_des": "Explanation",
                "target": explanation,
            },
            ensure_ascii=False,
        )
    if target is PromptTarget.NLI_FINETUNE:
        _require_fields(target, hypothesis=h, premise=p)
        return f"explain nli hypothesis: {h} premise: {p}"
    if target is PromptTarget.OLMO_FINETUNE:
        _require_fields(target, hypothesis=h, premise=p)
        return f"### Premise: {p}  Hypothesis: {h}\n### Response: "
    raise ValueError(f"unknown prompt target {target!r}")  # pragma: no cover


def render_nli_output(label: Label, explanation: str) -> str:
    """The text-template training target: label, then the explanation marker."""
    return f"{label.value} {EXPLANATION_PATTERN}{explanation}"


def render_json_output(label: Label, explanation: str) -> str:
    """The JSON-template training target."""
    return json.dumps(
        {"relationship": label.value, "explanation": explanation}, ensure_ascii=False
    )
