"""Dataset-guided control reasoning: prompt assembly, sanity filtering, ensembles.

One reasoning run asks the model for preference-aligned controls grounded in
the preference dataset, then filters anything off-catalog. Because model
output varies run to run, repeated runs are aggregated: the number of runs
whose top pick is a given control becomes that control's weight, and weights
are apportioned onto a 10-point score scale per aspect.
"""

from __future__ import annotations

import collections
from dataclasses import dataclass
from typing import Mapping, Optional, Sequence

from .catalog import ControlKind, UnknownControl, canonical_name, default_catalog, parse_kind
from .dataset import Aspect, PreferenceDataset, save
from .gateway import ChatRequest, Gateway, NoJsonFound, ParseError, TransportError, extract_json


class SchemaError(ValueError):
    """Model output that cannot be read as a reasoning response."""


class EnsembleFailed(RuntimeError):
    pass


class EmptyWeights(ValueError):
    pass


class NoRelevantTask(LookupError):
    pass


@dataclass(frozen=True)
class UserContext:
    """The input pair: what the user wants to do, and what they care about."""

    task_description: str
    aspects: tuple[Aspect, ...]
    requirement_tags: Optional[frozenset[str]] = None

    def __post_init__(self):
        if not self.task_description.strip():
            raise ValueError("task_description must be non-empty")
        if not self.aspects:
            raise ValueError("at least one aspect is required")
        if len(set(self.aspects)) != len(self.aspects):
            raise ValueError("aspects must be unique")


REASONING_SYSTEM_PROMPT = """\
You are expert at reasoning UI controls that align with the user task and preference. You should follow the steps below for the reasoning.

First, please take the definitions of user preference aspects below:
    - Predictability: allows users to obtain results with no surprises.
    - Efficiency: allows users to perform tasks with a minimum amount of time and effort.
    - Explorability: allows users to explore multiple possibilities to perform the task.

Second, information of a crowdsourced UI control preference dataset is in the prompt:
    - Task description: detailed descriptions of all the tasks.
    - UI control preference aspects: the user preference aspects defined in user preference aspects.
        - UI control preference frequency: the frequency of user-preferred UI controls. Large numbers mean the corresponding UI control is preferred by more people.
        - UI control preference reasons: the reasons for user-preferred UI controls.

Third, search for the most relevant tasks from the crowdsourced UI control preference dataset.
    - You should compare the given task and the task descriptions in the dataset to help you to find the relevant tasks.
    - Focus on fundamental parameter adjustment requirements, e.g., tasks that require continuous value adjustment are similar, while tasks that require continuous or discrete value adjustment are not similar.

Fourth, reason the most appropriate UI control for predictability, efficiency, and explorability.
    - Your reasoning should be based on the relevant tasks you found in the dataset.
    - You must refer to the UI control preference reasons to assist your reasoning.
    - The UI control you reason must come from the given UI control candidates.

Lastly, based on your reasoning, organize your response in JSON format. Refer to the example below.
{
    "user task": "<description of the provided user task>",
    "user preference aspect": "<description of the user-specified preference aspect>",
    "relevant tasks from the dataset": "<your reasoning>",
    "predictability_reasoning": {
        "<UI control type>": "<your reasoning>"
    },
    "efficiency_reasoning": {
        "<UI control type>": "<your reasoning>"
    },
    "explorability_reasoning": {
        "<UI control type>": "<your reasoning>"
    }
}"""

# Ungrounded variant: no grounding corpus is supplied, so every consultation
# step disappears and the response exemplar loses its relevant-tasks field.
UNGROUNDED_SYSTEM_PROMPT = """\
You are expert at reasoning UI controls that align with the user task and preference. You should follow the steps below for the reasoning.

First, please take the definitions of user preference aspects below:
    - Predictability: allows users to obtain results with no surprises.
    - Efficiency: allows users to perform tasks with a minimum amount of time and effort.
    - Explorability: allows users to explore multiple possibilities to perform the task.

Second, reason the most appropriate UI control for predictability, efficiency, and explorability.
    - The UI control you reason must come from the given UI control candidates.

Lastly, based on your reasoning, organize your response in JSON format. Refer to the example below.
{
    "user task": "<description of the provided user task>",
    "user preference aspect": "<description of the user-specified preference aspect>",
    "predictability_reasoning": {
        "<UI control type>": "<your reasoning>"
    },
    "efficiency_reasoning": {
        "<UI control type>": "<your reasoning>"
    },
    "explorability_reasoning": {
        "<UI control type>": "<your reasoning>"
    }
}"""

DATASET_SECTION_HEADER = "Here is the crowdsourced UI control preference dataset:"


def build_reasoning_prompt(
    ctx: UserContext,
    dataset: Optional[PreferenceDataset],
    catalog: Optional[Sequence[ControlKind]] = None,
) -> tuple[str, str]:
    """Assemble (system_prompt, user_prompt) for one reasoning call.

    Pure function of its inputs; identical inputs give byte-identical prompts.
    Passing ``dataset=None`` produces the ungrounded variant with no dataset
    section anywhere in either prompt half.
    """
    catalog = list(catalog) if catalog is not None else default_catalog()
    parts = []
    if dataset is not None:
        parts.append(DATASET_SECTION_HEADER)
        parts.append(save(dataset).decode("utf-8").rstrip("\n"))
        parts.append("")
    parts.append(
        "The given UI control candidates are: "
        + ", ".join(canonical_name(kind) for kind in catalog)
        + "."
    )
    parts.append("")
    parts.append(f"The content of user task: {ctx.task_description}")
    parts.append("")
    parts.append(
        "The user-specified preference aspects: "
        + ", ".join(aspect.value for aspect in ctx.aspects)
        + "."
    )
    system = REASONING_SYSTEM_PROMPT if dataset is not None else UNGROUNDED_SYSTEM_PROMPT
    return system, "\n".join(parts)


@dataclass(frozen=True)
class ReasoningOutcome:
    """One run's parsed and sanity-filtered result."""

    relevant_tasks: tuple[tuple[str, str], ...]
    per_aspect: dict[Aspect, list[tuple[ControlKind, str]]]
    raw_response: str
    dropped: tuple[str, ...]


def _parse_outcome(
    ctx: UserContext,
    dataset: Optional[PreferenceDataset],
    text: str,
) -> ReasoningOutcome:
    try:
        doc = extract_json(text)
    except (NoJsonFound, ParseError) as exc:
        raise SchemaError(f"no reasoning JSON in response: {exc}") from exc
    if not isinstance(doc, dict):
        raise SchemaError("reasoning response is not a JSON object")

    per_aspect: dict[Aspect, list[tuple[ControlKind, str]]] = {}
    dropped: list[str] = []
    for aspect in ctx.aspects:
        key = f"{aspect.value}_reasoning"
        block = doc.get(key)
        if block is None:
            per_aspect[aspect] = []
            continue
        if not isinstance(block, dict):
            raise SchemaError(f"{key} must map control types to rationales")
        picks: list[tuple[ControlKind, str]] = []
        for token, rationale in block.items():
            try:
                kind = parse_kind(str(token))
            except UnknownControl:
                dropped.append(str(token))
                continue
            picks.append((kind, str(rationale)))
        per_aspect[aspect] = picks

    relevant: list[tuple[str, str]] = []
    blurb = doc.get("relevant tasks from the dataset")
    if isinstance(blurb, str) and dataset is not None:
        for name in dataset.task_names():
            if name in blurb:
                relevant.append((name, blurb))
    return ReasoningOutcome(
        relevant_tasks=tuple(relevant),
        per_aspect=per_aspect,
        raw_response=text,
        dropped=tuple(dropped),
    )


def reason_once(
    ctx: UserContext,
    dataset: Optional[PreferenceDataset],
    catalog: Optional[Sequence[ControlKind]],
    gateway: Gateway,
) -> ReasoningOutcome:
    """One reasoning call, with a single retry when the response is unreadable.

    Off-catalog control tokens are moved to ``dropped`` and never surface as
    recommendations.
    """
    system, user = build_reasoning_prompt(ctx, dataset, catalog)
    request = ChatRequest(system_prompt=system, user_prompt=user)
    last: Optional[SchemaError] = None
    for _ in range(2):
        response = gateway.complete(request)
        try:
            return _parse_outcome(ctx, dataset, response.text)
        except SchemaError as exc:
            last = exc
    raise last  # type: ignore[misc]


@dataclass(frozen=True)
class WeightedControl:
    kind: ControlKind
    weight: int
    score: int
    rationale: str


@dataclass(frozen=True)
class WeightedRecommendation:
    """Ensemble aggregate: per-aspect weighted, scored control rankings.

    ``n_runs`` is the number of contributing runs; 0 marks the deterministic
    offline path.
    """

    task: str
    per_aspect: dict[Aspect, list[WeightedControl]]
    n_runs: int

    def kinds(self) -> list[ControlKind]:
        seen = {wc.kind for controls in self.per_aspect.values() for wc in controls}
        return [kind for kind in ControlKind if kind in seen]

    def to_json(self) -> dict:
        return {
            "task": self.task,
            "n_runs": self.n_runs,
            "per_aspect": {
                aspect.value: [
                    {
                        "kind": wc.kind.value,
                        "weight": wc.weight,
                        "score": wc.score,
                        "rationale": wc.rationale,
                    }
                    for wc in controls
                ]
                for aspect, controls in self.per_aspect.items()
            },
        }


def normalize_scores(weights: Mapping, total: int = 10) -> dict:
    """Apportion ``total`` points proportionally to weights, largest remainder.

    Remainder ties break toward the larger weight, then catalog order (input
    order for non-catalog keys). Scores are integers summing to ``total``.
    """
    items = [(key, w) for key, w in weights.items() if w > 0]
    if not items or sum(w for _, w in items) <= 0:
        raise EmptyWeights("weights must contain a positive entry")
    grand = sum(w for _, w in items)

    def order_index(key) -> int:
        if isinstance(key, ControlKind):
            return list(ControlKind).index(key)
        return next(i for i, (k, _) in enumerate(items) if k == key)

    scores = {key: (total * w) // grand for key, w in items}
    leftover = total - sum(scores.values())
    by_remainder = sorted(
        items,
        key=lambda kw: (-((total * kw[1]) % grand), -kw[1], order_index(kw[0])),
    )
    for key, _ in by_remainder[:leftover]:
        scores[key] += 1
    return scores


def _digest_rationales(rationales: Sequence[str]) -> str:
    if not rationales:
        return ""
    counts = collections.Counter(rationales)
    best = max(counts.values())
    for text in rationales:  # first-seen among the most frequent
        if counts[text] == best:
            return text
    return rationales[0]


def _weighted(
    task: str,
    per_aspect_weights: dict[Aspect, dict[ControlKind, int]],
    per_aspect_rationales: dict[Aspect, dict[ControlKind, list[str]]],
    n_runs: int,
) -> WeightedRecommendation:
    per_aspect: dict[Aspect, list[WeightedControl]] = {}
    for aspect, weights in per_aspect_weights.items():
        if not weights:
            per_aspect[aspect] = []
            continue
        scores = normalize_scores(weights)
        ranked = sorted(
            weights,
            key=lambda kind: (-weights[kind], list(ControlKind).index(kind)),
        )
        per_aspect[aspect] = [
            WeightedControl(
                kind=kind,
                weight=weights[kind],
                score=scores[kind],
                rationale=_digest_rationales(per_aspect_rationales[aspect].get(kind, [])),
            )
            for kind in ranked
        ]
    return WeightedRecommendation(task=task, per_aspect=per_aspect, n_runs=n_runs)


def reason_ensemble(
    ctx: UserContext,
    dataset: Optional[PreferenceDataset],
    catalog: Optional[Sequence[ControlKind]],
    gateway: Gateway,
    n_runs: int,
) -> WeightedRecommendation:
    """Aggregate ``n_runs`` reasoning runs into weighted recommendations.

    A control's weight per aspect is the number of runs that listed it first
    for that aspect; later mentions only feed the rationale digest. More than
    half the runs failing aborts the ensemble.
    """
    if n_runs < 1:
        raise ValueError("n_runs must be >= 1")

    weights: dict[Aspect, dict[ControlKind, int]] = {a: {} for a in ctx.aspects}
    rationales: dict[Aspect, dict[ControlKind, list[str]]] = {a: {} for a in ctx.aspects}
    failures = 0
    successes = 0
    for _ in range(n_runs):
        try:
            outcome = reason_once(ctx, dataset, catalog, gateway)
        except (SchemaError, TransportError):
            failures += 1
            if failures * 2 > n_runs:
                raise EnsembleFailed(
                    f"{failures} of {n_runs} runs failed"
                ) from None
            continue
        successes += 1
        for aspect in ctx.aspects:
            picks = outcome.per_aspect.get(aspect, [])
            for i, (kind, rationale) in enumerate(picks):
                if i == 0:
                    weights[aspect][kind] = weights[aspect].get(kind, 0) + 1
                rationales[aspect].setdefault(kind, []).append(rationale)
    if successes == 0:
        raise EnsembleFailed(f"all {n_runs} runs failed")
    return _weighted(ctx.task_description, weights, rationales, successes)


# --- deterministic offline path --------------------------------------------------

_TAG_KEYWORDS = {
    "position_adjust": (
        "position", "place", "placing", "align", "margin", "logo",
        "watermark", "vignette", "move", "drag",
    ),
    "color_adjust": (
        "color", "colour", "hue", "tone", "palette", "recolor", "spring colors",
        "fall colors",
    ),
    "discrete_value": (
        "preset", "predefined", "choose", "select", "pick", "option", "step",
    ),
    "continuous_value": (
        "adjust", "increase", "decrease", "boost", "level", "amount",
        "exposure", "lightness", "brightness", "saturation", "contrast",
        "temperature", "tint", "intensity", "balance",
    ),
}


def derive_requirement_tags(task_description: str) -> frozenset[str]:
    """Keyword heuristic mapping a task description onto requirement tags."""
    lowered = task_description.lower()
    tags = {
        tag
        for tag, keywords in _TAG_KEYWORDS.items()
        if any(word in lowered for word in keywords)
    }
    return frozenset(tags)


def fallback_recommendation(
    ctx: UserContext, dataset: PreferenceDataset
) -> WeightedRecommendation:
    """Dataset-only recommendation without any model call.

    Relevant tasks share at least one requirement tag with the context; their
    vote counts sum into per-aspect weights. Reported with n_runs = 0 to mark
    the deterministic path.
    """
    tags = ctx.requirement_tags or derive_requirement_tags(ctx.task_description)
    relevant = [task for task in dataset.tasks if task.entry.requirement_tags & tags]
    if not relevant:
        raise NoRelevantTask(
            f"no dataset task shares a requirement tag with {sorted(tags)}"
        )

    weights: dict[Aspect, dict[ControlKind, int]] = {a: {} for a in ctx.aspects}
    rationales: dict[Aspect, dict[ControlKind, list[str]]] = {a: {} for a in ctx.aspects}
    for task in relevant:
        for aspect in ctx.aspects:
            rec = task.record(aspect)
            if rec is None:
                continue
            for kind, count in rec.counts.items():
                if count <= 0:
                    continue
                weights[aspect][kind] = weights[aspect].get(kind, 0) + count
                rationales[aspect].setdefault(kind, []).extend(rec.reasons.get(kind, ()))
    return _weighted(ctx.task_description, weights, rationales, n_runs=0)
