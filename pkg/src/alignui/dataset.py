"""Grounding corpus of user-preferred controls per task and preference aspect.

The dataset is the structured knowledge base injected into reasoning prompts:
tasks, each carrying per-aspect control vote counts plus the free-text reasons
respondents gave. Values are immutable snapshots; every mutation
(:func:`merge`, :func:`subsample`) returns a new snapshot.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, replace
from enum import Enum
from importlib import resources
from typing import Iterable, Optional, Sequence

from .catalog import ControlKind, UnknownControl, parse_kind


class Aspect(Enum):
    """The three preference aspects along which controls are rated."""

    PREDICTABILITY = "predictability"
    EFFICIENCY = "efficiency"
    EXPLORABILITY = "explorability"


ASPECT_ORDER = tuple(Aspect)

REQUIREMENT_TAGS = ("continuous_value", "discrete_value", "color_adjust", "position_adjust")
GOAL_STYLES = ("exploration", "precision")


class UnknownAspect(ValueError):
    def __init__(self, name: str):
        super().__init__(f"unknown preference aspect: {name!r}")
        self.name = name


class SchemaError(ValueError):
    """A document that does not match the dataset file structure."""

    def __init__(self, path: str, detail: str):
        super().__init__(f"{path}: {detail}")
        self.path = path
        self.detail = detail


class InvariantError(ValueError):
    """A structurally valid document whose contents violate type invariants."""

    def __init__(self, violations: Sequence[str]):
        super().__init__("; ".join(violations))
        self.violations = list(violations)


class NotFound(KeyError):
    pass


class NTooLarge(ValueError):
    pass


def parse_aspect(name: str) -> Aspect:
    try:
        return Aspect(name.strip().lower())
    except ValueError:
        raise UnknownAspect(name) from None


@dataclass(frozen=True)
class TaskEntry:
    name: str
    description: str
    requirement_tags: frozenset[str]
    goal_style: str


@dataclass(frozen=True)
class AspectRecord:
    aspect: Aspect
    counts: dict[ControlKind, int]
    reasons: dict[ControlKind, tuple[str, ...]]

    def total(self) -> int:
        return sum(self.counts.values())


@dataclass(frozen=True)
class TaskPreferences:
    entry: TaskEntry
    records: tuple[AspectRecord, ...]

    def record(self, aspect: Aspect) -> Optional[AspectRecord]:
        for rec in self.records:
            if rec.aspect is aspect:
                return rec
        return None


@dataclass(frozen=True)
class PreferenceDataset:
    tasks: tuple[TaskPreferences, ...]
    provenance: str
    respondents_per_cell: int

    def task(self, name: str) -> TaskPreferences:
        for task in self.tasks:
            if task.entry.name == name:
                return task
        raise NotFound(name)

    def task_names(self) -> list[str]:
        return [task.entry.name for task in self.tasks]


# --- validation ---------------------------------------------------------------


def _validate(dataset: PreferenceDataset) -> list[str]:
    violations: list[str] = []
    seen_names: set[str] = set()
    if dataset.respondents_per_cell <= 0:
        violations.append("respondents_per_cell must be positive")
    for task in dataset.tasks:
        entry = task.entry
        if entry.name in seen_names:
            violations.append(f"duplicate task name {entry.name!r}")
        seen_names.add(entry.name)
        if not entry.requirement_tags:
            violations.append(f"task {entry.name!r} has no requirement tags")
        for tag in entry.requirement_tags:
            if tag not in REQUIREMENT_TAGS:
                violations.append(f"task {entry.name!r} has unknown tag {tag!r}")
        if entry.goal_style not in GOAL_STYLES:
            violations.append(
                f"task {entry.name!r} has unknown goal_style {entry.goal_style!r}"
            )
        seen_aspects: set[Aspect] = set()
        for rec in task.records:
            cell = f"({entry.name}, {rec.aspect.value})"
            if rec.aspect in seen_aspects:
                violations.append(f"duplicate cell {cell}")
            seen_aspects.add(rec.aspect)
            if rec.total() <= 0:
                violations.append(f"cell {cell} has no votes")
            for kind, count in rec.counts.items():
                if count < 0:
                    violations.append(f"cell {cell} has negative count for {kind.value}")
            for kind in rec.reasons:
                if rec.counts.get(kind, 0) <= 0:
                    violations.append(
                        f"cell {cell} carries reasons for unvoted kind {kind.value}"
                    )
    return violations


# --- load / save ---------------------------------------------------------------


def load(data: bytes | str) -> PreferenceDataset:
    """Parse and validate dataset bytes (the preferences.json structure)."""
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as exc:
        raise SchemaError("$", f"not valid JSON: {exc}") from None

    if not isinstance(doc, dict):
        raise SchemaError("$", "top level must be an object")
    for key in ("provenance", "respondents_per_cell", "tasks"):
        if key not in doc:
            raise SchemaError("$", f"missing key {key!r}")
    if not isinstance(doc["respondents_per_cell"], int):
        raise SchemaError("$.respondents_per_cell", "must be an integer")
    if not isinstance(doc["tasks"], list):
        raise SchemaError("$.tasks", "must be an array")

    tasks: list[TaskPreferences] = []
    for i, task_doc in enumerate(doc["tasks"]):
        path = f"$.tasks[{i}]"
        if not isinstance(task_doc, dict):
            raise SchemaError(path, "must be an object")
        for key in ("name", "description", "requirements", "goal_style", "aspects"):
            if key not in task_doc:
                raise SchemaError(path, f"missing key {key!r}")
        if not isinstance(task_doc["aspects"], dict):
            raise SchemaError(f"{path}.aspects", "must be an object")

        entry = TaskEntry(
            name=str(task_doc["name"]),
            description=str(task_doc["description"]),
            requirement_tags=frozenset(task_doc["requirements"]),
            goal_style=str(task_doc["goal_style"]),
        )
        records: list[AspectRecord] = []
        for aspect_name, cell_doc in task_doc["aspects"].items():
            cell_path = f"{path}.aspects.{aspect_name}"
            try:
                aspect = parse_aspect(aspect_name)
            except UnknownAspect:
                raise SchemaError(cell_path, "unknown aspect") from None
            if not isinstance(cell_doc, dict):
                raise SchemaError(cell_path, "must be an object")
            counts: dict[ControlKind, int] = {}
            reasons: dict[ControlKind, tuple[str, ...]] = {}
            for kind_name, vote_doc in cell_doc.items():
                try:
                    kind = parse_kind(kind_name)
                except UnknownControl:
                    raise InvariantError(
                        [f"{cell_path}: kind {kind_name!r} is not in the catalog"]
                    ) from None
                if not isinstance(vote_doc, dict) or "count" not in vote_doc:
                    raise SchemaError(
                        f"{cell_path}.{kind_name}", "must be an object with 'count'"
                    )
                if not isinstance(vote_doc["count"], int):
                    raise SchemaError(f"{cell_path}.{kind_name}.count", "must be an integer")
                counts[kind] = vote_doc["count"]
                reason_list = vote_doc.get("reasons", [])
                if not isinstance(reason_list, list):
                    raise SchemaError(f"{cell_path}.{kind_name}.reasons", "must be an array")
                if reason_list:
                    reasons[kind] = tuple(str(r) for r in reason_list)
            records.append(AspectRecord(aspect=aspect, counts=counts, reasons=reasons))
        tasks.append(TaskPreferences(entry=entry, records=tuple(records)))

    dataset = PreferenceDataset(
        tasks=tuple(tasks),
        provenance=str(doc["provenance"]),
        respondents_per_cell=doc["respondents_per_cell"],
    )
    violations = _validate(dataset)
    if violations:
        raise InvariantError(violations)
    return dataset


def save(dataset: PreferenceDataset) -> bytes:
    """Serialize with canonical ordering so equal datasets give equal bytes.

    Tasks sort by name, aspects follow the fixed aspect order, kinds follow
    catalog order, and zero-count kinds are dropped.
    """
    tasks_doc = []
    for task in sorted(dataset.tasks, key=lambda t: t.entry.name):
        aspects_doc = {}
        for aspect in ASPECT_ORDER:
            rec = task.record(aspect)
            if rec is None:
                continue
            cell_doc = {}
            for kind in ControlKind:
                count = rec.counts.get(kind, 0)
                if count <= 0:
                    continue
                vote_doc: dict = {"count": count}
                if rec.reasons.get(kind):
                    vote_doc["reasons"] = list(rec.reasons[kind])
                cell_doc[kind.value] = vote_doc
            aspects_doc[aspect.value] = cell_doc
        tasks_doc.append(
            {
                "name": task.entry.name,
                "description": task.entry.description,
                "requirements": sorted(task.entry.requirement_tags),
                "goal_style": task.entry.goal_style,
                "aspects": aspects_doc,
            }
        )
    doc = {
        "provenance": dataset.provenance,
        "respondents_per_cell": dataset.respondents_per_cell,
        "tasks": tasks_doc,
    }
    return (json.dumps(doc, indent=2) + "\n").encode("utf-8")


def load_file(path) -> PreferenceDataset:
    with open(path, "rb") as handle:
        return load(handle.read())


def bundled_dataset(name: str = "full") -> PreferenceDataset:
    """Load a dataset fixture shipped with the package ("full" or "pilot")."""
    payload = resources.files("alignui.data").joinpath(f"preferences_{name}.json")
    return load(payload.read_bytes())


# --- queries -------------------------------------------------------------------


def total_pieces(dataset: PreferenceDataset) -> int:
    """Total number of collected preference votes across every cell."""
    return sum(rec.total() for task in dataset.tasks for rec in task.records)


def mode(dataset: PreferenceDataset, task_name: str, aspect: Aspect) -> list[tuple[ControlKind, int]]:
    """Kind(s) with the maximal count in one cell; ties in catalog order."""
    rec = dataset.task(task_name).record(aspect)
    if rec is None or not rec.counts:
        raise NotFound(f"({task_name}, {aspect.value})")
    best = max(rec.counts.values())
    return [(kind, best) for kind in ControlKind if rec.counts.get(kind, 0) == best]


# --- subsampling ----------------------------------------------------------------


def subsample(dataset: PreferenceDataset, n: int, seed: int) -> PreferenceDataset:
    """Draw n respondent-votes per cell, without replacement, reproducibly.

    Each cell's counts expand into a vote multiset; a generator seeded by
    (seed, task, aspect) picks n of them, so equal seeds give identical
    results and different cells draw independently.
    """
    if n <= 0:
        raise ValueError("n must be positive")
    if n > dataset.respondents_per_cell:
        raise NTooLarge(
            f"n={n} exceeds respondents_per_cell={dataset.respondents_per_cell}"
        )

    new_tasks = []
    for task in dataset.tasks:
        new_records = []
        for rec in task.records:
            votes: list[ControlKind] = []
            for kind in ControlKind:
                votes.extend([kind] * rec.counts.get(kind, 0))
            if n > len(votes):
                raise NTooLarge(
                    f"n={n} exceeds the {len(votes)} votes in "
                    f"({task.entry.name}, {rec.aspect.value})"
                )
            rng = random.Random(f"{seed}|{task.entry.name}|{rec.aspect.value}")
            drawn = rng.sample(votes, n)
            counts = {kind: drawn.count(kind) for kind in ControlKind if kind in drawn}
            reasons = {
                kind: rec.reasons[kind]
                for kind in rec.reasons
                if counts.get(kind, 0) > 0
            }
            new_records.append(AspectRecord(rec.aspect, counts, reasons))
        new_tasks.append(TaskPreferences(task.entry, tuple(new_records)))
    return PreferenceDataset(
        tasks=tuple(new_tasks),
        provenance=dataset.provenance,
        respondents_per_cell=n,
    )


# --- merging collected selections ------------------------------------------------


def merge(
    dataset: PreferenceDataset,
    selections: Iterable[tuple[str, Aspect, ControlKind, Optional[str]]],
    new_entries: Optional[dict[str, TaskEntry]] = None,
) -> PreferenceDataset:
    """Fold collected (task, aspect, kind, reason) votes into a new snapshot.

    Each selection increments exactly one count by 1 and appends its reason.
    Unknown task names are created from ``new_entries`` when supplied.
    """
    new_entries = new_entries or {}
    tasks = {task.entry.name: task for task in dataset.tasks}
    order = list(dataset.task_names())

    for task_name, aspect, kind, reason in selections:
        if not isinstance(aspect, Aspect):
            raise UnknownAspect(str(aspect))
        if not isinstance(kind, ControlKind):
            raise UnknownControl(str(kind))
        if task_name not in tasks:
            if task_name not in new_entries:
                raise NotFound(task_name)
            tasks[task_name] = TaskPreferences(new_entries[task_name], ())
            order.append(task_name)

        task = tasks[task_name]
        rec = task.record(aspect)
        if rec is None:
            rec = AspectRecord(aspect, {}, {})
            records = task.records + (rec,)
        else:
            records = task.records

        counts = dict(rec.counts)
        counts[kind] = counts.get(kind, 0) + 1
        reasons = dict(rec.reasons)
        if reason:
            reasons[kind] = reasons.get(kind, ()) + (reason,)
        new_rec = AspectRecord(aspect, counts, reasons)
        tasks[task_name] = TaskPreferences(
            task.entry,
            tuple(new_rec if r.aspect is aspect else r for r in records),
        )

    return replace(dataset, tasks=tuple(tasks[name] for name in order))
