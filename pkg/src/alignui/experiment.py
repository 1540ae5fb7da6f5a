"""Pairwise-comparison study harness: conditions, assignments, and analysis.

Four generation conditions (no dataset, or 10/25/30 votes per cell) yield six
unordered comparison pairs. Participants each judge 18 pairs: all six pairs
for one aspect on each of three tasks, with task order fully permuted and the
aspect sequence counterbalanced by a cyclic Latin square. Selection counts are
tested per pair against a uniform no-preference null with a chi-squared
goodness-of-fit test.
"""

from __future__ import annotations

import hashlib
import itertools
import random
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Optional

from scipy.special import gammaincc

from .dataset import Aspect, ASPECT_ORDER


class Condition(Enum):
    WITHOUTPREF = "withoutpref"
    WITHPREF10 = "withpref10"
    WITHPREF25 = "withpref25"
    WITHPREF30 = "withpref30"


#: Enumeration order for pair listing: dataset sizes ascending, then none.
PAIR_CONDITION_ORDER = (
    Condition.WITHPREF10,
    Condition.WITHPREF25,
    Condition.WITHPREF30,
    Condition.WITHOUTPREF,
)

SUBSET_SIZES = {Condition.WITHPREF10: 10, Condition.WITHPREF25: 25, Condition.WITHPREF30: 30}


class IndexOutOfRange(ValueError):
    pass


class DegenerateTable(ValueError):
    pass


def parse_condition(name: str) -> Condition:
    try:
        return Condition(name.strip().lower())
    except ValueError:
        raise IndexOutOfRange(f"unknown condition {name!r}") from None


@dataclass(frozen=True)
class ComparisonPair:
    """Unordered pair of distinct conditions; (a, b) and (b, a) are equal."""

    left: Condition
    right: Condition

    def __post_init__(self):
        if self.left is self.right:
            raise ValueError("a comparison pair needs two distinct conditions")
        order = PAIR_CONDITION_ORDER.index
        if order(self.left) > order(self.right):
            first, second = self.right, self.left
            object.__setattr__(self, "left", first)
            object.__setattr__(self, "right", second)

    def __contains__(self, condition: Condition) -> bool:
        return condition is self.left or condition is self.right

    def key(self) -> str:
        return f"{self.left.value}_vs_{self.right.value}"


def enumerate_pairs() -> list[ComparisonPair]:
    """All six unordered condition pairs, in canonical listing order."""
    return [
        ComparisonPair(a, b)
        for a, b in itertools.combinations(PAIR_CONDITION_ORDER, 2)
    ]


#: The six held-out evaluation tasks, split into two sets of three.
EVAL_TASKS = {
    "image_adjust_exposure": "Lower and raise the exposure until the image looks the most natural and pleasing to you.",
    "image_adjust_tint": "Shift the tint toward yellow or magenta to rebalance the image, from subtle corrections to dramatic casts.",
    "image_adjust_temperature": "Warm up and cool down the image temperature and settle on the effect you like best.",
    "image_change_to_spring": "Give the image fresh, lively spring colors.",
    "design_align_text": "Line the title text up flush with one of the margins so the layout feels balanced.",
    "design_position_logo": "Try the logo in different spots and keep the placement that is most visible and best complements the design.",
}

TASK_SETS = {
    1: ("image_adjust_exposure", "image_adjust_temperature", "design_align_text"),
    2: ("image_adjust_tint", "image_change_to_spring", "design_position_logo"),
}


def design_size(n_tasks: int = 6, n_aspects: int = 3) -> int:
    """Total comparisons in the design: pairs x aspects x tasks."""
    return len(enumerate_pairs()) * n_aspects * n_tasks


@dataclass(frozen=True)
class AssignmentItem:
    task: str
    aspect: Aspect
    pair: ComparisonPair


@dataclass(frozen=True)
class Assignment:
    participant: str
    task_set: int
    permutation_index: int
    latin_row: int
    seed: int
    items: tuple[AssignmentItem, ...]

    def to_json(self) -> dict:
        return {
            "participant": self.participant,
            "task_set": self.task_set,
            "permutation_index": self.permutation_index,
            "latin_row": self.latin_row,
            "items": [
                {
                    "task": item.task,
                    "aspect": item.aspect.value,
                    "pair": [item.pair.left.value, item.pair.right.value],
                }
                for item in self.items
            ],
        }


_PERMUTATIONS = tuple(sorted(itertools.permutations(range(3))))


def build_assignment(
    participant: str,
    task_set: int,
    permutation_index: int,
    latin_row: int,
    seed: int,
) -> Assignment:
    """One participant's 18 comparison items.

    Tasks follow the chosen permutation of their 3-task set; each task's
    aspect comes from the chosen row of the cyclic Latin square over the
    aspect order (the row is applied to the task's canonical position, so the
    three rows together cover every task/aspect combination exactly once).
    Pair order within each task is shuffled by the seed.
    """
    if task_set not in TASK_SETS:
        raise IndexOutOfRange(f"task_set must be 1 or 2, got {task_set}")
    if not 0 <= permutation_index <= 5:
        raise IndexOutOfRange(f"permutation_index must be 0-5, got {permutation_index}")
    if not 0 <= latin_row <= 2:
        raise IndexOutOfRange(f"latin_row must be 0-2, got {latin_row}")

    base_tasks = TASK_SETS[task_set]
    perm = _PERMUTATIONS[permutation_index]
    items: list[AssignmentItem] = []
    for base_index in perm:
        task = base_tasks[base_index]
        aspect = ASPECT_ORDER[(base_index + latin_row) % 3]
        pairs = enumerate_pairs()
        random.Random(f"{seed}|{participant}|{task}").shuffle(pairs)
        items.extend(AssignmentItem(task, aspect, pair) for pair in pairs)
    return Assignment(
        participant=participant,
        task_set=task_set,
        permutation_index=permutation_index,
        latin_row=latin_row,
        seed=seed,
        items=tuple(items),
    )


def assignment_for_participant(participant: str, salt: str = "") -> Assignment:
    """Derive a stable assignment from a keyed hash of the participant id."""
    digest = hashlib.sha256(f"{salt}|{participant}".encode("utf-8")).digest()
    h = int.from_bytes(digest[:8], "big")
    return build_assignment(
        participant=participant,
        task_set=1 + (h % 2),
        permutation_index=(h // 2) % 6,
        latin_row=(h // 12) % 3,
        seed=(h // 36) % 2**32,
    )


@dataclass(frozen=True)
class SelectionRecord:
    participant: str
    task: str
    aspect: Aspect
    pair: ComparisonPair
    chosen: Condition
    timestamp: str

    def __post_init__(self):
        if self.chosen not in self.pair:
            raise ValueError(
                f"chosen condition {self.chosen.value} is not in pair {self.pair.key()}"
            )


# --- chi-squared goodness of fit ---------------------------------------------------


@dataclass(frozen=True)
class ContingencyTable:
    labels: tuple[str, ...]
    observed: tuple[int, ...]
    expected: tuple[float, ...]


@dataclass(frozen=True)
class ChiSquareResult:
    statistic: float
    df: int
    p: float


def chi_squared(table: ContingencyTable) -> ChiSquareResult:
    """Goodness-of-fit statistic, degrees of freedom, and upper-tail p-value."""
    k = len(table.observed)
    if k < 2 or len(table.expected) != k or len(table.labels) != k:
        raise DegenerateTable("table needs >= 2 equally many labels/observed/expected")
    if any(e <= 0 for e in table.expected):
        raise DegenerateTable("expected counts must be positive")
    if any(o < 0 for o in table.observed):
        raise DegenerateTable("observed counts must be non-negative")
    statistic = sum((o - e) ** 2 / e for o, e in zip(table.observed, table.expected))
    df = k - 1
    p = float(gammaincc(df / 2.0, statistic / 2.0))
    return ChiSquareResult(statistic=statistic, df=df, p=p)


def significance_stars(p: float) -> str:
    if p < 0.001:
        return "***"
    if p < 0.01:
        return "**"
    if p < 0.05:
        return "*"
    return ""


# --- selection summaries -------------------------------------------------------------


def _group_key(record: SelectionRecord, group_by: str) -> str:
    if group_by == "aspect":
        return record.aspect.value
    if group_by == "task":
        return record.task
    if group_by == "overall":
        return "overall"
    raise ValueError(f"group_by must be aspect, task, or overall, got {group_by!r}")


def summarize(selections: Iterable[SelectionRecord], group_by: str = "overall") -> dict:
    """Per-condition selection counts and per-pair significance, by group.

    Each pair's wins are tested against a uniform no-preference null; pairs
    with no selections carry no test.
    """
    records = list(selections)
    grouped: dict[str, list[SelectionRecord]] = {}
    for record in records:
        grouped.setdefault(_group_key(record, group_by), []).append(record)

    if group_by == "aspect":
        ordered = [a.value for a in ASPECT_ORDER if a.value in grouped]
    else:
        ordered = sorted(grouped)

    groups = {}
    for name in ordered:
        group_records = grouped[name]
        counts = {condition.value: 0 for condition in PAIR_CONDITION_ORDER}
        for record in group_records:
            counts[record.chosen.value] += 1
        pair_rows = []
        for pair in enumerate_pairs():
            wins_left = sum(
                1 for r in group_records if r.pair == pair and r.chosen is pair.left
            )
            wins_right = sum(
                1 for r in group_records if r.pair == pair and r.chosen is pair.right
            )
            total = wins_left + wins_right
            row = {
                "left": pair.left.value,
                "right": pair.right.value,
                "wins_left": wins_left,
                "wins_right": wins_right,
            }
            if total > 0:
                result = chi_squared(
                    ContingencyTable(
                        labels=(pair.left.value, pair.right.value),
                        observed=(wins_left, wins_right),
                        expected=(total / 2.0, total / 2.0),
                    )
                )
                row.update(
                    statistic=result.statistic,
                    df=result.df,
                    p=result.p,
                    stars=significance_stars(result.p),
                )
            pair_rows.append(row)
        groups[name] = {"counts": counts, "pairs": pair_rows}
    return {"group_by": group_by, "n_selections": len(records), "groups": groups}


def render_summary_svg(summary: dict, path) -> None:
    """Write a grouped bar chart of per-condition selection counts as SVG."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    groups = summary["groups"]
    names = list(groups)
    conditions = [c.value for c in PAIR_CONDITION_ORDER]
    width = 0.8 / len(conditions)

    fig, ax = plt.subplots(figsize=(max(6, 2.2 * max(1, len(names))), 4))
    for ci, condition in enumerate(conditions):
        xs = [gi + ci * width for gi in range(len(names))]
        ys = [groups[name]["counts"].get(condition, 0) for name in names]
        ax.bar(xs, ys, width=width, label=condition)
    ax.set_xticks([gi + width * (len(conditions) - 1) / 2 for gi in range(len(names))])
    ax.set_xticklabels(names, rotation=15, ha="right")
    ax.set_ylabel("selections")
    ax.legend(fontsize="small")
    fig.tight_layout()
    fig.savefig(path, format="svg")
    plt.close(fig)
