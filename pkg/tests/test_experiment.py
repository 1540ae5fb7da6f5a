import math
import random
from collections import Counter

import pytest

from alignui.dataset import Aspect
from alignui.experiment import (
    Assignment,
    AssignmentItem,
    ComparisonPair,
    Condition,
    ContingencyTable,
    DegenerateTable,
    IndexOutOfRange,
    SelectionRecord,
    TASK_SETS,
    assignment_for_participant,
    build_assignment,
    chi_squared,
    design_size,
    enumerate_pairs,
    render_summary_svg,
    significance_stars,
    summarize,
)


# --- independent oracle: series / continued-fraction regularized gamma Q(a, x) ------


def _gamma_series_p(a, x, eps=1e-16, itmax=800):
    ap = a
    total = 1.0 / a
    delta = total
    for _ in range(itmax):
        ap += 1.0
        delta *= x / ap
        total += delta
        if abs(delta) < abs(total) * eps:
            break
    return total * math.exp(-x + a * math.log(x) - math.lgamma(a))


def _gamma_cf_q(a, x, eps=1e-16, itmax=800):
    tiny = 1e-300
    b = x + 1.0 - a
    c = 1.0 / tiny
    d = 1.0 / b if b != 0 else 1.0 / tiny
    h = d
    for i in range(1, itmax + 1):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < tiny:
            d = tiny
        c = b + an / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < eps:
            break
    return h * math.exp(-x + a * math.log(x) - math.lgamma(a))


def upper_gamma_q(a, x):
    if x < 0 or a <= 0:
        raise ValueError("domain")
    if x == 0:
        return 1.0
    if x < a + 1.0:
        return 1.0 - _gamma_series_p(a, x)
    return _gamma_cf_q(a, x)


def chi_squared_oracle(observed, expected):
    statistic = sum((o - e) ** 2 / e for o, e in zip(observed, expected))
    df = len(observed) - 1
    return statistic, df, upper_gamma_q(df / 2.0, statistic / 2.0)


# --- pairs and design counts ----------------------------------------------------------


def test_enumerate_pairs_count_and_order():
    pairs = enumerate_pairs()
    assert len(pairs) == 6
    assert pairs[0] == ComparisonPair(Condition.WITHPREF10, Condition.WITHPREF25)
    assert pairs[-1] == ComparisonPair(Condition.WITHPREF30, Condition.WITHOUTPREF)
    assert all(pair.left is not pair.right for pair in pairs)


def test_pairs_contain_thirty_vs_none():
    assert ComparisonPair(Condition.WITHPREF30, Condition.WITHOUTPREF) in enumerate_pairs()


def test_pair_is_unordered():
    assert ComparisonPair(Condition.WITHOUTPREF, Condition.WITHPREF10) == ComparisonPair(
        Condition.WITHPREF10, Condition.WITHOUTPREF
    )
    with pytest.raises(ValueError):
        ComparisonPair(Condition.WITHPREF10, Condition.WITHPREF10)


def test_design_size():
    assert design_size() == 108
    assert design_size(n_tasks=1, n_aspects=1) == 6
    assert design_size() // 6 == 18  # per-participant share


# --- assignments ----------------------------------------------------------------------


def test_assignment_latin_row_zero_matches_published_layout():
    a = build_assignment("p1", task_set=1, permutation_index=0, latin_row=0, seed=1)
    task_to_aspect = {item.task: item.aspect for item in a.items}
    assert task_to_aspect["image_adjust_exposure"] is Aspect.PREDICTABILITY
    assert task_to_aspect["image_adjust_temperature"] is Aspect.EFFICIENCY
    assert task_to_aspect["design_align_text"] is Aspect.EXPLORABILITY


def test_assignment_has_eighteen_items():
    for task_set in (1, 2):
        a = build_assignment("p", task_set, 3, 1, seed=9)
        assert len(a.items) == 18
        per_task = Counter(item.task for item in a.items)
        assert all(count == 6 for count in per_task.values())
        # all six pairs exactly once per (task, aspect)
        for task in TASK_SETS[task_set]:
            pairs = [item.pair for item in a.items if item.task == task]
            assert sorted(p.key() for p in pairs) == sorted(
                p.key() for p in enumerate_pairs()
            )


def test_latin_property_across_rows():
    seen = set()
    for row in range(3):
        a = build_assignment("p", 1, 0, row, seed=0)
        for item in a.items:
            seen.add((item.task, item.aspect))
    assert len(seen) == 9  # each aspect meets each task exactly once


def test_full_block_covers_each_triple_six_times():
    counter = Counter()
    for permutation_index in range(6):
        for row in range(3):
            a = build_assignment("p", 1, permutation_index, row, seed=4)
            for item in a.items:
                counter[(item.task, item.aspect, item.pair.key())] += 1
    assert len(counter) == 54  # 3 tasks x 3 aspects x 6 pairs
    assert set(counter.values()) == {6}


def test_assignment_index_bounds():
    with pytest.raises(IndexOutOfRange):
        build_assignment("p", 3, 0, 0, 0)
    with pytest.raises(IndexOutOfRange):
        build_assignment("p", 1, 6, 0, 0)
    with pytest.raises(IndexOutOfRange):
        build_assignment("p", 1, 0, 3, 0)


def test_assignment_permutation_orders_tasks():
    a = build_assignment("p", 1, 5, 0, seed=1)  # permutation (2, 1, 0)
    presented = list(dict.fromkeys(item.task for item in a.items))
    assert presented == ["design_align_text", "image_adjust_temperature", "image_adjust_exposure"]


def test_assignment_for_participant_is_stable():
    a = assignment_for_participant("alice", salt="s")
    b = assignment_for_participant("alice", salt="s")
    assert a == b
    c = assignment_for_participant("bob", salt="s")
    assert isinstance(c, Assignment)


def test_selection_record_requires_chosen_in_pair():
    pair = ComparisonPair(Condition.WITHPREF30, Condition.WITHOUTPREF)
    SelectionRecord("p", "t", Aspect.EFFICIENCY, pair, Condition.WITHPREF30, "now")
    with pytest.raises(ValueError):
        SelectionRecord("p", "t", Aspect.EFFICIENCY, pair, Condition.WITHPREF10, "now")


# --- chi-squared ------------------------------------------------------------------------


def table(observed, expected):
    return ContingencyTable(
        labels=tuple(f"c{i}" for i in range(len(observed))),
        observed=tuple(observed),
        expected=tuple(expected),
    )


def test_chi_squared_perfect_fit():
    result = chi_squared(table([20, 20], [20, 20]))
    assert result.statistic == 0
    assert result.p == pytest.approx(1.0)


def test_chi_squared_fixed_case():
    result = chi_squared(table([30, 10], [20, 20]))
    assert result.statistic == pytest.approx(10.0, abs=1e-12)
    assert result.df == 1
    assert result.p == pytest.approx(1.565402258002549e-3, abs=1e-6)


def test_chi_squared_three_way_perfect():
    result = chi_squared(table([10, 10, 10], [10, 10, 10]))
    assert result.statistic == 0
    assert result.df == 2
    assert result.p == pytest.approx(1.0)


def test_chi_squared_degenerate_tables():
    with pytest.raises(DegenerateTable):
        chi_squared(table([5], [5]))
    with pytest.raises(DegenerateTable):
        chi_squared(table([5, 5], [0, 10]))
    with pytest.raises(DegenerateTable):
        chi_squared(ContingencyTable(("a",), (1, 2), (1.0, 2.0)))


def test_chi_squared_matches_independent_oracle():
    rng = random.Random(314)
    for _ in range(500):
        k = rng.randint(2, 5)
        observed = [rng.randint(0, 1000) for _ in range(k)]
        expected = [rng.uniform(0.5, 1000) for _ in range(k)]
        result = chi_squared(table(observed, expected))
        stat_o, df_o, p_o = chi_squared_oracle(observed, expected)
        assert result.statistic == pytest.approx(stat_o, abs=1e-9)
        assert result.df == df_o
        assert result.p == pytest.approx(p_o, abs=1e-6)


def test_chi_squared_permutation_invariance():
    rng = random.Random(7)
    for _ in range(50):
        k = rng.randint(2, 5)
        observed = [rng.randint(0, 50) for _ in range(k)]
        expected = [rng.uniform(1, 50) for _ in range(k)]
        base = chi_squared(table(observed, expected)).statistic
        order = list(range(k))
        rng.shuffle(order)
        shuffled = chi_squared(
            table([observed[i] for i in order], [expected[i] for i in order])
        ).statistic
        assert shuffled == pytest.approx(base, abs=1e-12)


def test_significance_stars():
    assert significance_stars(0.2) == ""
    assert significance_stars(0.04) == "*"
    assert significance_stars(0.004) == "**"
    assert significance_stars(0.0004) == "***"


# --- summaries --------------------------------------------------------------------------


def selection(chosen, pair, aspect=Aspect.EFFICIENCY, task="image_adjust_tint", who="p1"):
    return SelectionRecord(who, task, aspect, pair, chosen, "2026-01-01T00:00:00Z")


def test_summarize_empty():
    summary = summarize([], group_by="aspect")
    assert summary["n_selections"] == 0
    assert summary["groups"] == {}


def test_summarize_thirty_vs_none_majority():
    pair = ComparisonPair(Condition.WITHPREF30, Condition.WITHOUTPREF)
    records = [selection(Condition.WITHPREF30, pair) for _ in range(30)]
    records += [selection(Condition.WITHOUTPREF, pair) for _ in range(10)]
    summary = summarize(records, group_by="aspect")
    group = summary["groups"]["efficiency"]
    assert group["counts"]["withpref30"] == 30
    assert group["counts"]["withoutpref"] == 10
    row = next(r for r in group["pairs"] if r["left"] == "withpref30" and r["right"] == "withoutpref")
    assert row["statistic"] == pytest.approx(10.0)
    assert row["stars"] == "**"


def test_summarize_even_split_no_star():
    pair = ComparisonPair(Condition.WITHPREF10, Condition.WITHPREF25)
    records = [selection(Condition.WITHPREF10, pair) for _ in range(20)]
    records += [selection(Condition.WITHPREF25, pair) for _ in range(20)]
    summary = summarize(records, group_by="overall")
    row = next(
        r
        for r in summary["groups"]["overall"]["pairs"]
        if r["left"] == "withpref10" and r["right"] == "withpref25"
    )
    assert row["p"] == pytest.approx(1.0)
    assert row["stars"] == ""


def test_summarize_group_by_task():
    pair = ComparisonPair(Condition.WITHPREF25, Condition.WITHOUTPREF)
    records = [
        selection(Condition.WITHPREF25, pair, task="design_align_text"),
        selection(Condition.WITHPREF25, pair, task="image_adjust_tint"),
    ]
    summary = summarize(records, group_by="task")
    assert set(summary["groups"]) == {"design_align_text", "image_adjust_tint"}


def test_render_summary_svg(tmp_path):
    pair = ComparisonPair(Condition.WITHPREF30, Condition.WITHOUTPREF)
    records = [selection(Condition.WITHPREF30, pair) for _ in range(3)]
    summary = summarize(records, group_by="aspect")
    out = tmp_path / "chart.svg"
    render_summary_svg(summary, out)
    blob = out.read_text(encoding="utf-8")
    assert "<svg" in blob
