import pytest

from threadwatch.corpus import Comment, Corpus, Page, Post, Region
from threadwatch.labeler import Category, MaliciousLabel
from threadwatch.temporal import (attack_events, ecdf, inter_attack_intervals,
                                  monthly_heatmap, page_gaps,
                                  relative_positions, time_since_post)

T0 = 1_391_212_800  # 2014-02-01T00:00:00Z


class TestEcdf:
    def test_hand_counted(self):
        assert ecdf([1, 2, 2, 4]).points == [(1, 0.25), (2, 0.75), (4, 1.0)]

    def test_single_value(self):
        assert ecdf([3.5]).points == [(3.5, 1.0)]

    def test_empty(self):
        assert ecdf([]).points == []

    def test_terminal_one_and_monotone(self):
        import random
        rng = random.Random(0)
        values = [rng.uniform(0, 100) for _ in range(500)]
        table = ecdf(values)
        fs = [f for _, f in table.points]
        assert fs == sorted(fs)
        assert fs[-1] == 1.0


def build_corpus(comment_offsets, attack_ids, n_comments_likes=0):
    """One page/one post corpus; comment ids c0..cN at given minute offsets."""
    pages = {"pg0": Page("pg0", "Page", Region.EUROPE)}
    posts = {"p1": Post("p1", "pg0", "a", T0, 0, "post")}
    comments = {
        f"c{i}": Comment(f"c{i}", "p1", f"u{i}", T0 + int(off * 60),
                         n_comments_likes, "t")
        for i, off in enumerate(comment_offsets)
    }
    corpus = Corpus(pages=pages, posts=posts, comments=comments)
    labels = [MaliciousLabel(cid, Category.ADS, "k") for cid in attack_ids]
    return corpus, labels


class TestRelativePositions:
    def test_first_of_eleven(self):
        corpus, labels = build_corpus(range(11), ["c0"])
        events = attack_events(corpus, labels)
        assert events[0].relative_position == 0.0

    def test_middle_of_eleven(self):
        corpus, labels = build_corpus(range(11), ["c5"])
        events = attack_events(corpus, labels)
        assert events[0].relative_position == 0.5

    def test_single_comment_thread(self):
        corpus, labels = build_corpus([4], ["c0"])
        events = attack_events(corpus, labels)
        assert events[0].relative_position == 0.0

    def test_grouped_tables(self):
        corpus, labels = build_corpus(range(11), ["c0", "c10"])
        tables = relative_positions(attack_events(corpus, labels))
        assert "region:Europe" in tables
        assert "category:Ads" in tables
        assert tables["all"].points[-1][1] == 1.0


class TestTimeSincePost:
    def test_all_at_zero(self):
        corpus, labels = build_corpus([0, 0], ["c0", "c1"])
        tables, _ = time_since_post(attack_events(corpus, labels))
        assert tables["all"].points == [(0.0, 1.0)]

    def test_fraction_within_day(self):
        corpus, labels = build_corpus([10, 50, 200, 2000],
                                      ["c0", "c1", "c2", "c3"])
        _, within = time_since_post(attack_events(corpus, labels))
        assert within["all"] == 0.75


class TestInterAttackIntervals:
    def test_single_attack_no_gap(self):
        corpus, labels = build_corpus([1, 2, 3], ["c1"])
        assert page_gaps(attack_events(corpus, labels)) == {"pg0": []}

    def test_gaps_by_subtraction(self):
        corpus, labels = build_corpus([0, 5, 30], ["c0", "c1", "c2"])
        gaps = page_gaps(attack_events(corpus, labels))
        assert gaps["pg0"] == [5.0, 25.0]

    def test_gap_count_is_attacks_minus_one(self, small_synth, small_labels):
        _, labels = small_labels
        events = attack_events(small_synth.corpus, labels)
        gaps = page_gaps(events)
        per_page_attacks = {}
        for e in events:
            per_page_attacks.setdefault(e.page_id, set()).add(e.comment_id)
        for pid, attacks in per_page_attacks.items():
            assert len(gaps[pid]) == len(attacks) - 1

    def test_multi_category_comment_counts_once_at_page_level(self):
        corpus, _ = build_corpus([0, 10], [])
        labels = [MaliciousLabel("c0", Category.ADS, "k"),
                  MaliciousLabel("c0", Category.PORN, "k2"),
                  MaliciousLabel("c1", Category.ADS, "k")]
        gaps = page_gaps(attack_events(corpus, labels))
        assert gaps["pg0"] == [10.0]
        tables = inter_attack_intervals(attack_events(corpus, labels))
        assert "category:Ads" in tables


class TestMonthlyHeatmap:
    def test_no_attacks_zero_matrix(self):
        corpus, _ = build_corpus([1, 2], [])
        pages, months, matrix = monthly_heatmap([], corpus)
        assert pages == ["Page"]
        assert all(v == 0 for row in matrix for v in row)
        assert months  # zero-filled over the corpus date range

    def test_hand_bucketing(self):
        corpus, labels = build_corpus([0, 10, 20, 43200], # 43200 min = 30 days
                                      ["c0", "c1", "c2", "c3"])
        pages, months, matrix = monthly_heatmap(attack_events(corpus, labels), corpus)
        assert months == ["2014-02", "2014-03"]
        assert matrix == [[3, 1]]

    def test_row_sums_equal_page_totals(self, small_synth, small_labels):
        _, labels = small_labels
        events = attack_events(small_synth.corpus, labels)
        pages, months, matrix = monthly_heatmap(events, small_synth.corpus)
        unique = {(e.page_id, e.comment_id) for e in events}
        totals = {}
        for pid, cid in unique:
            totals[pid] = totals.get(pid, 0) + 1
        by_name = dict(zip(pages, [sum(r) for r in matrix]))
        name_of = {p.page_id: p.name for p in small_synth.corpus.pages.values()}
        for pid, n in totals.items():
            assert by_name[name_of[pid]] == n
        assert sum(sum(r) for r in matrix) == len(unique)


def test_all_emitted_ecdfs_valid(small_synth, small_labels):
    _, labels = small_labels
    events = attack_events(small_synth.corpus, labels)
    for tables in (relative_positions(events), time_since_post(events)[0],
                   inter_attack_intervals(events)):
        for name, table in tables.items():
            if not table.points:
                continue
            fs = [f for _, f in table.points]
            xs = [x for x, _ in table.points]
            assert xs == sorted(xs)
            assert fs == sorted(fs)
            assert fs[-1] == pytest.approx(1.0)


def test_positions_in_unit_interval(small_synth, small_labels):
    _, labels = small_labels
    for e in attack_events(small_synth.corpus, labels):
        assert 0.0 <= e.relative_position <= 1.0
        assert e.minutes_since_post >= 0.0
