import math

import numpy as np
import pytest

from threadwatch.accounts import (AccountError, campaign_scatter,
                                  cluster_campaigns, footprint,
                                  response_stats, sample_normal_accounts,
                                  stats_from_times)
from threadwatch.corpus import Comment, Corpus, Page, Post, Region
from threadwatch.labeler import (Category, MaliciousLabel, ShortenerTable,
                                 collect_observations, label_threads)

T0 = 1_400_000_000

# the duplicated-message commenting-time vector used as a worked example
RESPONSE_VECTOR = (6194, 5650, 1, 8, 9, 11, 12, 13, 14, 18)


def two_page_corpus():
    pages = {"pg0": Page("pg0", "A", Region.ASIA),
             "pg1": Page("pg1", "B", Region.EUROPE)}
    posts = {"p1": Post("p1", "pg0", "au", T0, 0, "x"),
             "p2": Post("p2", "pg1", "au", T0, 0, "x")}
    comments = {
        "c1": Comment("c1", "p1", "acct", T0 + 60, 0, "t"),
        "c2": Comment("c2", "p1", "acct", T0 + 120, 1, "t"),
        "c3": Comment("c3", "p2", "acct", T0 + 420, 2, "t"),
        "c4": Comment("c4", "p2", "other", T0 + 500, 5, "t"),
    }
    return Corpus(pages=pages, posts=posts, comments=comments)


class TestFootprint:
    def test_unknown_account_zero_with_flag(self):
        fp = footprint(two_page_corpus(), ["ghost"])[0]
        assert (fp.n_pages, fp.n_posts, fp.n_comments, fp.n_likes) == (0, 0, 0, 0)
        assert fp.flagged_unknown

    def test_hand_counted(self):
        fp = footprint(two_page_corpus(), ["acct"])[0]
        assert (fp.n_pages, fp.n_posts, fp.n_comments, fp.n_likes) == (2, 2, 3, 3)

    def test_totals_sum_to_corpus(self, small_synth):
        fps = footprint(small_synth.corpus)
        assert sum(f.n_comments for f in fps) == len(small_synth.corpus.comments)
        assert sum(f.n_likes for f in fps) == sum(
            c.like_count for c in small_synth.corpus.comments.values())

    def test_invariant_pages_le_posts_le_comments(self, small_synth):
        for f in footprint(small_synth.corpus):
            assert f.n_pages <= f.n_posts <= f.n_comments

    def test_attacker_accounts_mostly_zero_likes(self, small_synth, small_labels):
        _, labels = small_labels
        _, attackers = label_threads(small_synth.corpus, labels)
        fps = footprint(small_synth.corpus, sorted(attackers))
        zero = sum(1 for f in fps if f.n_likes == 0)
        assert zero / len(fps) >= 0.70


class TestResponseStats:
    def test_single_comment(self):
        corpus = two_page_corpus()
        s = response_stats(corpus, "other")
        assert s.mean == pytest.approx(500 / 60)
        assert s.std == 0.0

    def test_reference_vector(self):
        s = stats_from_times("acct", tuple(float(v) for v in RESPONSE_VECTOR))
        assert s.mean == 1193.0
        # independent two-pass recomputation
        expected_std = float(np.sqrt(np.mean(
            (np.array(RESPONSE_VECTOR, dtype=float) - 1193.0) ** 2)))
        assert s.std == pytest.approx(expected_std, abs=0.1)
        assert s.std == pytest.approx(2367.6, abs=0.1)

    def test_equal_times_zero_std(self):
        s = stats_from_times("a", (7.0, 7.0, 7.0))
        assert s.std == 0.0

    def test_no_comments_is_error(self):
        with pytest.raises(AccountError):
            response_stats(two_page_corpus(), "nobody")

    def test_two_pass_agreement(self, small_synth):
        corpus = small_synth.corpus
        authors = sorted({c.author_id for c in corpus.comments.values()})[:20]
        for aid in authors:
            s = response_stats(corpus, aid)
            arr = np.array(s.times)
            assert s.mean == pytest.approx(float(arr.mean()), rel=1e-9)
            assert s.std == pytest.approx(float(arr.std()), rel=1e-9, abs=1e-12)


class TestCampaigns:
    def test_empty(self):
        assert cluster_campaigns([], []) == []

    def test_grouping(self, small_synth, small_labels):
        observations, labels = small_labels
        clusters = cluster_campaigns(labels, observations)
        assert clusters
        # occurrences sorted descending and account bound holds
        occ = [c.occurrences for c in clusters]
        assert occ == sorted(occ, reverse=True)
        for c in clusters:
            assert 1 <= len(c.accounts) <= c.occurrences

    def test_occurrence_total_matches_labelled_comments(self, small_synth, small_labels):
        observations, labels = small_labels
        clusters = cluster_campaigns(labels, observations)
        assert sum(c.occurrences for c in clusters) == len(
            {lab.comment_id for lab in labels})

    def test_distinct_paths_distinct_clusters(self):
        from threadwatch.labeler import UrlObservation, registrable_domain
        obs = []
        for i, url in enumerate(["http://bad.com/a", "http://bad.com/b"]):
            obs.append(UrlObservation(url, registrable_domain(url), "pg0", "p1",
                                      f"c{i}", "acct", i))
        labels = [MaliciousLabel("c0", Category.ADS, "bad.com"),
                  MaliciousLabel("c1", Category.ADS, "bad.com")]
        assert len(cluster_campaigns(labels, obs)) == 2


class TestScatter:
    def _cluster(self, url, occurrences, n_accounts):
        from threadwatch.accounts import CampaignCluster
        return CampaignCluster(url, occurrences,
                               frozenset(f"a{i}" for i in range(n_accounts)))

    def test_unflagged(self):
        pts = campaign_scatter([self._cluster("u", 3, 2)])
        assert pts == [("u", 2, 3, "")]

    def test_single_account_repetition(self):
        pts = campaign_scatter([self._cluster("u", 15, 1)])
        assert pts[0][3] == "single-account repetition"

    def test_synchronized_multi_account(self):
        pts = campaign_scatter([self._cluster("u", 12, 12)])
        assert pts[0][3] == "synchronized multi-account"


def test_sample_normal_excludes_attackers(small_synth, small_labels):
    _, labels = small_labels
    _, attackers = label_threads(small_synth.corpus, labels)
    sample = sample_normal_accounts(small_synth.corpus, attackers,
                                    per_page=50, seed=0)
    assert sample
    assert not set(sample) & attackers
    again = sample_normal_accounts(small_synth.corpus, attackers,
                                   per_page=50, seed=0)
    assert sample == again
