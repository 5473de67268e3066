"""Attacker vs. normal account characterization: global footprints,
response-time statistics, and campaign clustering by exact URL.
"""

from __future__ import annotations

import csv
import hashlib
import math
from dataclasses import dataclass

from .corpus import Corpus, rel_minutes
from .labeler import MaliciousLabel, UrlObservation
from .temporal import EcdfTable, ecdf

DEFAULT_SCATTER_THRESHOLD = 10


@dataclass(frozen=True)
class AccountFootprint:
    account_id: str
    n_pages: int
    n_posts: int
    n_comments: int
    n_likes: int
    flagged_unknown: bool = False


@dataclass(frozen=True)
class ResponseStats:
    account_id: str
    times: tuple[float, ...]
    mean: float
    std: float  # population


@dataclass(frozen=True)
class CampaignCluster:
    url: str
    occurrences: int
    accounts: frozenset[str]


class AccountError(Exception):
    pass


def footprint(corpus: Corpus, account_ids: list[str] | None = None
              ) -> list[AccountFootprint]:
    """Per-account aggregation over the whole corpus.

    With account_ids=None every commenting account is reported; unknown
    ids yield a zero footprint with a flag.
    """
    pages: dict[str, set[str]] = {}
    posts: dict[str, set[str]] = {}
    n_comments: dict[str, int] = {}
    n_likes: dict[str, int] = {}
    for c in corpus.comments.values():
        post = corpus.posts[c.post_id]
        pages.setdefault(c.author_id, set()).add(post.page_id)
        posts.setdefault(c.author_id, set()).add(post.post_id)
        n_comments[c.author_id] = n_comments.get(c.author_id, 0) + 1
        n_likes[c.author_id] = n_likes.get(c.author_id, 0) + c.like_count
    if account_ids is None:
        account_ids = sorted(n_comments)
    out = []
    for aid in account_ids:
        if aid in n_comments:
            out.append(AccountFootprint(aid, len(pages[aid]), len(posts[aid]),
                                        n_comments[aid], n_likes[aid]))
        else:
            out.append(AccountFootprint(aid, 0, 0, 0, 0, flagged_unknown=True))
    return out


def sample_normal_accounts(corpus: Corpus, attackers: set[str],
                           per_page: int = 1000, seed: int = 0) -> list[str]:
    """Seeded per-page sample of commenters never seen in the attacker set."""
    import numpy as np

    by_page: dict[str, set[str]] = {}
    for c in corpus.comments.values():
        if c.author_id in attackers:
            continue
        page_id = corpus.posts[c.post_id].page_id
        by_page.setdefault(page_id, set()).add(c.author_id)
    rng = np.random.default_rng(seed)
    sample: list[str] = []
    for page_id in sorted(by_page):
        pool = sorted(by_page[page_id])
        if len(pool) <= per_page:
            sample.extend(pool)
        else:
            idx = rng.choice(len(pool), size=per_page, replace=False)
            sample.extend(pool[i] for i in sorted(idx))
    return sample


def footprint_ecdfs(footprints: list[AccountFootprint]) -> dict[str, EcdfTable]:
    return {
        "n_pages": ecdf([float(f.n_pages) for f in footprints]),
        "n_posts": ecdf([float(f.n_posts) for f in footprints]),
        "n_comments": ecdf([float(f.n_comments) for f in footprints]),
        "n_likes": ecdf([float(f.n_likes) for f in footprints]),
    }


def response_stats(corpus: Corpus, account_id: str) -> ResponseStats:
    """Minutes between each of the account's comments and its post's
    creation, in comment-timestamp order, with mean and population std."""
    rows = [c for c in corpus.comments.values() if c.author_id == account_id]
    if not rows:
        raise AccountError(f"account {account_id} has no comments")
    rows.sort(key=lambda c: (c.created_ts, c.comment_id))
    times = tuple(rel_minutes(corpus.posts[c.post_id], c) for c in rows)
    return stats_from_times(account_id, times)


def stats_from_times(account_id: str, times: tuple[float, ...]) -> ResponseStats:
    mean = sum(times) / len(times)
    var = sum((t - mean) ** 2 for t in times) / len(times)
    return ResponseStats(account_id, times, mean, math.sqrt(var))


def cluster_campaigns(labels: list[MaliciousLabel],
                      observations: list[UrlObservation]) -> list[CampaignCluster]:
    """Group labeled comments by exact malicious URL.

    Labels are joined back to their full URLs through the observations:
    an observation belongs to a label when it shares the comment and its
    URL or domain equals the matched key.
    """
    obs_by_comment: dict[str, list[UrlObservation]] = {}
    for o in observations:
        obs_by_comment.setdefault(o.comment_id, []).append(o)

    from .labeler import _strip_scheme  # key normalization shared with the join

    hits: dict[str, dict[str, set[str]]] = {}  # url -> comment_id -> accounts
    for lab in labels:
        for o in obs_by_comment.get(lab.comment_id, ()):
            if o.domain == lab.matched_key or _strip_scheme(o.url) == lab.matched_key:
                hits.setdefault(o.url, {}).setdefault(o.comment_id, set()).add(o.account_id)
                break
    clusters = []
    for url, comments in hits.items():
        accounts = frozenset(a for accs in comments.values() for a in accs)
        clusters.append(CampaignCluster(url, len(comments), accounts))
    clusters.sort(key=lambda c: (-c.occurrences, c.url))
    return clusters


def campaign_scatter(clusters: list[CampaignCluster],
                     threshold_hi: int = DEFAULT_SCATTER_THRESHOLD
                     ) -> list[tuple[str, int, int, str]]:
    """One (url, n_accounts, occurrences, flag) point per cluster.

    Flags the two pathological corners: many accounts spreading one URL,
    and one account posting many copies.
    """
    points = []
    for c in clusters:
        flag = ""
        if len(c.accounts) >= threshold_hi:
            flag = "synchronized multi-account"
        elif len(c.accounts) == 1 and c.occurrences >= threshold_hi:
            flag = "single-account repetition"
        points.append((c.url, len(c.accounts), c.occurrences, flag))
    return points


def write_footprint_csv(groups: dict[str, list[AccountFootprint]], path: str) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["account_id", "group", "n_pages", "n_posts",
                         "n_comments", "n_likes"])
        for group in sorted(groups):
            for f in groups[group]:
                writer.writerow([f.account_id, group, f.n_pages, f.n_posts,
                                 f.n_comments, f.n_likes])


def write_scatter_csv(points: list[tuple[str, int, int, str]], path: str) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["url_hash", "n_accounts", "occurrences", "flag"])
        for url, n_accounts, occurrences, flag in points:
            digest = hashlib.sha256(url.encode("utf-8")).hexdigest()[:16]
            writer.writerow([digest, n_accounts, occurrences, flag])


def write_response_csv(stats: dict[str, list[ResponseStats]], path: str) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["account_id", "group", "n", "mean_min", "std_min"])
        for group in sorted(stats):
            for s in stats[group]:
                writer.writerow([s.account_id, group, len(s.times),
                                 f"{s.mean:.4f}", f"{s.std:.4f}"])
