"""Temporal forensics over labeled attacks: empirical CDF tables for
thread-relative position, minutes since post creation, and per-page
inter-attack gaps, plus a month-by-page heatmap.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from datetime import datetime, timezone

from .corpus import Corpus, build_threads, rel_minutes
from .labeler import Category, MaliciousLabel

DAY_MINUTES = 1440.0


@dataclass(frozen=True)
class AttackEvent:
    comment_id: str
    post_id: str
    page_id: str
    account_id: str
    category: Category
    ts: int
    minutes_since_post: float
    relative_position: float
    region: str


@dataclass
class EcdfTable:
    points: list[tuple[float, float]]  # (x, F), sorted by x


class TemporalError(Exception):
    pass


def ecdf(values: list[float]) -> EcdfTable:
    """Standard empirical CDF with one point per distinct value."""
    if not values:
        return EcdfTable(points=[])
    xs = sorted(values)
    n = len(xs)
    points = []
    count = 0
    for i, x in enumerate(xs):
        count += 1
        if i + 1 == n or xs[i + 1] != x:
            points.append((x, count / n))
    return EcdfTable(points=points)


def attack_events(corpus: Corpus, labels: list[MaliciousLabel]) -> list[AttackEvent]:
    """One event per (labeled comment, category), with thread-relative
    coordinates computed from the sorted comment order."""
    threads = {t.post.post_id: t for t in build_threads(corpus)}
    positions: dict[str, float] = {}
    for t in threads.values():
        n = len(t.comments)
        for rank, c in enumerate(t.comments):
            positions[c.comment_id] = rank / (n - 1) if n > 1 else 0.0
    events = []
    for lab in labels:
        comment = corpus.comments.get(lab.comment_id)
        if comment is None:
            raise TemporalError(f"label references unknown comment {lab.comment_id}")
        post = corpus.posts[comment.post_id]
        page = corpus.pages[post.page_id]
        events.append(AttackEvent(
            comment_id=comment.comment_id,
            post_id=post.post_id,
            page_id=page.page_id,
            account_id=comment.author_id,
            category=lab.category,
            ts=comment.created_ts,
            minutes_since_post=rel_minutes(post, comment),
            relative_position=positions[comment.comment_id],
            region=page.region.value,
        ))
    events.sort(key=lambda e: (e.ts, e.comment_id, e.category.value))
    return events


def _grouped(events: list[AttackEvent], value) -> dict[str, EcdfTable]:
    groups: dict[str, list[float]] = {}
    for e in events:
        groups.setdefault(f"region:{e.region}", []).append(value(e))
        groups.setdefault(f"category:{e.category.value}", []).append(value(e))
    groups.setdefault("all", [value(e) for e in events])
    return {name: ecdf(vals) for name, vals in sorted(groups.items())}


def relative_positions(events: list[AttackEvent]) -> dict[str, EcdfTable]:
    return _grouped(events, lambda e: e.relative_position)


def time_since_post(events: list[AttackEvent]
                    ) -> tuple[dict[str, EcdfTable], dict[str, float]]:
    """ECDFs of minutes since post creation, plus the fraction of each
    group's attacks landing within one day."""
    tables = _grouped(events, lambda e: e.minutes_since_post)
    within_day = {}
    groups: dict[str, list[float]] = {}
    for e in events:
        groups.setdefault(f"region:{e.region}", []).append(e.minutes_since_post)
        groups.setdefault(f"category:{e.category.value}", []).append(e.minutes_since_post)
    groups["all"] = [e.minutes_since_post for e in events]
    for name, vals in groups.items():
        within_day[name] = (sum(1 for v in vals if v <= DAY_MINUTES) / len(vals)
                            if vals else 0.0)
    return tables, within_day


def inter_attack_intervals(events: list[AttackEvent]) -> dict[str, EcdfTable]:
    """Per-page consecutive attack gaps in minutes, grouped by page
    region and by category. A comment with several category labels
    counts once at page level, but contributes to each category group."""
    # page level: dedupe per comment
    page_events: dict[str, list[AttackEvent]] = {}
    seen = set()
    for e in events:
        if (e.page_id, e.comment_id) in seen:
            continue
        seen.add((e.page_id, e.comment_id))
        page_events.setdefault(e.page_id, []).append(e)

    groups: dict[str, list[float]] = {}
    for page_id, evs in page_events.items():
        evs.sort(key=lambda e: (e.ts, e.comment_id))
        region = evs[0].region
        for prev, cur in zip(evs, evs[1:]):
            gap = (cur.ts - prev.ts) / 60.0
            groups.setdefault(f"region:{region}", []).append(gap)
            groups.setdefault("all", []).append(gap)

    # category groups keep label multiplicity but still gap within a page
    by_page_cat: dict[tuple[str, Category], list[AttackEvent]] = {}
    for e in events:
        by_page_cat.setdefault((e.page_id, e.category), []).append(e)
    for (_, category), evs in by_page_cat.items():
        evs.sort(key=lambda e: (e.ts, e.comment_id))
        for prev, cur in zip(evs, evs[1:]):
            groups.setdefault(f"category:{category.value}", []).append(
                (cur.ts - prev.ts) / 60.0)

    return {name: ecdf(vals) for name, vals in sorted(groups.items())}


def page_gaps(events: list[AttackEvent]) -> dict[str, list[float]]:
    """Raw per-page gap lists (minutes), comment-deduplicated."""
    per_page: dict[str, list[int]] = {}
    seen = set()
    for e in sorted(events, key=lambda e: (e.ts, e.comment_id)):
        if (e.page_id, e.comment_id) in seen:
            continue
        seen.add((e.page_id, e.comment_id))
        per_page.setdefault(e.page_id, []).append(e.ts)
    return {pid: [(b - a) / 60.0 for a, b in zip(ts, ts[1:])]
            for pid, ts in per_page.items()}


def _month(ts: int) -> tuple[int, int]:
    dt = datetime.fromtimestamp(ts, tz=timezone.utc)
    return dt.year, dt.month


def _month_range(lo: tuple[int, int], hi: tuple[int, int]) -> list[tuple[int, int]]:
    out = []
    y, m = lo
    while (y, m) <= hi:
        out.append((y, m))
        m += 1
        if m > 12:
            y, m = y + 1, 1
    return out


def monthly_heatmap(events: list[AttackEvent], corpus: Corpus
                    ) -> tuple[list[str], list[str], list[list[int]]]:
    """Counts of attacks per (page, UTC calendar month).

    Returns (page names, YYYY-MM column labels, count matrix) with the
    month axis zero-filled over the observed range. Comments carrying
    several category labels count once.
    """
    unique = {}
    for e in events:
        unique.setdefault((e.page_id, e.comment_id), e)
    events = list(unique.values())
    if events:
        months = [_month(e.ts) for e in events]
        span = _month_range(min(months), max(months))
    elif corpus.posts:
        all_ts = [p.created_ts for p in corpus.posts.values()]
        all_ts += [c.created_ts for c in corpus.comments.values()]
        span = _month_range(_month(min(all_ts)), _month(max(all_ts)))
    else:
        span = []
    pages = sorted(corpus.pages.values(), key=lambda p: p.page_id)
    col_index = {ym: j for j, ym in enumerate(span)}
    row_index = {p.page_id: i for i, p in enumerate(pages)}
    matrix = [[0] * len(span) for _ in pages]
    for e in events:
        matrix[row_index[e.page_id]][col_index[_month(e.ts)]] += 1
    labels = [f"{y:04d}-{m:02d}" for y, m in span]
    return [p.name for p in pages], labels, matrix


def write_ecdf_csv(tables: dict[str, EcdfTable], path: str) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["group", "x", "F"])
        for name in sorted(tables):
            for x, f in tables[name].points:
                writer.writerow([name, repr(float(x)), f"{f:.6f}"])


def write_heatmap_csv(pages: list[str], months: list[str],
                      matrix: list[list[int]], path: str) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["page"] + months)
        for name, row in zip(pages, matrix):
            writer.writerow([name] + row)
