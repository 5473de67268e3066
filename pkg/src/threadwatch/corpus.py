"""Corpus data model and line-oriented JSONL ingest.

A corpus file holds one JSON object per line, each tagged with
``kind`` in {page, post, comment}. Ingest buffers all records first
and then resolves references, so the result is independent of line
order. Records with unknown parents or duplicate ids are dropped and
counted.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum


class Region(str, Enum):
    MIDDLE_EAST = "MiddleEast"
    ASIA = "Asia"
    EUROPE = "Europe"
    US_NEWS = "USNews"
    US_POLITICS = "USPolitics"
    OTHER = "Other"


_REGION_LOOKUP = {r.value.lower(): r for r in Region}


@dataclass(frozen=True)
class Page:
    page_id: str
    name: str
    region: Region


@dataclass(frozen=True)
class Post:
    post_id: str
    page_id: str
    author_id: str
    created_ts: int
    like_count: int
    raw_text: str


@dataclass(frozen=True)
class Comment:
    comment_id: str
    post_id: str
    author_id: str
    created_ts: int
    like_count: int
    raw_text: str


@dataclass
class PostThread:
    post: Post
    comments: list[Comment]  # sorted by (created_ts, comment_id)


@dataclass
class Corpus:
    pages: dict[str, Page] = field(default_factory=dict)
    posts: dict[str, Post] = field(default_factory=dict)
    comments: dict[str, Comment] = field(default_factory=dict)
    # comments timestamped before their post; clamped in relative-time math
    skew_clamped: int = 0

    def thread_for(self, post_id: str) -> PostThread:
        post = self.posts[post_id]
        members = [c for c in self.comments.values() if c.post_id == post_id]
        members.sort(key=lambda c: (c.created_ts, c.comment_id))
        return PostThread(post, members)

    def page_of_post(self, post_id: str) -> Page:
        return self.pages[self.posts[post_id].page_id]


@dataclass
class IngestResult:
    corpus: Corpus
    kept: int
    dropped: int
    line_errors: list[tuple[int, str]] = field(default_factory=list)


class CorpusError(Exception):
    pass


def rel_seconds(post: Post, comment: Comment) -> int:
    """Seconds between a comment and its post, clamped at zero for clock skew."""
    return max(0, comment.created_ts - post.created_ts)


def rel_minutes(post: Post, comment: Comment) -> float:
    return rel_seconds(post, comment) / 60.0


_REQUIRED = {
    "page": ("id", "name", "region"),
    "post": ("id", "page_id", "author_id", "created_ts", "like_count", "text"),
    "comment": ("id", "post_id", "author_id", "created_ts", "like_count", "text"),
}


def _parse_record(obj: dict) -> tuple[str, object]:
    kind = obj.get("kind")
    if kind not in _REQUIRED:
        raise ValueError(f"unknown kind {kind!r}")
    missing = [f for f in _REQUIRED[kind] if f not in obj]
    if missing:
        raise ValueError(f"{kind} record missing fields {missing}")
    if kind == "page":
        region = _REGION_LOOKUP.get(str(obj["region"]).lower())
        if region is None:
            raise ValueError(f"unknown region {obj['region']!r}")
        return kind, Page(str(obj["id"]), str(obj["name"]), region)
    like = int(obj["like_count"])
    if like < 0:
        raise ValueError("like_count must be >= 0")
    ts = int(obj["created_ts"])
    if kind == "post":
        return kind, Post(str(obj["id"]), str(obj["page_id"]), str(obj["author_id"]),
                          ts, like, str(obj["text"]))
    return kind, Comment(str(obj["id"]), str(obj["post_id"]), str(obj["author_id"]),
                         ts, like, str(obj["text"]))


def ingest(path: str) -> IngestResult:
    """Load and validate a corpus file.

    Malformed lines are reported with their line number and skipped;
    an unreadable file raises CorpusError. Records referencing unknown
    parents and duplicate ids are dropped.
    """
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise CorpusError(f"cannot read corpus file {path}: {exc}") from exc

    pages: dict[str, Page] = {}
    posts: dict[str, Post] = {}
    comments: dict[str, Comment] = {}
    errors: list[tuple[int, str]] = []
    dropped = 0

    for lineno, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            kind, rec = _parse_record(json.loads(line))
        except (ValueError, TypeError) as exc:
            errors.append((lineno, str(exc)))
            continue
        if kind == "page":
            if rec.page_id in pages:
                dropped += 1
            else:
                pages[rec.page_id] = rec
        elif kind == "post":
            if rec.post_id in posts:
                dropped += 1
            else:
                posts[rec.post_id] = rec
        else:
            if rec.comment_id in comments:
                dropped += 1
            else:
                comments[rec.comment_id] = rec

    # referential integrity, resolved after the full pass so that input
    # order never matters
    kept_posts = {}
    for pid, p in posts.items():
        if p.page_id in pages:
            kept_posts[pid] = p
        else:
            dropped += 1
    kept_comments = {}
    skew = 0
    for cid, c in comments.items():
        parent = kept_posts.get(c.post_id)
        if parent is None:
            dropped += 1
            continue
        if c.created_ts < parent.created_ts:
            skew += 1
        kept_comments[cid] = c

    corpus = Corpus(pages=pages, posts=kept_posts, comments=kept_comments,
                    skew_clamped=skew)
    kept = len(pages) + len(kept_posts) + len(kept_comments)
    return IngestResult(corpus=corpus, kept=kept, dropped=dropped,
                        line_errors=errors)


def build_threads(corpus: Corpus) -> list[PostThread]:
    """One thread per post, comments sorted by (created_ts, comment_id).

    Threads are ordered by the post's (created_ts, post_id), so output
    is stable across runs and input orderings.
    """
    by_post: dict[str, list[Comment]] = {pid: [] for pid in corpus.posts}
    for c in corpus.comments.values():
        by_post[c.post_id].append(c)
    threads = []
    for post in sorted(corpus.posts.values(), key=lambda p: (p.created_ts, p.post_id)):
        members = by_post[post.post_id]
        members.sort(key=lambda c: (c.created_ts, c.comment_id))
        threads.append(PostThread(post, members))
    return threads
