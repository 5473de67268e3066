"""Thread feature extraction: five macro popularity statistics and the
fixed-length vector of per-window comment counts (the discussion
atmosphere vector), plus time-censoring and min-max scaling.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

from .corpus import PostThread, rel_seconds

MacroMode = str  # "full" | "censored"


@dataclass(frozen=True)
class MacroFeatures:
    spanning_time_days: float
    n_comments: int
    n_participants: int
    n_post_likes: int
    n_comment_likes: int

    def as_list(self) -> list[float]:
        return [self.spanning_time_days, float(self.n_comments),
                float(self.n_participants), float(self.n_post_likes),
                float(self.n_comment_likes)]


@dataclass(frozen=True)
class DavVector:
    window_minutes: int
    t_final_minutes: int
    bins: tuple[int, ...]

    def as_list(self) -> list[float]:
        return [float(b) for b in self.bins]


@dataclass(frozen=True)
class FeatureVector:
    post_id: str
    macro: MacroFeatures | None
    dav: DavVector | None
    label: bool

    def values(self) -> list[float]:
        vals: list[float] = []
        if self.macro is not None:
            vals.extend(self.macro.as_list())
        if self.dav is not None:
            vals.extend(self.dav.as_list())
        return vals


class FeatureConfigError(Exception):
    pass


def macro_features(thread: PostThread) -> MacroFeatures:
    post = thread.post
    if thread.comments:
        span_days = max(c.created_ts - post.created_ts for c in thread.comments)
        span_days = max(0, span_days) / 86400.0
    else:
        span_days = 0.0
    return MacroFeatures(
        spanning_time_days=span_days,
        n_comments=len(thread.comments),
        n_participants=len({c.author_id for c in thread.comments}),
        n_post_likes=post.like_count,
        n_comment_likes=sum(c.like_count for c in thread.comments),
    )


def dav(thread: PostThread, window_minutes: int = 5,
        t_final_minutes: int = 60) -> DavVector:
    """Per-window comment counts over the thread's first t_final minutes.

    Bin i (1-based) counts comments whose clamped offset in minutes
    lies in [(i-1)*window, i*window); a comment exactly at t_final is
    excluded.
    """
    if window_minutes <= 0 or t_final_minutes <= 0:
        raise FeatureConfigError("window and t_final must be positive")
    if t_final_minutes % window_minutes:
        raise FeatureConfigError(
            f"window {window_minutes} does not divide t_final {t_final_minutes}")
    n_bins = t_final_minutes // window_minutes
    counts = [0] * n_bins
    window_s = window_minutes * 60
    final_s = t_final_minutes * 60
    for c in thread.comments:
        offset = rel_seconds(thread.post, c)
        if offset < final_s:
            counts[offset // window_s] += 1
    return DavVector(window_minutes, t_final_minutes, tuple(counts))


def censor_thread(thread: PostThread, horizon_minutes: float) -> PostThread:
    """Copy of the thread keeping only comments before the horizon."""
    if horizon_minutes <= 0:
        raise FeatureConfigError("horizon must be positive")
    horizon_s = horizon_minutes * 60
    kept = [c for c in thread.comments if rel_seconds(thread.post, c) < horizon_s]
    return PostThread(thread.post, kept)


def fit_minmax(rows: list[list[float]]) -> list[tuple[float, float]]:
    """Per-dimension (min, max) over the given rows (training portion)."""
    if not rows:
        raise FeatureConfigError("cannot fit scaling on an empty dataset")
    dims = len(rows[0])
    stats = []
    for d in range(dims):
        col = [r[d] for r in rows]
        stats.append((min(col), max(col)))
    return stats


def apply_minmax(rows: list[list[float]],
                 stats: list[tuple[float, float]]) -> list[list[float]]:
    """Scale rows to [0,1] with the given stats; constant dimensions map
    to 0 and out-of-range values are clamped."""
    out = []
    for r in rows:
        scaled = []
        for v, (lo, hi) in zip(r, stats):
            if hi == lo:
                scaled.append(0.0)
            else:
                scaled.append(min(1.0, max(0.0, (v - lo) / (hi - lo))))
        out.append(scaled)
    return out


def normalize_features(rows: list[list[float]]
                       ) -> tuple[list[list[float]], list[tuple[float, float]]]:
    stats = fit_minmax(rows)
    return apply_minmax(rows, stats), stats


def featurize_threads(threads: list[PostThread], is_target: dict[str, bool],
                      window_minutes: int = 5, t_final_minutes: int = 60,
                      macro_mode: MacroMode = "full",
                      with_macro: bool = True, with_dav: bool = True,
                      ) -> list[FeatureVector]:
    """Feature vectors for a thread list.

    macro_mode "censored" computes the macro statistics on the thread
    censored at t_final, which is the honest near-real-time setting;
    "full" uses the whole thread life.
    """
    if macro_mode not in ("full", "censored"):
        raise FeatureConfigError(f"unknown macro mode {macro_mode!r}")
    out = []
    for thread in threads:
        macro = None
        if with_macro:
            src = thread if macro_mode == "full" else censor_thread(thread, t_final_minutes)
            macro = macro_features(src)
        vec = dav(thread, window_minutes, t_final_minutes) if with_dav else None
        out.append(FeatureVector(thread.post.post_id, macro, vec,
                                 bool(is_target.get(thread.post.post_id, False))))
    return out


def write_feature_csv(vectors: list[FeatureVector], path: str) -> None:
    if not vectors:
        raise FeatureConfigError("no feature vectors to write")
    k = len(vectors[0].dav.bins) if vectors[0].dav is not None else 0
    header = ["post_id", "is_target"]
    if vectors[0].macro is not None:
        header += ["span_days", "n_comments", "n_participants",
                   "post_likes", "comment_likes"]
    header += [f"dav_{i}" for i in range(1, k + 1)]
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for v in vectors:
            row = [v.post_id, int(v.label)]
            row += [repr(x) for x in v.values()]
            writer.writerow(row)


def read_feature_csv(path: str) -> tuple[list[str], list[list[float]], list[bool]]:
    """Returns (post_ids, feature rows, labels)."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        ids, rows, labels = [], [], []
        for rec in reader:
            ids.append(rec[0])
            labels.append(bool(int(rec[1])))
            rows.append([float(x) for x in rec[2:]])
    if header[:2] != ["post_id", "is_target"]:
        raise FeatureConfigError(f"unexpected feature CSV header in {path}")
    return ids, rows, labels
