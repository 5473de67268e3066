"""Ground-truth labeling: URL extraction, shortener expansion, and the
sorted merge join of URL observations against a categorized blacklist.

Blacklist keys containing "/" are full-URL keys; keys without "/" are
domain keys. Matching is a two-pointer merge over pre-sorted sequences,
once per key kind, so total cost is O(m log m + n log n) including the
sorts.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum
from urllib.parse import urlsplit, urlunsplit

from .corpus import Corpus, build_threads

MAX_EXPANSION_HOPS = 5

# two-level public suffixes seen in the corpus regions; registrable
# domains under these keep three labels
_PUBLIC_SUFFIXES = {"co.uk", "com.au", "com.tw", "co.jp"}

_TRAILING_JUNK = ".,;:!?)\"'’”]}>"

_URL_RE = re.compile(
    r"""(?i)\b(
        https?://[^\s<>"']+
        |
        (?:[a-z0-9][a-z0-9-]*\.)+[a-z]{2,}/[^\s<>"']*
    )""",
    re.VERBOSE,
)


class Category(str, Enum):
    ADS = "Ads"
    MALWARE = "Malware"
    PHISHING = "Phishing"
    PORN = "Porn"


_CATEGORY_LOOKUP = {c.value.lower(): c for c in Category}


@dataclass(frozen=True)
class UrlObservation:
    url: str
    domain: str
    page_id: str
    post_id: str
    comment_id: str
    account_id: str
    ts: int
    flagged: bool = False  # expansion chain exceeded the hop bound or cycled


@dataclass(frozen=True)
class BlacklistEntry:
    key: str  # lowercase domain, or full URL when it contains "/"
    category: Category


@dataclass(frozen=True)
class MaliciousLabel:
    comment_id: str
    category: Category
    matched_key: str


@dataclass(frozen=True)
class ThreadLabel:
    post_id: str
    is_target: bool


class LabelError(Exception):
    pass


def normalize_url(token: str) -> str | None:
    """Canonical absolute URL for a raw text token, or None if unusable.

    Lowercases scheme and host, strips the fragment and trailing
    punctuation, and assumes http for scheme-less host.tld/path tokens.
    """
    token = token.rstrip(_TRAILING_JUNK)
    if not token:
        return None
    if not re.match(r"(?i)https?://", token):
        token = "http://" + token
    parts = urlsplit(token)
    host = parts.netloc.lower()
    if "." not in host:
        return None
    return urlunsplit((parts.scheme.lower(), host, parts.path, parts.query, ""))


def extract_urls(raw_text: str) -> list[str]:
    """All normalized absolute http/https URLs found in a comment's text."""
    out = []
    for match in _URL_RE.finditer(raw_text):
        url = normalize_url(match.group(0))
        if url is not None:
            out.append(url)
    return out


def registrable_domain(url_or_host: str) -> str:
    """Registrable domain of a URL or hostname (lowercase, no scheme/path)."""
    host = url_or_host
    if "://" in host:
        host = urlsplit(host).netloc
    host = host.split("/", 1)[0].split(":", 1)[0].lower()
    labels = host.split(".")
    if len(labels) >= 3 and ".".join(labels[-2:]) in _PUBLIC_SUFFIXES:
        return ".".join(labels[-3:])
    return ".".join(labels[-2:]) if len(labels) >= 2 else host


def _strip_scheme(url: str) -> str:
    return re.sub(r"(?i)^https?://", "", url)


class ShortenerTable:
    """Offline stand-in for live shortener resolution.

    Holds the set of shortener hosts and a map from short URL
    (host/path form) to target URL.
    """

    def __init__(self, hosts: set[str] | None = None,
                 mapping: dict[str, str] | None = None):
        self.hosts = {h.lower() for h in (hosts or set())}
        self.mapping = {}
        for short, target in (mapping or {}).items():
            self.mapping[_strip_scheme(short).lower()] = target

    @classmethod
    def load(cls, map_path: str, hosts_path: str) -> "ShortenerTable":
        hosts = set()
        with open(hosts_path, encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if line:
                    hosts.add(line.lower())
        mapping = {}
        with open(map_path, encoding="utf-8") as fh:
            for line in fh:
                line = line.rstrip("\n")
                if not line.strip():
                    continue
                short, target = line.split("\t", 1)
                mapping[short] = target
        return cls(hosts, mapping)

    def lookup(self, url: str) -> str | None:
        host = urlsplit(url).netloc.lower()
        if host not in self.hosts:
            return None
        return self.mapping.get(_strip_scheme(url).lower())


def expand_url(url: str, table: ShortenerTable) -> tuple[str, bool]:
    """Follow shortener redirects through the offline table.

    Returns (resolved URL, flagged). flagged is True when the chain
    exceeds MAX_EXPANSION_HOPS or forms a cycle; the last resolved URL
    is returned in that case.
    """
    seen = {url}
    current = url
    for _ in range(MAX_EXPANSION_HOPS):
        target = table.lookup(current)
        if target is None:
            return current, False
        target = normalize_url(target) or target
        if target == current or target in seen:
            return current, True
        seen.add(target)
        current = target
    return current, table.lookup(current) is not None


def collect_observations(corpus: Corpus, table: ShortenerTable) -> list[UrlObservation]:
    """One observation per (comment, extracted URL) pair after expansion,
    sorted by (domain, url, ts)."""
    out = []
    for thread in build_threads(corpus):
        post = thread.post
        for comment in thread.comments:
            for url in extract_urls(comment.raw_text):
                resolved, flagged = expand_url(url, table)
                out.append(UrlObservation(
                    url=resolved,
                    domain=registrable_domain(resolved),
                    page_id=post.page_id,
                    post_id=post.post_id,
                    comment_id=comment.comment_id,
                    account_id=comment.author_id,
                    ts=comment.created_ts,
                    flagged=flagged,
                ))
    out.sort(key=lambda o: (o.domain, o.url, o.ts))
    return out


def load_blacklist(path: str) -> list[BlacklistEntry]:
    """Read a key<TAB>category TSV and return entries sorted by key."""
    entries = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line.strip():
                continue
            try:
                key, cat = line.split("\t", 1)
            except ValueError as exc:
                raise LabelError(f"blacklist line {lineno}: not key<TAB>category") from exc
            category = _CATEGORY_LOOKUP.get(cat.strip().lower())
            if category is None:
                raise LabelError(f"blacklist line {lineno}: unknown category {cat!r}")
            entries.append(BlacklistEntry(_strip_scheme(key.strip()).lower(), category))
    entries.sort(key=lambda e: e.key)
    return entries


def _check_sorted(keys, what: str) -> None:
    for i in range(1, len(keys)):
        if keys[i] < keys[i - 1]:
            raise LabelError(f"{what} not sorted at index {i}")


def _merge_matches(obs_keyed: list[tuple[str, UrlObservation]],
                   entries: list[BlacklistEntry]):
    """Two-pointer merge over two key-sorted sequences, yielding
    (observation, entry) for every equal-key pair."""
    i = j = 0
    m, n = len(obs_keyed), len(entries)
    while i < m and j < n:
        key = obs_keyed[i][0]
        if key < entries[j].key:
            i += 1
        elif key > entries[j].key:
            j += 1
        else:
            # runs of equal keys on both sides
            i2 = i
            while i2 < m and obs_keyed[i2][0] == key:
                i2 += 1
            j2 = j
            while j2 < n and entries[j2].key == key:
                j2 += 1
            for k in range(i, i2):
                for l in range(j, j2):
                    yield obs_keyed[k][1], entries[l]
            i, j = i2, j2


def join_blacklist(observations: list[UrlObservation],
                   blacklist: list[BlacklistEntry]) -> list[MaliciousLabel]:
    """Match observations against the blacklist with sorted merges.

    An observation matches when its full URL equals a full-URL key or
    its domain equals a domain key. Output is deduplicated per
    (comment_id, category) and sorted.
    """
    _check_sorted([(o.domain, o.url, o.ts) for o in observations], "observations")
    _check_sorted([e.key for e in blacklist], "blacklist")

    domain_entries = [e for e in blacklist if "/" not in e.key]
    url_entries = [e for e in blacklist if "/" in e.key]

    found: dict[tuple[str, Category], str] = {}

    by_domain = [(o.domain, o) for o in observations]  # already domain-sorted
    for obs, entry in _merge_matches(by_domain, domain_entries):
        found.setdefault((obs.comment_id, entry.category), entry.key)

    by_url = sorted(((_strip_scheme(o.url), o) for o in observations),
                    key=lambda kv: kv[0])
    for obs, entry in _merge_matches(by_url, url_entries):
        found.setdefault((obs.comment_id, entry.category), entry.key)

    labels = [MaliciousLabel(cid, cat, key)
              for (cid, cat), key in found.items()]
    labels.sort(key=lambda lab: (lab.comment_id, lab.category.value))
    return labels


def label_threads(corpus: Corpus, labels: list[MaliciousLabel]
                  ) -> tuple[dict[str, ThreadLabel], set[str]]:
    """Thread-level target labels plus the derived attacker account set."""
    unknown = sorted({lab.comment_id for lab in labels
                      if lab.comment_id not in corpus.comments})
    if unknown:
        raise LabelError(f"labels reference unknown comments: {unknown}")
    target_posts = set()
    attackers = set()
    for lab in labels:
        comment = corpus.comments[lab.comment_id]
        target_posts.add(comment.post_id)
        attackers.add(comment.author_id)
    thread_labels = {pid: ThreadLabel(pid, pid in target_posts)
                     for pid in corpus.posts}
    return thread_labels, attackers


def write_labels(labels: list[MaliciousLabel], path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for lab in labels:
            fh.write(f"{lab.comment_id}\t{lab.category.value.lower()}\t{lab.matched_key}\n")


def read_labels(path: str) -> list[MaliciousLabel]:
    labels = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line.strip():
                continue
            try:
                cid, cat, key = line.split("\t")
            except ValueError as exc:
                raise LabelError(f"labels line {lineno}: bad row") from exc
            category = _CATEGORY_LOOKUP.get(cat.lower())
            if category is None:
                raise LabelError(f"labels line {lineno}: unknown category {cat!r}")
            labels.append(MaliciousLabel(cid, category, key))
    return labels
