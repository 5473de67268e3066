"""Seeded synthetic corpus generator.

Stands in for the private dataset: benign comment arrivals follow a
rise-peak-decay Poisson intensity, target threads get a popularity
multiplier, and malicious comments are injected per a configurable
strategy mix with URLs drawn from a generated blacklist. Every injected
attack is recorded as planted truth so the labeling pipeline can be
verified end to end.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .corpus import Comment, Corpus, Page, Post, Region
from .labeler import BlacklistEntry, Category, MaliciousLabel

EARLY_STAGE = "EarlyStage"
LATE_STAGE = "LateStage"
SYNC_BURST = "SyncBurst"
SINGLE_REPEAT = "SingleAccountRepeat"

STRATEGIES = (EARLY_STAGE, LATE_STAGE, SYNC_BURST, SINGLE_REPEAT)

SHORTENER_HOST = "sh-url.io"

# 2011-01-01T00:00:00Z .. 2014-11-30T00:00:00Z
_START_TS = 1293840000
_END_TS = 1417305600


class ConfigError(Exception):
    pass


@dataclass(frozen=True)
class GeneratorConfig:
    seed: int = 42
    n_pages: int = 10
    n_threads: int = 2000
    target_fraction: float = 0.1
    # popularity scale factors for target threads
    target_comment_multiplier: float = 3.0
    target_like_multiplier: float = 3.0
    # arrival intensity shape: rises, peaks at peak_minute, long-tail decay
    peak_minute: float = 12.0
    mean_first_hour_comments: float = 40.0
    # per-thread popularity spread (lognormal sigma); heavy tails make
    # popular non-targets overlap with targets
    popularity_sigma: float = 0.3
    # fraction of targets whose activity is a sharp early burst (peaking
    # at burst_peak_minute) instead of a sustained lift; the two target
    # modes together make single-feature marginals bimodal
    burst_target_fraction: float = 0.45
    burst_peak_minute: float = 2.0
    strategy_mix: dict[str, float] = field(default_factory=lambda: {
        EARLY_STAGE: 0.25, LATE_STAGE: 0.25, SYNC_BURST: 0.25, SINGLE_REPEAT: 0.25})
    sync_burst_accounts: int = 4
    sync_burst_span_minutes: float = 8.0
    single_repeat_copies: int = 12
    category_mix: dict[str, float] = field(default_factory=lambda: {
        c.value: 0.25 for c in Category})
    regions: tuple[str, ...] = ("MiddleEast", "Asia", "Europe", "USNews", "USPolitics")
    accounts_per_page: int = 400
    n_attacker_accounts: int = 60
    attacker_zero_like_prob: float = 0.75
    shortener_fraction: float = 0.3
    benign_url_prob: float = 0.05
    campaign_urls_per_category: int = 25
    url_key_fraction: float = 0.25
    sim_minutes: int = 600

    def validate(self) -> None:
        if self.n_pages < 1 or self.n_threads < 1:
            raise ConfigError("n_pages and n_threads must be positive")
        if not 0.0 < self.target_fraction < 1.0:
            raise ConfigError("target_fraction must be in (0,1)")
        for name, mix in (("strategy_mix", self.strategy_mix),
                          ("category_mix", self.category_mix)):
            total = sum(mix.values())
            if abs(total - 1.0) > 1e-9 or any(v < 0 for v in mix.values()):
                raise ConfigError(f"{name} weights must be >= 0 and sum to 1")
        if set(self.strategy_mix) - set(STRATEGIES):
            raise ConfigError(f"unknown strategies {set(self.strategy_mix) - set(STRATEGIES)}")
        if self.sync_burst_accounts > self.n_attacker_accounts:
            raise ConfigError("SyncBurst account count exceeds the attacker pool")
        if self.sync_burst_accounts < 2:
            raise ConfigError("SyncBurst needs at least 2 accounts")
        if self.single_repeat_copies < 1:
            raise ConfigError("single_repeat_copies must be >= 1")


@dataclass(frozen=True)
class PlantedAttack:
    comment_id: str
    category: str
    strategy: str
    account_id: str
    url: str


@dataclass
class SynthResult:
    corpus: Corpus
    blacklist: list[BlacklistEntry]
    shortener_hosts: list[str]
    shortener_map: dict[str, str]
    planted: list[PlantedAttack]


def intensity(minutes: np.ndarray, peak: float, amplitude: float) -> np.ndarray:
    """Per-minute arrival rate A*(t/tau)*exp(1 - t/tau)."""
    t = np.asarray(minutes, dtype=float)
    return amplitude * (t / peak) * np.exp(1.0 - t / peak)


def _amplitude(config: GeneratorConfig) -> float:
    shape = intensity(np.arange(60) + 0.5, config.peak_minute, 1.0)
    return config.mean_first_hour_comments / float(shape.sum())


def _campaigns(config: GeneratorConfig):
    """Deterministic campaign URL pool, blacklist, and shortener map.

    Domains are unique per (category, index) so a comment never matches
    more than one category."""
    blacklist = []
    urls: dict[str, list[str]] = {}
    shortener_map: dict[str, str] = {}
    short_alias: dict[str, str] = {}
    for category in Category:
        cat = category.value
        urls[cat] = []
        for j in range(config.campaign_urls_per_category):
            domain = f"{cat.lower()}{j:03d}-sink.com"
            url = f"http://{domain}/offer{j}"
            urls[cat].append(url)
            if config.url_key_fraction > 0 and j % max(1, round(1 / config.url_key_fraction)) == 0:
                blacklist.append(BlacklistEntry(f"{domain}/offer{j}", category))
            else:
                blacklist.append(BlacklistEntry(domain, category))
            if j % 3 == 0:  # a third of the campaigns hide behind the shortener
                code = f"{cat.lower()}{j:02d}"
                shortener_map[f"{SHORTENER_HOST}/{code}"] = url
                short_alias[url] = f"http://{SHORTENER_HOST}/{code}"
    blacklist.sort(key=lambda e: e.key)
    return urls, blacklist, shortener_map, short_alias


def _target_flags(n_threads: int, fraction: float) -> list[bool]:
    """Exactly round(fraction*n) targets, spread evenly over the index."""
    n_targets = round(n_threads * fraction)
    return [((i + 1) * n_targets) // n_threads > (i * n_targets) // n_threads
            for i in range(n_threads)]


_BENIGN_SNIPPETS = (
    "totally agree with this",
    "not sure I buy that",
    "this is big news",
    "thanks for sharing",
    "what happens next?",
    "saw this earlier today",
    "hard to believe",
    "following this story closely",
)


def generate(config: GeneratorConfig) -> SynthResult:
    """Build the corpus, blacklist, shortener table, and planted truth.

    Fully deterministic per config: each thread derives its own RNG from
    (seed, thread index)."""
    config.validate()
    amplitude = _amplitude(config)
    urls, blacklist, shortener_map, short_alias = _campaigns(config)
    master = np.random.default_rng([config.seed, 0])

    regions = [Region(config.regions[i % len(config.regions)])
               for i in range(config.n_pages)]
    pages = {f"pg{i:02d}": Page(f"pg{i:02d}", f"Synth Page {i:02d}", regions[i])
             for i in range(config.n_pages)}
    page_ids = sorted(pages)
    pools = {pid: [f"u{idx:02d}_{k:04d}" for k in range(config.accounts_per_page)]
             for idx, pid in enumerate(page_ids)}
    attackers = [f"atk{k:03d}" for k in range(config.n_attacker_accounts)]
    attacker_zero_like = {a: bool(master.uniform() < config.attacker_zero_like_prob)
                          for a in attackers}

    strategy_names = sorted(config.strategy_mix)
    strategy_w = np.array([config.strategy_mix[s] for s in strategy_names])
    category_names = sorted(config.category_mix)
    category_w = np.array([config.category_mix[c] for c in category_names])

    targets = _target_flags(config.n_threads, config.target_fraction)
    minutes_grid = np.arange(config.sim_minutes) + 0.5
    base_lam = intensity(minutes_grid, config.peak_minute, amplitude)

    posts: dict[str, Post] = {}
    comments: dict[str, Comment] = {}
    planted: list[PlantedAttack] = []

    for i in range(config.n_threads):
        rng = np.random.default_rng([config.seed, 1, i])
        page_id = page_ids[i % config.n_pages]
        pool = pools[page_id]
        post_id = f"p{i:05d}"
        post_ts = int(_START_TS + rng.integers(0, _END_TS - _START_TS))
        sigma = config.popularity_sigma
        spread = float(rng.lognormal(-0.5 * sigma * sigma, sigma)) if sigma > 0 else 1.0
        burst_mode = bool(targets[i] and rng.uniform() < config.burst_target_fraction)
        mult = (config.target_comment_multiplier if targets[i] else 1.0) * spread
        like_mult = (config.target_like_multiplier if targets[i] else 1.0) * spread
        post = Post(post_id, page_id, pool[int(rng.integers(len(pool)))],
                    post_ts, int(rng.poisson(30 * like_mult)),
                    f"synthetic story {i}")
        posts[post_id] = post

        if burst_mode:
            # same expected first-hour volume as a sustained-lift target,
            # but concentrated into the first few minutes
            lam = intensity(minutes_grid, config.burst_peak_minute, 1.0)
            lam *= (config.mean_first_hour_comments * mult) / float(lam[:60].sum())
        else:
            lam = base_lam * mult
        counts = rng.poisson(lam)
        events: list[tuple[int, str, int, str]] = []  # (ts, author, likes, text)
        for minute in np.nonzero(counts)[0]:
            for _ in range(int(counts[minute])):
                ts = post_ts + int(minute) * 60 + int(rng.integers(0, 60))
                author = pool[int(rng.integers(len(pool)))]
                likes = int(rng.poisson(0.5 * like_mult))
                if rng.uniform() < config.benign_url_prob:
                    text = f"source: http://news-site.org/story/{int(rng.integers(10000))}"
                else:
                    text = _BENIGN_SNIPPETS[int(rng.integers(len(_BENIGN_SNIPPETS)))]
                events.append((ts, author, likes, text))

        attack_events: list[tuple[int, str, str, str]] = []  # (ts, account, url, strategy)
        if targets[i]:
            strategy = strategy_names[int(rng.choice(len(strategy_names), p=strategy_w))]
            category = category_names[int(rng.choice(len(category_names), p=category_w))]
            url = urls[category][int(rng.integers(len(urls[category])))]
            if strategy == EARLY_STAGE:
                t_attack = rng.uniform(0.0, config.peak_minute)
                account = attackers[int(rng.integers(len(attackers)))]
                attack_events.append((post_ts + int(t_attack * 60), account, url, strategy))
            elif strategy == LATE_STAGE:
                benign_minutes = sorted((ts - post_ts) / 60.0 for ts, *_ in events)
                if benign_minutes:
                    q = rng.uniform(0.55, 0.98)
                    t_attack = float(np.quantile(benign_minutes, q))
                else:
                    t_attack = 60.0
                account = attackers[int(rng.integers(len(attackers)))]
                attack_events.append((post_ts + int(t_attack * 60) + 1, account, url, strategy))
            elif strategy == SYNC_BURST:
                k = config.sync_burst_accounts
                picks = rng.choice(len(attackers), size=k, replace=False)
                t0 = rng.uniform(3.0, 90.0)
                offsets = np.sort(rng.uniform(0.0, config.sync_burst_span_minutes, size=k))
                for acc_idx, off in zip(picks, offsets):
                    attack_events.append((post_ts + int((t0 + off) * 60),
                                          attackers[int(acc_idx)], url, strategy))
            else:  # SINGLE_REPEAT
                account = attackers[int(rng.integers(len(attackers)))]
                times = np.sort(rng.uniform(0.0, 180.0, size=config.single_repeat_copies))
                for t in times:
                    attack_events.append((post_ts + int(t * 60), account, url, strategy))

        rows: list[tuple[int, str, int, str, str | None, str | None]] = [
            (ts, author, likes, text, None, None) for ts, author, likes, text in events]
        for ts, account, url, strategy in attack_events:
            if attacker_zero_like[account]:
                likes = 0
            else:
                likes = int(rng.poisson(0.3))
            shown = None
            if url in short_alias and rng.uniform() < config.shortener_fraction:
                shown = short_alias[url]
            text = f"check this out {shown or url}"
            rows.append((ts, account, likes, text, url, strategy))

        rows.sort(key=lambda r: r[0])
        for j, (ts, author, likes, text, url, strategy) in enumerate(rows):
            cid = f"c{i:05d}_{j:04d}"
            comments[cid] = Comment(cid, post_id, author, ts, likes, text)
            if url is not None:
                category = _category_of(url)
                planted.append(PlantedAttack(cid, category, strategy, author, url))

    corpus = Corpus(pages=pages, posts=posts, comments=comments)
    planted.sort(key=lambda p: p.comment_id)
    return SynthResult(corpus=corpus, blacklist=blacklist,
                       shortener_hosts=[SHORTENER_HOST],
                       shortener_map=dict(sorted(shortener_map.items())),
                       planted=planted)


def _category_of(url: str) -> str:
    host = url.split("//", 1)[1].split("/", 1)[0]
    for category in Category:
        if host.startswith(category.value.lower()):
            return category.value
    raise ValueError(f"not a campaign URL: {url}")


def profile_config(profile: str, **overrides) -> GeneratorConfig:
    """Preset configs: 'default' uses the mixed strategy blend; 'early',
    'late', 'burst', and 'repeat' concentrate all attacks on one strategy."""
    mixes = {
        "default": None,
        "early": {EARLY_STAGE: 1.0, LATE_STAGE: 0.0, SYNC_BURST: 0.0, SINGLE_REPEAT: 0.0},
        "late": {EARLY_STAGE: 0.0, LATE_STAGE: 1.0, SYNC_BURST: 0.0, SINGLE_REPEAT: 0.0},
        "burst": {EARLY_STAGE: 0.0, LATE_STAGE: 0.0, SYNC_BURST: 1.0, SINGLE_REPEAT: 0.0},
        "repeat": {EARLY_STAGE: 0.0, LATE_STAGE: 0.0, SYNC_BURST: 0.0, SINGLE_REPEAT: 1.0},
    }
    if profile not in mixes:
        raise ConfigError(f"unknown profile {profile!r}; choose from {sorted(mixes)}")
    config = GeneratorConfig(**overrides)
    if mixes[profile] is not None:
        config = replace(config, strategy_mix=mixes[profile])
    config.validate()
    return config


@dataclass
class VerifyReport:
    precision: float
    recall: float
    n_labels: int
    n_planted: int
    false_positives: list[tuple[str, str]]
    false_negatives: list[tuple[str, str]]


def verify_planted(labels: list[MaliciousLabel],
                   planted: list[PlantedAttack]) -> VerifyReport:
    """Compare labeler output against the generator's planted truth on
    (comment_id, category) pairs."""
    got = {(lab.comment_id, lab.category.value) for lab in labels}
    want = {(p.comment_id, p.category) for p in planted}
    fp = sorted(got - want)
    fn = sorted(want - got)
    precision = (len(got & want) / len(got)) if got else 1.0
    recall = (len(got & want) / len(want)) if want else 1.0
    return VerifyReport(precision, recall, len(got), len(want), fp, fn)


# ---------------------------------------------------------------------------
# file emission

def write_corpus_jsonl(result: SynthResult, path: str) -> None:
    corpus = result.corpus
    with open(path, "w", encoding="utf-8") as fh:
        for pid in sorted(corpus.pages):
            p = corpus.pages[pid]
            fh.write(json.dumps({"kind": "page", "id": p.page_id, "name": p.name,
                                 "region": p.region.value}, sort_keys=True) + "\n")
        for pid in sorted(corpus.posts):
            p = corpus.posts[pid]
            fh.write(json.dumps({"kind": "post", "id": p.post_id, "page_id": p.page_id,
                                 "author_id": p.author_id, "created_ts": p.created_ts,
                                 "like_count": p.like_count, "text": p.raw_text},
                                sort_keys=True) + "\n")
        for cid in sorted(corpus.comments):
            c = corpus.comments[cid]
            fh.write(json.dumps({"kind": "comment", "id": c.comment_id,
                                 "post_id": c.post_id, "author_id": c.author_id,
                                 "created_ts": c.created_ts, "like_count": c.like_count,
                                 "text": c.raw_text}, sort_keys=True) + "\n")


def write_blacklist_tsv(result: SynthResult, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for e in result.blacklist:
            fh.write(f"{e.key}\t{e.category.value.lower()}\n")


def write_shortener_files(result: SynthResult, map_path: str, hosts_path: str) -> None:
    with open(map_path, "w", encoding="utf-8") as fh:
        for short, target in result.shortener_map.items():
            fh.write(f"{short}\t{target}\n")
    with open(hosts_path, "w", encoding="utf-8") as fh:
        for host in result.shortener_hosts:
            fh.write(host + "\n")


def write_planted_jsonl(result: SynthResult, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for p in result.planted:
            fh.write(json.dumps({"comment_id": p.comment_id, "category": p.category,
                                 "strategy": p.strategy, "account_id": p.account_id,
                                 "url": p.url}, sort_keys=True) + "\n")


def read_planted_jsonl(path: str) -> list[PlantedAttack]:
    out = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                d = json.loads(line)
                out.append(PlantedAttack(d["comment_id"], d["category"],
                                         d["strategy"], d["account_id"], d["url"]))
    return out
