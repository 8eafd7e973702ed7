"""Exact page-id deduplication across extractor variants (Union merge),
MinHash-LSH fuzzy deduplication, and data-constrained subsampling.

The Union of several per-extractor datasets keeps every surviving page id
exactly once. Which extractor's version survives is decided by the plan
strategy: ``Manual`` follows a fixed preference order, ``Random`` draws
uniformly with a generator keyed by (seed, page_id) so the outcome does not
depend on input ordering. Fuzzy dedup signs each document with 128 minima of
64-bit universal-hash permutations over word 5-gram shingles, finds candidate
pairs by LSH banding, verifies them against the estimated Jaccard threshold,
and keeps the lexicographically smallest page id per cluster.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from functools import lru_cache
from hashlib import blake2b
from itertools import combinations
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np
import yaml

from corpuskit.extractors import ExtractedDoc, ExtractorId
from corpuskit.tokenize import tokenize_words
from corpuskit.warc import PageId


@dataclass(frozen=True)
class Manual:
    """Keep the earliest extractor in ``preference`` among survivors."""

    preference: tuple[ExtractorId, ...]


@dataclass(frozen=True)
class Random:
    """Keep a uniform choice, keyed by (seed, page_id)."""

    seed: int = 0


Strategy = Manual | Random


@dataclass(frozen=True)
class UnionInput:
    label: str
    extractor: ExtractorId
    threshold: float
    path: str | None = None


@dataclass(frozen=True)
class UnionPlan:
    """A Union(...) dataset build: inputs, survivor strategy, optional
    rededuplication pass over the merged output."""

    inputs: tuple[UnionInput, ...]
    strategy: Strategy
    rededup: bool = False

    def __post_init__(self) -> None:
        extractors = [i.extractor for i in self.inputs]
        if len(set(extractors)) != len(extractors):
            raise ValueError("union inputs must have distinct extractors")
        if isinstance(self.strategy, Manual):
            _check_preference(self.strategy.preference, extractors)


def _check_preference(preference: Sequence[ExtractorId], extractors: Iterable[ExtractorId]) -> None:
    if len(set(preference)) != len(preference):
        raise ValueError("preference order lists an extractor twice")
    missing = set(extractors) - set(preference)
    if missing:
        raise ValueError(f"preference order missing extractors: {sorted(missing)}")


def union_merge(
    datasets: Sequence[tuple[ExtractorId, Sequence[ExtractedDoc]]],
    strategy: Strategy,
) -> list[ExtractedDoc]:
    """Merge per-extractor datasets into one, single version per page id.

    Output page ids are the set union of the inputs'; output order is sorted
    by page id (deterministic regardless of input order).
    """
    ids = [name for name, _ in datasets]
    if len(set(ids)) != len(ids):
        raise ValueError("datasets must have distinct extractor ids")
    if isinstance(strategy, Manual):
        _check_preference(strategy.preference, ids)
        rank = {name: i for i, name in enumerate(strategy.preference)}

    by_page: dict[PageId, dict[ExtractorId, ExtractedDoc]] = {}
    for name, docs in datasets:
        seen: set[PageId] = set()
        for doc in docs:
            if doc.page_id in seen:
                raise ValueError(f"dataset {name!r} has duplicate page_id {doc.page_id!r}")
            seen.add(doc.page_id)
            by_page.setdefault(doc.page_id, {})[name] = doc

    merged = []
    for page_id in sorted(by_page):
        versions = by_page[page_id]
        if len(versions) == 1:
            merged.append(next(iter(versions.values())))
        elif isinstance(strategy, Manual):
            winner = min(versions, key=rank.get)
            merged.append(versions[winner])
        else:
            names = sorted(versions)
            digest = blake2b(
                f"{strategy.seed}:{page_id}".encode("utf-8"), digest_size=8
            ).digest()
            merged.append(versions[names[int.from_bytes(digest, "little") % len(names)]])
    return merged


# -- MinHash ---------------------------------------------------------------------


@dataclass(frozen=True)
class MinHashConfig:
    num_perm: int = 128
    shingle_width: int = 5
    seed: int = 0


@dataclass
class MinHashSignature:
    values: np.ndarray  # uint64, length num_perm
    page_id: PageId
    extractor: ExtractorId


@lru_cache(maxsize=8)
def _permutations(num_perm: int, seed: int) -> tuple[np.ndarray, np.ndarray]:
    rng = np.random.default_rng(seed)
    a = rng.integers(1, 1 << 63, size=num_perm, dtype=np.uint64) * np.uint64(2) + np.uint64(1)
    b = rng.integers(0, 1 << 63, size=num_perm, dtype=np.uint64)
    return a, b


def shingle_set(text: str, width: int) -> set[str]:
    """Word shingles of the given width; short docs get one padded shingle."""
    tokens = tokenize_words(text)
    if len(tokens) < width:
        return {" ".join(tokens)}
    return {" ".join(tokens[i : i + width]) for i in range(len(tokens) - width + 1)}


def _shingle_hashes(shingles: set[str]) -> np.ndarray:
    return np.array(
        sorted(
            int.from_bytes(blake2b(s.encode("utf-8"), digest_size=8).digest(), "little")
            for s in shingles
        ),
        dtype=np.uint64,
    )


def minhash_signature(doc: ExtractedDoc, config: MinHashConfig | None = None) -> MinHashSignature:
    """Deterministic signature; identical texts give identical signatures."""
    config = config or MinHashConfig()
    a, b = _permutations(config.num_perm, config.seed)
    hashes = _shingle_hashes(shingle_set(doc.text, config.shingle_width))
    # Multiply-add universal hash mod 2^64 (uint64 wraparound), minimum per
    # permutation over all shingles.
    values = (a[:, None] * hashes[None, :] + b[:, None]).min(axis=1)
    return MinHashSignature(values=values, page_id=doc.page_id, extractor=doc.extractor)


def estimated_jaccard(sig_a: MinHashSignature, sig_b: MinHashSignature) -> float:
    """Matching-coordinate fraction."""
    return float(np.mean(sig_a.values == sig_b.values))


@dataclass(frozen=True)
class DedupConfig:
    bands: int = 16
    rows: int = 8
    verify_threshold: float = 0.7
    minhash: MinHashConfig = field(default_factory=MinHashConfig)

    def __post_init__(self) -> None:
        if self.bands * self.rows != self.minhash.num_perm:
            raise ValueError("bands * rows must equal the permutation count")


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, x: int, y: int) -> None:
        rx, ry = self.find(x), self.find(y)
        if rx != ry:
            self.parent[max(rx, ry)] = min(rx, ry)


def fuzzy_dedup(
    docs: Sequence[ExtractedDoc], config: DedupConfig | None = None
) -> list[ExtractedDoc]:
    """Remove near-duplicates: LSH banding proposes pairs, pairs verifying
    estimated Jaccard >= threshold merge into clusters, and the smallest
    page id survives per cluster. Input order is preserved, so the pass is
    idempotent."""
    config = config or DedupConfig()
    sigs = [minhash_signature(doc, config.minhash) for doc in docs]

    buckets: dict[tuple[int, bytes], list[int]] = {}
    for idx, sig in enumerate(sigs):
        for band in range(config.bands):
            key = (band, sig.values[band * config.rows : (band + 1) * config.rows].tobytes())
            buckets.setdefault(key, []).append(idx)

    uf = _UnionFind(len(docs))
    checked: set[tuple[int, int]] = set()
    for members in buckets.values():
        if len(members) < 2:
            continue
        for i, j in combinations(members, 2):
            pair = (i, j) if i < j else (j, i)
            if pair in checked:
                continue
            checked.add(pair)
            if estimated_jaccard(sigs[pair[0]], sigs[pair[1]]) >= config.verify_threshold:
                uf.union(*pair)

    survivor: dict[int, int] = {}
    for idx, doc in enumerate(docs):
        root = uf.find(idx)
        best = survivor.get(root)
        if best is None or (doc.page_id, doc.extractor) < (
            docs[best].page_id,
            docs[best].extractor,
        ):
            survivor[root] = idx
    keep = set(survivor.values())
    return [doc for idx, doc in enumerate(docs) if idx in keep]


def subsample(docs: Sequence[ExtractedDoc], fraction: float, seed: int) -> list[ExtractedDoc]:
    """Uniform sample without replacement of round(fraction * n) docs,
    deterministic under the seed; input order is preserved."""
    if not 0 < fraction <= 1:
        raise ValueError(f"fraction must be in (0, 1], got {fraction}")
    k = round(fraction * len(docs))
    rng = random.Random(seed)
    picked = sorted(rng.sample(range(len(docs)), k))
    return [docs[i] for i in picked]


def compute_repeats(train_tokens: float, dataset_tokens: float) -> float:
    """Effective repetitions over the corpus for a training-token budget,
    reported to one decimal."""
    if dataset_tokens <= 0:
        raise ValueError("dataset_tokens must be positive")
    return round(train_tokens / dataset_tokens, 1)


# -- plan files (CLI `corpus union`) ------------------------------------------------


def parse_union_plan(obj: Mapping) -> UnionPlan:
    """Build a plan from a config mapping (see load_union_plan for the file
    format)."""
    inputs = tuple(
        UnionInput(
            label=str(entry.get("label", entry["extractor"])),
            extractor=entry["extractor"],
            threshold=float(entry.get("threshold", 0.0)),
            path=entry.get("path"),
        )
        for entry in obj.get("inputs", [])
    )
    if not inputs:
        raise ValueError("union plan needs at least one input")
    name = str(obj.get("strategy", "manual")).lower()
    if name == "manual":
        preference = obj.get("preference")
        if not preference:
            raise ValueError("manual strategy requires a preference order")
        strategy: Strategy = Manual(preference=tuple(preference))
    elif name == "random":
        strategy = Random(seed=int(obj.get("seed", 0)))
    else:
        raise ValueError(f"unknown union strategy {name!r}")
    return UnionPlan(inputs=inputs, strategy=strategy, rededup=bool(obj.get("rededup", False)))


def load_union_plan(path: str | Path) -> UnionPlan:
    """Load a YAML plan: inputs (label/extractor/threshold/path), strategy
    manual|random, preference list or seed, rededup flag."""
    with open(path, encoding="utf-8") as fh:
        obj = yaml.safe_load(fh)
    if not isinstance(obj, Mapping):
        raise ValueError(f"union plan {path} must be a mapping")
    return parse_union_plan(obj)
