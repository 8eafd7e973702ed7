#!/usr/bin/env python3
"""Compare Union strategies on generated per-extractor datasets.

Builds three synthetic per-extractor datasets with controlled overlap and
planted cross-extractor near-duplicates, then sweeps Manual/Random survivor
strategies with and without rededuplication. Prints overlap cells, token
yields against the first dataset as baseline, and effective repeats for a
fixed training budget.

Usage: python scripts/union_strategies_experiment.py [seed]
"""

from __future__ import annotations

import random
import sys

from corpuskit.dedup import Manual, Random, compute_repeats, fuzzy_dedup, union_merge
from corpuskit.extractors import ExtractedDoc
from corpuskit.reports import venn_report, yield_report

EXTRACTORS = ["whitespace_table", "markdown_table", "block_stopword"]
WORDS = [f"tok{i}" for i in range(800)]
TRAIN_BUDGET = 200_000


def build_datasets(seed: int) -> dict[str, list[ExtractedDoc]]:
    """600 pages; each extractor keeps an overlapping ~60% subset and renders
    slightly different text. A slice of pages gets near-duplicate twins to
    give the rededup pass something to find."""
    rng = random.Random(seed)
    pages = {}
    for i in range(600):
        base = [rng.choice(WORDS) for _ in range(rng.randint(40, 160))]
        pages[f"page{i:04d}"] = base
    # planted near-duplicate page pairs (same content, different page ids)
    for i in range(0, 40, 2):
        pages[f"page{i + 1:04d}"] = list(pages[f"page{i:04d}"])

    # extractor renderings differ in verbosity: markdown markup adds tokens,
    # the stopword extractor drops block content (kept small enough that
    # renderings of duplicate pages stay above the rededup verify threshold)
    trim = {"whitespace_table": 1.0, "markdown_table": 1.06, "block_stopword": 0.94}
    datasets: dict[str, list[ExtractedDoc]] = {e: [] for e in EXTRACTORS}
    for page_id, base in pages.items():
        for extractor in EXTRACTORS:
            if rng.random() > 0.6:
                continue
            words = list(base[: int(len(base) * min(trim[extractor], 1.0))])
            if trim[extractor] > 1.0:
                words += ["|"] * int(len(base) * (trim[extractor] - 1.0))
            words[rng.randrange(len(words))] = f"{extractor[:2]}{rng.randint(0, 9)}"
            text = " ".join(words)
            datasets[extractor].append(
                ExtractedDoc(
                    page_id=page_id,
                    extractor=extractor,
                    url=f"http://site{int(page_id[4:]) % 17}.example.com/{page_id}",
                    text=text,
                    token_count=len(words),
                )
            )
    return datasets


def tokens(docs: list[ExtractedDoc]) -> int:
    return sum(d.token_count for d in docs)


def main() -> int:
    seed = int(sys.argv[1]) if len(sys.argv) > 1 else 0
    datasets = build_datasets(seed)
    deduped = {e: fuzzy_dedup(docs) for e, docs in datasets.items()}

    print("per-extractor datasets (after per-dataset fuzzy dedup):")
    for e in EXTRACTORS:
        print(f"  {e}: {len(deduped[e])} docs, {tokens(deduped[e])} tokens")

    venn = venn_report({e: {d.page_id for d in deduped[e]} for e in EXTRACTORS})
    print("\npage-id overlap cells:")
    for cell, count in venn.cells.items():
        print(f"  {cell}: {count}")
    print(f"  unique fraction: {venn.unique_fraction:.2f}")

    strategies = [
        ("Manual", Manual(tuple(EXTRACTORS))),
        ("Random", Random(seed=seed)),
    ]
    counts = {EXTRACTORS[0]: float(tokens(deduped[EXTRACTORS[0]]))}
    repeats_rows = []
    for name, strategy in strategies:
        merged = union_merge([(e, deduped[e]) for e in EXTRACTORS], strategy)
        rededuped = fuzzy_dedup(merged)
        counts[f"Union ({name})"] = float(tokens(merged))
        counts[f"Union ({name}) w/ Rededup"] = float(tokens(rededuped))
        repeats_rows.append((f"Union ({name})", tokens(merged)))
        repeats_rows.append((f"Union ({name}) w/ Rededup", tokens(rededuped)))

    report = yield_report(counts, baseline=EXTRACTORS[0])
    print("\n" + report.render_text())

    print(f"\neffective repeats at a {TRAIN_BUDGET}-token training budget:")
    print(f"  {EXTRACTORS[0]}: {compute_repeats(TRAIN_BUDGET, tokens(deduped[EXTRACTORS[0]]))}x")
    for name, count in repeats_rows:
        print(f"  {name}: {compute_repeats(TRAIN_BUDGET, count)}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
