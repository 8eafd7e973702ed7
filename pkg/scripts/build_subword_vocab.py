#!/usr/bin/env python3
"""Build the small bundled subword vocabulary.

Trains byte-pair merges over a tiny embedded corpus of HTML-table, code, and
prose snippets (the three content shapes the subword-tokenized classifiers
see), then writes the token/merge table JSON used as the default vocab.
Deterministic: most-frequent pair wins, ties broken lexicographically.

Usage: python scripts/build_subword_vocab.py [out.json]
"""

from __future__ import annotations

import json
import sys
from collections import Counter
from pathlib import Path

N_MERGES = 160

CORPUS = [
    "<table><tr><th>Name</th><th>Value</th></tr>"
    "<tr><td>alpha</td><td>1</td></tr><tr><td>beta</td><td>2</td></tr></table>",
    "<table><tr><th>Year</th><th>Population</th><th>Change</th></tr>"
    "<tr><td>2010</td><td>30500</td><td>+2.5</td></tr></table>",
    "<pre><code>def main():\n    return 0\n</code></pre>",
    "<pre>import os\nclass Loader:\n    def load(self, path):\n        "
    "return open(path).read()\n</pre>",
    "<pre>for i in range(10):\n    print(i)\nwhile True:\n    break\n</pre>",
    "function add(a, b) { return a + b; }\nvar x = null;\nconst y = [];",
    "the quick brown fox jumps over the lazy dog and then the dog sleeps",
    "these tables show the statistics of the database for each year",
    "when the night has come and the land is dark and the moon is the only light",
]


def train_merges(corpus: list[str], n_merges: int):
    sequences = [list(text) for text in corpus]
    merges: list[tuple[str, str]] = []
    for _ in range(n_merges):
        counts: Counter[tuple[str, str]] = Counter()
        for seq in sequences:
            for i in range(len(seq) - 1):
                counts[(seq[i], seq[i + 1])] += 1
        if not counts:
            break
        best = max(counts, key=lambda pair: (counts[pair], [-ord(c) for c in pair[0] + pair[1]]))
        if counts[best] < 2:
            break
        merges.append(best)
        left, right = best
        merged = left + right
        for seq in sequences:
            out = []
            i = 0
            while i < len(seq):
                if i + 1 < len(seq) and seq[i] == left and seq[i + 1] == right:
                    out.append(merged)
                    i += 2
                else:
                    out.append(seq[i])
                    i += 1
            seq[:] = out
    return merges


def main() -> None:
    out_path = Path(sys.argv[1]) if len(sys.argv) > 1 else (
        Path(__file__).resolve().parent.parent / "src" / "corpuskit" / "data" / "bpe_vocab_small.json"
    )
    merges = train_merges(CORPUS, N_MERGES)
    chars = sorted({c for text in CORPUS for c in text})
    tokens = ["<unk>"] + chars
    for a, b in merges:
        if a + b not in tokens:
            tokens.append(a + b)
    obj = {"version": 1, "tokens": tokens, "merges": [list(m) for m in merges]}
    out_path.write_text(json.dumps(obj, indent=1, ensure_ascii=False) + "\n", encoding="utf-8")
    print(f"{len(tokens)} tokens, {len(merges)} merges -> {out_path}")


if __name__ == "__main__":
    main()
