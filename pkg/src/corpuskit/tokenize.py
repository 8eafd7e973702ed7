"""Tokenizers used for feature extraction and token counting.

Two tokenizers back the n-gram classifier: a Unicode word tokenizer (also the
corpus token-counting tokenizer) and a byte-pair subword tokenizer driven by
a loadable merge-table vocabulary, used where the classifier should see
markup structure (HTML tables, pre blocks).
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from pathlib import Path

_WORD_RE = re.compile(r"\w+|[^\w\s]+")

UNK = "<unk>"


def tokenize_words(text: str) -> list[str]:
    """Split on Unicode whitespace with punctuation detached.

    "x, y" -> ["x", ",", "y"]; runs of punctuation stay together.
    """
    return _WORD_RE.findall(text)


class VocabError(ValueError):
    """Raised when a subword vocabulary file is malformed."""


@dataclass
class SubwordVocab:
    """A byte-pair merge table: token strings with ids, plus ordered merges.

    Well-ordering is validated at load time: every merge operand must be a
    single character or the product of an earlier merge, which makes the
    rank-greedy encoding below equivalent to replaying merges in order.
    """

    tokens: dict[str, int]
    merges: list[tuple[str, str]]

    def __post_init__(self) -> None:
        self.ranks = {pair: i for i, pair in enumerate(self.merges)}
        self.unk_id = self.tokens[UNK]

    @classmethod
    def from_dict(cls, obj: dict) -> "SubwordVocab":
        try:
            token_list = obj["tokens"]
            merge_list = obj["merges"]
        except (TypeError, KeyError) as exc:
            raise VocabError("vocab must have 'tokens' and 'merges' keys") from exc
        if not isinstance(token_list, list) or not all(isinstance(t, str) for t in token_list):
            raise VocabError("'tokens' must be a list of strings")
        tokens = {t: i for i, t in enumerate(token_list)}
        if len(tokens) != len(token_list):
            raise VocabError("duplicate token strings in vocab")
        if UNK not in tokens:
            raise VocabError(f"vocab must define an {UNK!r} token")

        produced: set[str] = set()
        merges: list[tuple[str, str]] = []
        for i, pair in enumerate(merge_list):
            if not (isinstance(pair, (list, tuple)) and len(pair) == 2):
                raise VocabError(f"merge {i} is not a pair")
            left, right = pair
            for operand in (left, right):
                if len(operand) > 1 and operand not in produced:
                    raise VocabError(
                        f"merge {i} operand {operand!r} is neither a character "
                        "nor the product of an earlier merge"
                    )
            merged = left + right
            if merged not in tokens:
                raise VocabError(f"merge {i} product {merged!r} missing from tokens")
            produced.add(merged)
            merges.append((left, right))
        return cls(tokens=tokens, merges=merges)

    @classmethod
    def load(cls, path: str | Path) -> "SubwordVocab":
        with open(path, encoding="utf-8") as fh:
            try:
                obj = json.load(fh)
            except json.JSONDecodeError as exc:
                raise VocabError(f"vocab file {path} is not valid JSON: {exc}") from exc
        return cls.from_dict(obj)

    def to_dict(self) -> dict:
        ordered = sorted(self.tokens, key=self.tokens.get)
        return {"tokens": ordered, "merges": [list(p) for p in self.merges]}


def tokenize_subword(text: str, vocab: SubwordVocab) -> list[int]:
    """Byte-pair encode: repeatedly merge the lowest-ranked adjacent pair.

    Characters with no vocab entry map to the ``<unk>`` id. Deterministic.
    """
    syms = list(text)
    if not syms:
        return []
    ranks = vocab.ranks
    while len(syms) > 1:
        best_rank = None
        for i in range(len(syms) - 1):
            rank = ranks.get((syms[i], syms[i + 1]))
            if rank is not None and (best_rank is None or rank < best_rank):
                best_rank = rank
        if best_rank is None:
            break
        left, right = vocab.merges[best_rank]
        merged = left + right
        out = []
        i = 0
        while i < len(syms):
            if i + 1 < len(syms) and syms[i] == left and syms[i + 1] == right:
                out.append(merged)
                i += 2
            else:
                out.append(syms[i])
                i += 1
        syms = out
    tokens = vocab.tokens
    unk = vocab.unk_id
    return [tokens.get(s, unk) for s in syms]
