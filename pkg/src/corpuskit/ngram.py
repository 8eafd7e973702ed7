"""Hashed bag-of-n-grams linear classifier.

One trainable model serves the quality, table, code, and language-ID roles:
n-grams of the chosen tokenizer's output are feature-hashed into a fixed
bucket space and classified by multinomial logistic regression trained with
averaged SGD. Training is single-threaded and deterministic under a fixed
seed; prediction is side-effect free over a frozen model.

Model files are a versioned binary: magic + header JSON (labels, config,
tokenizer/vocab) + raw float64 weight matrix, so a round trip reproduces
predictions bit-exactly.
"""

from __future__ import annotations

import json
import logging
import struct
from dataclasses import dataclass
from hashlib import blake2b
from pathlib import Path

import numpy as np

from corpuskit.tokenize import SubwordVocab, tokenize_subword, tokenize_words

logger = logging.getLogger(__name__)

_MAGIC = b"CKNG"
_VERSION = 1

WORD = "word"
SUBWORD = "subword"


@dataclass
class LabeledExample:
    text: str
    label: str
    weight: float = 1.0


@dataclass
class TrainConfig:
    """Knobs for :func:`train`. Defaults follow common bag-of-n-grams
    practice: unigrams, 2^21 hash buckets, 5 epochs at lr 0.1."""

    n_max: int = 1
    bucket_count: int = 1 << 21
    epochs: int = 5
    lr: float = 0.1
    seed: int = 0


def hash_ngram(key: str, bucket_count: int) -> int:
    """Stable feature hash (blake2b, 8 bytes) into [0, bucket_count)."""
    digest = blake2b(key.encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "little") % bucket_count


class NGramLinearModel:
    """Frozen linear model over hashed n-gram features.

    ``weights`` has shape [bucket_count, n_classes]; there is no bias term,
    so a featureless (empty) input scores uniformly across classes.
    """

    def __init__(
        self,
        labels: list[str],
        n_max: int,
        bucket_count: int,
        weights: np.ndarray,
        tokenizer_id: str = WORD,
        vocab: SubwordVocab | None = None,
        seed: int = 0,
        final_loss: float | None = None,
    ):
        if tokenizer_id not in (WORD, SUBWORD):
            raise ValueError(f"unknown tokenizer {tokenizer_id!r}")
        if tokenizer_id == SUBWORD and vocab is None:
            raise ValueError("subword tokenizer requires a vocab")
        if weights.shape != (bucket_count, len(labels)):
            raise ValueError("weights shape does not match bucket_count x n_classes")
        self.labels = list(labels)
        self.n_max = n_max
        self.bucket_count = bucket_count
        self.weights = weights
        self.tokenizer_id = tokenizer_id
        self.vocab = vocab
        self.seed = seed
        self.final_loss = final_loss
        self._label_index = {lab: i for i, lab in enumerate(self.labels)}

    # -- feature extraction ---------------------------------------------------

    def tokenize(self, text: str) -> list:
        if self.tokenizer_id == SUBWORD:
            return tokenize_subword(text, self.vocab)
        return tokenize_words(text)

    def features(self, text: str) -> tuple[np.ndarray, np.ndarray]:
        """Hashed n-gram counts, L1-normalized. Returns (buckets, values)
        with buckets sorted so float summation order is reproducible."""
        tokens = [str(t) for t in self.tokenize(text)]
        counts: dict[int, int] = {}
        total = 0
        for n in range(1, self.n_max + 1):
            for i in range(len(tokens) - n + 1):
                key = "\x1f".join(tokens[i : i + n])
                bucket = hash_ngram(key, self.bucket_count)
                counts[bucket] = counts.get(bucket, 0) + 1
                total += 1
        if not counts:
            return np.empty(0, dtype=np.int64), np.empty(0, dtype=np.float64)
        buckets = np.array(sorted(counts), dtype=np.int64)
        values = np.array([counts[b] for b in buckets], dtype=np.float64) / total
        return buckets, values

    # -- inference -------------------------------------------------------------

    def predict(self, text: str) -> np.ndarray:
        """Probability vector over ``labels`` (non-negative, sums to 1)."""
        buckets, values = self.features(text)
        if len(buckets) == 0:
            z = np.zeros(len(self.labels))
        else:
            z = (self.weights[buckets] * values[:, None]).sum(axis=0)
        return _softmax(z)

    def scores(self, text: str) -> dict[str, float]:
        probs = self.predict(text)
        return {lab: float(p) for lab, p in zip(self.labels, probs)}

    def score(self, text: str, label: str) -> float:
        return float(self.predict(text)[self._label_index[label]])

    def predict_label(self, text: str) -> str:
        return self.labels[int(np.argmax(self.predict(text)))]

    # -- serialization ----------------------------------------------------------

    def save(self, path: str | Path) -> None:
        header = {
            "labels": self.labels,
            "n_max": self.n_max,
            "bucket_count": self.bucket_count,
            "tokenizer": self.tokenizer_id,
            "vocab": self.vocab.to_dict() if self.vocab is not None else None,
            "seed": self.seed,
            "final_loss": self.final_loss,
        }
        blob = json.dumps(header, sort_keys=True).encode("utf-8")
        with open(path, "wb") as fh:
            fh.write(_MAGIC)
            fh.write(struct.pack("<HI", _VERSION, len(blob)))
            fh.write(blob)
            fh.write(np.ascontiguousarray(self.weights, dtype="<f8").tobytes())

    @classmethod
    def load(cls, path: str | Path) -> "NGramLinearModel":
        with open(path, "rb") as fh:
            magic = fh.read(4)
            if magic != _MAGIC:
                raise ValueError(f"{path}: not a classifier model file")
            version, header_len = struct.unpack("<HI", fh.read(6))
            if version != _VERSION:
                raise ValueError(f"{path}: unsupported model version {version}")
            header = json.loads(fh.read(header_len).decode("utf-8"))
            raw = fh.read()
        labels = header["labels"]
        bucket_count = header["bucket_count"]
        weights = np.frombuffer(raw, dtype="<f8").reshape(bucket_count, len(labels)).copy()
        vocab = SubwordVocab.from_dict(header["vocab"]) if header["vocab"] else None
        return cls(
            labels=labels,
            n_max=header["n_max"],
            bucket_count=bucket_count,
            weights=weights,
            tokenizer_id=header["tokenizer"],
            vocab=vocab,
            seed=header["seed"],
            final_loss=header["final_loss"],
        )


def _softmax(z: np.ndarray) -> np.ndarray:
    z = z - z.max()
    e = np.exp(z)
    return e / e.sum()


def train(
    examples: list[LabeledExample],
    config: TrainConfig | None = None,
    tokenizer_id: str = WORD,
    vocab: SubwordVocab | None = None,
) -> NGramLinearModel:
    """Train by averaged SGD on the multinomial logistic loss.

    Deterministic given the seed: examples are shuffled each epoch by a
    seed-controlled generator and all updates run single-threaded. The
    returned weights are the average of the SGD iterates (lazily tracked per
    bucket, so sparse updates stay cheap).
    """
    config = config or TrainConfig()
    labels = sorted({ex.label for ex in examples})
    if len(labels) < 2:
        raise ValueError("training needs at least 2 classes")
    for ex in examples:
        if ex.weight <= 0:
            raise ValueError("example weights must be positive")

    n_classes = len(labels)
    label_index = {lab: i for i, lab in enumerate(labels)}
    model = NGramLinearModel(
        labels=labels,
        n_max=config.n_max,
        bucket_count=config.bucket_count,
        weights=np.zeros((config.bucket_count, n_classes)),
        tokenizer_id=tokenizer_id,
        vocab=vocab,
        seed=config.seed,
    )

    data = []
    for ex in examples:
        buckets, values = model.features(ex.text)
        data.append((buckets, values, label_index[ex.label], ex.weight))

    weights = model.weights
    iterate_sum = np.zeros_like(weights)
    last_step = np.zeros(config.bucket_count, dtype=np.int64)
    rng = np.random.default_rng(config.seed)
    step = 0
    for _ in range(config.epochs):
        for idx in rng.permutation(len(data)):
            buckets, values, y, w = data[idx]
            step += 1
            if len(buckets) == 0:
                continue
            z = (weights[buckets] * values[:, None]).sum(axis=0)
            p = _softmax(z)
            p[y] -= 1.0
            grad = config.lr * w * p
            # Lazy iterate averaging: settle each touched bucket's
            # contribution for the steps since it last changed.
            iterate_sum[buckets] += weights[buckets] * (step - 1 - last_step[buckets])[:, None]
            weights[buckets] -= values[:, None] * grad[None, :]
            iterate_sum[buckets] += weights[buckets]
            last_step[buckets] = step

    if step > 0:
        iterate_sum += weights * (step - last_step)[:, None]
        model.weights = iterate_sum / step

    losses = []
    for buckets, values, y, w in data:
        if len(buckets) == 0:
            z = np.zeros(n_classes)
        else:
            z = (model.weights[buckets] * values[:, None]).sum(axis=0)
        losses.append(-w * np.log(max(_softmax(z)[y], 1e-300)))
    total_weight = sum(ex.weight for ex in examples)
    model.final_loss = float(sum(losses) / total_weight) if examples else 0.0
    logger.info("trained %s-class model, final loss %.4f", n_classes, model.final_loss)
    return model


def language_score(model: NGramLinearModel, text: str) -> float:
    """P(English) from a binary {en, other} language model."""
    if "en" not in model.labels:
        raise ValueError("model has no 'en' label")
    return model.score(text, "en")
