from __future__ import annotations

from pathlib import Path

import pytest

import fixture_corpus as fc
import oracles
from corpuskit.ngram import TrainConfig, train
from corpuskit.tokenize import SubwordVocab

VOCAB_PATH = Path(__file__).parent.parent / "src" / "corpuskit" / "data" / "bpe_vocab_small.json"

ARCHIVE_DATE = "2019-02-19T00:00:00Z"


@pytest.fixture(scope="session")
def fixture_archive(tmp_path_factory) -> Path:
    """The fixture crawl archive, built by the writer oracle."""
    path = tmp_path_factory.mktemp("warc") / "fixture.warc.gz"
    records = [
        oracles.warc_record("warcinfo", "<urn:uuid:info>", ARCHIVE_DATE, body=b"software: tests")
    ]
    for rec_id, date, url, html in fc.fixture_pages():
        records.append(oracles.response_record(rec_id, date, url, html))
    path.write_bytes(oracles.build_archive(records))
    return path


@pytest.fixture(scope="session")
def subword_vocab() -> SubwordVocab:
    return SubwordVocab.load(VOCAB_PATH)


@pytest.fixture(scope="session")
def trained_models(tmp_path_factory, subword_vocab) -> dict[str, Path]:
    """Small deterministic models for every classifier role, saved to disk.

    The long schedule / high lr give calibrated probabilities (the filters
    compare scores against absolute thresholds like 0.75 and 0.9)."""
    out = tmp_path_factory.mktemp("models")
    small = dict(bucket_count=1 << 16, epochs=30, lr=2.0)

    paths: dict[str, Path] = {}

    table = train(
        fc.table_training_corpus(),
        TrainConfig(n_max=4, seed=5, **small),
        tokenizer_id="subword",
        vocab=subword_vocab,
    )
    paths["table"] = out / "table.bin"
    table.save(paths["table"])

    code_html = train(
        fc.code_pre_corpus(view="html"),
        TrainConfig(n_max=2, seed=6, **small),
        tokenizer_id="subword",
        vocab=subword_vocab,
    )
    paths["code_html"] = out / "code_html.bin"
    code_html.save(paths["code_html"])

    code_text = train(fc.code_pre_corpus(view="text"), TrainConfig(n_max=1, seed=7, **small))
    paths["code_text"] = out / "code_text.bin"
    code_text.save(paths["code_text"])

    quality = train(fc.quality_corpus(), TrainConfig(n_max=1, seed=8, **small))
    paths["quality"] = out / "quality.bin"
    quality.save(paths["quality"])

    lang = train(fc.bilingual_corpus(), TrainConfig(n_max=1, seed=9, **small))
    paths["lang"] = out / "lang.bin"
    lang.save(paths["lang"])

    return paths


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """One PASS/FAIL line per acceptance criterion at the end of the run."""
    rows = []
    for status in ("passed", "failed", "error"):
        for rep in terminalreporter.stats.get(status, []):
            if getattr(rep, "when", "call") != "call" and status == "passed":
                continue
            nodeid = getattr(rep, "nodeid", "")
            if "test_acceptance" in nodeid:
                rows.append((nodeid.split("::")[-1], status))
    if rows:
        terminalreporter.write_sep("=", "acceptance criteria")
        for name, status in sorted(set(rows)):
            mark = "PASS" if status == "passed" else "FAIL"
            terminalreporter.write_line(f"{mark}  {name}")
