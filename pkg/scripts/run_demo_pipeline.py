#!/usr/bin/env python3
"""End-to-end demo: build a small crawl archive, train the table/quality/
language classifiers on synthetic weak labels, run the full tables pipeline,
and print the yield report.

Usage: python scripts/run_demo_pipeline.py [workdir]

Everything is generated deterministically under the workdir (default
./demo_out); rerunning reproduces byte-identical manifests.
"""

from __future__ import annotations

import gzip
import io
import random
import sys
from pathlib import Path

import yaml

from corpuskit.ngram import LabeledExample, TrainConfig, train
from corpuskit.pipeline import load_config, run_pipeline
from corpuskit.tokenize import SubwordVocab

VOCAB = Path(__file__).resolve().parent.parent / "src" / "corpuskit" / "data" / "bpe_vocab_small.json"

STAT_HEADERS = ["Year", "Population", "Change", "Name", "Value", "Count"]
NOTE = (
    "This page shows all of the figures that were collected during the "
    "survey, and the table below lists each of the values that we have "
    "been able to confirm with most of the sources that are described at "
    "the end of this report and in each of the earlier ones."
)


def gzip_member(data: bytes) -> bytes:
    buf = io.BytesIO()
    with gzip.GzipFile(fileobj=buf, mode="wb", mtime=0) as fh:
        fh.write(data)
    return buf.getvalue()


def warc_response(rec_id: str, date: str, url: str, html: str) -> bytes:
    body = html.encode("utf-8")
    block = b"HTTP/1.1 200 OK\r\nContent-Type: text/html\r\n\r\n" + body
    head = (
        f"WARC/1.0\r\nWARC-Type: response\r\nWARC-Record-ID: {rec_id}\r\n"
        f"WARC-Date: {date}\r\nWARC-Target-URI: {url}\r\n"
        f"Content-Length: {len(block)}\r\n\r\n"
    ).encode()
    return head + block + b"\r\n\r\n"


def data_table(rng: random.Random, rows: int = 12) -> str:
    headers = rng.sample(STAT_HEADERS, 3)
    lines = ["<table>", "<tr>" + "".join(f"<th>{h}</th>" for h in headers) + "</tr>"]
    for _ in range(rows):
        lines.append(
            f"<tr><td>{rng.randint(1990, 2024)}</td><td>{rng.randint(100, 99999)}</td>"
            f"<td>{rng.randint(0, 100)}</td></tr>"
        )
    lines.append("</table>")
    return "\n".join(lines)


def stats_page(rng: random.Random) -> str:
    return f"<html><body><p>{NOTE}</p>{data_table(rng)}<p>{NOTE}</p></body></html>"


def shop_page(rng: random.Random) -> str:
    rows = "".join(
        f'<tr><td><a href="/shop/item{i}">Buy item {i}</a></td><td>${rng.randint(1, 99)}.99</td></tr>'
        for i in range(rng.randint(2, 6))
    )
    return f"<html><body><table>{rows}</table></body></html>"


def build_archive(path: Path, n_pages: int = 40, seed: int = 0) -> None:
    rng = random.Random(seed)
    hosts = ["stats.example.org", "data.example.net", "shop.example.com", "news.example.com"]
    members = []
    for i in range(n_pages):
        host = rng.choice(hosts)
        html = shop_page(rng) if host.startswith("shop") else stats_page(rng)
        members.append(
            gzip_member(
                warc_response(
                    f"<urn:uuid:demo-{i:04d}>",
                    f"2024-05-{(i % 27) + 1:02d}T00:00:00Z",
                    f"http://{host}/page/{i}",
                    html,
                )
            )
        )
    path.write_bytes(b"".join(members))


def train_models(out: Path) -> dict[str, Path]:
    rng = random.Random(1)
    vocab = SubwordVocab.load(VOCAB)
    strong = dict(bucket_count=1 << 16, epochs=30, lr=2.0)

    positives = [LabeledExample(data_table(rng), "positive") for _ in range(60)]
    negatives = []
    for _ in range(60):
        rows = "".join(
            f'<tr><td><a href="/shop/item{rng.randint(1, 99)}">Buy Sale</a></td>'
            f"<td>${rng.randint(1, 99)}.99</td></tr>"
            for _ in range(rng.randint(2, 10))
        )
        negatives.append(LabeledExample(f"<table>{rows}</table>", "negative"))
    table = train(
        positives + negatives,
        TrainConfig(n_max=4, seed=5, **strong),
        tokenizer_id="subword",
        vocab=vocab,
    )

    english = "the of and to in is was for on that with as this have from or by one had not but".split()
    french = "le la les de des un une et est dans pour sur avec par il elle ne pas plus cette".split()
    spam = "buy sale cart price order stock item cheap deal shipping discount coupon".split()

    def bags(words, label, n=120):
        return [
            LabeledExample(" ".join(rng.choice(words) for _ in range(30)), label)
            for _ in range(n)
        ]

    quality = train(bags(english, "hq") + bags(spam, "lq"), TrainConfig(seed=8, **strong))
    lang = train(bags(english, "en") + bags(french, "other"), TrainConfig(seed=9, **strong))

    paths = {}
    for name, model in (("table", table), ("quality", quality), ("lang", lang)):
        paths[name] = out / f"{name}.bin"
        model.save(paths[name])
    return paths


def main() -> int:
    workdir = Path(sys.argv[1]) if len(sys.argv) > 1 else Path("demo_out")
    workdir.mkdir(parents=True, exist_ok=True)

    archive = workdir / "demo.warc.gz"
    build_archive(archive)
    print(f"archive -> {archive}")

    models = train_models(workdir)
    print(f"models -> {', '.join(str(p) for p in models.values())}")

    config = {
        "out_dir": str(workdir / "out"),
        "workers": 4,
        "inputs": [str(archive)],
        "extractors": ["block_stopword", "whitespace_table", "markdown_table"],
        "pipeline": "tables",
        "models": {name: str(path) for name, path in models.items()},
        "thresholds": {
            "table": 0.75,
            "english": 0.25,
            "quality": {
                "block_stopword": 0.11,
                "whitespace_table": 0.11,
                "markdown_table": 0.11,
            },
        },
        "union": {
            "strategy": "manual",
            "preference": ["whitespace_table", "markdown_table", "block_stopword"],
            "rededup": True,
        },
        "report": {"baseline": "whitespace_table", "min_pages": 1},
    }
    config_path = workdir / "config.yaml"
    config_path.write_text(yaml.safe_dump(config), encoding="utf-8")

    result = run_pipeline(load_config(config_path))
    for stage in result.manifest["stages"]:
        print(f"stage {stage['name']}: ok")
    print()
    print(result.report.yields.render_text())
    print(f"\nmanifest -> {result.manifest_path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
