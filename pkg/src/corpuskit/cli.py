"""`corpus` command line: ingest, inspect, extract, train-classifier,
filter, dedup, union, report, run."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from corpuskit import filters as flt
from corpuskit.dedup import (
    DedupConfig,
    MinHashConfig,
    fuzzy_dedup,
    load_union_plan,
    union_merge,
)
from corpuskit.extractors import default_registry, doc_to_json, run_extractors
from corpuskit.htmlmodel import build_dom, find_pre_blocks, find_tables, pre_block_to_json, table_to_json
from corpuskit.jsonl import read_jsonl, write_jsonl
from corpuskit.ngram import SUBWORD, WORD, LabeledExample, NGramLinearModel, TrainConfig, train
from corpuskit.pipeline import ConfigError, StageError, load_config, load_docs, load_pages, run_pipeline
from corpuskit.reports import domain_imbalance, venn_report, yield_report
from corpuskit.tokenize import SubwordVocab
from corpuskit.warc import WarcReader, page_to_json

# Per-role training defaults: tokenizer, n-gram order, labels the
# downstream filter expects.
ROLES = {
    "table": (SUBWORD, 4, {"positive", "negative"}),
    "code-html": (SUBWORD, 1, {"code", "noncode"}),
    "code-text": (WORD, 1, {"code", "noncode"}),
    "quality": (WORD, 1, {"hq", "lq"}),
    "lang": (WORD, 1, {"en", "other"}),
}

DEFAULT_VOCAB = Path(__file__).parent / "data" / "bpe_vocab_small.json"


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except ConfigError as exc:
        print(exc, file=sys.stderr)
        return 2
    except StageError as exc:
        print(exc, file=sys.stderr)
        return 1
    except (ValueError, OSError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="corpus", description=__doc__)
    sub = parser.add_subparsers(required=True)

    p = sub.add_parser("ingest", help="dump archive pages as JSONL")
    p.add_argument("--in", dest="inputs", nargs="+", required=True, metavar="WARC")
    p.add_argument("--out", required=True)
    p.set_defaults(handler=cmd_ingest)

    p = sub.add_parser("inspect", help="dump table/pre candidates from ingested pages")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--tables", action="store_true")
    group.add_argument("--pre", action="store_true")
    p.add_argument("--in", dest="inputs", required=True, metavar="PAGES_JSONL")
    p.add_argument("--out", required=True)
    p.set_defaults(handler=cmd_inspect)

    p = sub.add_parser("extract", help="run one extractor over archives")
    p.add_argument("--extractor", required=True)
    p.add_argument("--in", dest="inputs", nargs="+", required=True, metavar="WARC")
    p.add_argument("--out", required=True)
    p.set_defaults(handler=cmd_extract)

    p = sub.add_parser("train-classifier", help="train an n-gram linear model")
    p.add_argument("--role", choices=sorted(ROLES), required=True)
    p.add_argument("--train", required=True, metavar="EXAMPLES_JSONL")
    p.add_argument("--out", required=True)
    p.add_argument("--vocab", help="subword vocab JSON (defaults to the bundled test vocab)")
    p.add_argument("--n-max", type=int)
    p.add_argument("--buckets", type=int, default=1 << 21)
    p.add_argument("--epochs", type=int, default=5)
    p.add_argument("--lr", type=float, default=0.1)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(handler=cmd_train)

    p = sub.add_parser("filter", help="run one filter pipeline, emit decisions")
    p.add_argument("--pipeline", choices=("tables", "code", "quality", "english"), required=True)
    p.add_argument("--in", dest="pages", metavar="PAGES_JSONL")
    p.add_argument("--docs", metavar="DOCS_JSONL")
    p.add_argument("--model")
    p.add_argument("--html-model")
    p.add_argument("--text-model")
    p.add_argument("--threshold", type=float)
    p.add_argument("--min-rows", type=int, default=10)
    p.add_argument("--min-cols", type=int, default=3)
    p.add_argument("--out", required=True, metavar="DECISIONS_JSONL")
    p.add_argument("--kept-out", help="also write surviving docs/pages here")
    p.set_defaults(handler=cmd_filter)

    p = sub.add_parser("dedup", help="fuzzy-deduplicate a doc shard")
    p.add_argument("--fuzzy", action="store_true", help="MinHash-LSH near-duplicate removal")
    p.add_argument("--in", dest="docs", required=True, metavar="DOCS_JSONL")
    p.add_argument("--out", required=True)
    p.add_argument("--bands", type=int, default=16)
    p.add_argument("--rows", type=int, default=8)
    p.add_argument("--verify-threshold", type=float, default=0.7)
    p.add_argument("--num-perm", type=int, default=128)
    p.add_argument("--shingle-width", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(handler=cmd_dedup)

    p = sub.add_parser("union", help="merge per-extractor datasets per a plan file")
    p.add_argument("--plan", required=True, metavar="PLAN_YAML")
    p.add_argument("--out", required=True)
    p.set_defaults(handler=cmd_union)

    p = sub.add_parser("report", help="overlap/imbalance/yield analytics")
    p.add_argument(
        "--dataset",
        action="append",
        required=True,
        metavar="LABEL=DOCS_JSONL",
        help="repeatable; first one is the default baseline",
    )
    p.add_argument("--baseline")
    p.add_argument("--min-pages", type=int, default=50)
    p.add_argument("--out", required=True, metavar="REPORT_JSON")
    p.add_argument("--text", action="store_true", help="print the aligned yield table")
    p.set_defaults(handler=cmd_report)

    p = sub.add_parser("run", help="run a full pipeline from a config file")
    p.add_argument("--config", required=True)
    p.set_defaults(handler=cmd_run)

    return parser


def cmd_ingest(args) -> int:
    total_pages = 0
    total_skipped = 0

    def pages():
        nonlocal total_pages, total_skipped
        for path in args.inputs:
            with open(path, "rb") as fh:
                reader = WarcReader(fh)
                for page in reader:
                    yield page_to_json(page)
                total_pages += reader.pages_yielded
                total_skipped += reader.records_skipped

    write_jsonl(args.out, pages())
    print(f"ingest: {total_pages} pages, {total_skipped} records skipped -> {args.out}")
    return 0


def cmd_inspect(args) -> int:
    def candidates():
        for page in load_pages(args.inputs):
            dom = build_dom(page.html)
            if args.tables:
                for t in find_tables(dom, page.page_id):
                    yield table_to_json(t)
            else:
                for b in find_pre_blocks(dom, page.page_id):
                    yield pre_block_to_json(b)

    n = write_jsonl(args.out, candidates())
    kind = "tables" if args.tables else "pre blocks"
    print(f"inspect: {n} {kind} -> {args.out}")
    return 0


def cmd_extract(args) -> int:
    registry = default_registry()

    def docs():
        for path in args.inputs:
            with open(path, "rb") as fh:
                for page in WarcReader(fh):
                    for doc in run_extractors(page, [args.extractor], registry):
                        yield doc_to_json(doc)

    n = write_jsonl(args.out, docs())
    print(f"extract[{args.extractor}]: {n} docs -> {args.out}")
    return 0


def cmd_train(args) -> int:
    tokenizer_id, default_n_max, required_labels = ROLES[args.role]
    examples = [
        LabeledExample(
            text=obj["text"], label=obj["label"], weight=float(obj.get("weight", 1.0))
        )
        for obj in read_jsonl(args.train)
    ]
    labels = {ex.label for ex in examples}
    missing = required_labels - labels
    if missing:
        raise ValueError(f"role {args.role!r} needs examples labeled {sorted(missing)}")

    vocab = None
    if tokenizer_id == SUBWORD:
        vocab = SubwordVocab.load(args.vocab or DEFAULT_VOCAB)
    config = TrainConfig(
        n_max=args.n_max if args.n_max is not None else default_n_max,
        bucket_count=args.buckets,
        epochs=args.epochs,
        lr=args.lr,
        seed=args.seed,
    )
    model = train(examples, config, tokenizer_id=tokenizer_id, vocab=vocab)
    model.save(args.out)
    print(
        f"train-classifier[{args.role}]: {len(examples)} examples, "
        f"final loss {model.final_loss:.4f} -> {args.out}"
    )
    return 0


def cmd_filter(args) -> int:
    decisions = []
    kept_objs = []

    if args.pipeline in ("tables", "code"):
        if not args.pages:
            raise ValueError(f"--pipeline {args.pipeline} needs --in PAGES_JSONL")
        pages = load_pages(args.pages)
        if args.pipeline == "tables":
            if not args.model:
                raise ValueError("--pipeline tables needs --model")
            model = NGramLinearModel.load(args.model)
            threshold = args.threshold if args.threshold is not None else 0.75
            for page in pages:
                dom = build_dom(page.html)
                survivors = [
                    t
                    for t in find_tables(dom, page.page_id)
                    if flt.structural_table_filter(t, args.min_rows, args.min_cols).kept
                ]
                decision = flt.table_page_filter(survivors, model, threshold)
                decisions.append(flt.decision_to_json(page.page_id, decision))
                if decision.kept:
                    kept_objs.append(page_to_json(page))
        else:
            if not (args.html_model and args.text_model):
                raise ValueError("--pipeline code needs --html-model and --text-model")
            html_model = NGramLinearModel.load(args.html_model)
            text_model = NGramLinearModel.load(args.text_model)
            threshold = args.threshold if args.threshold is not None else 0.9
            for page in pages:
                dom = build_dom(page.html)
                blocks = find_pre_blocks(dom, page.page_id)
                decision = flt.code_page_filter(blocks, html_model, text_model, threshold)
                decisions.append(flt.decision_to_json(page.page_id, decision))
                if decision.kept:
                    kept_objs.append(page_to_json(page))
    else:
        if not args.docs:
            raise ValueError(f"--pipeline {args.pipeline} needs --docs DOCS_JSONL")
        if not args.model:
            raise ValueError(f"--pipeline {args.pipeline} needs --model")
        model = NGramLinearModel.load(args.model)
        docs = load_docs(args.docs)
        if args.pipeline == "quality":
            threshold = args.threshold if args.threshold is not None else 0.11
            run = lambda doc: flt.quality_filter(doc, model, threshold)
        else:
            threshold = args.threshold if args.threshold is not None else 0.25
            run = lambda doc: flt.english_filter(doc, model, threshold)
        for doc in docs:
            decision = run(doc)
            decisions.append(flt.decision_to_json(doc.page_id, decision))
            if decision.kept:
                kept_objs.append(doc_to_json(doc))

    write_jsonl(args.out, decisions)
    kept = sum(1 for d in decisions if d["kept"])
    if args.kept_out:
        write_jsonl(args.kept_out, kept_objs)
    print(f"filter[{args.pipeline}]: kept {kept}/{len(decisions)} -> {args.out}")
    return 0


def cmd_dedup(args) -> int:
    config = DedupConfig(
        bands=args.bands,
        rows=args.rows,
        verify_threshold=args.verify_threshold,
        minhash=MinHashConfig(
            num_perm=args.num_perm, shingle_width=args.shingle_width, seed=args.seed
        ),
    )
    docs = load_docs(args.docs)
    survivors = fuzzy_dedup(docs, config)
    write_jsonl(args.out, (doc_to_json(d) for d in survivors))
    print(f"dedup: {len(docs)} -> {len(survivors)} docs -> {args.out}")
    return 0


def cmd_union(args) -> int:
    plan = load_union_plan(args.plan)
    datasets = []
    for entry in plan.inputs:
        if not entry.path:
            raise ValueError(f"plan input {entry.label!r} has no path")
        docs = load_docs(Path(args.plan).parent / entry.path)
        if entry.threshold > 0:
            docs = [
                d
                for d in docs
                if d.quality_score is None or d.quality_score >= entry.threshold
            ]
        datasets.append((entry.extractor, docs))
    merged = union_merge(datasets, plan.strategy)
    final = fuzzy_dedup(merged) if plan.rededup else merged
    write_jsonl(args.out, (doc_to_json(d) for d in final))
    rededup_note = f" (rededup {len(merged)} -> {len(final)})" if plan.rededup else ""
    print(f"union: {len(final)} docs{rededup_note} -> {args.out}")
    return 0


def cmd_report(args) -> int:
    datasets: dict[str, list] = {}
    for spec_arg in args.dataset:
        label, sep, path = spec_arg.partition("=")
        if not sep:
            raise ValueError(f"--dataset must be LABEL=PATH, got {spec_arg!r}")
        datasets[label] = load_docs(path)

    token_counts = {
        label: float(sum(d.token_count for d in docs)) for label, docs in datasets.items()
    }
    baseline = args.baseline or next(iter(datasets))
    yields = yield_report(token_counts, baseline)
    venn = None
    if 2 <= len(datasets) <= 3:
        venn = venn_report({k: {d.page_id for d in v} for k, v in datasets.items()})
    imbalance = domain_imbalance(datasets, min_pages=args.min_pages)

    out = {
        "token_counts": token_counts,
        "yields": yields.to_json(),
        "venn": venn.to_json() if venn else None,
        "imbalance": imbalance.to_json(),
    }
    Path(args.out).parent.mkdir(parents=True, exist_ok=True)
    Path(args.out).write_text(json.dumps(out, sort_keys=True, indent=2) + "\n", "utf-8")
    if args.text:
        print(yields.render_text())
    print(f"report -> {args.out}")
    return 0


def cmd_run(args) -> int:
    cfg = load_config(args.config)
    result = run_pipeline(cfg)
    for stage in result.manifest["stages"]:
        print(f"stage {stage['name']}: ok")
    print(f"manifest -> {result.manifest_path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
