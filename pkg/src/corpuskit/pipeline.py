"""End-to-end pipeline: ingest -> extract xK -> filters -> dedup -> union ->
reports, with a content-digest manifest for reproducibility auditing.

Every stage writes JSONL shards under its own directory in ``out_dir`` and
registers each file's sha256 in ``manifest.json``. Reruns on unchanged inputs
reproduce byte-identical manifests, and results are invariant to the worker
count (work is partitioned per page and reassembled in input order). A stage
failure aborts the run with the failing stage named and the stage's partial
outputs marked invalid in the manifest.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Mapping, Sequence

import yaml

from corpuskit import filters as flt
from corpuskit.dedup import (
    DedupConfig,
    Manual,
    MinHashConfig,
    Random,
    Strategy,
    fuzzy_dedup,
    union_merge,
)
from corpuskit.extractors import (
    ExtractedDoc,
    default_registry,
    doc_from_json,
    doc_to_json,
    run_extractors,
)
from corpuskit.htmlmodel import build_dom, find_pre_blocks, find_tables
from corpuskit.jsonl import read_jsonl, sha256_file, write_jsonl
from corpuskit.ngram import NGramLinearModel
from corpuskit.reports import CorpusReport, domain_imbalance, venn_report, yield_report
from corpuskit.warc import RawPage, WarcReader, page_from_json, page_to_json

PIPELINES = ("tables", "code", "quality")


class ConfigError(ValueError):
    """Configuration problems found before any work starts."""

    def __init__(self, problems: list[str]):
        self.problems = problems
        super().__init__("invalid pipeline config:\n" + "\n".join(f"- {p}" for p in problems))


class StageError(RuntimeError):
    def __init__(self, stage: str, cause: BaseException):
        self.stage = stage
        super().__init__(f"stage {stage!r} failed: {cause}")


@dataclass
class PipelineConfig:
    out_dir: Path
    inputs: list[Path]
    extractors: list[str]
    pipeline: str
    workers: int = 1
    models: dict[str, Path] = field(default_factory=dict)
    thresholds: dict = field(default_factory=dict)
    min_rows: int = 10
    min_columns: int = 3
    dedup_enabled: bool = True
    dedup: DedupConfig = field(default_factory=DedupConfig)
    union_strategy: Strategy = field(default_factory=lambda: Random(0))
    rededup: bool = False
    report_baseline: str | None = None
    report_min_pages: int = 50

    def quality_threshold(self, extractor: str) -> float | None:
        value = self.thresholds.get("quality")
        if value is None:
            return None
        if isinstance(value, Mapping):
            return float(value[extractor])
        return float(value)


def load_config(path: str | Path) -> PipelineConfig:
    """Parse and validate a YAML pipeline config; paths resolve relative to
    the config file."""
    path = Path(path)
    with open(path, encoding="utf-8") as fh:
        obj = yaml.safe_load(fh)
    if not isinstance(obj, Mapping):
        raise ConfigError([f"{path} must contain a mapping"])
    return parse_config(obj, base_dir=path.parent)


def parse_config(obj: Mapping, base_dir: str | Path = ".") -> PipelineConfig:
    base = Path(base_dir)
    problems: list[str] = []

    def resolve(p) -> Path:
        p = Path(p)
        return p if p.is_absolute() else base / p

    inputs = [resolve(p) for p in obj.get("inputs", [])]
    if not inputs:
        problems.append("inputs: at least one archive required")
    for p in inputs:
        if not p.exists():
            problems.append(f"inputs: {p} does not exist")

    extractors = list(obj.get("extractors", []))
    registry = default_registry()
    if not extractors:
        problems.append("extractors: at least one required")
    for name in extractors:
        if name not in registry:
            problems.append(f"extractors: {name!r} is not registered")
    if len(set(extractors)) != len(extractors):
        problems.append("extractors: names must be unique")

    pipeline = obj.get("pipeline", "quality")
    if pipeline not in PIPELINES:
        problems.append(f"pipeline: must be one of {PIPELINES}, got {pipeline!r}")

    models = {name: resolve(p) for name, p in (obj.get("models") or {}).items()}
    required_models = {
        "tables": ("table",),
        "code": ("code_html", "code_text"),
        "quality": ("quality",),
    }.get(pipeline, ())
    for name in required_models:
        if name not in models:
            problems.append(f"models: pipeline {pipeline!r} requires a {name!r} model")
    for name, p in models.items():
        if not p.exists():
            problems.append(f"models: {name} file {p} does not exist")

    thresholds = dict(obj.get("thresholds") or {})
    thresholds.setdefault("table", 0.75)
    thresholds.setdefault("code", 0.9)
    thresholds.setdefault("english", 0.25)
    if "quality" in models:
        thresholds.setdefault("quality", 0.11)
    quality_t = thresholds.get("quality")
    if isinstance(quality_t, Mapping):
        missing = set(extractors) - set(quality_t)
        if missing:
            problems.append(f"thresholds.quality: missing extractors {sorted(missing)}")

    structural = obj.get("structural") or {}

    dedup_obj = obj.get("dedup") or {}
    dedup_enabled = bool(dedup_obj.get("enabled", True))
    try:
        dedup_cfg = DedupConfig(
            bands=int(dedup_obj.get("bands", 16)),
            rows=int(dedup_obj.get("rows", 8)),
            verify_threshold=float(dedup_obj.get("verify_threshold", 0.7)),
            minhash=MinHashConfig(
                num_perm=int(dedup_obj.get("num_perm", 128)),
                shingle_width=int(dedup_obj.get("shingle_width", 5)),
                seed=int(dedup_obj.get("seed", 0)),
            ),
        )
    except ValueError as exc:
        problems.append(f"dedup: {exc}")
        dedup_cfg = DedupConfig()

    union_obj = obj.get("union") or {}
    strategy_name = str(union_obj.get("strategy", "random")).lower()
    strategy: Strategy = Random(int(union_obj.get("seed", 0)))
    if strategy_name == "manual":
        preference = tuple(union_obj.get("preference") or ())
        try:
            strategy = Manual(preference=preference)
            if extractors:
                missing = set(extractors) - set(preference)
                if missing:
                    problems.append(f"union.preference: missing extractors {sorted(missing)}")
        except ValueError as exc:
            problems.append(f"union: {exc}")
    elif strategy_name != "random":
        problems.append(f"union.strategy: unknown strategy {strategy_name!r}")

    report_obj = obj.get("report") or {}
    baseline = report_obj.get("baseline")
    if baseline is not None and baseline not in extractors and baseline != "union":
        problems.append(f"report.baseline: {baseline!r} is not a dataset")

    if problems:
        raise ConfigError(problems)

    return PipelineConfig(
        out_dir=resolve(obj.get("out_dir", "out")),
        inputs=inputs,
        extractors=extractors,
        pipeline=pipeline,
        workers=int(obj.get("workers", 1)),
        models=models,
        thresholds=thresholds,
        min_rows=int(structural.get("min_rows", 10)),
        min_columns=int(structural.get("min_columns", 3)),
        dedup_enabled=dedup_enabled,
        dedup=dedup_cfg,
        union_strategy=strategy,
        rededup=bool(union_obj.get("rededup", False)),
        report_baseline=baseline,
        report_min_pages=int(report_obj.get("min_pages", 50)),
    )


@dataclass
class PipelineResult:
    out_dir: Path
    manifest_path: Path
    manifest: dict
    report: CorpusReport


def _pmap(fn: Callable, items: Sequence, workers: int) -> list:
    """Order-preserving map, optionally threaded. Output is independent of
    the worker count."""
    if workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def run_pipeline(cfg: PipelineConfig) -> PipelineResult:
    out = cfg.out_dir
    out.mkdir(parents=True, exist_ok=True)
    manifest: dict = {
        "version": 1,
        "stages": [],
        "files": {},
        "complete": False,
        "failed_stage": None,
    }
    manifest_path = out / "manifest.json"

    def finish_stage(name: str, info: dict, paths: Sequence[Path]) -> None:
        manifest["stages"].append({"name": name, **info})
        for p in paths:
            rel = p.relative_to(out).as_posix()
            manifest["files"][rel] = {"sha256": sha256_file(p), "valid": True}

    def write_manifest() -> None:
        manifest_path.write_text(
            json.dumps(manifest, sort_keys=True, indent=2) + "\n", encoding="utf-8"
        )

    stage = "ingest"
    try:
        pages, ingest_info = _stage_ingest(cfg, out)
        finish_stage("ingest", ingest_info, [out / "ingest" / "pages.jsonl"])

        stage = "extract"
        docs_by_ex = _stage_extract(cfg, out, pages)
        finish_stage(
            "extract",
            {"docs": {e: len(d) for e, d in docs_by_ex.items()}},
            [out / "extract" / f"{e}.jsonl" for e in cfg.extractors],
        )

        stage = "filters"
        docs_by_ex, filter_info, filter_paths = _stage_filters(cfg, out, pages, docs_by_ex)
        finish_stage("filters", filter_info, filter_paths)

        stage = "dedup"
        if cfg.dedup_enabled:
            docs_by_ex = {
                e: fuzzy_dedup(docs, cfg.dedup) for e, docs in docs_by_ex.items()
            }
        for e in cfg.extractors:
            write_jsonl(out / "dedup" / f"{e}.jsonl", (doc_to_json(d) for d in docs_by_ex[e]))
        finish_stage(
            "dedup",
            {"enabled": cfg.dedup_enabled, "docs": {e: len(d) for e, d in docs_by_ex.items()}},
            [out / "dedup" / f"{e}.jsonl" for e in cfg.extractors],
        )

        stage = "union"
        merged = union_merge(
            [(e, docs_by_ex[e]) for e in cfg.extractors], cfg.union_strategy
        )
        write_jsonl(out / "union" / "merged.jsonl", (doc_to_json(d) for d in merged))
        union_paths = [out / "union" / "merged.jsonl"]
        final = merged
        if cfg.rededup:
            final = fuzzy_dedup(merged, cfg.dedup)
            write_jsonl(out / "union" / "rededuped.jsonl", (doc_to_json(d) for d in final))
            union_paths.append(out / "union" / "rededuped.jsonl")
        finish_stage(
            "union",
            {"merged": len(merged), "final": len(final), "rededup": cfg.rededup},
            union_paths,
        )

        stage = "report"
        report = _stage_report(cfg, out, docs_by_ex, final)
        finish_stage(
            "report", {}, [out / "report" / "report.json", out / "report" / "report.txt"]
        )
    except Exception as exc:
        manifest["failed_stage"] = stage
        stage_dir = out / stage
        if stage_dir.is_dir():
            for p in sorted(stage_dir.rglob("*")):
                if p.is_file():
                    rel = p.relative_to(out).as_posix()
                    manifest["files"][rel] = {"sha256": sha256_file(p), "valid": False}
        write_manifest()
        raise StageError(stage, exc) from exc

    manifest["complete"] = True
    write_manifest()
    return PipelineResult(out_dir=out, manifest_path=manifest_path, manifest=manifest, report=report)


# -- stages ---------------------------------------------------------------------


def _stage_ingest(cfg: PipelineConfig, out: Path) -> tuple[list[RawPage], dict]:
    pages: list[RawPage] = []
    seen = 0
    skipped = 0
    for archive in cfg.inputs:
        with open(archive, "rb") as fh:
            reader = WarcReader(fh)
            pages.extend(reader)
            seen += reader.records_seen
            skipped += reader.records_skipped
    write_jsonl(out / "ingest" / "pages.jsonl", (page_to_json(p) for p in pages))
    return pages, {"records": seen, "pages": len(pages), "skipped": skipped}


def _stage_extract(
    cfg: PipelineConfig, out: Path, pages: list[RawPage]
) -> dict[str, list[ExtractedDoc]]:
    registry = default_registry()
    per_page = _pmap(
        lambda page: run_extractors(page, cfg.extractors, registry), pages, cfg.workers
    )
    docs_by_ex: dict[str, list[ExtractedDoc]] = {e: [] for e in cfg.extractors}
    for docs in per_page:
        for doc in docs:
            docs_by_ex[doc.extractor].append(doc)
    for e in cfg.extractors:
        write_jsonl(out / "extract" / f"{e}.jsonl", (doc_to_json(d) for d in docs_by_ex[e]))
    return docs_by_ex


def _stage_filters(
    cfg: PipelineConfig,
    out: Path,
    pages: list[RawPage],
    docs_by_ex: dict[str, list[ExtractedDoc]],
) -> tuple[dict[str, list[ExtractedDoc]], dict, list[Path]]:
    models = {name: NGramLinearModel.load(path) for name, path in cfg.models.items()}

    # Page-level gate (tables / code pipelines).
    decisions: list[dict] = []
    kept_pages: set[str] | None = None
    if cfg.pipeline == "tables":
        table_model = models["table"]
        threshold = float(cfg.thresholds["table"])

        def gate(page: RawPage) -> flt.FilterDecision:
            dom = build_dom(page.html)
            candidates = find_tables(dom, page.page_id)
            survivors = [
                t for t in candidates if flt.structural_table_filter(
                    t, cfg.min_rows, cfg.min_columns
                ).kept
            ]
            return flt.table_page_filter(survivors, table_model, threshold)

    elif cfg.pipeline == "code":
        html_model = models["code_html"]
        text_model = models["code_text"]
        threshold = float(cfg.thresholds["code"])

        def gate(page: RawPage) -> flt.FilterDecision:
            dom = build_dom(page.html)
            blocks = find_pre_blocks(dom, page.page_id)
            return flt.code_page_filter(blocks, html_model, text_model, threshold)

    else:
        gate = None

    if gate is not None:
        page_decisions = _pmap(gate, pages, cfg.workers)
        kept_pages = set()
        for page, decision in zip(pages, page_decisions):
            decisions.append(flt.decision_to_json(page.page_id, decision))
            if decision.kept:
                kept_pages.add(page.page_id)

    # Doc-level gates: language then quality (independent predicates).
    lang_model = models.get("lang")
    quality_model = models.get("quality")
    doc_decisions: list[dict] = []
    filtered: dict[str, list[ExtractedDoc]] = {}
    for e in cfg.extractors:
        kept_docs = []
        for doc in docs_by_ex[e]:
            if kept_pages is not None and doc.page_id not in kept_pages:
                continue
            keep = True
            if lang_model is not None:
                decision = flt.english_filter(doc, lang_model, float(cfg.thresholds["english"]))
                doc_decisions.append(
                    {"extractor": e, **flt.decision_to_json(doc.page_id, decision)}
                )
                keep = keep and decision.kept
            q_threshold = cfg.quality_threshold(e)
            if quality_model is not None and q_threshold is not None:
                decision = flt.quality_filter(doc, quality_model, q_threshold)
                doc_decisions.append(
                    {"extractor": e, **flt.decision_to_json(doc.page_id, decision)}
                )
                keep = keep and decision.kept
            if keep:
                kept_docs.append(doc)
        filtered[e] = kept_docs

    paths = []
    decisions_path = out / "filters" / "decisions.jsonl"
    write_jsonl(decisions_path, decisions)
    paths.append(decisions_path)
    if doc_decisions:
        doc_decisions_path = out / "filters" / "doc_decisions.jsonl"
        write_jsonl(doc_decisions_path, doc_decisions)
        paths.append(doc_decisions_path)
    for e in cfg.extractors:
        p = out / "filters" / f"{e}.jsonl"
        write_jsonl(p, (doc_to_json(d) for d in filtered[e]))
        paths.append(p)

    info = {
        "pipeline": cfg.pipeline,
        "pages_kept": len(kept_pages) if kept_pages is not None else len(pages),
        "docs": {e: len(d) for e, d in filtered.items()},
    }
    return filtered, info, paths


def _stage_report(
    cfg: PipelineConfig,
    out: Path,
    docs_by_ex: dict[str, list[ExtractedDoc]],
    final: list[ExtractedDoc],
) -> CorpusReport:
    token_counts: dict[str, float] = {
        e: float(sum(d.token_count for d in docs)) for e, docs in docs_by_ex.items()
    }
    token_counts["union"] = float(sum(d.token_count for d in final))

    venn = None
    if 2 <= len(cfg.extractors) <= 3:
        venn = venn_report({e: {d.page_id for d in docs_by_ex[e]} for e in cfg.extractors})

    imbalance = domain_imbalance(docs_by_ex, min_pages=cfg.report_min_pages)

    baseline = cfg.report_baseline or cfg.extractors[0]
    thresholds_text = {}
    for e in cfg.extractors:
        q = cfg.quality_threshold(e)
        thresholds_text[e] = f"{q:g}" if q is not None else "-"
    union_ts = [cfg.quality_threshold(e) for e in cfg.extractors]
    if all(t is not None for t in union_ts):
        thresholds_text["union"] = "(" + ", ".join(f"{t:g}" for t in union_ts) + ")"
    yields = yield_report(token_counts, baseline, thresholds_text)

    report = CorpusReport(
        token_counts=token_counts, venn=venn, imbalance=imbalance, yields=yields
    )
    report_dir = out / "report"
    report_dir.mkdir(parents=True, exist_ok=True)
    (report_dir / "report.json").write_text(
        json.dumps(report.to_json(), sort_keys=True, indent=2) + "\n", encoding="utf-8"
    )
    (report_dir / "report.txt").write_text(yields.render_text() + "\n", encoding="utf-8")
    return report


def load_docs(path: str | Path) -> list[ExtractedDoc]:
    """Read an ExtractedDoc JSONL shard."""
    return [doc_from_json(obj) for obj in read_jsonl(path)]


def load_pages(path: str | Path) -> list[RawPage]:
    """Read a RawPage JSONL shard (as written by `corpus ingest`)."""
    return [page_from_json(obj) for obj in read_jsonl(path)]
