"""corpuskit: curation toolkit for web-crawl corpora.

Streams WARC archives, extracts plaintext with pluggable extractors, filters
pages for data tables / code blocks / quality / language, deduplicates
(exact page-id and fuzzy MinHash), merges surviving pages across extractors,
and reports yield and overlap statistics.
"""

__version__ = "0.1.0"

from corpuskit.warc import PageId, RawPage, WarcReader, make_page_id, read_warc
from corpuskit.htmlmodel import (
    DomTree,
    PreBlock,
    TableCandidate,
    build_dom,
    find_pre_blocks,
    find_tables,
    visible_text,
)
from corpuskit.extractors import ExtractedDoc, ExtractorRegistry, default_registry, run_extractors
from corpuskit.ngram import LabeledExample, NGramLinearModel, TrainConfig, language_score, train
from corpuskit.filters import FilterDecision, UrlLabelRules
from corpuskit.dedup import DedupConfig, MinHashConfig, UnionPlan, fuzzy_dedup, subsample, union_merge

__all__ = [
    "PageId",
    "RawPage",
    "WarcReader",
    "make_page_id",
    "read_warc",
    "DomTree",
    "TableCandidate",
    "PreBlock",
    "build_dom",
    "find_tables",
    "find_pre_blocks",
    "visible_text",
    "ExtractedDoc",
    "ExtractorRegistry",
    "default_registry",
    "run_extractors",
    "LabeledExample",
    "NGramLinearModel",
    "TrainConfig",
    "train",
    "language_score",
    "FilterDecision",
    "UrlLabelRules",
    "MinHashConfig",
    "DedupConfig",
    "UnionPlan",
    "union_merge",
    "fuzzy_dedup",
    "subsample",
]
