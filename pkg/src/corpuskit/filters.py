"""Page-selection filters: table structure/content, code blocks, quality,
language, and URL/domain weak labeling.

Every filter is a pure predicate returning a :class:`FilterDecision`; raising
a threshold can only shrink the kept set, and independent filters commute.
Boundary comparisons are inclusive (score >= threshold keeps) throughout.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable
from urllib.parse import urlparse

import numpy as np

from corpuskit.extractors import ExtractedDoc
from corpuskit.htmlmodel import PreBlock, TableCandidate
from corpuskit.ngram import LabeledExample, NGramLinearModel, language_score

POSITIVE = "positive"
NEGATIVE = "negative"
UNLABELED = "unlabeled"

# Decision reasons
NO_HEADER = "no_header"
ROW_COUNT = "row_count"
COLUMN_COUNT = "column_count"
INCONSISTENT_COLUMNS = "inconsistent_columns"
NO_TABLES = "no_tables"
TABLE_SCORE = "table_score"
NO_PRE_BLOCKS = "no_pre_blocks"
CODE_SCORE = "code_score"
QUALITY_SCORE = "quality_score"
LANGUAGE_SCORE = "language_score"


@dataclass
class FilterDecision:
    kept: bool
    reason: str | None = None
    scores: dict[str, float] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not self.kept and not self.reason:
            raise ValueError("rejected decisions must carry a reason")


@dataclass(frozen=True)
class UrlLabelRules:
    """URL patterns assigning weak table labels.

    Defaults: product/forum/user-profile/metrics/weather/patent pages are
    negative; Wikipedia, .gov, dataset-release and article/documentation
    pages are positive. Matching is case-insensitive over the whole URL;
    conflicts resolve to unlabeled so weak labels stay high-precision.
    """

    negative_subwords: tuple[str, ...] = (
        "shop",
        "products",
        "cart",
        "items",
        "store",
        "promotion",
        "productdisplay",
        "forum",
        "forums",
        "users",
        "members-",
    )
    negative_suffixes: tuple[str, ...] = ("metrics",)
    negative_domains: tuple[str, ...] = ("accuweather.com", "patents.google.com")
    positive_domains: tuple[str, ...] = ("en.wikipedia.org", "*.gov")
    positive_subwords: tuple[str, ...] = ("statistics", "database", "dataset", "article")
    positive_substrings: tuple[str, ...] = ("docs.",)

    def __post_init__(self) -> None:
        for name in (
            "negative_subwords",
            "negative_suffixes",
            "negative_domains",
            "positive_domains",
            "positive_subwords",
            "positive_substrings",
        ):
            if not getattr(self, name):
                raise ValueError(f"rule list {name} must be non-empty")


def _host(url: str) -> str:
    netloc = urlparse(url).netloc
    return netloc.rpartition("@")[2].partition(":")[0]


def _domain_matches(host: str, pattern: str) -> bool:
    if pattern.startswith("*."):
        suffix = pattern[1:]  # ".gov"
        return host.endswith(suffix) or host == pattern[2:]
    return host == pattern or host.endswith("." + pattern)


def label_table_url(url: str, rules: UrlLabelRules | None = None) -> str:
    """Weak label for a table's source URL: positive, negative, or unlabeled."""
    rules = rules or UrlLabelRules()
    low = url.lower()
    host = _host(low)

    negative = (
        any(s in low for s in rules.negative_subwords)
        or any(low.rstrip("/").endswith(s) for s in rules.negative_suffixes)
        or any(_domain_matches(host, d) for d in rules.negative_domains)
    )
    positive = (
        any(_domain_matches(host, d) for d in rules.positive_domains)
        or any(s in low for s in rules.positive_subwords)
        or any(s in low for s in rules.positive_substrings)
    )
    if negative and positive:
        return UNLABELED
    if negative:
        return NEGATIVE
    if positive:
        return POSITIVE
    return UNLABELED


def structural_table_filter(
    t: TableCandidate, min_rows: int = 10, min_columns: int = 3
) -> FilterDecision:
    """Keep only header-bearing tables with >= min_rows rows, >= min_columns
    columns, and a consistent cell count per row."""
    if not t.has_header:
        return FilterDecision(kept=False, reason=NO_HEADER)
    if t.n_rows < min_rows:
        return FilterDecision(kept=False, reason=ROW_COUNT)
    if max(t.column_counts, default=0) < min_columns:
        return FilterDecision(kept=False, reason=COLUMN_COUNT)
    if len(set(t.column_counts)) > 1:
        return FilterDecision(kept=False, reason=INCONSISTENT_COLUMNS)
    return FilterDecision(kept=True)


def _require_trained(model: NGramLinearModel) -> None:
    if not np.any(model.weights):
        raise ValueError("model appears untrained (all-zero weights)")


def table_page_filter(
    tables: list[TableCandidate],
    model: NGramLinearModel,
    threshold: float = 0.75,
) -> FilterDecision:
    """Keep a page iff at least one table scores >= threshold.

    ``tables`` should already have passed the structural filter; the model
    scores each table's outer HTML and the per-table scores are recorded on
    the decision.
    """
    _require_trained(model)
    if not tables:
        return FilterDecision(kept=False, reason=NO_TABLES)
    scores = {f"table_{i}": model.score(t.table_html, POSITIVE) for i, t in enumerate(tables)}
    kept = max(scores.values()) >= threshold
    return FilterDecision(kept=kept, reason=None if kept else TABLE_SCORE, scores=scores)


CODE = "code"
NONCODE = "noncode"
SKIP = "skip"


def code_block_score(
    block: PreBlock,
    html_model: NGramLinearModel,
    text_model: NGramLinearModel,
) -> float:
    """Two-view ensemble: mean of P(code | raw pre HTML) and
    P(code | visible text)."""
    return (
        html_model.score(block.pre_html, CODE) + text_model.score(block.visible_text, CODE)
    ) / 2.0


def code_page_filter(
    blocks: list[PreBlock],
    html_model: NGramLinearModel,
    text_model: NGramLinearModel,
    threshold: float = 0.9,
) -> FilterDecision:
    """Keep a page iff any pre block's ensemble score >= threshold."""
    _require_trained(html_model)
    _require_trained(text_model)
    if not blocks:
        return FilterDecision(kept=False, reason=NO_PRE_BLOCKS)
    scores = {
        f"pre_{i}": code_block_score(b, html_model, text_model) for i, b in enumerate(blocks)
    }
    kept = max(scores.values()) >= threshold
    return FilterDecision(kept=kept, reason=None if kept else CODE_SCORE, scores=scores)


class DomainFileError(ValueError):
    """Raised for malformed domain label files; carries the line number."""

    def __init__(self, line_no: int, detail: str):
        self.line_no = line_no
        super().__init__(f"line {line_no}: {detail}")


def load_domain_labels(path) -> dict[str, str]:
    """Parse a TSV of host<TAB>{code,noncode,skip} lines."""
    labels: dict[str, str] = {}
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line.strip() or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise DomainFileError(line_no, f"expected host<TAB>label, got {line!r}")
            host, label = parts[0].strip().lower(), parts[1].strip().lower()
            if not host:
                raise DomainFileError(line_no, "empty host")
            if label not in (CODE, NONCODE, SKIP):
                raise DomainFileError(line_no, f"unknown label {label!r}")
            labels[host] = label
    return labels


def label_code_domains(
    domain_labels: dict[str, str],
    blocks: Iterable[tuple[str, PreBlock]],
    view: str = "html",
) -> list[LabeledExample]:
    """Weakly label pre blocks from (url, block) pairs.

    A block with a child ``code`` element is always a positive example; after
    that, the source host's domain label decides: code -> positive, noncode
    -> negative, skip or unlisted -> omitted. ``view`` selects whether the
    example text is the raw pre HTML or the visible text (for the two
    ensemble views).
    """
    if view not in ("html", "text"):
        raise ValueError(f"view must be 'html' or 'text', got {view!r}")
    out = []
    for url, block in blocks:
        host = _host(url.lower())
        domain_label = domain_labels.get(host)
        if block.has_code_child or domain_label == CODE:
            label = CODE
        elif domain_label == NONCODE:
            label = NONCODE
        else:
            continue  # skip-listed or unlisted host without code child
        text = block.pre_html if view == "html" else block.visible_text
        out.append(LabeledExample(text=text, label=label))
    return out


HQ = "hq"


def quality_filter(
    doc: ExtractedDoc, model: NGramLinearModel, threshold: float
) -> FilterDecision:
    """Keep iff P(high quality) >= threshold; records the score on the doc."""
    score = model.score(doc.text, HQ)
    doc.quality_score = score
    kept = score >= threshold
    return FilterDecision(
        kept=kept, reason=None if kept else QUALITY_SCORE, scores={"quality": score}
    )


def english_filter(
    doc: ExtractedDoc, model: NGramLinearModel, threshold: float = 0.25
) -> FilterDecision:
    """Keep iff P(English) >= threshold; records the score on the doc."""
    score = language_score(model, doc.text)
    doc.lang_score = score
    kept = score >= threshold
    return FilterDecision(
        kept=kept, reason=None if kept else LANGUAGE_SCORE, scores={"english": score}
    )


def decision_to_json(page_id: str, decision: FilterDecision) -> dict:
    return {
        "page_id": page_id,
        "kept": decision.kept,
        "reason": decision.reason,
        "scores": decision.scores,
    }
