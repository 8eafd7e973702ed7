"""Pluggable plaintext extractors with three calibrated built-ins.

The built-ins deliberately reproduce the distinct failure modes observed in
the extractor families they stand in for, so that downstream filter / union
behavior is testable:

* ``block_stopword`` classifies block-level text units as main content or
  boilerplate from character length, stopword density, and link density; by
  design it discards everything inside ``table`` and ``pre``.
* ``whitespace_table`` keeps tables, rendering each row as one space-joined
  line (empty cells vanish, so columns can improperly merge), and passes
  ``pre`` contents through byte-exact.
* ``markdown_table`` renders tables as pipe-delimited markdown with a
  ``---`` separator row, and collapses all whitespace runs inside ``pre``
  (indentation and newlines are lost).

All extractors are pure functions of the parsed tree: same DomTree, same
output bytes. No claim of byte compatibility with any third-party library.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Callable, Sequence

from corpuskit.htmlmodel import BLOCK_TAGS, COMMENT, TEXT, DomTree, Node, build_dom, node_text
from corpuskit.tokenize import tokenize_words
from corpuskit.warc import PageId, RawPage

BLOCK_STOPWORD = "block_stopword"
WHITESPACE_TABLE = "whitespace_table"
MARKDOWN_TABLE = "markdown_table"

ExtractorId = str
ExtractorFn = Callable[[DomTree], str]

_WORDS_RE = re.compile(r"\w+")


@dataclass
class ExtractedDoc:
    """One extractor's plaintext rendering of one page.

    ``token_count`` is the word-tokenizer length of ``text``; the score
    fields stay None until the corresponding filter stage runs.
    """

    page_id: PageId
    extractor: ExtractorId
    url: str
    text: str
    token_count: int
    quality_score: float | None = None
    lang_score: float | None = None


def load_stopwords(path: str | Path | None = None) -> frozenset[str]:
    """Load a stopword list (one word per line, # comments allowed).

    Defaults to the versioned English list shipped with the package.
    """
    if path is None:
        data = resources.files("corpuskit.data").joinpath("stopwords_en.txt").read_text("utf-8")
    else:
        data = Path(path).read_text("utf-8")
    words = set()
    for line in data.splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            words.add(line.lower())
    return frozenset(words)


# -- block segmentation -------------------------------------------------------


@dataclass
class _Block:
    text: str  # whitespace-normalized
    chars: int  # non-whitespace characters
    link_chars: int  # non-whitespace characters inside <a>


def _segment_blocks(dom: DomTree, skip: frozenset[str]) -> list[_Block]:
    blocks: list[_Block] = []
    parts: list[tuple[str, bool]] = []

    def flush() -> None:
        if not parts:
            return
        text = " ".join("".join(t for t, _ in parts).split())
        if text:
            chars = sum(len(t) - _space_count(t) for t, _ in parts)
            link = sum(len(t) - _space_count(t) for t, in_link in parts if in_link)
            blocks.append(_Block(text=text, chars=chars, link_chars=link))
        parts.clear()

    def walk(node: Node, in_link: bool) -> None:
        for child in node.children:
            if child.tag == TEXT:
                parts.append((child.text, in_link))
            elif child.tag == COMMENT or child.tag in skip:
                continue
            elif child.tag == "br":
                flush()
            elif child.tag in BLOCK_TAGS:
                flush()
                walk(child, in_link)
                flush()
            else:
                walk(child, in_link or child.tag == "a")

    walk(dom.body, False)
    flush()
    return blocks


def _space_count(s: str) -> int:
    return sum(1 for c in s if c.isspace())


# -- block_stopword -------------------------------------------------------------

_GOOD, _BAD, _NEAR = "good", "bad", "near"

_STOPWORD_SKIP = frozenset({"script", "style", "head", "table", "pre"})


@dataclass
class BlockStopwordParams:
    """Published defaults of the stopword-block classifier family."""

    length_low: int = 70
    length_high: int = 200
    stopwords_low: float = 0.30
    stopwords_high: float = 0.32
    max_link_density: float = 0.2


def extract_block_stopword(
    dom: DomTree,
    stopwords: frozenset[str],
    params: BlockStopwordParams | None = None,
) -> str:
    """Keep blocks classified as main content; boilerplate is dropped.

    Context-free pass: a block is bad when link-dense or stopword-poor, good
    when long and stopword-rich, near-good in between (short linkless blocks
    are near-good so headings can be rescued). Context pass: each near-good
    block takes the majority class of its nearest classified neighbors
    (document edges vote bad, ties resolve to good). Table and pre content
    never enters segmentation.
    """
    if not stopwords:
        raise ValueError("stopword set is empty; classifier undefined")
    params = params or BlockStopwordParams()
    blocks = _segment_blocks(dom, _STOPWORD_SKIP)
    classes = [_classify_block(b, stopwords, params) for b in blocks]

    resolved: list[str] = []
    for i, cls in enumerate(classes):
        if cls != _NEAR:
            resolved.append(cls)
            continue
        prev = next((c for c in reversed(classes[:i]) if c != _NEAR), _BAD)
        nxt = next((c for c in classes[i + 1 :] if c != _NEAR), _BAD)
        resolved.append(_GOOD if _GOOD in (prev, nxt) else _BAD)

    return "\n\n".join(b.text for b, c in zip(blocks, resolved) if c == _GOOD)


def _classify_block(block: _Block, stopwords: frozenset[str], p: BlockStopwordParams) -> str:
    words = _WORDS_RE.findall(block.text.lower())
    if not words:
        return _BAD
    density = sum(1 for w in words if w in stopwords) / len(words)
    link_density = block.link_chars / max(1, block.chars)
    if link_density > p.max_link_density:
        return _BAD
    if len(block.text) < p.length_low:
        return _NEAR if block.link_chars == 0 else _BAD
    if density >= p.stopwords_high:
        return _GOOD if len(block.text) > p.length_high else _NEAR
    if density >= p.stopwords_low:
        return _NEAR
    return _BAD


# -- table/pre rendering helpers ------------------------------------------------


def _inline_text(node: Node, exclude: frozenset[str]) -> str:
    parts: list[str] = []

    def walk(n: Node) -> None:
        for child in n.children:
            if child.tag == TEXT:
                parts.append(child.text)
            elif child.tag == COMMENT or child.tag in exclude:
                continue
            else:
                walk(child)

    walk(node)
    return " ".join("".join(parts).split())


_CELL_EXCLUDE = frozenset({"table", "script", "style"})


def _table_rows(table: Node) -> list[list[str]]:
    """All tr descendants (nested tables fold in); cells are direct td/th."""
    rows = []
    for tr in table.iter_elements("tr"):
        rows.append(
            [_inline_text(cell, _CELL_EXCLUDE) for cell in tr.children if cell.tag in ("td", "th")]
        )
    return rows


# -- whitespace_table -------------------------------------------------------------

_WS_STRIP = frozenset({"script", "style", "head", "nav", "header", "footer", "aside", "form"})


def extract_whitespace_table(dom: DomTree) -> str:
    """Space-delimited rendering: table rows become space-joined lines and
    ``pre`` contents pass through byte-exact. Nav/header/footer/aside/form
    subtrees are stripped."""
    lines: list[str] = []
    inline: list[str] = []

    def flush() -> None:
        if inline:
            text = " ".join("".join(inline).split())
            if text:
                lines.append(text)
            inline.clear()

    def walk(node: Node) -> None:
        for child in node.children:
            if child.tag == TEXT:
                inline.append(child.text)
            elif child.tag == COMMENT or child.tag in _WS_STRIP:
                continue
            elif child.tag == "table":
                flush()
                for row in _table_rows(child):
                    cells = [c for c in row if c]
                    if cells:
                        lines.append(" ".join(cells))
            elif child.tag == "pre":
                flush()
                raw = node_text(child)
                if raw:
                    lines.append(raw)
            elif child.tag in BLOCK_TAGS:
                flush()
                walk(child)
                flush()
            else:
                walk(child)

    walk(dom.body)
    flush()
    return "\n".join(lines)


# -- markdown_table ---------------------------------------------------------------

_MD_STRIP = frozenset({"script", "style", "head", "nav", "header", "footer", "form"})


def extract_markdown_table(dom: DomTree) -> str:
    """Markdown-flavored rendering: pipe-delimited tables with a ``---``
    separator after the first row, ``- `` list bullets, aside (comment
    regions) retained, and ``pre`` whitespace collapsed to single spaces."""
    lines: list[str] = []
    inline: list[str] = []
    prefix: list[str] = []  # pending bullet for the next flushed line

    def flush() -> None:
        if inline:
            text = " ".join("".join(inline).split())
            if text:
                lines.append(prefix.pop() + text if prefix else text)
            inline.clear()

    def walk(node: Node) -> None:
        for child in node.children:
            if child.tag == TEXT:
                inline.append(child.text)
            elif child.tag == COMMENT or child.tag in _MD_STRIP:
                continue
            elif child.tag == "table":
                flush()
                rows = _table_rows(child)
                for i, row in enumerate(rows):
                    lines.append("| " + " | ".join(row) + " |")
                    if i == 0:
                        lines.append("| " + " | ".join(["---"] * len(row)) + " |")
            elif child.tag == "pre":
                flush()
                collapsed = " ".join(node_text(child).split())
                if collapsed:
                    lines.append(collapsed)
            elif child.tag == "li":
                flush()
                prefix.append("- ")
                walk(child)
                flush()
                if prefix:
                    prefix.pop()
            elif child.tag in BLOCK_TAGS:
                flush()
                walk(child)
                flush()
            else:
                walk(child)

    walk(dom.body)
    flush()
    return "\n".join(lines)


# -- registry -------------------------------------------------------------------


class UnknownExtractorError(KeyError):
    def __init__(self, name: str):
        super().__init__(name)
        self.name = name

    def __str__(self) -> str:
        return f"no extractor registered under {self.name!r}"


class ExtractorRegistry:
    """Named extractor functions; names are unique within a registry."""

    def __init__(self) -> None:
        self._fns: dict[ExtractorId, ExtractorFn] = {}

    def register(self, name: ExtractorId, fn: ExtractorFn) -> None:
        if name in self._fns:
            raise ValueError(f"extractor {name!r} already registered")
        self._fns[name] = fn

    def get(self, name: ExtractorId) -> ExtractorFn:
        try:
            return self._fns[name]
        except KeyError:
            raise UnknownExtractorError(name) from None

    def names(self) -> list[ExtractorId]:
        return list(self._fns)

    def __contains__(self, name: ExtractorId) -> bool:
        return name in self._fns


def default_registry(stopwords: frozenset[str] | None = None) -> ExtractorRegistry:
    """Registry with the three built-ins; stopwords default to the shipped
    English list."""
    stopset = stopwords if stopwords is not None else load_stopwords()
    registry = ExtractorRegistry()
    registry.register(BLOCK_STOPWORD, lambda dom: extract_block_stopword(dom, stopset))
    registry.register(WHITESPACE_TABLE, extract_whitespace_table)
    registry.register(MARKDOWN_TABLE, extract_markdown_table)
    return registry


def run_extractors(
    page: RawPage,
    ids: Sequence[ExtractorId],
    registry: ExtractorRegistry | None = None,
) -> list[ExtractedDoc]:
    """Run each named extractor over one page; one doc per id."""
    registry = registry or default_registry()
    fns = [(name, registry.get(name)) for name in ids]
    dom = build_dom(page.html)
    docs = []
    for name, fn in fns:
        text = fn(dom)
        docs.append(
            ExtractedDoc(
                page_id=page.page_id,
                extractor=name,
                url=page.url,
                text=text,
                token_count=len(tokenize_words(text)),
            )
        )
    return docs


# -- JSONL wire format (CLI `corpus extract`) --------------------------------------


def doc_to_json(doc: ExtractedDoc) -> dict:
    return {
        "page_id": doc.page_id,
        "extractor": doc.extractor,
        "url": doc.url,
        "text": doc.text,
        "token_count": doc.token_count,
        "quality_score": doc.quality_score,
        "lang_score": doc.lang_score,
    }


def doc_from_json(obj: dict) -> ExtractedDoc:
    return ExtractedDoc(
        page_id=obj["page_id"],
        extractor=obj["extractor"],
        url=obj["url"],
        text=obj["text"],
        token_count=obj["token_count"],
        quality_score=obj.get("quality_score"),
        lang_score=obj.get("lang_score"),
    )
