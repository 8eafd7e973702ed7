"""Corpus analytics: extractor-overlap Venn cells, per-domain extractor
imbalance, and token-yield ratios against a baseline dataset.

All reports are plain data (JSON-serializable, lossless round trip) and are
computed by commutative aggregation, so results do not depend on shard or
worker order.
"""

from __future__ import annotations

import math
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from itertools import combinations
from typing import Mapping, Sequence, Set
from urllib.parse import urlparse

from corpuskit.extractors import ExtractedDoc

# Embedded public-suffix snapshot (v1): the common two-label suffixes under
# which registrable domains sit one level deeper. Not the full PSL; unlisted
# suffixes fall back to the last two labels.
_TWO_LABEL_SUFFIXES = frozenset(
    """
    co.uk org.uk gov.uk ac.uk net.uk sch.uk me.uk ltd.uk plc.uk nhs.uk
    com.au net.au org.au edu.au gov.au id.au asn.au
    co.jp ne.jp or.jp ac.jp go.jp ad.jp ed.jp gr.jp lg.jp
    co.nz net.nz org.nz govt.nz ac.nz school.nz geek.nz gen.nz maori.nz
    co.kr ne.kr or.kr re.kr go.kr ac.kr pe.kr
    com.cn net.cn org.cn gov.cn edu.cn ac.cn
    com.br net.br org.br gov.br edu.br mil.br art.br blog.br
    com.mx org.mx gob.mx net.mx edu.mx
    co.in net.in org.in gov.in ac.in firm.in gen.in ind.in nic.in res.in
    com.ar net.ar org.ar gob.ar edu.ar int.ar mil.ar
    co.za net.za org.za gov.za edu.za ac.za web.za
    com.sg net.sg org.sg gov.sg edu.sg per.sg
    com.hk net.hk org.hk gov.hk edu.hk idv.hk
    com.tw net.tw org.tw gov.tw edu.tw idv.tw
    com.tr net.tr org.tr gov.tr edu.tr gen.tr web.tr av.tr bel.tr biz.tr
    co.il net.il org.il gov.il ac.il muni.il idf.il k12.il
    com.my net.my org.my gov.my edu.my mil.my name.my
    co.id net.id or.id go.id ac.id web.id sch.id mil.id biz.id my.id
    com.ua net.ua org.ua gov.ua edu.ua in.ua
    com.ru net.ru org.ru pp.ru msk.ru spb.ru
    co.th net.th or.th go.th ac.th in.th
    com.ph net.ph org.ph gov.ph edu.ph ngo.ph
    com.vn net.vn org.vn gov.vn edu.vn ac.vn biz.vn info.vn name.vn pro.vn
    com.eg net.eg org.eg gov.eg edu.eg sci.eg
    com.sa net.sa org.sa gov.sa edu.sa med.sa pub.sa sch.sa
    com.ng net.ng org.ng gov.ng edu.ng i.ng
    co.ke ne.ke or.ke go.ke ac.ke sc.ke me.ke info.ke
    com.pk net.pk org.pk gov.pk edu.pk fam.pk biz.pk web.pk
    com.bd net.bd org.bd gov.bd edu.bd ac.bd mil.bd
    co.ve com.ve net.ve org.ve gob.ve edu.ve info.ve web.ve
    com.co net.co org.co gov.co edu.co mil.co nom.co
    com.pe net.pe org.pe gob.pe edu.pe mil.pe nom.pe
    cl.cl gob.cl gov.cl mil.cl co.cl
    com.uy net.uy org.uy gub.uy edu.uy mil.uy
    com.ec net.ec org.ec gob.ec edu.ec fin.ec med.ec mil.ec pro.ec info.ec
    co.cr ac.cr fi.cr go.cr or.cr sa.cr ed.cr
    com.do net.do org.do gob.do edu.do mil.do sld.do web.do art.do
    com.gt net.gt org.gt gob.gt edu.gt mil.gt ind.gt
    co.at or.at ac.at gv.at priv.at
    """.split()
)


def registrable_domain(url: str) -> str:
    """Registrable domain of a URL: one label below the public suffix.

    Uses the embedded suffix snapshot; hosts without a dot (or IPs) are
    returned as-is.
    """
    netloc = urlparse(url).netloc.lower()
    host = netloc.rpartition("@")[2].partition(":")[0].strip(".")
    labels = host.split(".")
    if len(labels) <= 2:
        return host
    if ".".join(labels[-2:]) in _TWO_LABEL_SUFFIXES:
        return ".".join(labels[-3:])
    return ".".join(labels[-2:])


@dataclass
class VennReport:
    """Exclusive cell counts for 2 or 3 named page-id sets.

    Cell keys join the member set names with "+"; the cells partition the
    union, so their counts sum to ``union_size``.
    """

    names: list[str]
    cells: dict[str, int]
    union_size: int
    unique_fraction: float

    def to_json(self) -> dict:
        return {
            "names": self.names,
            "cells": self.cells,
            "union_size": self.union_size,
            "unique_fraction": self.unique_fraction,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "VennReport":
        return cls(
            names=list(obj["names"]),
            cells=dict(obj["cells"]),
            union_size=obj["union_size"],
            unique_fraction=obj["unique_fraction"],
        )


def venn_report(id_sets: Mapping[str, Set[str]]) -> VennReport:
    """Exclusive overlap cells over 2 or 3 named id sets, plus the fraction
    of the union belonging to exactly one set."""
    if not 2 <= len(id_sets) <= 3:
        raise ValueError("venn report takes 2 or 3 named sets")
    names = list(id_sets)
    union: set[str] = set().union(*id_sets.values())
    cells: dict[str, int] = {}
    single = 0
    for size in range(1, len(names) + 1):
        for combo in combinations(names, size):
            inside = set.intersection(*(set(id_sets[n]) for n in combo))
            outside: set[str] = set().union(
                *(set(id_sets[n]) for n in names if n not in combo), set()
            )
            count = len(inside - outside)
            cells["+".join(combo)] = count
            if size == 1:
                single += count
    return VennReport(
        names=names,
        cells=cells,
        union_size=len(union),
        unique_fraction=single / len(union) if union else 0.0,
    )


@dataclass
class ImbalanceReport:
    """Distribution over domains of the largest single-extractor share."""

    n_extractors: int
    min_pages: int
    bin_width: float
    domain_ratios: dict[str, float]
    histogram: list[list[float]]  # [lo, hi, count]
    fraction_ge_60: float
    fraction_ge_80: float

    def to_json(self) -> dict:
        return {
            "n_extractors": self.n_extractors,
            "min_pages": self.min_pages,
            "bin_width": self.bin_width,
            "domain_ratios": self.domain_ratios,
            "histogram": self.histogram,
            "fraction_ge_60": self.fraction_ge_60,
            "fraction_ge_80": self.fraction_ge_80,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "ImbalanceReport":
        return cls(
            n_extractors=obj["n_extractors"],
            min_pages=obj["min_pages"],
            bin_width=obj["bin_width"],
            domain_ratios=dict(obj["domain_ratios"]),
            histogram=[list(b) for b in obj["histogram"]],
            fraction_ge_60=obj["fraction_ge_60"],
            fraction_ge_80=obj["fraction_ge_80"],
        )


def domain_imbalance(
    docs_by_extractor: Mapping[str, Sequence[ExtractedDoc]],
    min_pages: int = 50,
    bin_width: float = 0.05,
) -> ImbalanceReport:
    """Per registrable domain with >= min_pages total pages, the maximum
    share contributed by any one extractor; histogram over [1/k, 1.0]."""
    k = len(docs_by_extractor)
    if k < 1:
        raise ValueError("need at least one extractor dataset")
    per_domain: dict[str, Counter] = defaultdict(Counter)
    for extractor, docs in docs_by_extractor.items():
        for doc in docs:
            per_domain[registrable_domain(doc.url)][extractor] += 1

    ratios: dict[str, float] = {}
    for domain in sorted(per_domain):
        counts = per_domain[domain]
        total = sum(counts.values())
        if total >= min_pages:
            ratios[domain] = max(counts.values()) / total

    lo = 1.0 / k
    n_bins = max(1, math.ceil((1.0 - lo) / bin_width - 1e-9))
    histogram = []
    for i in range(n_bins):
        histogram.append([lo + i * bin_width, min(lo + (i + 1) * bin_width, 1.0), 0])
    for r in ratios.values():
        idx = min(int((r - lo) / bin_width), n_bins - 1) if r > lo else 0
        histogram[idx][2] += 1

    n = len(ratios)
    return ImbalanceReport(
        n_extractors=k,
        min_pages=min_pages,
        bin_width=bin_width,
        domain_ratios=ratios,
        histogram=histogram,
        fraction_ge_60=sum(1 for r in ratios.values() if r >= 0.6) / n if n else 0.0,
        fraction_ge_80=sum(1 for r in ratios.values() if r >= 0.8) / n if n else 0.0,
    )


@dataclass
class YieldReport:
    """Token yields relative to a baseline dataset."""

    baseline: str
    token_counts: dict[str, float]
    ratios: dict[str, float]
    percent_gains: dict[str, float]
    thresholds: dict[str, str] = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "baseline": self.baseline,
            "token_counts": self.token_counts,
            "ratios": self.ratios,
            "percent_gains": self.percent_gains,
            "thresholds": self.thresholds,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "YieldReport":
        return cls(
            baseline=obj["baseline"],
            token_counts=dict(obj["token_counts"]),
            ratios=dict(obj["ratios"]),
            percent_gains=dict(obj["percent_gains"]),
            thresholds=dict(obj.get("thresholds", {})),
        )

    def render_text(self) -> str:
        """Aligned table: Extractor, Thresholds, Token Yield, Gain."""
        rows = [("Extractor", "Thresholds", "Token Yield", "Gain")]
        for name in self.token_counts:
            gain = self.percent_gains[name]
            rows.append(
                (
                    name,
                    self.thresholds.get(name, "-"),
                    f"{self.token_counts[name]:g}",
                    f"{gain:+.1f}%",
                )
            )
        widths = [max(len(r[i]) for r in rows) for i in range(4)]
        lines = []
        for idx, row in enumerate(rows):
            lines.append("  ".join(cell.ljust(widths[i]) for i, cell in enumerate(row)).rstrip())
            if idx == 0:
                lines.append("  ".join("-" * w for w in widths))
        return "\n".join(lines)


def yield_report(
    token_counts: Mapping[str, float],
    baseline: str,
    thresholds: Mapping[str, str] | None = None,
) -> YieldReport:
    """Token-yield ratios and percent gains of each dataset vs the baseline."""
    if baseline not in token_counts:
        raise ValueError(f"baseline {baseline!r} not among datasets")
    base = token_counts[baseline]
    if base <= 0:
        raise ValueError("baseline token count must be positive")
    ratios = {name: count / base for name, count in token_counts.items()}
    return YieldReport(
        baseline=baseline,
        token_counts=dict(token_counts),
        ratios=ratios,
        percent_gains={name: (ratio - 1.0) * 100.0 for name, ratio in ratios.items()},
        thresholds=dict(thresholds or {}),
    )


@dataclass
class CorpusReport:
    """Composite report assembled by the pipeline."""

    token_counts: dict[str, float] = field(default_factory=dict)
    venn: VennReport | None = None
    imbalance: ImbalanceReport | None = None
    yields: YieldReport | None = None

    def to_json(self) -> dict:
        return {
            "token_counts": self.token_counts,
            "venn": self.venn.to_json() if self.venn else None,
            "imbalance": self.imbalance.to_json() if self.imbalance else None,
            "yields": self.yields.to_json() if self.yields else None,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "CorpusReport":
        return cls(
            token_counts=dict(obj.get("token_counts", {})),
            venn=VennReport.from_json(obj["venn"]) if obj.get("venn") else None,
            imbalance=ImbalanceReport.from_json(obj["imbalance"]) if obj.get("imbalance") else None,
            yields=YieldReport.from_json(obj["yields"]) if obj.get("yields") else None,
        )
