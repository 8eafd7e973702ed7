import json

import pytest
import hypothesis.strategies as st
from hypothesis import given, settings

import oracles
from corpuskit.extractors import ExtractedDoc
from corpuskit.reports import (
    CorpusReport,
    domain_imbalance,
    registrable_domain,
    venn_report,
    yield_report,
)


def doc(url: str, tokens: int = 10, page_id: str = "p") -> ExtractedDoc:
    return ExtractedDoc(
        page_id=page_id, extractor="e", url=url, text="x " * tokens, token_count=tokens
    )


# -- venn --------------------------------------------------------------------


def test_worked_three_set_example():
    report = venn_report({"A": {"1", "2", "3"}, "B": {"2", "3", "4"}, "C": {"3", "5"}})
    assert report.cells == {
        "A": 1,
        "B": 1,
        "C": 1,
        "A+B": 1,
        "A+C": 0,
        "B+C": 0,
        "A+B+C": 1,
    }
    assert report.unique_fraction == pytest.approx(3 / 5)
    assert report.union_size == 5


def test_identical_sets_mass_in_full_intersection():
    report = venn_report({"A": {"1", "2"}, "B": {"1", "2"}})
    assert report.cells == {"A": 0, "B": 0, "A+B": 2}
    assert report.unique_fraction == 0.0


def test_disjoint_sets_unique_fraction_one():
    report = venn_report({"A": {"1"}, "B": {"2"}, "C": {"3"}})
    assert report.unique_fraction == 1.0


def test_venn_requires_two_or_three_sets():
    with pytest.raises(ValueError):
        venn_report({"A": {"1"}})


@given(
    st.lists(st.sets(st.integers(0, 30).map(str), max_size=20), min_size=2, max_size=3)
)
@settings(max_examples=150, deadline=None)
def test_venn_matches_brute_force(sets):
    named = {f"S{i}": s for i, s in enumerate(sets)}
    report = venn_report(named)
    assert report.cells == oracles.ref_venn_cells(named)
    assert sum(report.cells.values()) == report.union_size


# -- imbalance ------------------------------------------------------------------


def test_dominant_extractor_ratio():
    docs = {
        "e1": [doc(f"http://dom.example.com/{i}", page_id=f"a{i}") for i in range(8)],
        "e2": [doc("http://dom.example.com/x", page_id="b0")],
        "e3": [doc("http://dom.example.com/y", page_id="c0")],
    }
    report = domain_imbalance(docs, min_pages=10)
    assert report.domain_ratios == {"example.com": pytest.approx(0.8)}
    assert report.fraction_ge_60 == 1.0
    assert report.fraction_ge_80 == 1.0


def test_domain_below_min_pages_excluded():
    docs = {"e1": [doc(f"http://small.example.com/{i}") for i in range(49)]}
    report = domain_imbalance(docs, min_pages=50)
    assert report.domain_ratios == {}


def test_equal_thirds_gives_minimum_ratio():
    docs = {
        e: [doc(f"http://even.example.com/{e}/{i}") for i in range(20)]
        for e in ("e1", "e2", "e3")
    }
    report = domain_imbalance(docs, min_pages=10)
    assert report.domain_ratios["example.com"] == pytest.approx(1 / 3)
    # minimum possible ratio lands in the first bin
    assert report.histogram[0][2] == 1


@given(
    st.dictionaries(
        st.sampled_from(["alpha.com", "beta.org", "gamma.net", "delta.co.uk"]),
        st.tuples(st.integers(0, 30), st.integers(0, 30), st.integers(0, 30)),
        min_size=1,
    ),
    st.integers(1, 40),
)
@settings(max_examples=150, deadline=None)
def test_imbalance_matches_brute_force(domain_counts, min_pages):
    docs = {"e1": [], "e2": [], "e3": []}
    for domain, counts in domain_counts.items():
        for name, count in zip(docs, counts):
            docs[name].extend(
                doc(f"http://{domain}/p{i}", page_id=f"{domain}{name}{i}")
                for i in range(count)
            )
    report = domain_imbalance(docs, min_pages=min_pages)
    expected = {}
    for domain, counts in domain_counts.items():
        total = sum(counts)
        if total >= min_pages:
            expected[domain] = max(counts) / total
    assert report.domain_ratios == pytest.approx(expected)
    assert sum(b[2] for b in report.histogram) == len(expected)


# -- yields ---------------------------------------------------------------------


def test_paper_anchored_gain_71_percent():
    report = yield_report({"baseline": 386.0, "union": 662.0}, "baseline")
    assert report.percent_gains["union"] == pytest.approx(71.5, abs=0.5)


def test_paper_anchored_gain_46_percent():
    report = yield_report({"baseline": 39.0, "union": 57.0}, "baseline")
    assert report.percent_gains["union"] == pytest.approx(46.0, abs=0.5)


def test_equal_dataset_zero_gain():
    report = yield_report({"a": 100.0, "b": 100.0}, "a")
    assert report.percent_gains["b"] == 0.0


def test_missing_baseline_is_error():
    with pytest.raises(ValueError, match="baseline"):
        yield_report({"a": 1.0}, "nope")


def test_render_text_has_table_columns():
    report = yield_report(
        {"ws": 386.0, "union": 662.0}, "ws", thresholds={"ws": "0.11", "union": "(0.11, 0.15)"}
    )
    text = report.render_text()
    lines = text.splitlines()
    assert lines[0].split() == ["Extractor", "Thresholds", "Token", "Yield", "Gain"]
    assert any("+71.5%" in line for line in lines)
    assert any("(0.11, 0.15)" in line for line in lines)


# -- registrable domain ------------------------------------------------------------


@pytest.mark.parametrize(
    "url,domain",
    [
        ("http://www.example.com/x", "example.com"),
        ("http://a.b.example.co.uk/x", "example.co.uk"),
        ("https://news.bbc.co.uk", "bbc.co.uk"),
        ("http://example.com", "example.com"),
        ("http://localhost:8080/x", "localhost"),
        ("http://data.gov.uk/set", "data.gov.uk"),
        ("http://deep.sub.host.example.org/", "example.org"),
    ],
)
def test_registrable_domain(url, domain):
    assert registrable_domain(url) == domain


# -- round trip ----------------------------------------------------------------------


def test_composite_report_roundtrips_losslessly():
    venn = venn_report({"A": {"1", "2"}, "B": {"2"}})
    docs = {
        "e1": [doc(f"http://alpha.com/{i}", page_id=f"x{i}") for i in range(5)],
        "e2": [doc("http://alpha.com/z", page_id="z")],
    }
    imbalance = domain_imbalance(docs, min_pages=2)
    yields = yield_report({"e1": 50.0, "e2": 73.0}, "e1")
    report = CorpusReport(
        token_counts={"e1": 50.0, "e2": 73.0}, venn=venn, imbalance=imbalance, yields=yields
    )
    blob = json.dumps(report.to_json(), sort_keys=True)
    restored = CorpusReport.from_json(json.loads(blob))
    assert json.dumps(restored.to_json(), sort_keys=True) == blob
