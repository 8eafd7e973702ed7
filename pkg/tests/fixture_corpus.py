"""Fixture pages and synthetic corpora shared across the test suite.

The calibration page exercises every extractor behavior at once: nav/footer
boilerplate, stopword-rich paragraphs, a structurally valid data table whose
cells carry TBL* sentinels, a pre/code block carrying PRE* sentinels, a list,
and an aside. Sentinels make "no bytes from table/pre" assertions exact.
"""

from __future__ import annotations

import random

from corpuskit.ngram import LabeledExample

CALIBRATION_URL = "http://stats.example.org/cities"

CALIBRATION_PAGE = """<html>
<head><title>City population statistics</title>
<meta charset="utf-8">
<style>.x{color:#333}</style>
<script>var tracker = 1;</script>
</head>
<body>
<nav><a href="/">Home</a> <a href="/tables">Tables</a> <a href="/about">About</a></nav>
<h1>Population of coastal cities</h1>
<p>The population of the coastal cities has been growing for most of the
last decade, and the table below shows all of the figures that were
collected by the national statistics office for each of the years that
were covered by the survey.</p>
<table>
<tr><th>TBLCITY</th><th>TBLYEAR</th><th>TBLCOUNT</th></tr>
<tr><td>Avalon</td><td>2010</td><td>20110</td></tr>
<tr><td>Avalon</td><td>2011</td><td>20480</td></tr>
<tr><td>Avalon</td><td>2012</td><td>20770</td></tr>
<tr><td>Brookfield</td><td>2010</td><td>31200</td></tr>
<tr><td>Brookfield</td><td>2011</td><td>31580</td></tr>
<tr><td>Brookfield</td><td>2012</td><td>31660</td></tr>
<tr><td>Cresthaven</td><td>2010</td><td>12040</td></tr>
<tr><td>Cresthaven</td><td>2011</td><td>12310</td></tr>
<tr><td>Cresthaven</td><td>2012</td><td>12500</td></tr>
<tr><td>Duneport</td><td>2010</td><td>45210</td></tr>
<tr><td>Duneport</td><td>2012</td><td>45830</td></tr>
</table>
<p>These figures are described in all of the sections that follow, and they
are also the ones that most of the researchers have been using when they
compare how each of the cities has grown over all of those years.</p>
<ul><li>Figures are from the census office</li><li>Counts are for the urban area</li></ul>
<pre><code>PREDEF remainder(a, b):
    PRERETURN a - b * (a // b)
</code></pre>
<p>The code above shows how the remainder of each division was computed in
the reference implementation that we have been using to check all of the
numbers that appear in this survey, and it is the same one that was used
for each of the earlier reports.</p>
<aside>Readers have said that they would like to see more of these figures for the inland cities as well.</aside>
<footer><a href="/privacy">Privacy</a> <a href="/terms">Terms</a></footer>
</body>
</html>
"""


def _stats_page(topic: str, rows: list[tuple[str, str, str]], note: str) -> str:
    body_rows = "\n".join(
        f"<tr><td>{a}</td><td>{b}</td><td>{c}</td></tr>" for a, b, c in rows
    )
    return f"""<html><head><title>{topic}</title></head><body>
<nav><a href="/">Home</a> <a href="/data">Data</a></nav>
<p>This page shows all of the {topic} figures that were collected during the
survey, and the table below lists each of the values that we have been able
to confirm with the sources that are described at the end of the report.</p>
<table>
<tr><th>Name</th><th>Year</th><th>Value</th></tr>
{body_rows}
</table>
<p>{note}</p>
</body></html>"""


_STATS_ROWS = [
    ("Alder", "2010", "1200"),
    ("Alder", "2011", "1240"),
    ("Alder", "2012", "1310"),
    ("Birch", "2010", "2210"),
    ("Birch", "2011", "2260"),
    ("Birch", "2012", "2330"),
    ("Cedar", "2010", "905"),
    ("Cedar", "2011", "918"),
    ("Cedar", "2012", "942"),
    ("Docks", "2012", "3100"),
    ("Docks", "2013", "3190"),
]

_NEARDUP_NOTE = (
    "These are the values that most of the researchers have been using when "
    "they compare how each of the districts has grown over all of those "
    "years, and they are the same ones that were used for each of the "
    "earlier reports that we have published about the {word} survey."
)

# Structurally valid (header, 12 rows, 3 columns) but plainly a product
# listing, so only the content classifier can reject it.
PRODUCT_PAGE = """<html><body>
<table>
<tr><th>Item</th><th>Price</th><th>Link</th></tr>
<tr><td><a href="/shop/item1">Widget Sale</a></td><td>$19.99</td><td><a href="/cart">Buy</a></td></tr>
<tr><td><a href="/shop/item2">Gadget Stock</a></td><td>$24.99</td><td><a href="/cart">Buy</a></td></tr>
<tr><td><a href="/shop/item3">Sprocket Deal</a></td><td>$9.99</td><td><a href="/cart">Buy</a></td></tr>
<tr><td><a href="/shop/item4">Widget Order</a></td><td>$14.99</td><td><a href="/cart">Buy</a></td></tr>
<tr><td><a href="/shop/item5">Cable Sale</a></td><td>$4.99</td><td><a href="/cart">Buy</a></td></tr>
<tr><td><a href="/shop/item6">Holder Item</a></td><td>$7.99</td><td><a href="/cart">Buy</a></td></tr>
<tr><td><a href="/shop/item7">Widget Price</a></td><td>$21.99</td><td><a href="/cart">Buy</a></td></tr>
<tr><td><a href="/shop/item8">Gadget Cart</a></td><td>$11.99</td><td><a href="/cart">Buy</a></td></tr>
<tr><td><a href="/shop/item9">Sprocket Sale</a></td><td>$8.99</td><td><a href="/cart">Buy</a></td></tr>
<tr><td><a href="/shop/item10">Cable Order</a></td><td>$3.99</td><td><a href="/cart">Buy</a></td></tr>
<tr><td><a href="/shop/item11">Holder Deal</a></td><td>$6.99</td><td><a href="/cart">Buy</a></td></tr>
</table>
</body></html>"""

NEWS_PAGE = """<html><body>
<p>The council has said that it will be looking at all of the plans that
were put forward during the meeting, and that each of them will be given
the same amount of attention before any of the decisions are made.</p>
<p>Most of the residents who were at the meeting have said that they would
like to see more of the plans before the council votes on any of them, and
that they will be asking for more time at each of the next sessions.</p>
</body></html>"""

INCONSISTENT_PAGE = """<html><body>
<p>This report lists all of the figures that were collected by the office
during the survey, and the table below shows each of the values that we
were able to confirm with all of the sources that are described here.</p>
<table>
<tr><th>A</th><th>B</th><th>C</th></tr>
<tr><td>1</td><td>2</td><td>3</td></tr>
<tr><td>4</td><td>5</td><td>6</td><td>7</td></tr>
<tr><td>8</td><td>9</td><td>10</td></tr>
<tr><td>1</td><td>2</td><td>3</td></tr>
<tr><td>4</td><td>5</td><td>6</td></tr>
<tr><td>8</td><td>9</td><td>10</td></tr>
<tr><td>1</td><td>2</td><td>3</td></tr>
<tr><td>4</td><td>5</td><td>6</td></tr>
<tr><td>8</td><td>9</td><td>10</td></tr>
<tr><td>4</td><td>5</td><td>6</td></tr>
</table>
</body></html>"""


def fixture_pages() -> list[tuple[str, str, str, str]]:
    """(record_id, warc_date, url, html) for the pipeline fixture archive."""
    neardup_a = _stats_page(
        "district growth", _STATS_ROWS, _NEARDUP_NOTE.format(word="spring")
    )
    neardup_b = _stats_page(
        "district growth", _STATS_ROWS, _NEARDUP_NOTE.format(word="autumn")
    )
    stats2 = _stats_page(
        "harbor traffic",
        [(f"Pier {i}", str(2009 + i % 3), str(500 + 37 * i)) for i in range(11)],
        "Each of these values has been checked against all of the records "
        "that the harbor office has been keeping for most of the last decade.",
    )
    return [
        ("<urn:uuid:0001>", "2019-02-19T02:47:00Z", CALIBRATION_URL, CALIBRATION_PAGE),
        ("<urn:uuid:0002>", "2019-02-19T02:48:00Z", "http://statsburg.example.com/harbor", stats2),
        ("<urn:uuid:0003>", "2019-02-19T02:49:00Z", "http://data.example.net/growth/a", neardup_a),
        ("<urn:uuid:0004>", "2019-02-19T02:50:00Z", "http://data.example.net/growth/b", neardup_b),
        ("<urn:uuid:0005>", "2019-02-19T02:51:00Z", "http://shop.example.com/shop/items", PRODUCT_PAGE),
        ("<urn:uuid:0006>", "2019-02-19T02:52:00Z", "http://news.example.com/council", NEWS_PAGE),
        ("<urn:uuid:0007>", "2019-02-19T02:53:00Z", "http://data.example.net/mixed", INCONSISTENT_PAGE),
    ]


# -- synthetic training corpora ----------------------------------------------------

CODE_WORDS = (
    "def return import class lambda self yield assert print range append "
    "elif while break continue raise except finally global tuple dict"
).split()

LYRICS_WORDS = (
    "love heart night baby dream dance tonight forever shine stars moon "
    "sweet tears goodbye whisper angel fire rain summer kiss"
).split()

ENGLISH_WORDS = (
    "the of and to in is was for on that with as his they at be this have "
    "from or by one had not but what all were when we there can an your "
    "which their said if will each about how up out them then she many"
).split()

FRENCH_WORDS = (
    "le la les de des un une et est dans pour sur avec par il elle ils "
    "nous vous je ne pas plus cette ces son ses leur mais donc car si "
    "comme tout être avoir faire peut sans sous entre aussi bien très"
).split()


def _bag_doc(rng: random.Random, words: list[str], length: int = 30) -> str:
    return " ".join(rng.choice(words) for _ in range(length))


def separable_corpus(
    n_train: int = 200, n_held: int = 100, seed: int = 7
) -> tuple[list[LabeledExample], list[tuple[str, str]]]:
    """Two cleanly separable classes: code keywords vs lyrics words."""
    rng = random.Random(seed)
    train = [LabeledExample(_bag_doc(rng, CODE_WORDS), "code") for _ in range(n_train)]
    train += [LabeledExample(_bag_doc(rng, LYRICS_WORDS), "lyrics") for _ in range(n_train)]
    held = [(_bag_doc(rng, CODE_WORDS), "code") for _ in range(n_held)]
    held += [(_bag_doc(rng, LYRICS_WORDS), "lyrics") for _ in range(n_held)]
    return train, held


def bilingual_corpus(n: int = 150, seed: int = 11) -> list[LabeledExample]:
    rng = random.Random(seed)
    out = [LabeledExample(_bag_doc(rng, ENGLISH_WORDS), "en") for _ in range(n)]
    out += [LabeledExample(_bag_doc(rng, FRENCH_WORDS), "other") for _ in range(n)]
    return out


def english_paragraph(seed: int = 3, length: int = 40) -> str:
    return _bag_doc(random.Random(seed), ENGLISH_WORDS, length)


def french_paragraph(seed: int = 4, length: int = 40) -> str:
    return _bag_doc(random.Random(seed), FRENCH_WORDS, length)


_STAT_HEADERS = ["Year", "Population", "Change", "Name", "Value", "Count", "Rate"]
_SHOP_WORDS = ["Buy", "Sale", "Cart", "Price", "Order", "Stock", "Item"]

_SPAM_WORDS = (
    "buy sale cart price order stock item cheap deal shipping discount "
    "coupon offer click here free bonus win prize limited"
).split()


def quality_corpus(n: int = 100, seed: int = 19) -> list[LabeledExample]:
    """Stand-in binary quality training set: English prose bags (hq) vs
    promotional keyword bags (lq)."""
    rng = random.Random(seed)
    out = [LabeledExample(_bag_doc(rng, ENGLISH_WORDS, 40), "hq") for _ in range(n)]
    out += [LabeledExample(_bag_doc(rng, _SPAM_WORDS, 40), "lq") for _ in range(n)]
    return out


_NAME_CELLS = (
    "Alder Birch Cedar Docks Avalon Brookfield Cresthaven Duneport Pier "
    "North South East West Upper Lower"
).split()


def table_training_corpus(n: int = 60, seed: int = 13) -> list[LabeledExample]:
    """Weakly-labeled stand-in for the table classifier training set:
    relational data tables (positive, numeric or named rows under headers)
    vs shop/layout tables (negative)."""
    rng = random.Random(seed)
    out = []
    for i in range(n):
        headers = rng.sample(_STAT_HEADERS, 3)
        named_rows = i % 2 == 0
        rows = []
        for _ in range(rng.randint(10, 14)):
            first = rng.choice(_NAME_CELLS) if named_rows else str(rng.randint(1990, 2024))
            rows.append(
                f"<tr><td>{first}</td><td>{rng.randint(100, 99999)}</td>"
                f"<td>{rng.randint(0, 100)}</td></tr>"
            )
        # row-per-line markup, matching how page tables serialize
        html = (
            "<table>\n<tr>"
            + "".join(f"<th>{h}</th>" for h in headers)
            + "</tr>\n"
            + "\n".join(rows)
            + "\n</table>"
        )
        out.append(LabeledExample(html, "positive"))
    for _ in range(n):
        rows = [
            f'<tr><td><a href="/shop/item{rng.randint(1, 99)}">'
            f"{rng.choice(_SHOP_WORDS)} {rng.choice(_SHOP_WORDS)}</a></td>"
            f"<td>${rng.randint(1, 99)}.99</td></tr>"
            for _ in range(rng.randint(2, 12))
        ]
        html = "<table>" + "".join(rows) + "</table>"
        out.append(LabeledExample(html, "negative"))
    return out


_CODE_TEMPLATES = [
    "def {a}({b}):\n    return {b} + 1\n",
    "class {a}:\n    def {b}(self):\n        return self.{b}\n",
    "import {a}\nfor i in range(10):\n    print({a}.{b}(i))\n",
    "while {a} < {b}:\n    {a} += 1\n    yield {a}\n",
]

_NAMES = ["loader", "parse", "count", "merge", "split", "index", "score", "batch"]


def code_pre_corpus(
    n: int = 60, seed: int = 17, view: str = "html"
) -> list[LabeledExample]:
    """Code-bearing pre blocks vs lyric pre blocks, in either ensemble view."""
    rng = random.Random(seed)
    out = []
    for _ in range(n):
        body = rng.choice(_CODE_TEMPLATES).format(a=rng.choice(_NAMES), b=rng.choice(_NAMES))
        text = body if view == "text" else f"<pre><code>{body}</code></pre>"
        out.append(LabeledExample(text, "code"))
    for _ in range(n):
        lines = [_bag_doc(rng, LYRICS_WORDS, 6) for _ in range(4)]
        body = "\n".join(lines) + "\n"
        text = body if view == "text" else f"<pre>{body}</pre>"
        out.append(LabeledExample(text, "noncode"))
    return out
