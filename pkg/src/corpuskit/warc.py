"""Streaming reader for WARC 1.0/1.1 gzip-member crawl archives.

Each record in a ``.warc.gz`` archive is (per the WARC spec) an independently
compressed gzip member. We decompress member by member, parse the records
inside, and yield one :class:`RawPage` per HTTP response record whose payload
is HTML. Request/metadata/warcinfo records and non-HTML responses are skipped
and counted, so ``pages_yielded + records_skipped == records_seen`` always
holds for a successfully read archive.

Recovery policy: a malformed record header abandons the remainder of its gzip
member (counted as one skipped record, since record boundaries are no longer
trustworthy); a truncated gzip member raises :class:`TruncatedArchiveError`
carrying the byte offset at which the member started. Records lacking a
WARC-Date fall back to the archive-level date (from the leading warcinfo
record) and are flagged.
"""

from __future__ import annotations

import base64
import json
import zlib
from dataclasses import dataclass
from typing import BinaryIO, Iterator
from urllib.parse import urlparse

# Page identity: concatenation of the record id and record date, no delimiter.
# Record ids are URN-bracketed, so the joint string is collision-free.
PageId = str

_CHUNK = 1 << 16
_GZIP_MAGIC = b"\x1f\x8b"


class WarcFormatError(ValueError):
    """Raised for inputs that cannot be interpreted as a WARC archive at all."""


class TruncatedArchiveError(WarcFormatError):
    """A gzip member ended before its stream was complete.

    ``byte_offset`` is the offset in the compressed stream at which the
    truncated member began.
    """

    def __init__(self, byte_offset: int, detail: str = ""):
        self.byte_offset = byte_offset
        msg = f"truncated archive member starting at byte {byte_offset}"
        if detail:
            msg += f": {detail}"
        super().__init__(msg)


@dataclass(frozen=True)
class RawPage:
    """One crawled HTML page, as stored in the archive.

    ``html`` is kept as raw bytes: crawl payloads are frequently mislabeled,
    so decoding is deferred to the HTML parser (lossy replacement there).
    """

    page_id: PageId
    url: str
    fetch_time: str
    html: bytes
    content_type: str


@dataclass
class SkippedRecord:
    offset: int
    reason: str
    detail: str = ""


def make_page_id(record_id: str, record_date: str) -> PageId:
    """Join a record id and record date into the page identity string.

    Direct concatenation with no delimiter; deterministic, equality is byte
    equality.
    """
    if not record_id or not record_date:
        raise ValueError("record_id and record_date must be non-empty")
    return record_id + record_date


class WarcReader:
    """Single-consumer iterator over the HTML response pages of one archive.

    Multiple archives may be read in parallel by independent readers; the
    yielded :class:`RawPage` values are immutable.
    """

    def __init__(self, stream: BinaryIO):
        self._stream = stream
        self.records_seen = 0
        self.pages_yielded = 0
        self.skips: list[SkippedRecord] = []
        self.missing_date_flags = 0
        self._archive_date: str | None = None

    @property
    def records_skipped(self) -> int:
        return len(self.skips)

    def __iter__(self) -> Iterator[RawPage]:
        for offset, member in self._members():
            yield from self._records_in_member(offset, member)

    # -- gzip member framing ------------------------------------------------

    def _members(self) -> Iterator[tuple[int, bytes]]:
        """Yield (start_offset, decompressed_bytes) per gzip member."""
        buf = self._stream.read(_CHUNK)
        if not buf:
            return
        if not buf.startswith(_GZIP_MAGIC):
            # Uncompressed WARC: treat the whole stream as one member.
            rest = self._stream.read()
            yield 0, buf + rest
            return
        consumed = 0  # compressed bytes consumed before the current buf
        while buf:
            member_offset = consumed
            decomp = zlib.decompressobj(16 + zlib.MAX_WBITS)
            out = bytearray()
            try:
                out += decomp.decompress(buf)
                while not decomp.eof:
                    consumed += len(buf)  # fully consumed, still mid-member
                    buf = self._stream.read(_CHUNK)
                    if not buf:
                        raise TruncatedArchiveError(member_offset, "unexpected end of stream")
                    out += decomp.decompress(buf)
            except zlib.error as exc:
                raise TruncatedArchiveError(member_offset, str(exc)) from exc
            leftover = decomp.unused_data
            consumed += len(buf) - len(leftover)
            yield member_offset, bytes(out)
            buf = leftover or self._stream.read(_CHUNK)

    # -- record parsing -----------------------------------------------------

    def _records_in_member(self, offset: int, data: bytes) -> Iterator[RawPage]:
        pos = 0
        while pos < len(data):
            # Tolerate inter-record CRLF padding.
            while pos < len(data) and data[pos] in b"\r\n":
                pos += 1
            if pos >= len(data):
                break
            self.records_seen += 1
            parsed = self._parse_record(data, pos)
            if parsed is None:
                # Header is unusable; record boundaries within this member
                # can no longer be trusted.
                self.skips.append(SkippedRecord(offset, "malformed_header"))
                return
            headers, block, pos = parsed
            page = self._page_from_record(offset, headers, block)
            if page is not None:
                self.pages_yielded += 1
                yield page

    def _parse_record(self, data: bytes, pos: int) -> tuple[dict[str, str], bytes, int] | None:
        head_end = data.find(b"\r\n\r\n", pos)
        if head_end < 0:
            return None
        head = data[pos:head_end].decode("utf-8", errors="replace")
        lines = head.split("\r\n")
        if not lines[0].startswith("WARC/"):
            return None
        headers: dict[str, str] = {}
        for line in lines[1:]:
            name, sep, value = line.partition(":")
            if not sep:
                return None
            headers[name.strip().lower()] = value.strip()
        try:
            length = int(headers["content-length"])
        except (KeyError, ValueError):
            return None
        if length < 0:
            return None
        block_start = head_end + 4
        if block_start + length > len(data):
            return None
        block = data[block_start : block_start + length]
        return headers, block, block_start + length

    def _page_from_record(
        self, offset: int, headers: dict[str, str], block: bytes
    ) -> RawPage | None:
        rec_type = headers.get("warc-type", "")
        if rec_type == "warcinfo" and self._archive_date is None:
            self._archive_date = headers.get("warc-date")
        if rec_type != "response":
            self.skips.append(SkippedRecord(offset, "record_type", rec_type))
            return None

        content_type, body = _split_http_response(block)
        if content_type is None or "html" not in content_type.lower():
            self.skips.append(SkippedRecord(offset, "content_type", content_type or ""))
            return None

        url = headers.get("warc-target-uri", "")
        parsed_url = urlparse(url)
        if not parsed_url.scheme or not parsed_url.netloc:
            self.skips.append(SkippedRecord(offset, "invalid_url", url))
            return None

        record_id = headers.get("warc-record-id", "")
        record_date = headers.get("warc-date", "")
        if not record_date:
            if self._archive_date:
                record_date = self._archive_date
                self.missing_date_flags += 1
            else:
                self.skips.append(SkippedRecord(offset, "missing_date"))
                return None
        if not record_id:
            self.skips.append(SkippedRecord(offset, "missing_record_id"))
            return None

        return RawPage(
            page_id=make_page_id(record_id, record_date),
            url=url,
            fetch_time=record_date,
            html=body,
            content_type=content_type,
        )


def _split_http_response(block: bytes) -> tuple[str | None, bytes]:
    """Split an HTTP response block into (content-type, body).

    Returns (None, b"") when the block is not an HTTP response.
    """
    if not block.startswith(b"HTTP/"):
        return None, b""
    head_end = block.find(b"\r\n\r\n")
    if head_end < 0:
        return None, b""
    head = block[:head_end].decode("latin-1")
    content_type = ""
    for line in head.split("\r\n")[1:]:
        name, sep, value = line.partition(":")
        if sep and name.strip().lower() == "content-type":
            content_type = value.strip()
            break
    return content_type, block[head_end + 4 :]


def read_warc(stream: BinaryIO) -> Iterator[RawPage]:
    """Convenience wrapper: iterate HTML pages of an archive stream."""
    return iter(WarcReader(stream))


# -- JSONL wire format (CLI `corpus ingest`) ---------------------------------


def page_to_json(page: RawPage) -> dict:
    return {
        "page_id": page.page_id,
        "url": page.url,
        "fetch_time": page.fetch_time,
        "content_type": page.content_type,
        "html": base64.b64encode(page.html).decode("ascii"),
    }


def page_from_json(obj: dict) -> RawPage:
    return RawPage(
        page_id=obj["page_id"],
        url=obj["url"],
        fetch_time=obj["fetch_time"],
        html=base64.b64decode(obj["html"]),
        content_type=obj["content_type"],
    )
