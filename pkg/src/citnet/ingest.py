"""Bibliographic ingestion: tagged exports, pair files, citation matching.

Tagged export format (one record per publication):

    two-letter tag at column 0, a value from column 3; continuation lines
    start with three spaces and fold into the previous value with a single
    space, except under CR where every line is one cited reference.  ``ER``
    ends a record, ``EF`` ends the file.  Recognized tags: AU (authors,
    "; "-separated), TI title, SO source, PY year, VL volume, BP beginning
    page, DI DOI, CR cited reference.

Cited reference strings are comma-separated:

    First Author, YYYY, SOURCE TITLE, V<volume>, P<page>, DOI <doi>

with every segment after the author optional.  The source title is parsed
but never used for matching, since journal titles are written too
inconsistently to match on.

Matching tries DOI first; failing that it requires a perfect match on the
normalized (first author, year, volume, page) tuple.  A reference whose
tuple matches two records is counted ambiguous and left unmatched rather
than guessed.  Unmatched references cited by enough distinct records become
incomplete-record publications that receive citations but give none.
"""

from __future__ import annotations

import io
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence, TextIO

from .errors import ContractError, InputFormatError
from .model import Publication

RECOGNIZED_TAGS = {"AU", "TI", "SO", "PY", "VL", "BP", "DI", "CR"}
_LIST_TAGS = {"CR"}  # one value per line instead of folding

PAIR_PUBLICATIONS_HEADER = ["id", "authors", "title", "source", "year", "doi", "ext_cit"]
PAIR_CITATIONS_HEADER = ["citing_id", "cited_id"]


# -- raw records --------------------------------------------------------------

@dataclass
class RawRecord:
    """One tagged record, fields folded but otherwise verbatim."""

    tags: dict[str, list[str]]
    line_span: tuple[int, int]

    def first(self, tag: str) -> str | None:
        vals = self.tags.get(tag)
        return vals[0] if vals else None

    @property
    def authors(self) -> list[str]:
        raw = self.first("AU")
        if not raw:
            return []
        return [a.strip() for a in raw.split(";") if a.strip()]

    @property
    def title(self) -> str:
        return self.first("TI") or ""

    @property
    def source(self) -> str:
        return self.first("SO") or ""

    @property
    def year(self) -> int | None:
        raw = self.first("PY")
        if raw is None:
            return None
        try:
            return int(raw.strip())
        except ValueError:
            return None

    @property
    def volume(self) -> str | None:
        return self.first("VL")

    @property
    def begin_page(self) -> str | None:
        return self.first("BP")

    @property
    def doi(self) -> str | None:
        return self.first("DI")

    @property
    def cited_references(self) -> list[str]:
        return list(self.tags.get("CR", []))


@dataclass(frozen=True)
class ParseIssue:
    line_start: int
    line_end: int
    message: str


@dataclass
class ParseResult:
    records: list[RawRecord]
    issues: list[ParseIssue] = field(default_factory=list)

    def __iter__(self):
        return iter(self.records)

    def __len__(self):
        return len(self.records)


def parse_wos_export(source: "str | TextIO | Path") -> ParseResult:
    """Parse a tagged plain-text export into raw records.

    Records with no recognized field are skipped and reported with their
    line span; a record missing its year is kept but flagged.  Raises
    InputFormatError when nothing parseable is found.
    """
    if isinstance(source, Path):
        text = source.read_text(encoding="utf-8")
    elif isinstance(source, str):
        text = source
    else:
        text = source.read()
    lines = text.splitlines()

    records: list[RawRecord] = []
    issues: list[ParseIssue] = []
    tags: dict[str, list[str]] = {}
    current_tag: str | None = None
    rec_start = 1

    def close_record(end_line: int):
        nonlocal tags, current_tag, rec_start
        if tags:
            if any(t in RECOGNIZED_TAGS for t in tags):
                rec = RawRecord(tags=tags, line_span=(rec_start, end_line))
                records.append(rec)
                if rec.year is None:
                    issues.append(ParseIssue(rec_start, end_line, "record has no parseable year (PY)"))
            else:
                issues.append(ParseIssue(rec_start, end_line, "record has no recognized fields; skipped"))
        tags = {}
        current_tag = None
        rec_start = end_line + 1

    for lineno, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        if line.startswith("   ") and line[3:].strip():
            if current_tag is None:
                issues.append(ParseIssue(lineno, lineno, "continuation line without a field; ignored"))
                continue
            value = line[3:].strip()
            if current_tag in _LIST_TAGS:
                tags[current_tag].append(value)
            else:
                tags[current_tag][-1] = tags[current_tag][-1] + " " + value
            continue
        tag = line[:2]
        if not (len(line) >= 2 and tag.isalnum() and tag.upper() == tag) or (len(line) > 2 and line[2] != " "):
            issues.append(ParseIssue(lineno, lineno, f"unparseable line: {line[:40]!r}"))
            continue
        if tag == "EF":
            close_record(lineno)
            break
        if tag == "ER":
            close_record(lineno)
            continue
        value = line[3:].strip() if len(line) > 3 else ""
        tags.setdefault(tag, []).append(value)
        current_tag = tag
    else:
        close_record(len(lines))

    if not records:
        raise InputFormatError("no parseable records in input")
    return ParseResult(records=records, issues=issues)


def format_wos_export(records: Iterable[RawRecord], width: int = 68) -> str:
    """Serialize raw records back to the tagged export format.

    Values are wrapped over continuation lines at ``width``, except list
    tags (CR), where one line is one value and wrapping would change the
    parse.  Round-trips exactly for single-spaced values.
    """
    out: list[str] = []
    for rec in records:
        for tag, values in rec.tags.items():
            if tag in _LIST_TAGS:
                for k, value in enumerate(values):
                    out.append(f"{tag} {value}" if k == 0 else f"   {value}")
            else:
                for value in values:
                    out.extend(_wrap_tagged(tag, value, width))
        out.append("ER")
        out.append("")
    out.append("EF")
    return "\n".join(out) + "\n"


def _wrap_tagged(tag: str, value: str, width: int) -> list[str]:
    words = value.split(" ")
    lines: list[str] = []
    cur = f"{tag} {words[0]}"
    for wd in words[1:]:
        if len(cur) + 1 + len(wd) > width:
            lines.append(cur)
            cur = f"   {wd}"
        else:
            cur += " " + wd
    lines.append(cur)
    return lines


# -- cited references ------------------------------------------------------------

@dataclass(frozen=True)
class CitedReference:
    first_author: str
    year: int | None
    volume: str | None
    page: str | None
    doi: str | None
    raw: str

    @property
    def matchable(self) -> bool:
        return self.doi is not None or (bool(self.first_author) and self.year is not None)


def parse_cited_reference(raw: str) -> CitedReference:
    segments = [s.strip() for s in raw.split(",")]
    author = segments[0] if segments else ""
    year = None
    volume = None
    page = None
    doi = None
    for seg in segments[1:]:
        if not seg:
            continue
        upper = seg.upper()
        if year is None and re.fullmatch(r"\d{4}", seg):
            year = int(seg)
        elif upper.startswith("DOI "):
            doi = seg[4:].strip()
        elif re.fullmatch(r"[Vv]\S*", seg) and any(ch.isdigit() for ch in seg):
            volume = seg[1:]
        elif re.fullmatch(r"[Pp]\S*", seg) and any(ch.isdigit() for ch in seg):
            page = seg[1:]
    return CitedReference(first_author=author, year=year, volume=volume, page=page, doi=doi, raw=raw)


# -- normalization ------------------------------------------------------------------

_PUNCT = re.compile(r"[.'\-’]")
_WS = re.compile(r"\s+")


def author_key(name: str) -> str:
    """Normalized "LASTNAME I" (last name plus first initial)."""
    name = _PUNCT.sub("", name).strip()
    if not name:
        return ""
    if "," in name:
        last, _, rest = name.partition(",")
        initial = rest.strip()[:1]
    else:
        tokens = name.split()
        if len(tokens) == 1:
            last, initial = tokens[0], ""
        else:
            last = " ".join(tokens[:-1])
            initial = tokens[-1][:1]
    key = f"{_WS.sub(' ', last.strip())} {initial}".strip()
    return key.upper()


def token_key(value: str | None) -> str:
    """Volume/page comparison key: digits when present, else the bare token."""
    if not value:
        return ""
    digits = "".join(ch for ch in value if ch.isdigit())
    if digits:
        return digits.lstrip("0") or "0"
    return re.sub(r"[^A-Z0-9]", "", value.upper())


_DOI_PREFIXES = ("https://doi.org/", "http://doi.org/", "https://dx.doi.org/",
                 "http://dx.doi.org/", "doi:")


def doi_key(value: str | None) -> str:
    if not value:
        return ""
    v = value.strip().lower()
    for prefix in _DOI_PREFIXES:
        if v.startswith(prefix):
            v = v[len(prefix):]
            break
    return v


def tuple_key(author: str, year: int | None, volume: str | None, page: str | None) -> tuple:
    return (author_key(author), year, token_key(volume), token_key(page))


# -- citation matching ----------------------------------------------------------------

@dataclass
class MatchResult:
    publications: list[Publication]
    edges: list[tuple[str, str]]
    unmatched_reference_count: int
    total_references: int
    matched_references: int
    incomplete_citations: int
    ambiguous_references: list[tuple[str, str]]  # (citing id, raw reference)
    skipped_records: list[tuple[int, str]]       # (record position, reason)

    def report(self) -> dict:
        return {
            "publications": len(self.publications),
            "complete_records": sum(1 for p in self.publications if p.complete_record),
            "incomplete_records": sum(1 for p in self.publications if not p.complete_record),
            "edges": len(self.edges),
            "total_references": self.total_references,
            "matched_references": self.matched_references,
            "incomplete_citations": self.incomplete_citations,
            "unmatched_references": self.unmatched_reference_count,
            "ambiguous_references": [
                {"citing": c, "reference": r} for c, r in self.ambiguous_references
            ],
            "skipped_records": [
                {"record": pos, "reason": reason} for pos, reason in self.skipped_records
            ],
        }


def match_citations(
    records: "Sequence[RawRecord] | ParseResult",
    incomplete_min_citations: int = 10,
) -> MatchResult:
    """Resolve cited references to records; DOI first, then the 4-tuple.

    Order-independent: permuting the input records yields the same
    publication set and edge set (records that collide on every identity
    field fall back to input order).  Publications are returned sorted by id
    and edges sorted by (citing, cited).
    """
    if incomplete_min_citations < 1:
        raise ContractError("incomplete_min_citations must be >= 1")
    if isinstance(records, ParseResult):
        records = records.records

    usable: list[tuple[RawRecord, str]] = []  # (record, base id)
    skipped: list[tuple[int, str]] = []
    for pos, rec in enumerate(records):
        if rec.year is None:
            skipped.append((pos + 1, "no parseable year"))
            continue
        if not rec.authors:
            skipped.append((pos + 1, "no authors"))
            continue
        base = doi_key(rec.doi) or "|".join(
            str(k) for k in tuple_key(rec.authors[0], rec.year, rec.volume, rec.begin_page)
        )
        usable.append((rec, base))

    # content-sorted suffixing keeps ids stable under input permutation
    by_base: dict[str, list[RawRecord]] = {}
    for rec, base in usable:
        by_base.setdefault(base, []).append(rec)
    rec_id: dict[int, str] = {}
    for base, group in by_base.items():
        if len(group) == 1:
            rec_id[id(group[0])] = base
        else:
            group.sort(key=lambda r: (r.title, r.source, r.first("AU") or ""))
            for k, rec in enumerate(group, start=1):
                rec_id[id(rec)] = f"{base}#{k}"

    doi_index: dict[str, list[str]] = {}
    tuple_index: dict[tuple, list[str]] = {}
    for rec, _ in usable:
        pid = rec_id[id(rec)]
        dk = doi_key(rec.doi)
        if dk:
            doi_index.setdefault(dk, []).append(pid)
        tuple_index.setdefault(
            tuple_key(rec.authors[0], rec.year, rec.volume, rec.begin_page), []
        ).append(pid)

    publications: list[Publication] = []
    for rec, _ in usable:
        authors = rec.authors
        publications.append(Publication(
            id=rec_id[id(rec)],
            first_author=authors[0],
            co_authors=tuple(authors[1:]),
            title=rec.title,
            source=rec.source,
            year=rec.year,  # type: ignore[arg-type]
            doi=doi_key(rec.doi) or None,
            external_citations=0,
            external_known=False,
            complete_record=True,
        ))

    edges: set[tuple[str, str]] = set()
    ambiguous: list[tuple[str, str]] = []
    unresolved: dict[object, dict] = {}  # group key -> {citing ids, refs}
    total_refs = 0
    matched_refs = 0

    for rec, _ in usable:
        citing = rec_id[id(rec)]
        for raw in rec.cited_references:
            total_refs += 1
            ref = parse_cited_reference(raw)
            target: str | None = None
            dk = doi_key(ref.doi)
            if dk and dk in doi_index:
                hits = doi_index[dk]
                if len(hits) == 1:
                    target = hits[0]
                else:
                    ambiguous.append((citing, raw))
                    continue
            elif ref.first_author and ref.year is not None:
                key = tuple_key(ref.first_author, ref.year, ref.volume, ref.page)
                hits = tuple_index.get(key, [])
                if len(hits) == 1:
                    target = hits[0]
                elif len(hits) > 1:
                    ambiguous.append((citing, raw))
                    continue
            if target is not None:
                if target != citing:
                    edges.add((citing, target))
                matched_refs += 1
                continue
            if not ref.matchable:
                gkey: tuple = ("unmatchable", raw)
            else:
                gkey = ("doi", dk) if dk else ("tuple", tuple_key(ref.first_author, ref.year, ref.volume, ref.page))
            slot = unresolved.setdefault(gkey, {"citing": set(), "ref": ref, "raws": set(), "instances": 0})
            slot["citing"].add(citing)
            slot["raws"].add(raw)
            slot["instances"] += 1

    incomplete_citations = 0
    incomplete_pubs: list[Publication] = []
    taken_ids = {p.id for p in publications}
    for gkey in sorted(unresolved, key=repr):
        slot = unresolved[gkey]
        ref: CitedReference = slot["ref"]
        citing_ids = slot["citing"]
        if gkey[0] == "unmatchable" or len(citing_ids) < incomplete_min_citations or ref.year is None:
            continue
        base = doi_key(ref.doi) or "|".join(
            str(k) for k in tuple_key(ref.first_author, ref.year, ref.volume, ref.page)
        )
        pid = base
        k = 1
        while pid in taken_ids:
            k += 1
            pid = f"{base}~{k}"
        taken_ids.add(pid)
        incomplete_pubs.append(Publication(
            id=pid,
            first_author=ref.first_author,
            title=min(slot["raws"]),
            source="",
            year=ref.year,
            doi=doi_key(ref.doi) or None,
            external_citations=0,
            external_known=False,
            complete_record=False,
        ))
        for citing in citing_ids:
            edges.add((citing, pid))
        incomplete_citations += slot["instances"]

    publications.extend(incomplete_pubs)
    publications.sort(key=lambda p: p.id)
    unmatched = total_refs - matched_refs - incomplete_citations
    return MatchResult(
        publications=publications,
        edges=sorted(edges),
        unmatched_reference_count=unmatched,
        total_references=total_refs,
        matched_references=matched_refs,
        incomplete_citations=incomplete_citations,
        ambiguous_references=ambiguous,
        skipped_records=skipped,
    )


# -- pair files -------------------------------------------------------------------------

def parse_pair_files(
    publications_file: "str | Path | TextIO",
    citations_file: "str | Path | TextIO",
) -> tuple[list[Publication], list[tuple[str, str]]]:
    """Read the tab-separated publications/citations file pair.

    Headers are mandatory and checked verbatim; rows failing a type or
    referential check raise an error naming the row.
    """
    pub_lines = _read_lines(publications_file)
    cit_lines = _read_lines(citations_file)
    if not pub_lines or [c.strip() for c in pub_lines[0].split("\t")] != PAIR_PUBLICATIONS_HEADER:
        raise InputFormatError(
            "publications file must start with header: " + "\t".join(PAIR_PUBLICATIONS_HEADER)
        )
    if not cit_lines or [c.strip() for c in cit_lines[0].split("\t")] != PAIR_CITATIONS_HEADER:
        raise InputFormatError(
            "citations file must start with header: " + "\t".join(PAIR_CITATIONS_HEADER)
        )

    publications: list[Publication] = []
    seen: set[str] = set()
    for rowno, line in enumerate(pub_lines[1:], start=2):
        if not line.strip():
            continue
        cols = line.rstrip("\n").split("\t")
        if len(cols) != len(PAIR_PUBLICATIONS_HEADER):
            raise InputFormatError(f"publications row {rowno}: expected "
                                   f"{len(PAIR_PUBLICATIONS_HEADER)} columns, got {len(cols)}")
        pid, authors, title, source, year_s, doi, ext = (c.strip() for c in cols)
        if not pid:
            raise InputFormatError(f"publications row {rowno}: empty id")
        if pid in seen:
            raise InputFormatError(f"publications row {rowno}: duplicate id {pid!r}")
        seen.add(pid)
        try:
            year = int(year_s)
        except ValueError:
            raise InputFormatError(f"publications row {rowno}: year {year_s!r} is not an integer") from None
        author_list = [a.strip() for a in authors.split(";") if a.strip()]
        ext_known = ext != ""
        try:
            ext_val = int(ext) if ext_known else 0
        except ValueError:
            raise InputFormatError(f"publications row {rowno}: ext_cit {ext!r} is not an integer") from None
        publications.append(Publication(
            id=pid,
            first_author=author_list[0] if author_list else "",
            co_authors=tuple(author_list[1:]),
            title=title,
            source=source,
            year=year,
            doi=doi_key(doi) or None,
            external_citations=ext_val,
            external_known=ext_known,
        ))

    edges: list[tuple[str, str]] = []
    for rowno, line in enumerate(cit_lines[1:], start=2):
        if not line.strip():
            continue
        cols = line.rstrip("\n").split("\t")
        if len(cols) != 2:
            raise InputFormatError(f"citations row {rowno}: expected 2 columns, got {len(cols)}")
        citing, cited = cols[0].strip(), cols[1].strip()
        for pid in (citing, cited):
            if pid not in seen:
                raise InputFormatError(f"citations row {rowno}: unknown id {pid!r}")
        edges.append((citing, cited))
    return publications, edges


def _read_lines(source: "str | Path | TextIO") -> list[str]:
    if isinstance(source, Path):
        text = source.read_text(encoding="utf-8")
    elif isinstance(source, str):
        p = Path(source)
        text = p.read_text(encoding="utf-8")
    else:
        text = source.read()
    return text.replace("\r\n", "\n").split("\n")


def write_pair_files(publications: Iterable[Publication], edges: Iterable[tuple[str, str]],
                     publications_path: "str | Path", citations_path: "str | Path") -> None:
    pub_out = io.StringIO()
    pub_out.write("\t".join(PAIR_PUBLICATIONS_HEADER) + "\n")
    for p in publications:
        authors = "; ".join([p.first_author, *p.co_authors]) if p.first_author else ""
        ext = str(p.external_citations) if p.external_known else ""
        pub_out.write("\t".join([p.id, authors, p.title, p.source, str(p.year), p.doi or "", ext]) + "\n")
    Path(publications_path).write_text(pub_out.getvalue(), encoding="utf-8")

    cit_out = io.StringIO()
    cit_out.write("\t".join(PAIR_CITATIONS_HEADER) + "\n")
    for a, b in edges:
        cit_out.write(f"{a}\t{b}\n")
    Path(citations_path).write_text(cit_out.getvalue(), encoding="utf-8")
