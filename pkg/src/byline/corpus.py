"""Corpus parsing, author-name normalization, and citation indexing.

The corpus is read from line-delimited JSON (one publication per line) and
materialized into immutable records plus one PAC (publication-author
combination) per author mention. Everything downstream -- blocking, pair
scoring, clustering -- works on these normalized structures.
"""

from __future__ import annotations

import json
import re
import unicodedata
from dataclasses import dataclass, field
from typing import Iterable, Iterator

PacId = tuple[str, int]

# (country, city, organization, department), each normalized
AffTuple = tuple[str, str, str, str]


class CorpusError(ValueError):
    """Input stream violates the publications schema."""


def fold_diacritics(text: str) -> str:
    """Strip combining marks after compatibility decomposition."""
    decomposed = unicodedata.normalize("NFKD", text)
    return "".join(ch for ch in decomposed if not unicodedata.combining(ch))


def normalize_string(value: str, fold: bool = True) -> str:
    """Lowercase, optionally fold diacritics, collapse whitespace."""
    if fold:
        value = fold_diacritics(value)
    return re.sub(r"\s+", " ", value.lower()).strip()


def normalize_email(value: str) -> str:
    """Emails are compared lowercase and trimmed, nothing more."""
    return value.strip().lower()


_SEPARATOR_RUN = re.compile(r"[ -]+")


def _normalize_last(raw: str, fold: bool) -> str:
    if fold:
        raw = fold_diacritics(raw)
    kept = "".join(ch for ch in raw.lower() if ch.isalpha() or ch in " -")
    # a run mixing spaces and hyphens counts as hyphenation
    collapsed = _SEPARATOR_RUN.sub(lambda m: "-" if "-" in m.group() else " ", kept)
    return collapsed.strip(" -")


def _first_tokens(raw: str, fold: bool) -> list[str]:
    if fold:
        raw = fold_diacritics(raw)
    cleaned = "".join(ch if ch.isalpha() else " " for ch in raw.lower())
    return cleaned.split()


def normalize_name(
    raw_last: str, raw_first: str, raw_initials: str, fold: bool = True
) -> tuple[str, str, str]:
    """Normalize one author mention into (last, first, initials).

    Non-letter characters are dropped from all name parts; last names keep
    their space/hyphen structure so surname variants can be generated later.
    A first name made only of single-letter tokens ("J.-P.") is treated as
    an initials string and compacted. Initials come from whichever of the
    raw initials field or the first-name tokens carries more information.
    """
    last = _normalize_last(raw_last, fold)
    tokens = _first_tokens(raw_first, fold)
    if tokens and all(len(t) == 1 for t in tokens):
        first = "".join(tokens)
    else:
        first = " ".join(tokens)
    derived = "".join(t[0] for t in tokens)
    raw_norm = "".join(ch for ch in (fold_diacritics(raw_initials) if fold else raw_initials).lower() if ch.isalpha())
    initials = derived if len(derived) > len(raw_norm) else (raw_norm or derived)
    if not (last or first or initials):
        raise CorpusError("unnamed mention")
    return last, first, initials


def normalize_ref_key(raw: str) -> str:
    """Free-text cited-reference keys compare on their alphanumerics only."""
    return "".join(ch for ch in fold_diacritics(raw).lower() if ch.isalnum())


@dataclass(frozen=True)
class AuthorMentionRaw:
    """One author slot on a publication, as read from the input."""

    position: int
    last_name: str
    first_name: str = ""
    initials: str = ""
    email: str = ""
    linked_affiliation_indices: tuple[int, ...] = ()


@dataclass(frozen=True)
class AffiliationRaw:
    org: str = ""
    dept: str = ""
    city: str = ""
    country: str = ""


@dataclass(frozen=True)
class PAC:
    """Publication-author combination: the unit being disambiguated."""

    pac_id: PacId
    normalized_last: str
    normalized_initials: str
    normalized_first: str
    normalized_email: str
    linked_affiliations: tuple[AffTuple, ...]
    linked_affiliation_indices: tuple[int, ...] = ()

    @property
    def pub_id(self) -> str:
        return self.pac_id[0]

    @property
    def position(self) -> int:
        return self.pac_id[1]

    @property
    def full_name(self) -> str:
        """Cluster-style display form: "last, initials"."""
        return f"{self.normalized_last}, {self.normalized_initials}"


@dataclass(frozen=True)
class PublicationRecord:
    """One indexed document with the raw fields plus normalized caches."""

    pub_id: str
    year: int
    source_title: str
    subject_categories: tuple[str, ...]
    authors: tuple[AuthorMentionRaw, ...]
    affiliations: tuple[AffiliationRaw, ...]
    grant_numbers: tuple[str, ...]
    references: tuple[str, ...]  # normalized RefKeys
    title: str = ""

    # normalized caches, derived at parse time
    source_norm: str = ""
    categories_norm: frozenset[str] = frozenset()
    grants_norm: frozenset[str] = frozenset()
    affiliations_norm: tuple[AffTuple, ...] = ()

    @property
    def author_count(self) -> int:
        return len(self.authors)

    @property
    def institute_count(self) -> int:
        return len({a[2] for a in self.affiliations_norm if a[2]})


def _normalize_affiliation(aff: AffiliationRaw, fold: bool) -> AffTuple:
    return (
        normalize_string(aff.country, fold),
        normalize_string(aff.city, fold),
        normalize_string(aff.org, fold),
        normalize_string(aff.dept, fold),
    )


class Corpus:
    """Immutable collection of publications and their PACs."""

    def __init__(self, records: list[PublicationRecord], fold: bool = True):
        self.fold = fold
        self.records: dict[str, PublicationRecord] = {}
        self.pacs: dict[PacId, PAC] = {}
        self._pub_pacs: dict[str, list[PacId]] = {}
        for record in records:
            if record.pub_id in self.records:
                raise CorpusError(f"duplicate pub_id {record.pub_id!r}")
            self.records[record.pub_id] = record
            self._pub_pacs[record.pub_id] = []
            for mention in record.authors:
                pac = self._materialize_pac(record, mention)
                self.pacs[pac.pac_id] = pac
                self._pub_pacs[record.pub_id].append(pac.pac_id)

    def _materialize_pac(self, record: PublicationRecord, mention: AuthorMentionRaw) -> PAC:
        last, first, initials = normalize_name(
            mention.last_name, mention.first_name, mention.initials, self.fold
        )
        linked = tuple(
            record.affiliations_norm[i] for i in mention.linked_affiliation_indices
        )
        return PAC(
            pac_id=(record.pub_id, mention.position),
            normalized_last=last,
            normalized_initials=initials,
            normalized_first=first,
            normalized_email=normalize_email(mention.email),
            linked_affiliations=linked,
            linked_affiliation_indices=mention.linked_affiliation_indices,
        )

    def pacs_of_pub(self, pub_id: str) -> list[PacId]:
        return self._pub_pacs[pub_id]

    def __len__(self) -> int:
        return len(self.records)

    def to_jsonl(self) -> Iterator[str]:
        """Serialize back to the publications JSONL schema (raw fields)."""
        for record in self.records.values():
            yield json.dumps(_record_to_dict(record), sort_keys=True, ensure_ascii=False)


def _record_to_dict(record: PublicationRecord) -> dict:
    out: dict = {
        "pub_id": record.pub_id,
        "year": record.year,
        "authors": [
            {
                "position": m.position,
                "last_name": m.last_name,
                "first_name": m.first_name,
                "initials": m.initials,
                "email": m.email,
                "affiliation_idx": list(m.linked_affiliation_indices),
            }
            for m in record.authors
        ],
    }
    if record.source_title:
        out["source_title"] = record.source_title
    if record.title:
        out["title"] = record.title
    if record.subject_categories:
        out["subject_categories"] = list(record.subject_categories)
    if record.affiliations:
        out["affiliations"] = [
            {"org": a.org, "dept": a.dept, "city": a.city, "country": a.country}
            for a in record.affiliations
        ]
    if record.grant_numbers:
        out["grants"] = list(record.grant_numbers)
    if record.references:
        out["references"] = [{"key": key} for key in record.references]
    return out


def _require(obj: dict, key: str, line_no: int):
    if key not in obj or obj[key] is None:
        raise CorpusError(f"line {line_no}: missing required field {key!r}")
    return obj[key]


def _parse_record(obj: dict, line_no: int, fold: bool) -> PublicationRecord:
    pub_id = _require(obj, "pub_id", line_no)
    if not isinstance(pub_id, str) or not pub_id:
        raise CorpusError(f"line {line_no}: pub_id must be a non-empty string")
    year = _require(obj, "year", line_no)
    if not isinstance(year, int) or year <= 0:
        raise CorpusError(f"line {line_no}: year must be a positive integer")
    raw_authors = _require(obj, "authors", line_no)
    if not isinstance(raw_authors, list):
        raise CorpusError(f"line {line_no}: authors must be an array")

    raw_affs = obj.get("affiliations") or []
    affiliations = tuple(
        AffiliationRaw(
            org=str(a.get("org", "") or ""),
            dept=str(a.get("dept", "") or ""),
            city=str(a.get("city", "") or ""),
            country=str(a.get("country", "") or ""),
        )
        for a in raw_affs
    )

    authors = []
    seen_positions: set[int] = set()
    for a in raw_authors:
        position = a.get("position")
        if not isinstance(position, int) or position < 1:
            raise CorpusError(f"line {line_no}: author position must be an integer >= 1")
        if position in seen_positions:
            raise CorpusError(f"line {line_no}: duplicate author position {position}")
        seen_positions.add(position)
        idx = tuple(a.get("affiliation_idx") or ())
        for i in idx:
            if not isinstance(i, int) or not (0 <= i < len(affiliations)):
                raise CorpusError(
                    f"line {line_no}: affiliation index {i} out of range for author {position}"
                )
        mention = AuthorMentionRaw(
            position=position,
            last_name=str(a.get("last_name", "") or ""),
            first_name=str(a.get("first_name", "") or ""),
            initials=str(a.get("initials", "") or ""),
            email=str(a.get("email", "") or ""),
            linked_affiliation_indices=idx,
        )
        last, first, initials = "", "", ""
        try:
            last, first, initials = normalize_name(
                mention.last_name, mention.first_name, mention.initials, fold
            )
        except CorpusError:
            raise CorpusError(f"line {line_no}: unnamed mention at position {position}")
        # every PAC must land in exactly one name block
        if not last:
            raise CorpusError(f"line {line_no}: author {position} has no last name")
        if not initials:
            raise CorpusError(
                f"line {line_no}: author {position} has neither initials nor first name"
            )
        authors.append(mention)

    references = []
    for ref in obj.get("references") or []:
        if "pub_id" in ref and ref["pub_id"]:
            references.append(str(ref["pub_id"]))
        elif "key" in ref and ref["key"]:
            references.append(normalize_ref_key(str(ref["key"])))

    categories = tuple(str(c) for c in obj.get("subject_categories") or [])
    grants = tuple(str(g) for g in obj.get("grants") or [])
    source_title = str(obj.get("source_title", "") or "")
    return PublicationRecord(
        pub_id=pub_id,
        year=year,
        source_title=source_title,
        subject_categories=categories,
        authors=tuple(authors),
        affiliations=affiliations,
        grant_numbers=grants,
        references=tuple(references),
        title=str(obj.get("title", "") or ""),
        source_norm=normalize_string(source_title, fold),
        categories_norm=frozenset(normalize_string(c, fold) for c in categories if c.strip()),
        grants_norm=frozenset(g.strip().lower() for g in grants if g.strip()),
        affiliations_norm=tuple(_normalize_affiliation(a, fold) for a in affiliations),
    )


def parse_corpus(lines: Iterable[str], fold: bool = True) -> Corpus:
    """Parse a publications JSONL stream into a Corpus.

    Raises CorpusError with the offending line number on malformed input,
    duplicate pub_ids, or missing required fields.
    """
    records: list[PublicationRecord] = []
    seen: set[str] = set()
    for line_no, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise CorpusError(f"line {line_no}: invalid JSON: {exc.msg}") from exc
        if not isinstance(obj, dict):
            raise CorpusError(f"line {line_no}: record must be a JSON object")
        record = _parse_record(obj, line_no, fold)
        if record.pub_id in seen:
            raise CorpusError(f"duplicate pub_id {record.pub_id!r} (line {line_no})")
        seen.add(record.pub_id)
        records.append(record)
    return Corpus(records, fold=fold)


def parse_corpus_file(path, fold: bool = True) -> Corpus:
    with open(path, encoding="utf-8") as handle:
        return parse_corpus(handle, fold=fold)


@dataclass
class CitationIndex:
    """Forward and inverted citation maps over normalized RefKeys."""

    cites: dict[str, frozenset[str]] = field(default_factory=dict)
    cited_by: dict[str, frozenset[str]] = field(default_factory=dict)

    def shared_references(self, pub_a: str, pub_b: str) -> int:
        """Bibliographic-coupling strength: cited references in common."""
        return len(self.cites.get(pub_a, frozenset()) & self.cites.get(pub_b, frozenset()))

    def co_citing_documents(self, pub_a: str, pub_b: str) -> int:
        """Co-citation strength: documents citing both publications."""
        return len(
            self.cited_by.get(pub_a, frozenset()) & self.cited_by.get(pub_b, frozenset())
        )

    def cites_either_way(self, pub_a: str, pub_b: str) -> bool:
        return (
            pub_b in self.cites.get(pub_a, frozenset())
            or pub_a in self.cites.get(pub_b, frozenset())
        )


def build_citation_index(corpus: Corpus) -> CitationIndex:
    """Populate cites/cited_by; unresolvable references keep their text key."""
    cites: dict[str, frozenset[str]] = {}
    cited_by: dict[str, set[str]] = {}
    for pub_id, record in corpus.records.items():
        keys = frozenset(record.references)
        cites[pub_id] = keys
        for key in keys:
            cited_by.setdefault(key, set()).add(pub_id)
    return CitationIndex(
        cites=cites,
        cited_by={key: frozenset(v) for key, v in cited_by.items()},
    )
