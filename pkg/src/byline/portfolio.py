"""Researcher-to-cluster matching and portfolio construction.

A roster entry is matched to candidate clusters through surname-variant
prefix patterns, then narrowed by a publication-window filter and one of
three scenarios: automatic country + first-name filtering (scenario 1),
additional city filtering (scenario 2), or manual accept/reject decisions
(scenario 3). Two naive baselines assign publications straight from name
blocks for comparison.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from typing import Iterable, Sequence

from .blocking import block_key
from .clustering import Cluster
from .corpus import Corpus, _normalize_last, normalize_name, normalize_string


class PortfolioError(ValueError):
    pass


ROSTER_FIELDS = ["person_id", "last_name", "first_name", "city", "country", "field_code"]


@dataclass(frozen=True)
class RosterEntry:
    person_id: str
    last_name: str
    first_name: str
    city: str
    country: str
    field_code: str = ""

    @property
    def normalized_last(self) -> str:
        return _normalize_last(self.last_name, fold=True)

    @property
    def normalized_first(self) -> str:
        _, first, _ = normalize_name(self.last_name, self.first_name, "")
        return first

    @property
    def normalized_city(self) -> str:
        return normalize_string(self.city)

    @property
    def normalized_country(self) -> str:
        return normalize_string(self.country)


def parse_roster(lines: Iterable[str]) -> list[RosterEntry]:
    """Read the roster CSV; person_id must be unique, names non-empty."""
    reader = csv.DictReader(lines)
    if reader.fieldnames is None or [f.strip() for f in reader.fieldnames] != ROSTER_FIELDS:
        raise PortfolioError(
            f"roster header must be {','.join(ROSTER_FIELDS)!r}, got {reader.fieldnames}"
        )
    entries: list[RosterEntry] = []
    seen: set[str] = set()
    for row_no, row in enumerate(reader, start=2):
        person_id = (row["person_id"] or "").strip()
        last = (row["last_name"] or "").strip()
        first = (row["first_name"] or "").strip()
        if not person_id:
            raise PortfolioError(f"roster row {row_no}: empty person_id")
        if person_id in seen:
            raise PortfolioError(f"roster row {row_no}: duplicate person_id {person_id!r}")
        if not last or not first:
            raise PortfolioError(f"roster row {row_no}: last_name and first_name are required")
        seen.add(person_id)
        entries.append(
            RosterEntry(
                person_id=person_id,
                last_name=last,
                first_name=first,
                city=(row["city"] or "").strip(),
                country=(row["country"] or "").strip(),
                field_code=(row["field_code"] or "").strip(),
            )
        )
    return entries


def name_variants(entry: RosterEntry) -> list[tuple[str, str]]:
    """Surname patterns to probe, each paired with the first-name initial.

    An n-part surname yields each part alone plus the concatenated,
    space-joined, and hyphen-joined full forms; a single-part surname
    yields just itself.
    """
    last = entry.normalized_last
    if not last:
        raise PortfolioError(f"{entry.person_id}: surname normalizes to nothing")
    first = entry.normalized_first
    if not first:
        raise PortfolioError(f"{entry.person_id}: first name normalizes to nothing")
    initial = first[0]
    parts = last.replace("-", " ").split()
    variants = [(part, initial) for part in parts]
    if len(parts) > 1:
        variants.append(("".join(parts), initial))
        variants.append((" ".join(parts), initial))
        variants.append(("-".join(parts), initial))
    return variants


def variant_prefixes(entry: RosterEntry) -> list[str]:
    return [f"{last}, {initial}" for last, initial in name_variants(entry)]


def cluster_matches(cluster: Cluster, prefixes: Sequence[str]) -> bool:
    """Prefix match against the cluster's primary or alternative full name.

    The ", " separator doubles as the word boundary: "rossi, f" can never
    prefix a "rossini" cluster.
    """
    return any(
        cluster.full_name.startswith(prefix)
        or (cluster.alternative_full_name and cluster.alternative_full_name.startswith(prefix))
        for prefix in prefixes
    )


def retrieve_clusters(entry: RosterEntry, clusters: Sequence[Cluster]) -> list[Cluster]:
    prefixes = variant_prefixes(entry)
    return [cluster for cluster in clusters if cluster_matches(cluster, prefixes)]


def window_filter(clusters: Sequence[Cluster], y0: int, y1: int) -> list[Cluster]:
    """Keep clusters whose activity years intersect [y0, y1]."""
    if y0 > y1:
        raise PortfolioError(f"window start {y0} after end {y1}")
    return [c for c in clusters if c.first_year <= y1 and c.last_year >= y0]


def first_names_compatible(a: str, b: str) -> bool:
    """Case-insensitive compatibility of two normalized first names.

    Compatible when equal, when one is a single letter matching the
    other's initial, or when one equals the other's first token. An empty
    side carries no evidence and never contradicts.
    """
    a, b = a.lower(), b.lower()
    if not a or not b:
        return True
    if a == b:
        return True
    if len(a) == 1 and b[0] == a:
        return True
    if len(b) == 1 and a[0] == b:
        return True
    if a == b.split()[0] or b == a.split()[0]:
        return True
    return False


class SynonymTable:
    """Canonicalizes place names so e.g. "rome" and "roma" compare equal."""

    def __init__(self, mapping: dict[str, str] | None = None):
        self._map = {
            normalize_string(k): normalize_string(v) for k, v in (mapping or {}).items()
        }

    def canon(self, value: str) -> str:
        value = normalize_string(value)
        return self._map.get(value, value)

    def equal(self, a: str, b: str) -> bool:
        return self.canon(a) == self.canon(b)


def _place_passes(primary: str, alternative: str, target: str, synonyms: SynonymTable) -> bool:
    """A cluster passes on a place field when no information contradicts:
    every recorded value differing from the target drops it, but a cluster
    with no recorded value is kept."""
    values = [v for v in (primary, alternative) if v]
    if not values:
        return True
    return any(synonyms.equal(v, target) for v in values)


def _first_name_passes(cluster: Cluster, entry: RosterEntry) -> bool:
    values = [v for v in (cluster.first_name, cluster.alternative_first_name) if v]
    if not values:
        return True
    target = entry.normalized_first
    return any(first_names_compatible(v, target) for v in values)


def s1_drop_reason(
    cluster: Cluster, entry: RosterEntry, synonyms: SynonymTable | None = None
) -> str | None:
    """Why scenario 1 would drop this cluster, or None to keep it."""
    synonyms = synonyms or SynonymTable()
    if not _place_passes(
        cluster.address_country,
        cluster.alternative_address_country,
        entry.normalized_country,
        synonyms,
    ):
        return "country"
    if not _first_name_passes(cluster, entry):
        return "first_name"
    return None


def s2_drop_reason(
    cluster: Cluster, entry: RosterEntry, synonyms: SynonymTable | None = None
) -> str | None:
    """Why scenario 2 would drop this cluster, or None to keep it."""
    synonyms = synonyms or SynonymTable()
    reason = s1_drop_reason(cluster, entry, synonyms)
    if reason:
        return reason
    if not _place_passes(
        cluster.address_city,
        cluster.alternative_address_city,
        entry.normalized_city,
        synonyms,
    ):
        return "city"
    return None


def scenario1_filter(
    clusters: Sequence[Cluster],
    entry: RosterEntry,
    synonyms: SynonymTable | None = None,
) -> list[Cluster]:
    """Drop clusters located in a different country or carrying an
    incompatible first name."""
    return [c for c in clusters if s1_drop_reason(c, entry, synonyms) is None]


def scenario2_filter(
    clusters: Sequence[Cluster],
    entry: RosterEntry,
    synonyms: SynonymTable | None = None,
) -> list[Cluster]:
    """Scenario 1 plus the affiliation-city filter."""
    return [c for c in clusters if s2_drop_reason(c, entry, synonyms) is None]


@dataclass(frozen=True)
class ReviewDecision:
    person_id: str
    cluster_id: int
    verdict: str  # accept | reject
    reviewer: str = ""
    ts: str = ""

    def to_dict(self) -> dict:
        return {
            "person_id": self.person_id,
            "cluster_id": self.cluster_id,
            "verdict": self.verdict,
            "reviewer": self.reviewer,
            "ts": self.ts,
        }


def parse_decisions(lines: Iterable[str]) -> list[ReviewDecision]:
    """Read the decisions JSONL log. A decision is immutable: any second
    record for the same (person, cluster) is an error, even if identical."""
    decisions: list[ReviewDecision] = []
    seen: set[tuple[str, int]] = set()
    for line_no, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise PortfolioError(f"decisions line {line_no}: invalid JSON: {exc.msg}") from exc
        try:
            decision = ReviewDecision(
                person_id=str(obj["person_id"]),
                cluster_id=int(obj["cluster_id"]),
                verdict=str(obj["verdict"]),
                reviewer=str(obj.get("reviewer", "")),
                ts=str(obj.get("ts", "")),
            )
        except KeyError as exc:
            raise PortfolioError(f"decisions line {line_no}: missing field {exc}") from exc
        if decision.verdict not in ("accept", "reject"):
            raise PortfolioError(
                f"decisions line {line_no}: verdict must be accept or reject"
            )
        key = (decision.person_id, decision.cluster_id)
        if key in seen:
            raise PortfolioError(
                f"decisions line {line_no}: duplicate decision for {key}; decisions are immutable"
            )
        seen.add(key)
        decisions.append(decision)
    return decisions


def apply_decisions(
    clusters: Sequence[Cluster],
    decisions: Sequence[ReviewDecision],
    person_id: str,
) -> tuple[list[Cluster], list[Cluster]]:
    """Split a person's candidates into (kept, pending) under the log.

    Decisions for this person must reference candidate clusters; rejected
    candidates are dropped silently.
    """
    candidate_ids = {cluster.cluster_id for cluster in clusters}
    verdicts: dict[int, str] = {}
    for decision in decisions:
        if decision.person_id != person_id:
            continue
        if decision.cluster_id not in candidate_ids:
            raise PortfolioError(
                f"decision for unknown pair ({person_id}, {decision.cluster_id})"
            )
        verdicts[decision.cluster_id] = decision.verdict
    kept = [c for c in clusters if verdicts.get(c.cluster_id) == "accept"]
    pending = [c for c in clusters if c.cluster_id not in verdicts]
    return kept, pending


def portfolio_rows(
    entry: RosterEntry,
    kept: Sequence[Cluster],
    corpus: Corpus,
    window: tuple[int, int] | None = None,
) -> list[tuple[str, str]]:
    """(person_id, pub_id) authorships from kept clusters, deduplicated,
    publication years restricted to the window when one is given."""
    pub_ids: set[str] = set()
    for cluster in kept:
        for pub_id, _position in cluster.pac_ids:
            if window is not None:
                year = corpus.records[pub_id].year
                if not (window[0] <= year <= window[1]):
                    continue
            pub_ids.add(pub_id)
    return [(entry.person_id, pub_id) for pub_id in sorted(pub_ids)]


def baseline_authorships(
    mode: str,
    roster: Sequence[RosterEntry],
    corpus: Corpus,
    window: tuple[int, int] | None = None,
) -> set[tuple[str, str]]:
    """Naive assignment straight from name keys.

    mode "initials": every PAC sharing the entry's block key (compact
    surname + first initial). mode "fullname": additionally the full
    normalized first name must match, so its output is always a subset of
    the initials mode.
    """
    if mode not in ("initials", "fullname"):
        raise PortfolioError(f"unknown baseline mode {mode!r}")
    rows: set[tuple[str, str]] = set()
    by_key: dict[str, list] = {}
    for pac in corpus.pacs.values():
        key = block_key(pac.normalized_last, pac.normalized_initials, pac.normalized_first)
        by_key.setdefault(key, []).append(pac)
    for entry in roster:
        first = entry.normalized_first
        key = block_key(entry.normalized_last, first[:1])
        for pac in by_key.get(key, []):
            if mode == "fullname" and pac.normalized_first != first:
                continue
            if window is not None:
                year = corpus.records[pac.pub_id].year
                if not (window[0] <= year <= window[1]):
                    continue
            rows.add((entry.person_id, pac.pub_id))
    return rows
