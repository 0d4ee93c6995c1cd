"""Single-linkage clustering of PACs inside name blocks.

Within a block, every PAC pair is scored; pairs at or above the block's
size-dependent threshold become edges and connected components become
clusters. Clusters sharing a verified email address are merged afterwards,
across block boundaries, so surname variants of one person can reunite.
Each final cluster carries modal metadata summarizing its members.
"""

from __future__ import annotations

from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Sequence

from .blocking import build_blocks, threshold_for
from .corpus import CitationIndex, Corpus, PacId, build_citation_index
from .scoring import PairScorer


class UnionFind:
    """Disjoint sets over 0..n-1 with union by rank and path compression."""

    def __init__(self, n: int):
        self.parent = list(range(n))
        self.rank = [0] * n

    def find(self, x: int) -> int:
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return
        if self.rank[ra] < self.rank[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        if self.rank[ra] == self.rank[rb]:
            self.rank[ra] += 1

    def groups(self) -> list[list[int]]:
        by_root: dict[int, list[int]] = {}
        for x in range(len(self.parent)):
            by_root.setdefault(self.find(x), []).append(x)
        return list(by_root.values())


def cluster_block(
    scorer: PairScorer,
    members: Sequence[PacId],
    threshold: float | None = None,
    strict: bool = False,
) -> list[list[PacId]]:
    """Connected components of the member pairs meeting the threshold.

    The default threshold comes from the block size. `strict` demands
    scores strictly above the threshold instead of at-or-above.
    """
    if threshold is None:
        threshold = threshold_for(len(members))
    uf = UnionFind(len(members))
    for i in range(len(members)):
        for j in range(i + 1, len(members)):
            total = scorer.score(members[i], members[j]).total
            if (total > threshold) if strict else (total >= threshold):
                uf.union(i, j)
    components = [sorted(members[i] for i in group) for group in uf.groups()]
    return sorted(components, key=lambda c: c[0])


def merge_by_email(corpus: Corpus, components: list[list[PacId]]) -> list[list[PacId]]:
    """Transitively merge clusters whose members share a non-empty email."""
    uf = UnionFind(len(components))
    first_with_email: dict[str, int] = {}
    for idx, component in enumerate(components):
        for pac_id in component:
            email = corpus.pacs[pac_id].normalized_email
            if not email:
                continue
            if email in first_with_email:
                uf.union(first_with_email[email], idx)
            else:
                first_with_email[email] = idx
    merged: dict[int, list[PacId]] = {}
    for idx, component in enumerate(components):
        merged.setdefault(uf.find(idx), []).extend(component)
    return sorted((sorted(c) for c in merged.values()), key=lambda c: c[0])


@dataclass(frozen=True)
class Cluster:
    """One disambiguated author identity with modal summary fields."""

    cluster_id: int
    pac_ids: tuple[PacId, ...]
    n_pubs: int
    first_year: int
    last_year: int
    full_name: str
    first_name: str
    email: str
    address_organization: str
    address_city: str
    address_country: str
    alternative_full_name: str
    alternative_first_name: str
    alternative_email: str
    alternative_address_organization: str
    alternative_address_city: str
    alternative_address_country: str

    def to_dict(self) -> dict:
        return {
            "cluster_id": self.cluster_id,
            "pac_ids": [[pub_id, position] for pub_id, position in self.pac_ids],
            "n_pubs": self.n_pubs,
            "first_year": self.first_year,
            "last_year": self.last_year,
            "full_name": self.full_name,
            "first_name": self.first_name,
            "email": self.email,
            "address_organization": self.address_organization,
            "address_city": self.address_city,
            "address_country": self.address_country,
            "alternative_full_name": self.alternative_full_name,
            "alternative_first_name": self.alternative_first_name,
            "alternative_email": self.alternative_email,
            "alternative_address_organization": self.alternative_address_organization,
            "alternative_address_city": self.alternative_address_city,
            "alternative_address_country": self.alternative_address_country,
        }

    @staticmethod
    def from_dict(obj: dict) -> "Cluster":
        return Cluster(
            cluster_id=obj["cluster_id"],
            pac_ids=tuple((p, i) for p, i in obj["pac_ids"]),
            n_pubs=obj["n_pubs"],
            first_year=obj["first_year"],
            last_year=obj["last_year"],
            full_name=obj["full_name"],
            first_name=obj["first_name"],
            email=obj["email"],
            address_organization=obj["address_organization"],
            address_city=obj["address_city"],
            address_country=obj["address_country"],
            alternative_full_name=obj["alternative_full_name"],
            alternative_first_name=obj["alternative_first_name"],
            alternative_email=obj["alternative_email"],
            alternative_address_organization=obj["alternative_address_organization"],
            alternative_address_city=obj["alternative_address_city"],
            alternative_address_country=obj["alternative_address_country"],
        )


def modal_pair(values: Iterable[str]) -> tuple[str, str]:
    """Most common non-empty value and runner-up; frequency ties break
    lexicographically."""
    counts = Counter(v for v in values if v)
    if not counts:
        return "", ""
    ranked = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
    primary = ranked[0][0]
    alternative = ranked[1][0] if len(ranked) > 1 else ""
    return primary, alternative


def summarize_cluster(corpus: Corpus, cluster_id: int, pac_ids: Sequence[PacId]) -> Cluster:
    pacs = [corpus.pacs[pac_id] for pac_id in pac_ids]
    pub_ids = {pac.pub_id for pac in pacs}
    years = [corpus.records[pub_id].year for pub_id in pub_ids]

    full_name, alt_full_name = modal_pair(pac.full_name for pac in pacs)
    first_name, alt_first_name = modal_pair(pac.normalized_first for pac in pacs)
    email, alt_email = modal_pair(pac.normalized_email for pac in pacs)
    orgs, cities, countries = [], [], []
    for pac in pacs:
        for country, city, org, _dept in pac.linked_affiliations:
            if org:
                orgs.append(org)
            if city:
                cities.append(city)
            if country:
                countries.append(country)
    organization, alt_organization = modal_pair(orgs)
    city, alt_city = modal_pair(cities)
    country, alt_country = modal_pair(countries)

    return Cluster(
        cluster_id=cluster_id,
        pac_ids=tuple(sorted(pac_ids)),
        n_pubs=len(pub_ids),
        first_year=min(years),
        last_year=max(years),
        full_name=full_name,
        first_name=first_name,
        email=email,
        address_organization=organization,
        address_city=city,
        address_country=country,
        alternative_full_name=alt_full_name,
        alternative_first_name=alt_first_name,
        alternative_email=alt_email,
        alternative_address_organization=alt_organization,
        alternative_address_city=alt_city,
        alternative_address_country=alt_country,
    )


# per-worker state for the process pool
_WORKER: dict = {}


def _worker_init(
    corpus: Corpus,
    index: CitationIndex,
    general_names: frozenset[str],
    strict: bool,
    threshold: float | None,
):
    _WORKER["scorer"] = PairScorer(corpus, index, general_names)
    _WORKER["strict"] = strict
    _WORKER["threshold"] = threshold


def _worker_cluster(members: list[PacId]) -> list[list[PacId]]:
    return cluster_block(
        _WORKER["scorer"], members, threshold=_WORKER["threshold"], strict=_WORKER["strict"]
    )


def cluster_corpus(
    corpus: Corpus,
    workers: int = 1,
    strict: bool = False,
    general_names: frozenset[str] = frozenset(),
    first_cluster_id: int = 1,
    threshold: float | None = None,
) -> list[Cluster]:
    """Run the full disambiguation: block, score, cluster, merge, summarize.

    `threshold` overrides the block-size table with one fixed value.
    Output is independent of worker count: blocks are processed in sorted
    key order and cluster ids are assigned by each cluster's smallest
    member, so any parallel schedule lands on the same result.
    """
    index = build_citation_index(corpus)
    blocks = build_blocks(corpus)
    ordered_keys = sorted(blocks)

    components: list[list[PacId]] = []
    if workers <= 1:
        scorer = PairScorer(corpus, index, general_names)
        for key in ordered_keys:
            components.extend(
                cluster_block(scorer, blocks[key], threshold=threshold, strict=strict)
            )
    else:
        with ProcessPoolExecutor(
            max_workers=workers,
            initializer=_worker_init,
            initargs=(corpus, index, general_names, strict, threshold),
        ) as pool:
            for block_components in pool.map(
                _worker_cluster, (blocks[key] for key in ordered_keys)
            ):
                components.extend(block_components)

    merged = merge_by_email(corpus, components)
    merged.sort(key=lambda c: c[0])
    return [
        summarize_cluster(corpus, first_cluster_id + offset, pac_ids)
        for offset, pac_ids in enumerate(merged)
    ]
