"""Pairwise evidence scoring between two PACs of the same name block.

Each evidence source contributes an independent component; the pair score
is their sum. Components follow a fixed rulebook:

  email                identical non-empty address                    100
  initials             identical, two letters                           5
                       identical, three or more letters                10
                       contradiction past the first letter            -10
  first name           identical, ordinary name                         6
                       identical, very common name                      3
  linked affiliation   same country and city                            4
                       same organization                                7
                       same department                                 10
  shared co-authors    1 / 2 / >2 shared co-author blocks          4/7/10
                       (either pub has 50+ authors)                 2/4/5
  grant                shared grant number                             10
  other affiliations   same country and city                            2
                       same organization                                5
                       same department                                  8
                       (either pub lists 20+ organizations)         1/3/4
  source               same journal                                     6
                       else shared subject category                     3
  self-citation        one publication cites the other                 10
                       (either pub has 50+ authors)                     5
  bibliographic        1 / 2 / 3 / 4 / >4 shared references    2/4/6/8/10
  coupling
  co-citation          1 / 2 / 3 / 4 / >4 co-citing documents   2/3/4/5/6

Affiliation tiers are nested: an organization match requires the country
and city to match too, a department match additionally the organization.
Mentions on the same publication are compared on author data only (email,
initials, first name, linked affiliation); publication-level evidence is
meaningless when both sides are the same document.
"""

from __future__ import annotations

from dataclasses import dataclass

from .blocking import block_key
from .corpus import PAC, AffTuple, CitationIndex, Corpus, PacId

HYPER_AUTHOR_COUNT = 50
HYPER_INSTITUTE_COUNT = 20

_LINKED_TIER_SCORES = {1: 4, 2: 7, 3: 10}
_UNLINKED_TIER_SCORES = {1: 2, 2: 5, 3: 8}
_UNLINKED_TIER_SCORES_DAMPED = {1: 1, 2: 3, 3: 4}


@dataclass(frozen=True)
class ScoreBreakdown:
    email: int = 0
    initials: int = 0
    first_name: int = 0
    linked_affiliation: int = 0
    shared_coauthors: int = 0
    grant: int = 0
    unlinked_affiliation: int = 0
    journal: int = 0
    subject_category: int = 0
    self_citation: int = 0
    bib_coupling: int = 0
    co_citation: int = 0

    @property
    def total(self) -> int:
        return (
            self.email
            + self.initials
            + self.first_name
            + self.linked_affiliation
            + self.shared_coauthors
            + self.grant
            + self.unlinked_affiliation
            + self.journal
            + self.subject_category
            + self.self_citation
            + self.bib_coupling
            + self.co_citation
        )

    def as_dict(self) -> dict[str, int]:
        return {
            "email": self.email,
            "initials": self.initials,
            "first_name": self.first_name,
            "linked_affiliation": self.linked_affiliation,
            "shared_coauthors": self.shared_coauthors,
            "grant": self.grant,
            "unlinked_affiliation": self.unlinked_affiliation,
            "journal": self.journal,
            "subject_category": self.subject_category,
            "self_citation": self.self_citation,
            "bib_coupling": self.bib_coupling,
            "co_citation": self.co_citation,
            "total": self.total,
        }


def initials_score(a: str, b: str) -> int:
    """Identical strings earn by length; a mismatch past the first letter
    is a contradiction. One string being a prefix of the other is neutral."""
    if a and a == b:
        if len(a) == 1:
            return 0
        return 5 if len(a) == 2 else 10
    shorter = min(len(a), len(b))
    if shorter >= 2 and any(a[i] != b[i] for i in range(1, shorter)):
        return -10
    return 0


def first_name_score(a: str, b: str, general_names: frozenset[str]) -> int:
    if not a or a != b:
        return 0
    return 3 if a in general_names else 6


def affiliation_tier(aff_a: AffTuple, aff_b: AffTuple) -> int:
    """0 = no match, 1 = country+city, 2 = organization, 3 = department.

    Tiers are nested and every component of a tier must be non-empty on
    both sides.
    """
    country_a, city_a, org_a, dept_a = aff_a
    country_b, city_b, org_b, dept_b = aff_b
    if not (country_a and city_a and country_a == country_b and city_a == city_b):
        return 0
    if not (org_a and org_a == org_b):
        return 1
    if not (dept_a and dept_a == dept_b):
        return 2
    return 3


def _best_tier(affs_a: tuple[AffTuple, ...], affs_b: tuple[AffTuple, ...]) -> int:
    best = 0
    for aff_a in affs_a:
        for aff_b in affs_b:
            tier = affiliation_tier(aff_a, aff_b)
            if tier > best:
                best = tier
                if best == 3:
                    return best
    return best


def shared_coauthor_score(n: int, hyper: bool) -> int:
    if n <= 0:
        return 0
    if hyper:
        return 2 if n == 1 else (4 if n == 2 else 5)
    return 4 if n == 1 else (7 if n == 2 else 10)


def bib_coupling_score(n: int) -> int:
    if n <= 0:
        return 0
    return 10 if n > 4 else 2 * n


def co_citation_score(n: int) -> int:
    if n <= 0:
        return 0
    return 6 if n > 4 else n + 1


class PairScorer:
    """Scores PAC pairs against a corpus and its citation index.

    Publication-level facts (co-author keys, hyper flags) are precomputed
    once so repeated pair scoring inside large blocks stays cheap.
    """

    def __init__(
        self,
        corpus: Corpus,
        citation_index: CitationIndex,
        general_names: frozenset[str] = frozenset(),
    ):
        self.corpus = corpus
        self.index = citation_index
        self.general_names = frozenset(n.lower() for n in general_names)
        self._pub_block_keys: dict[str, frozenset[str]] = {}
        self._hyper_author: dict[str, bool] = {}
        self._hyper_institute: dict[str, bool] = {}
        for pub_id, record in corpus.records.items():
            keys = set()
            for mention_id in corpus.pacs_of_pub(pub_id):
                pac = corpus.pacs[mention_id]
                keys.add(
                    block_key(pac.normalized_last, pac.normalized_initials, pac.normalized_first)
                )
            self._pub_block_keys[pub_id] = frozenset(keys)
            self._hyper_author[pub_id] = record.author_count >= HYPER_AUTHOR_COUNT
            self._hyper_institute[pub_id] = record.institute_count >= HYPER_INSTITUTE_COUNT

    def _unlinked_affiliations(self, pac: PAC) -> tuple[AffTuple, ...]:
        record = self.corpus.records[pac.pub_id]
        linked = set(pac.linked_affiliation_indices)
        return tuple(
            aff for i, aff in enumerate(record.affiliations_norm) if i not in linked
        )

    def score(self, id_a: PacId, id_b: PacId) -> ScoreBreakdown:
        pac_a = self.corpus.pacs[id_a]
        pac_b = self.corpus.pacs[id_b]

        email = 0
        if pac_a.normalized_email and pac_a.normalized_email == pac_b.normalized_email:
            email = 100
        initials = initials_score(pac_a.normalized_initials, pac_b.normalized_initials)
        first_name = first_name_score(
            pac_a.normalized_first, pac_b.normalized_first, self.general_names
        )
        linked_affiliation = _LINKED_TIER_SCORES.get(
            _best_tier(pac_a.linked_affiliations, pac_b.linked_affiliations), 0
        )

        if pac_a.pub_id == pac_b.pub_id:
            # same document: only author data can separate the two mentions
            return ScoreBreakdown(
                email=email,
                initials=initials,
                first_name=first_name,
                linked_affiliation=linked_affiliation,
            )

        pub_a = self.corpus.records[pac_a.pub_id]
        pub_b = self.corpus.records[pac_b.pub_id]
        hyper_author = self._hyper_author[pub_a.pub_id] or self._hyper_author[pub_b.pub_id]
        hyper_institute = (
            self._hyper_institute[pub_a.pub_id] or self._hyper_institute[pub_b.pub_id]
        )

        focal_key_a = block_key(
            pac_a.normalized_last, pac_a.normalized_initials, pac_a.normalized_first
        )
        focal_key_b = block_key(
            pac_b.normalized_last, pac_b.normalized_initials, pac_b.normalized_first
        )
        coauthors_a = self._pub_block_keys[pub_a.pub_id] - {focal_key_a}
        coauthors_b = self._pub_block_keys[pub_b.pub_id] - {focal_key_b}
        shared_coauthors = shared_coauthor_score(
            len(coauthors_a & coauthors_b), hyper_author
        )

        grant = 10 if pub_a.grants_norm & pub_b.grants_norm else 0

        unlinked_scores = (
            _UNLINKED_TIER_SCORES_DAMPED if hyper_institute else _UNLINKED_TIER_SCORES
        )
        unlinked_affiliation = unlinked_scores.get(
            _best_tier(
                self._unlinked_affiliations(pac_a), self._unlinked_affiliations(pac_b)
            ),
            0,
        )

        journal = 0
        subject_category = 0
        if pub_a.source_norm and pub_a.source_norm == pub_b.source_norm:
            journal = 6
        elif pub_a.categories_norm & pub_b.categories_norm:
            subject_category = 3

        self_citation = 0
        if self.index.cites_either_way(pub_a.pub_id, pub_b.pub_id):
            self_citation = 5 if hyper_author else 10

        bib_coupling = bib_coupling_score(
            self.index.shared_references(pub_a.pub_id, pub_b.pub_id)
        )
        co_citation = co_citation_score(
            self.index.co_citing_documents(pub_a.pub_id, pub_b.pub_id)
        )

        return ScoreBreakdown(
            email=email,
            initials=initials,
            first_name=first_name,
            linked_affiliation=linked_affiliation,
            shared_coauthors=shared_coauthors,
            grant=grant,
            unlinked_affiliation=unlinked_affiliation,
            journal=journal,
            subject_category=subject_category,
            self_citation=self_citation,
            bib_coupling=bib_coupling,
            co_citation=co_citation,
        )
