"""Corpus parsing and name normalization."""

import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from byline.corpus import (
    CorpusError,
    build_citation_index,
    normalize_name,
    normalize_ref_key,
    normalize_string,
    parse_corpus,
)


def make_pub(pub_id="p1", year=2000, authors=None, **extra):
    if authors is None:
        authors = [{"position": 1, "last_name": "Rossi", "initials": "F"}]
    return json.dumps({"pub_id": pub_id, "year": year, "authors": authors, **extra})


class TestNormalizeName:
    def test_plain_name_with_compound_first(self):
        assert normalize_name("Grosso", "Andrea Cesare", "") == (
            "grosso",
            "andrea cesare",
            "ac",
        )

    def test_punctuated_initials_as_first_name(self):
        assert normalize_name("O'Neil", "J.-P.", "") == ("oneil", "jp", "jp")

    def test_already_normalized_identity(self):
        assert normalize_name("rossi", "f", "f") == ("rossi", "f", "f")

    def test_hyphenated_last_name_is_kept(self):
        last, first, initials = normalize_name("Bernelli-Zazzera", "Franco", "F")
        assert last == "bernelli-zazzera"
        assert first == "franco"
        assert initials == "f"

    def test_abbreviated_double_first(self):
        # "F. Bernelli" normalizes to a spaced first name, initials fb
        assert normalize_name("Zazzera", "F. Bernelli", "") == ("zazzera", "f bernelli", "fb")

    def test_diacritics_fold(self):
        assert normalize_name("Müller", "José", "") == ("muller", "jose", "j")

    def test_diacritics_kept_when_folding_disabled(self):
        last, first, _ = normalize_name("Müller", "José", "", fold=False)
        assert last == "müller"
        assert first == "josé"

    def test_initials_field_richer_than_first_name(self):
        # raw initials carry more letters than the first name yields
        assert normalize_name("Rossi", "Franco", "FB") == ("rossi", "franco", "fb")

    def test_derived_initials_richer_than_field(self):
        assert normalize_name("Rossi", "Gian Carlo", "G") == ("rossi", "gian carlo", "gc")

    def test_separator_runs_collapse_to_hyphen(self):
        last, _, _ = normalize_name("Bernelli - Zazzera", "F", "")
        assert last == "bernelli-zazzera"

    def test_all_empty_is_an_error(self):
        with pytest.raises(CorpusError, match="unnamed"):
            normalize_name("", "", "")
        with pytest.raises(CorpusError):
            normalize_name("...", "-", "")

    @given(
        st.text(alphabet="abcdefghijklmnopqrstuvwxyz -'.", min_size=1, max_size=20),
        st.text(alphabet="abcdefghijklmnopqrstuvwxyz -.", max_size=20),
        st.text(alphabet="abcdefghijklmnopqrstuvwxyz.", max_size=5),
    )
    def test_idempotent(self, raw_last, raw_first, raw_initials):
        try:
            once = normalize_name(raw_last, raw_first, raw_initials)
        except CorpusError:
            return
        assert normalize_name(*once) == once

    @given(st.text(max_size=30))
    def test_last_name_charset(self, raw):
        try:
            last, _, _ = normalize_name(raw, "x", "")
        except CorpusError:
            return
        assert all(ch.isalpha() or ch in " -" for ch in last)
        assert not last.startswith((" ", "-")) and not last.endswith((" ", "-"))


class TestNormalizeHelpers:
    def test_normalize_string_collapses_space(self):
        assert normalize_string("  Politecnico   di\tMilano ") == "politecnico di milano"

    def test_ref_key_strips_punctuation(self):
        assert normalize_ref_key("Smith J., 2001, V12, P34") == "smithj2001v12p34"
        assert normalize_ref_key("SMITH j 2001 v12 p34") == "smithj2001v12p34"


class TestParseCorpus:
    def test_minimal_record(self):
        corpus = parse_corpus([make_pub()])
        assert len(corpus) == 1
        pac = corpus.pacs[("p1", 1)]
        assert pac.normalized_last == "rossi"
        assert pac.normalized_initials == "f"

    def test_duplicate_pub_id_rejected(self):
        with pytest.raises(CorpusError, match="duplicate pub_id"):
            parse_corpus([make_pub("p1"), make_pub("p1")])

    def test_invalid_json_reports_line(self):
        with pytest.raises(CorpusError, match="line 2"):
            parse_corpus([make_pub(), "{not json"])

    def test_missing_year_rejected(self):
        bad = json.dumps({"pub_id": "p1", "authors": []})
        with pytest.raises(CorpusError, match="year"):
            parse_corpus([bad])

    def test_author_without_last_name_rejected(self):
        bad = make_pub(authors=[{"position": 1, "first_name": "Franco"}])
        with pytest.raises(CorpusError, match="last name"):
            parse_corpus([bad])

    def test_author_without_initials_or_first_rejected(self):
        bad = make_pub(authors=[{"position": 1, "last_name": "Rossi"}])
        with pytest.raises(CorpusError, match="neither initials nor first"):
            parse_corpus([bad])

    def test_duplicate_author_position_rejected(self):
        bad = make_pub(
            authors=[
                {"position": 1, "last_name": "Rossi", "initials": "F"},
                {"position": 1, "last_name": "Bianchi", "initials": "G"},
            ]
        )
        with pytest.raises(CorpusError, match="duplicate author position"):
            parse_corpus([bad])

    def test_affiliation_index_out_of_range_rejected(self):
        bad = make_pub(
            authors=[
                {"position": 1, "last_name": "Rossi", "initials": "F", "affiliation_idx": [2]}
            ],
            affiliations=[{"org": "Poli", "city": "Milano", "country": "Italy"}],
        )
        with pytest.raises(CorpusError, match="out of range"):
            parse_corpus([bad])

    def test_blank_lines_skipped(self):
        corpus = parse_corpus([make_pub("p1"), "", "  ", make_pub("p2")])
        assert len(corpus) == 2

    def test_linked_affiliations_resolved(self):
        line = make_pub(
            authors=[
                {"position": 1, "last_name": "Rossi", "initials": "F", "affiliation_idx": [0]}
            ],
            affiliations=[
                {"org": "Politecnico di Milano", "dept": "DAER", "city": "Milano", "country": "Italy"}
            ],
        )
        corpus = parse_corpus([line])
        pac = corpus.pacs[("p1", 1)]
        assert pac.linked_affiliations == (("italy", "milano", "politecnico di milano", "daer"),)

    def test_roundtrip_serialization(self):
        lines = [
            make_pub(
                "p1",
                2001,
                authors=[
                    {
                        "position": 1,
                        "last_name": "Rossi",
                        "first_name": "Franco",
                        "initials": "F",
                        "email": "franco@poli.it",
                        "affiliation_idx": [0],
                    }
                ],
                source_title="J Testing",
                subject_categories=["Engineering"],
                affiliations=[{"org": "Poli", "dept": "", "city": "Milano", "country": "Italy"}],
                grants=["G-1"],
                references=[{"pub_id": "p9"}, {"key": "Smith J 2001"}],
            )
        ]
        corpus = parse_corpus(lines)
        again = parse_corpus(corpus.to_jsonl())
        assert list(again.to_jsonl()) == list(corpus.to_jsonl())
        assert again.pacs.keys() == corpus.pacs.keys()


class TestCitationIndex:
    def build(self):
        lines = [
            make_pub("a", references=[{"pub_id": "x"}, {"key": "Old Ref 1999"}]),
            make_pub("b", references=[{"pub_id": "x"}, {"key": "old ref, 1999"}, {"pub_id": "a"}]),
            make_pub("c", references=[{"pub_id": "a"}, {"pub_id": "b"}]),
            make_pub("x"),
        ]
        return parse_corpus(lines)

    def test_shared_references_counts_text_and_id_keys(self):
        index = build_citation_index(self.build())
        # a and b share pub x and the same normalized text key
        assert index.shared_references("a", "b") == 2
        assert index.shared_references("a", "c") == 0

    def test_co_citing_documents(self):
        index = build_citation_index(self.build())
        # only c cites both a and b; only b cites both a and x
        assert index.co_citing_documents("a", "b") == 1
        assert index.co_citing_documents("a", "x") == 1
        assert index.co_citing_documents("b", "c") == 0

    def test_direct_citation_either_way(self):
        index = build_citation_index(self.build())
        assert index.cites_either_way("a", "b")
        assert index.cites_either_way("b", "a")
        assert index.cites_either_way("a", "x")
        assert index.cites_either_way("c", "b")
        assert not index.cites_either_way("x", "c")

    @given(
        st.lists(
            st.lists(st.integers(min_value=0, max_value=15), max_size=6),
            min_size=2,
            max_size=8,
        )
    )
    def test_matches_brute_force(self, ref_lists):
        # low values reference other pubs by id, high ones are text keys
        def as_ref(r):
            return {"pub_id": f"p{r}"} if r < 8 else {"key": f"r{r}"}

        def as_key(r):
            return f"p{r}" if r < 8 else f"r{r}"

        lines = [
            make_pub(f"p{i}", references=[as_ref(r) for r in refs])
            for i, refs in enumerate(ref_lists)
        ]
        corpus = parse_corpus(lines)
        index = build_citation_index(corpus)
        sets = [set(as_key(r) for r in refs) for refs in ref_lists]
        for i in range(len(ref_lists)):
            for j in range(len(ref_lists)):
                assert index.shared_references(f"p{i}", f"p{j}") == len(sets[i] & sets[j])
                brute_cocite = sum(
                    1
                    for k in range(len(ref_lists))
                    if f"p{i}" in sets[k] and f"p{j}" in sets[k]
                )
                assert index.co_citing_documents(f"p{i}", f"p{j}") == brute_cocite
