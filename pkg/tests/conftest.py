"""Shared fixtures: two small corpora with fully worked-out expected outcomes.

`figure_corpus` is a six-publication block where the pair scores are known
exactly (13 on four strong pairs, 3 on one weak pair, at most 6 elsewhere).
`bernelli_corpus` realizes one researcher's name-variant landscape: eight
clusters across four surname spellings, with a 35-publication main oeuvre
and a handful of stand-ins that must stay separate.
"""

import json

import pytest

from byline.corpus import parse_corpus


def _pub(pub_id, year, focal, coauthors=(), source="", categories=(), email=""):
    authors = [
        {
            "position": 1,
            "last_name": focal[0],
            "first_name": focal[1],
            "initials": focal[2],
            "email": email,
        }
    ]
    for position, last in enumerate(coauthors, start=2):
        authors.append({"position": position, "last_name": last, "initials": "M"})
    record = {"pub_id": pub_id, "year": year, "authors": authors}
    if source:
        record["source_title"] = source
    if categories:
        record["subject_categories"] = list(categories)
    return json.dumps(record)


FIGURE_PAC_IDS = [(f"f{i}", 1) for i in range(1, 7)]


@pytest.fixture(scope="session")
def figure_corpus():
    """Six PACs of one block; expected components at threshold 10:
    {f1,f2,f3,f4} and {f5,f6}."""
    neri = ("Neri", "", "A")
    lines = [
        _pub("f1", 2001, neri, ["Piva", "Quaroni"], source="Journal J"),
        _pub("f2", 2002, neri, ["Piva", "Quaroni", "Ricci", "Sala"], source="Journal J"),
        _pub("f3", 2003, neri, ["Ricci", "Sala", "Turri", "Ulivi"], source="Journal J",
             categories=["Aerospace"]),
        _pub("f4", 2004, neri, ["Turri", "Ulivi"], source="Journal J"),
        _pub("f5", 2005, neri, ["Villa", "Weber"], source="Journal K",
             categories=["Aerospace"]),
        _pub("f6", 2006, neri, ["Villa", "Weber"], source="Journal K"),
    ]
    return parse_corpus(lines)


# expected Bernelli clusters: (n_pubs, first_year, last_year, full_name, first_name)
BERNELLI_EXPECTED = [
    (1, 2003, 2003, "bernelli, f", ""),
    (35, 1989, 2016, "bernelli-zazzera, f", "franco"),
    (1, 2000, 2000, "bernelli-zazzera, f", ""),
    (1, 2002, 2002, "bernelli-zazzera, f", ""),
    (1, 2005, 2005, "bernelli-zazzera, f", ""),
    (1, 2008, 2008, "zazzera, f", "francesca"),
    (2, 2014, 2015, "zazzera, fb", "franco bernelli"),
    (1, 2007, 2007, "zazzera, fb", "f bernelli"),
]


@pytest.fixture(scope="session")
def bernelli_lines():
    lines = []
    # the main oeuvre: 35 publications tied together by a stable email
    main_years = [1989, 2016] + [1990 + (i % 25) for i in range(33)]
    for i, year in enumerate(main_years):
        lines.append(
            _pub(
                f"bz{i:02d}",
                year,
                ("Bernelli-Zazzera", "Franco", "F"),
                source=f"Main Venue {i}",
                email="franco.bz@poli.example",
            )
        )
    # three initial-only singletons in the same block, no shared evidence
    for i, year in enumerate([2000, 2002, 2005]):
        lines.append(
            _pub(f"bzs{i}", year, ("Bernelli-Zazzera", "", "F"), source=f"Solo Venue {i}")
        )
    # a shortened-surname singleton in its own block
    lines.append(_pub("b1", 2003, ("Bernelli", "", "F"), source="Short Venue"))
    # the zazzera block: an unrelated namesake plus two variants of the
    # main researcher writing the surname the other way around
    lines.append(_pub("z1", 2008, ("Zazzera", "Francesca", "F"), source="Other Venue"))
    lines.append(
        _pub("z2", 2014, ("Zazzera", "Franco Bernelli", "FB"), source="Late Venue A",
             email="fbz@poli.example")
    )
    lines.append(
        _pub("z3", 2015, ("Zazzera", "Franco Bernelli", "FB"), source="Late Venue B",
             email="fbz@poli.example")
    )
    lines.append(_pub("z4", 2007, ("Zazzera", "F. Bernelli", ""), source="Mid Venue"))
    return lines


@pytest.fixture(scope="session")
def bernelli_corpus(bernelli_lines):
    return parse_corpus(bernelli_lines)


BERNELLI_ROSTER_LINE = "pr001,BERNELLI ZAZZERA,Franco,milano,italy,SDS"
ROSTER_HEADER = "person_id,last_name,first_name,city,country,field_code"
