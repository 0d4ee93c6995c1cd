"""Deterministic synthetic population generator for pipeline testing.

Builds a roster of researchers with publication histories plus a gold
authorship set, and plants two kinds of homonym decoys next to a share of
them: a namesake abroad (caught by the country filter) and a namesake in
another Italian city (caught only by the city filter). Every researcher's
own publications carry one stable email address, so they clusterize
perfectly; decoys score well below the pairing threshold against their
victims by construction (shared first name 6 + shared category 3 = 9 < 11).

Everything derives from one seed; two runs with the same seed emit
byte-identical artifacts.
"""

from __future__ import annotations

import csv
import io
import json
import random
from dataclasses import dataclass, field
from pathlib import Path

_SURNAME_HEADS = [
    "bas", "cor", "fer", "gal", "lom", "mar", "nov", "pal", "ros", "san",
    "ter", "vic", "zan", "bel", "car",
]
_SURNAME_TAILS = [
    "etti", "oni", "ini", "ato", "ella", "esi", "ucci", "aldi", "oro", "ani",
    "otti", "ardi", "ano", "ese",
]
_SECOND_SURNAMES = [
    "colombo", "greco", "conti", "mancini", "villa", "serra", "monti",
    "leone", "longo", "ferri", "testa", "grassi",
]
_FIRST_NAMES = [
    "franco", "maria", "giulia", "paolo", "anna", "luca", "sara", "marco",
    "elena", "andrea", "chiara", "davide", "silvia", "matteo", "laura",
    "stefano",
]
_CITIES = [
    "milano", "roma", "torino", "napoli", "bologna", "firenze", "padova",
    "genova", "pisa", "bari",
]
_FOREIGN = [
    ("paris", "france"), ("lyon", "france"), ("berlin", "germany"),
    ("madrid", "spain"), ("wien", "austria"),
]


def _letters(i: int) -> str:
    out = ""
    i += 1
    while i:
        i, r = divmod(i - 1, 26)
        out = chr(ord("a") + r) + out
    return out


@dataclass
class Population:
    corpus_lines: list[str]
    roster_lines: list[str]
    gold: set[tuple[str, str]]
    planted: dict
    window: tuple[int, int]

    def gold_lines(self) -> list[str]:
        return ["person_id,pub_id"] + [f"{p},{pub}" for p, pub in sorted(self.gold)]


@dataclass
class _Researcher:
    rid: int
    person_id: str
    surnames: list[str]  # one, or two spelling variants
    roster_surname: str
    first_name: str
    city: str
    email: str
    field_label: str
    coauthor_pool: list[str] = field(default_factory=list)


def _make_researcher(rid: int, rng: random.Random) -> _Researcher:
    base = _SURNAME_HEADS[rid % len(_SURNAME_HEADS)] + _SURNAME_TAILS[rid // len(_SURNAME_HEADS)]
    surnames = [base]
    roster_surname = base.upper()
    if rid % 10 == 5:
        # this researcher publishes under two spellings of the surname
        second = _SECOND_SURNAMES[rid % len(_SECOND_SURNAMES)]
        surnames = [base, f"{base}-{second}"]
        roster_surname = f"{base} {second}".upper()
    return _Researcher(
        rid=rid,
        person_id=f"pr{rid:03d}",
        surnames=surnames,
        roster_surname=roster_surname,
        first_name=rng.choice(_FIRST_NAMES),
        city=rng.choice(_CITIES),
        email=f"r{rid:03d}@uni.example",
        field_label=f"Field {_letters(rid % 12)}",
        coauthor_pool=[f"co{_letters(rid)}{_letters(j)}" for j in range(4)],
    )


def _own_pub(researcher: _Researcher, k: int, year: int, surname: str, rng: random.Random) -> dict:
    coauthors = rng.sample(researcher.coauthor_pool, rng.randint(1, 3))
    authors = [
        {
            "position": 1,
            "last_name": surname,
            "first_name": researcher.first_name,
            "initials": researcher.first_name[0],
            "email": researcher.email,
            "affiliation_idx": [0],
        }
    ]
    for position, co_last in enumerate(coauthors, start=2):
        authors.append({"position": position, "last_name": co_last, "initials": "c"})
    return {
        "pub_id": f"pub-{researcher.person_id}-{k:02d}",
        "year": year,
        "source_title": f"Venue {researcher.person_id} {k}",
        "subject_categories": [researcher.field_label],
        "authors": authors,
        "affiliations": [
            {
                "org": f"universita di {researcher.city}",
                "dept": f"dipartimento {researcher.field_label}",
                "city": researcher.city,
                "country": "italy",
            }
        ],
        "grants": [f"grant-{researcher.person_id}"],
    }


def _twin_pub(
    researcher: _Researcher,
    kind: str,
    k: int,
    year: int,
    place: tuple[str, str],
    rng: random.Random,
) -> dict:
    city, country = place
    return {
        "pub_id": f"twin-{kind}-{researcher.person_id}-{k}",
        "year": year,
        "source_title": f"Twin Venue {kind} {researcher.person_id} {k}",
        "subject_categories": [researcher.field_label],
        "authors": [
            {
                "position": 1,
                "last_name": researcher.surnames[0],
                "first_name": researcher.first_name,
                "initials": researcher.first_name[0],
                "email": f"twin-{kind}-{researcher.person_id}@{country}.example",
                "affiliation_idx": [0],
            }
        ],
        "affiliations": [
            {
                "org": f"institute of {city}",
                "dept": f"unit {_letters(k)}",
                "city": city,
                "country": country,
            }
        ],
    }


def generate_population(
    seed: int = 20160101,
    n_researchers: int = 200,
    window: tuple[int, int] = (2010, 2016),
) -> Population:
    rng = random.Random(seed)
    y0, y1 = window
    corpus_lines: list[str] = []
    gold: set[tuple[str, str]] = set()
    planted: dict = {
        "seed": seed,
        "window": [y0, y1],
        "foreign": [],
        "other_city": [],
    }

    roster_buffer = io.StringIO()
    writer = csv.writer(roster_buffer, lineterminator="\n")
    writer.writerow(["person_id", "last_name", "first_name", "city", "country", "field_code"])

    for rid in range(n_researchers):
        researcher = _make_researcher(rid, rng)
        writer.writerow(
            [
                researcher.person_id,
                researcher.roster_surname,
                researcher.first_name.capitalize(),
                researcher.city,
                "italy",
                researcher.field_label.replace(" ", "-").upper(),
            ]
        )

        n_pubs = rng.randint(4, 8)
        years = [rng.randint(y0, y1) for _ in range(n_pubs)]
        if rng.random() < 0.3:
            years[0] = rng.randint(y0 - 5, y0 - 1)  # one early, out-of-window paper
        for k, year in enumerate(years):
            # variant spellers use the second form for the back half
            surname = researcher.surnames[
                1 if len(researcher.surnames) > 1 and k >= n_pubs // 2 else 0
            ]
            corpus_lines.append(
                json.dumps(_own_pub(researcher, k, year, surname, rng), sort_keys=True)
            )
            if y0 <= year <= y1:
                gold.add((researcher.person_id, f"pub-{researcher.person_id}-{k:02d}"))

        twin_kind = None
        if rid % 7 == 0:
            twin_kind = "foreign"
            place = _FOREIGN[rng.randrange(len(_FOREIGN))]
        elif rid % 7 == 3:
            twin_kind = "other_city"
            others = [c for c in _CITIES if c != researcher.city]
            place = (others[rng.randrange(len(others))], "italy")
        if twin_kind:
            twin_pub_ids = []
            for k in range(2):
                pub = _twin_pub(researcher, twin_kind, k, rng.randint(y0, y1), place, rng)
                corpus_lines.append(json.dumps(pub, sort_keys=True))
                twin_pub_ids.append(pub["pub_id"])
            planted[twin_kind].append(
                {"person_id": researcher.person_id, "pub_ids": twin_pub_ids}
            )

    roster_lines = roster_buffer.getvalue().splitlines()
    return Population(
        corpus_lines=corpus_lines,
        roster_lines=roster_lines,
        gold=gold,
        planted=planted,
        window=window,
    )


def write_population(population: Population, out_dir: str | Path) -> dict[str, Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {
        "corpus": out / "corpus.jsonl",
        "roster": out / "roster.csv",
        "gold": out / "gold.csv",
        "planted": out / "planted.json",
    }
    paths["corpus"].write_text("\n".join(population.corpus_lines) + "\n", encoding="utf-8")
    paths["roster"].write_text("\n".join(population.roster_lines) + "\n", encoding="utf-8")
    paths["gold"].write_text("\n".join(population.gold_lines()) + "\n", encoding="utf-8")
    paths["planted"].write_text(
        json.dumps(population.planted, sort_keys=True, indent=2) + "\n", encoding="utf-8"
    )
    return paths
