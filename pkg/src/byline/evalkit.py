"""Precision / recall / F-measure against a gold authorship set.

An authorship is a (person_id, pub_id) pair. Reports exist at two levels:
aggregate over all authorships and per person, the latter feeding a
histogram of F-measures in ten-point bins with an exact bin for 100%.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

Authorship = tuple[str, str]

HISTOGRAM_BINS = [f"[{lo},{lo + 10})" for lo in range(0, 100, 10)] + ["100"]


@dataclass(frozen=True)
class MetricReport:
    retrieved: int
    false_positives: int
    false_negatives: int
    vacuous: bool = False

    @property
    def relevant(self) -> int:
        return self.retrieved + self.false_negatives - self.false_positives

    @property
    def precision(self) -> float:
        if self.retrieved == 0:
            return 1.0 if self.vacuous else 0.0
        return (self.retrieved - self.false_positives) / self.retrieved

    @property
    def recall(self) -> float:
        if self.relevant == 0:
            return 1.0 if self.vacuous else 0.0
        return (self.retrieved - self.false_positives) / self.relevant

    @property
    def f_measure(self) -> float:
        p, r = self.precision, self.recall
        if p + r == 0:
            return 0.0
        return 2 * p * r / (p + r)

    def as_dict(self) -> dict:
        return {
            "retrieved": self.retrieved,
            "false_positives": self.false_positives,
            "false_negatives": self.false_negatives,
            "relevant": self.relevant,
            "precision": self.precision,
            "recall": self.recall,
            "f_measure": self.f_measure,
            "vacuous": self.vacuous,
        }


def report_from_counts(
    retrieved: int, false_positives: int, false_negatives: int
) -> MetricReport:
    """Build a report straight from counts; a fully empty comparison is
    vacuously perfect."""
    vacuous = retrieved == 0 and false_negatives == 0
    return MetricReport(retrieved, false_positives, false_negatives, vacuous)


def compare(gold: set[Authorship], retrieved: set[Authorship]) -> MetricReport:
    """Set comparison: false positives are retrieved-only authorships,
    false negatives gold-only."""
    return report_from_counts(
        retrieved=len(retrieved),
        false_positives=len(retrieved - gold),
        false_negatives=len(gold - retrieved),
    )


def percent1(fraction: float) -> str:
    """Render a fraction as a percentage with one decimal place."""
    return f"{fraction * 100:.1f}"


def f_bin(f_measure: float) -> str:
    """Histogram bin label for an F value in [0,1]; exactly 1.0 is its
    own bin."""
    pct = f_measure * 100
    if pct >= 100:
        return "100"
    return f"[{10 * math.floor(pct / 10)},{10 * math.floor(pct / 10) + 10})"


@dataclass
class EvaluationReport:
    aggregate: MetricReport
    per_person: dict[str, MetricReport] = field(default_factory=dict)
    histogram: dict[str, int] = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {
            "aggregate": self.aggregate.as_dict(),
            "per_person": {
                person: report.as_dict() for person, report in sorted(self.per_person.items())
            },
            "histogram": self.histogram,
        }


def evaluate(
    gold: set[Authorship],
    retrieved: set[Authorship],
    roster_ids: list[str] | None = None,
) -> EvaluationReport:
    """Aggregate report plus one report per person.

    Every roster person gets a row even with nothing retrieved and no gold
    (vacuously perfect, flagged). Persons appearing only in the data are
    included too, so per-person counts always sum to the aggregate.
    """
    persons = set(roster_ids or [])
    persons.update(person for person, _pub in gold)
    persons.update(person for person, _pub in retrieved)

    per_person: dict[str, MetricReport] = {}
    histogram = {label: 0 for label in HISTOGRAM_BINS}
    for person in sorted(persons):
        person_gold = {a for a in gold if a[0] == person}
        person_retrieved = {a for a in retrieved if a[0] == person}
        report = compare(person_gold, person_retrieved)
        per_person[person] = report
        histogram[f_bin(report.f_measure)] += 1

    return EvaluationReport(
        aggregate=compare(gold, retrieved),
        per_person=per_person,
        histogram=histogram,
    )
