"""Pipeline subcommands over file artifacts.

Stages communicate only through files so any step can be rerun or swapped:

    ingest    validate and normalize a publications file
    cluster   disambiguate author mentions into clusters
    match     pull candidate clusters per roster researcher
    filter    apply scenario 1/2/3 filtering, emit portfolios
    baseline  naive name-key portfolios for comparison
    evaluate  precision/recall/F against a gold authorship set
    gen       seeded synthetic population for testing
    serve     HTTP review API plus static review UI

Exit codes: 0 ok, 2 missing or invalid input, 3 scenario 3 finalization
blocked by pending decisions, 4 internal invariant breach.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import artifacts
from .blocking import BlockingError
from .clustering import cluster_corpus
from .corpus import Corpus, CorpusError, parse_corpus_file
from .evalkit import HISTOGRAM_BINS, evaluate, percent1
from .portfolio import (
    PortfolioError,
    RosterEntry,
    SynonymTable,
    apply_decisions,
    baseline_authorships,
    parse_decisions,
    parse_roster,
    portfolio_rows,
    retrieve_clusters,
    s1_drop_reason,
    s2_drop_reason,
    window_filter,
)
from .synth import generate_population, write_population

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_PENDING = 3
EXIT_INVARIANT = 4


class PendingDecisionsError(Exception):
    """Scenario 3 cannot finalize while candidates lack verdicts."""


class InvariantError(Exception):
    """An internal consistency check failed; output would be unreliable."""


def _parse_window(text: str) -> tuple[int, int]:
    try:
        y0, y1 = (int(part) for part in str(text).split(":"))
    except ValueError as exc:
        raise PortfolioError(f"window must be Y0:Y1, got {text!r}") from exc
    if y0 > y1:
        raise PortfolioError(f"window start {y0} after end {y1}")
    return y0, y1


def _parse_threshold_mode(text: str) -> float | None:
    if text == "table2":
        return None
    if text.startswith("fixed:"):
        return float(text.split(":", 1)[1])
    raise PortfolioError(f"threshold mode must be 'table2' or 'fixed:N', got {text!r}")


def _load_config(path: str | None) -> dict:
    if not path:
        return {}
    with open(path, encoding="utf-8") as handle:
        config = json.load(handle)
    if not isinstance(config, dict):
        raise PortfolioError("config file must hold a JSON object")
    return config


def _opt(args: argparse.Namespace, config: dict, name: str, default=None):
    """Flag value if given, else config value, else default."""
    value = getattr(args, name, None)
    if value is not None:
        return value
    if name in config:
        return config[name]
    return default


def _require(value, flag: str):
    if value is None:
        raise FileNotFoundError(f"missing required input: --{flag}")
    return value


def _load_corpus(path: str) -> Corpus:
    return parse_corpus_file(path)


def _load_roster(path: str) -> list[RosterEntry]:
    with open(path, encoding="utf-8") as handle:
        return parse_roster(handle)


def _load_general_names(path: str | None) -> frozenset[str]:
    if not path:
        return frozenset()
    names = Path(path).read_text(encoding="utf-8").split()
    return frozenset(name.lower() for name in names)


def _load_synonyms(path: str | None) -> SynonymTable:
    if not path:
        return SynonymTable()
    with open(path, encoding="utf-8") as handle:
        return SynonymTable(json.load(handle))


def _candidates_by_person(path: str) -> dict[str, list[int]]:
    mapping: dict[str, list[int]] = {}
    for row in artifacts.read_jsonl(path):
        mapping.setdefault(row["person_id"], []).append(int(row["cluster_id"]))
    return mapping


def cmd_ingest(args: argparse.Namespace, config: dict) -> int:
    corpus_path = _require(_opt(args, config, "corpus"), "corpus")
    out = Path(_opt(args, config, "out", "out"))
    corpus = _load_corpus(corpus_path)
    out.mkdir(parents=True, exist_ok=True)
    normalized = out / "corpus.normalized.jsonl"
    with open(normalized, "w", encoding="utf-8") as handle:
        for line in corpus.to_jsonl():
            handle.write(line + "\n")
    summary_path = out / "ingest-summary.json"
    summary = {
        "publications": len(corpus),
        "author_mentions": len(corpus.pacs),
    }
    summary_path.write_text(artifacts.dump_json(summary) + "\n", encoding="utf-8")
    artifacts.write_manifest(
        out,
        "ingest",
        inputs={"corpus": corpus_path},
        outputs={"normalized": normalized, "summary": summary_path},
        config={"corpus": str(corpus_path), "out": str(out)},
    )
    print(f"ingested {summary['publications']} publications, {summary['author_mentions']} mentions")
    return EXIT_OK


def cmd_cluster(args: argparse.Namespace, config: dict) -> int:
    corpus_path = _require(_opt(args, config, "corpus"), "corpus")
    out = Path(_opt(args, config, "out", "out"))
    threads = int(_opt(args, config, "threads", 1))
    strict = bool(getattr(args, "strict", False) or config.get("strict", False))
    threshold_mode = str(_opt(args, config, "threshold_mode", "table2"))
    general_names_path = _opt(args, config, "general_names")

    corpus = _load_corpus(corpus_path)
    clusters = cluster_corpus(
        corpus,
        workers=threads,
        strict=strict,
        general_names=_load_general_names(general_names_path),
        threshold=_parse_threshold_mode(threshold_mode),
    )

    clustered_ids = sorted(pac_id for cluster in clusters for pac_id in cluster.pac_ids)
    if clustered_ids != sorted(corpus.pacs):
        raise InvariantError("clusters do not partition the author mentions")

    out.mkdir(parents=True, exist_ok=True)
    clusters_path = artifacts.write_clusters(out / "clusters.jsonl", clusters)
    resolved = {
        "corpus": str(corpus_path),
        "out": str(out),
        "threads": threads,
        "strict": strict,
        "threshold_mode": threshold_mode,
        "general_names": str(general_names_path) if general_names_path else None,
    }
    inputs = {"corpus": corpus_path}
    if general_names_path:
        inputs["general_names"] = general_names_path
    artifacts.write_manifest(
        out, "cluster", inputs=inputs, outputs={"clusters": clusters_path}, config=resolved
    )
    print(f"clustered {len(corpus.pacs)} mentions into {len(clusters)} clusters")
    return EXIT_OK


def cmd_match(args: argparse.Namespace, config: dict) -> int:
    clusters_path = _require(_opt(args, config, "clusters"), "clusters")
    roster_path = _require(_opt(args, config, "roster"), "roster")
    window = _parse_window(_require(_opt(args, config, "window"), "window"))
    out = Path(_opt(args, config, "out", "out"))

    clusters = artifacts.read_clusters(clusters_path)
    roster = _load_roster(roster_path)

    rows = []
    for entry in sorted(roster, key=lambda e: e.person_id):
        candidates = window_filter(retrieve_clusters(entry, clusters), *window)
        for cluster in candidates:
            rows.append(
                {
                    "person_id": entry.person_id,
                    "cluster_id": cluster.cluster_id,
                    "status": "candidate",
                }
            )
    out.mkdir(parents=True, exist_ok=True)
    candidates_path = artifacts.write_jsonl(out / "candidates.jsonl", rows)
    artifacts.write_manifest(
        out,
        "match",
        inputs={"clusters": clusters_path, "roster": roster_path},
        outputs={"candidates": candidates_path},
        config={
            "clusters": str(clusters_path),
            "roster": str(roster_path),
            "window": list(window),
            "out": str(out),
        },
    )
    print(f"matched {len(rows)} candidate pairs for {len(roster)} researchers")
    return EXIT_OK


def cmd_filter(args: argparse.Namespace, config: dict) -> int:
    scenario = int(_require(_opt(args, config, "scenario"), "scenario"))
    if scenario not in (1, 2, 3):
        raise PortfolioError(f"scenario must be 1, 2, or 3, got {scenario}")
    clusters_path = _require(_opt(args, config, "clusters"), "clusters")
    candidates_path = _require(_opt(args, config, "candidates"), "candidates")
    roster_path = _require(_opt(args, config, "roster"), "roster")
    corpus_path = _require(_opt(args, config, "corpus"), "corpus")
    window = _parse_window(_require(_opt(args, config, "window"), "window"))
    out = Path(_opt(args, config, "out", "out"))
    synonyms = _load_synonyms(_opt(args, config, "synonyms"))
    decisions_path = _opt(args, config, "decisions")

    corpus = _load_corpus(corpus_path)
    clusters_by_id = {c.cluster_id: c for c in artifacts.read_clusters(clusters_path)}
    roster = {entry.person_id: entry for entry in _load_roster(roster_path)}
    candidate_map = _candidates_by_person(candidates_path)

    decisions = []
    if scenario == 3:
        if decisions_path:
            with open(decisions_path, encoding="utf-8") as handle:
                decisions = parse_decisions(handle)

    label = f"S{scenario}"
    assignment_rows = []
    portfolio = []
    pending_total = 0
    for person_id in sorted(candidate_map):
        if person_id not in roster:
            raise PortfolioError(f"candidates reference unknown person {person_id!r}")
        entry = roster[person_id]
        candidates = [clusters_by_id[cid] for cid in candidate_map[person_id]]
        kept = []
        if scenario in (1, 2):
            reason_of = s1_drop_reason if scenario == 1 else s2_drop_reason
            for cluster in candidates:
                reason = reason_of(cluster, entry, synonyms)
                if reason is None:
                    kept.append(cluster)
                    status = "kept"
                else:
                    status = f"dropped:{reason}"
                assignment_rows.append(
                    {
                        "person_id": person_id,
                        "cluster_id": cluster.cluster_id,
                        "scenario": label,
                        "status": status,
                    }
                )
        else:
            kept, pending = apply_decisions(candidates, decisions, person_id)
            pending_total += len(pending)
            pending_ids = {c.cluster_id for c in pending}
            kept_ids = {c.cluster_id for c in kept}
            for cluster in candidates:
                if cluster.cluster_id in kept_ids:
                    status = "kept"
                elif cluster.cluster_id in pending_ids:
                    status = "pending"
                else:
                    status = "dropped:rejected"
                assignment_rows.append(
                    {
                        "person_id": person_id,
                        "cluster_id": cluster.cluster_id,
                        "scenario": label,
                        "status": status,
                    }
                )
        portfolio.extend(
            (person_id, pub_id, label)
            for _pid, pub_id in portfolio_rows(entry, kept, corpus, window=window)
        )

    out.mkdir(parents=True, exist_ok=True)
    assignments_path = artifacts.write_jsonl(out / f"assignments-{label}.jsonl", assignment_rows)
    portfolio_path = artifacts.write_csv(
        out / f"portfolio-{label}.csv",
        ["person_id", "pub_id", "scenario"],
        sorted(portfolio),
    )
    inputs = {
        "clusters": clusters_path,
        "candidates": candidates_path,
        "roster": roster_path,
        "corpus": corpus_path,
    }
    if decisions_path:
        inputs["decisions"] = decisions_path
    artifacts.write_manifest(
        out,
        f"filter-{label}",
        inputs=inputs,
        outputs={"assignments": assignments_path, "portfolio": portfolio_path},
        config={
            "scenario": scenario,
            "window": list(window),
            "out": str(out),
            "synonyms": _opt(args, config, "synonyms"),
            "decisions": str(decisions_path) if decisions_path else None,
        },
    )
    if scenario == 3 and pending_total:
        raise PendingDecisionsError(
            f"{pending_total} candidate pairs still pending; cannot finalize scenario 3"
        )
    print(f"{label}: kept {len(portfolio)} authorships")
    return EXIT_OK


def cmd_baseline(args: argparse.Namespace, config: dict) -> int:
    mode = str(_require(_opt(args, config, "mode"), "mode"))
    corpus_path = _require(_opt(args, config, "corpus"), "corpus")
    roster_path = _require(_opt(args, config, "roster"), "roster")
    window_text = _opt(args, config, "window")
    window = _parse_window(window_text) if window_text else None
    out = Path(_opt(args, config, "out", "out"))

    corpus = _load_corpus(corpus_path)
    roster = _load_roster(roster_path)
    rows = baseline_authorships(mode, roster, corpus, window=window)
    label = "baseline1" if mode == "initials" else "baseline2"

    out.mkdir(parents=True, exist_ok=True)
    portfolio_path = artifacts.write_csv(
        out / f"portfolio-{label}.csv",
        ["person_id", "pub_id", "scenario"],
        sorted((person, pub, label) for person, pub in rows),
    )
    artifacts.write_manifest(
        out,
        label,
        inputs={"corpus": corpus_path, "roster": roster_path},
        outputs={"portfolio": portfolio_path},
        config={
            "mode": mode,
            "window": list(window) if window else None,
            "out": str(out),
        },
    )
    print(f"{label}: {len(rows)} authorships")
    return EXIT_OK


def cmd_evaluate(args: argparse.Namespace, config: dict) -> int:
    gold_path = _require(_opt(args, config, "gold"), "gold")
    portfolio_path = _require(_opt(args, config, "portfolio"), "portfolio")
    roster_path = _opt(args, config, "roster")
    out = Path(_opt(args, config, "out", "out"))

    gold = artifacts.read_authorships(gold_path)
    retrieved = artifacts.read_authorships(portfolio_path)
    roster_ids = [entry.person_id for entry in _load_roster(roster_path)] if roster_path else None
    report = evaluate(gold, retrieved, roster_ids)

    out.mkdir(parents=True, exist_ok=True)
    report_path = out / "report.json"
    report_path.write_text(
        json.dumps(report.as_dict(), sort_keys=True, indent=2) + "\n", encoding="utf-8"
    )
    per_person_path = artifacts.write_csv(
        out / "per_person.csv",
        ["person_id", "retrieved", "false_positives", "false_negatives", "precision", "recall", "f_measure"],
        [
            (
                person,
                r.retrieved,
                r.false_positives,
                r.false_negatives,
                percent1(r.precision),
                percent1(r.recall),
                percent1(r.f_measure),
            )
            for person, r in sorted(report.per_person.items())
        ],
    )
    histogram_path = artifacts.write_csv(
        out / "histogram.csv",
        ["bin", "count"],
        [(label, report.histogram[label]) for label in HISTOGRAM_BINS],
    )
    inputs = {"gold": gold_path, "portfolio": portfolio_path}
    if roster_path:
        inputs["roster"] = roster_path
    artifacts.write_manifest(
        out,
        "evaluate",
        inputs=inputs,
        outputs={
            "report": report_path,
            "per_person": per_person_path,
            "histogram": histogram_path,
        },
        config={"out": str(out)},
    )
    aggregate = report.aggregate
    print(f"precision {percent1(aggregate.precision)}")
    print(f"recall {percent1(aggregate.recall)}")
    print(f"f_measure {percent1(aggregate.f_measure)}")
    return EXIT_OK


def cmd_gen(args: argparse.Namespace, config: dict) -> int:
    seed = int(_opt(args, config, "seed", 20160101))
    researchers = int(_opt(args, config, "researchers", 200))
    window = _parse_window(_opt(args, config, "window", "2010:2016"))
    out = Path(_opt(args, config, "out", "out"))

    population = generate_population(seed=seed, n_researchers=researchers, window=window)
    paths = write_population(population, out)
    artifacts.write_manifest(
        out,
        "gen",
        inputs={},
        outputs={name: path for name, path in paths.items()},
        config={
            "seed": seed,
            "researchers": researchers,
            "window": list(window),
            "out": str(out),
        },
    )
    print(
        f"generated {researchers} researchers, {len(population.corpus_lines)} publications"
    )
    return EXIT_OK


def cmd_serve(args: argparse.Namespace, config: dict) -> int:
    corpus_path = _require(_opt(args, config, "corpus"), "corpus")
    clusters_path = _require(_opt(args, config, "clusters"), "clusters")
    roster_path = _require(_opt(args, config, "roster"), "roster")
    candidates_path = _require(_opt(args, config, "candidates"), "candidates")
    decisions_path = _opt(args, config, "decisions", "decisions.jsonl")
    static_dir = _opt(args, config, "static")
    host = str(_opt(args, config, "host", "127.0.0.1"))
    port = int(_opt(args, config, "port", 8787))

    from .server import create_app

    app = create_app(
        corpus=_load_corpus(corpus_path),
        clusters=artifacts.read_clusters(clusters_path),
        roster=_load_roster(roster_path),
        candidates_by_person=_candidates_by_person(candidates_path),
        decisions_path=decisions_path,
        static_dir=static_dir,
    )
    import uvicorn

    uvicorn.run(app, host=host, port=port, log_level="warning")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="byline",
        description="author name disambiguation and portfolio validation pipeline",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, **flags):
        p = sub.add_parser(name)
        p.set_defaults(func=func)
        p.add_argument("--config", help="JSON file with default option values")
        for flag, kwargs in flags.items():
            p.add_argument(f"--{flag.replace('_', '-')}", dest=flag, **kwargs)
        return p

    add("ingest", cmd_ingest, corpus={}, out={})
    add(
        "cluster",
        cmd_cluster,
        corpus={},
        out={},
        threads={"type": int},
        threshold_mode={},
        general_names={},
        strict={"action": "store_true", "default": False},
    )
    add("match", cmd_match, clusters={}, roster={}, window={}, out={})
    add(
        "filter",
        cmd_filter,
        scenario={"type": int},
        clusters={},
        candidates={},
        roster={},
        corpus={},
        window={},
        decisions={},
        synonyms={},
        out={},
    )
    add(
        "baseline",
        cmd_baseline,
        mode={"choices": ["initials", "fullname"]},
        corpus={},
        roster={},
        window={},
        out={},
    )
    add("evaluate", cmd_evaluate, gold={}, portfolio={}, roster={}, out={})
    add(
        "gen",
        cmd_gen,
        seed={"type": int},
        researchers={"type": int},
        window={},
        out={},
    )
    add(
        "serve",
        cmd_serve,
        corpus={},
        clusters={},
        roster={},
        candidates={},
        decisions={},
        static={},
        host={},
        port={"type": int},
    )
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = _load_config(getattr(args, "config", None))
        return args.func(args, config)
    except PendingDecisionsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PENDING
    except InvariantError as exc:
        print(f"invariant breach: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except (FileNotFoundError, CorpusError, PortfolioError, BlockingError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (ValueError, KeyError, json.JSONDecodeError) as exc:
        print(f"error: invalid input: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
