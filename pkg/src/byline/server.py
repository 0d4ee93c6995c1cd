"""Review API: researchers, their candidate clusters, and decisions.

The server is a thin, stateless view over pipeline artifacts plus one
append-only decisions log. Decisions are immutable: a second verdict for
the same (person, cluster) pair is refused with 409 no matter its content,
so the log replayed through the portfolio stage always has one verdict per
pair. Optional static-token auth guards all API routes when the
BYLINE_TOKEN environment variable is set.
"""

from __future__ import annotations

import json
import os
import threading
from pathlib import Path
from typing import Literal, Sequence

from fastapi import Depends, FastAPI, HTTPException, Request
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from .clustering import Cluster
from .corpus import Corpus
from .portfolio import ReviewDecision, RosterEntry, parse_decisions

TOKEN_ENV_VAR = "BYLINE_TOKEN"
PUBLICATION_SAMPLE_SIZE = 8


class DecisionIn(BaseModel):
    person_id: str
    cluster_id: int
    verdict: Literal["accept", "reject"]
    reviewer: str = ""
    ts: str = ""


class ReviewState:
    """Candidates, decisions, and the log file behind the API."""

    def __init__(
        self,
        corpus: Corpus,
        clusters: Sequence[Cluster],
        roster: Sequence[RosterEntry],
        candidates_by_person: dict[str, list[int]],
        decisions_path: str | Path,
    ):
        self.corpus = corpus
        self.clusters = {cluster.cluster_id: cluster for cluster in clusters}
        self.roster = {entry.person_id: entry for entry in roster}
        for person_id, cluster_ids in candidates_by_person.items():
            if person_id not in self.roster:
                raise ValueError(f"candidates reference unknown person {person_id!r}")
            for cluster_id in cluster_ids:
                if cluster_id not in self.clusters:
                    raise ValueError(
                        f"candidates reference unknown cluster {cluster_id} for {person_id}"
                    )
        self.candidates = {
            person_id: list(cluster_ids)
            for person_id, cluster_ids in candidates_by_person.items()
        }
        self.decisions_path = Path(decisions_path)
        self.verdicts: dict[tuple[str, int], ReviewDecision] = {}
        if self.decisions_path.exists():
            with open(self.decisions_path, encoding="utf-8") as handle:
                for decision in parse_decisions(handle):
                    self.verdicts[(decision.person_id, decision.cluster_id)] = decision
        self._write_lock = threading.Lock()
        # clusters claimed by more than one researcher need reviewer attention
        claim_counts: dict[int, int] = {}
        for cluster_ids in self.candidates.values():
            for cluster_id in cluster_ids:
                claim_counts[cluster_id] = claim_counts.get(cluster_id, 0) + 1
        self.conflicted = {cid for cid, count in claim_counts.items() if count > 1}

    def pending_count(self, person_id: str) -> int:
        return sum(
            1
            for cluster_id in self.candidates.get(person_id, [])
            if (person_id, cluster_id) not in self.verdicts
        )

    def record(self, decision: ReviewDecision) -> None:
        """Append one decision; the caller has already validated the pair."""
        with self._write_lock:
            key = (decision.person_id, decision.cluster_id)
            if key in self.verdicts:
                raise HTTPException(status_code=409, detail="decision already recorded")
            self.decisions_path.parent.mkdir(parents=True, exist_ok=True)
            with open(self.decisions_path, "a", encoding="utf-8") as handle:
                handle.write(json.dumps(decision.to_dict(), sort_keys=True) + "\n")
            self.verdicts[key] = decision


def _publication_sample(state: ReviewState, cluster: Cluster) -> list[dict]:
    pubs = sorted({pub_id for pub_id, _pos in cluster.pac_ids})
    sample = []
    for pub_id in pubs:
        record = state.corpus.records[pub_id]
        sample.append(
            {
                "pub_id": pub_id,
                "title": record.title or f"untitled ({pub_id})",
                "year": record.year,
                "source": record.source_title,
            }
        )
    sample.sort(key=lambda p: (-p["year"], p["pub_id"]))
    return sample[:PUBLICATION_SAMPLE_SIZE]


def create_app(
    corpus: Corpus,
    clusters: Sequence[Cluster],
    roster: Sequence[RosterEntry],
    candidates_by_person: dict[str, list[int]],
    decisions_path: str | Path,
    static_dir: str | Path | None = None,
    token: str | None = None,
) -> FastAPI:
    state = ReviewState(corpus, clusters, roster, candidates_by_person, decisions_path)
    token = token if token is not None else os.environ.get(TOKEN_ENV_VAR) or None

    async def require_token(request: Request) -> None:
        if token is None:
            return
        header = request.headers.get("authorization", "")
        if header != f"Bearer {token}":
            raise HTTPException(status_code=401, detail="missing or invalid token")

    app = FastAPI(title="byline review API", dependencies=[Depends(require_token)])

    @app.get("/api/researchers")
    def researchers() -> list[dict]:
        rows = []
        for person_id, entry in state.roster.items():
            cluster_ids = state.candidates.get(person_id, [])
            pending = state.pending_count(person_id)
            rows.append(
                {
                    "person_id": person_id,
                    "last_name": entry.last_name,
                    "first_name": entry.first_name,
                    "city": entry.city,
                    "country": entry.country,
                    "field_code": entry.field_code,
                    "candidates": len(cluster_ids),
                    "pending": pending,
                    "decided": len(cluster_ids) - pending,
                    "conflicts": sum(1 for c in cluster_ids if c in state.conflicted),
                }
            )
        rows.sort(key=lambda r: (-r["pending"], r["person_id"]))
        return rows

    @app.get("/api/researchers/{person_id}/candidates")
    def candidates(person_id: str) -> dict:
        if person_id not in state.roster:
            raise HTTPException(status_code=404, detail="unknown researcher")
        entries = []
        for cluster_id in state.candidates.get(person_id, []):
            cluster = state.clusters[cluster_id]
            decision = state.verdicts.get((person_id, cluster_id))
            entries.append(
                {
                    **cluster.to_dict(),
                    "publications": _publication_sample(state, cluster),
                    "verdict": decision.verdict if decision else None,
                    "conflict": cluster_id in state.conflicted,
                }
            )
        return {"person_id": person_id, "candidates": entries}

    @app.post("/api/decisions", status_code=201)
    def post_decision(payload: DecisionIn) -> dict:
        pair = (payload.person_id, payload.cluster_id)
        if payload.person_id not in state.roster:
            raise HTTPException(status_code=404, detail="unknown researcher")
        if payload.cluster_id not in state.candidates.get(payload.person_id, []):
            raise HTTPException(status_code=404, detail="unknown (person, cluster) pair")
        decision = ReviewDecision(
            person_id=payload.person_id,
            cluster_id=payload.cluster_id,
            verdict=payload.verdict,
            reviewer=payload.reviewer,
            ts=payload.ts,
        )
        state.record(decision)
        return {"decision": decision.to_dict(), "pending": state.pending_count(pair[0])}

    @app.get("/api/progress")
    def progress() -> dict:
        total = sum(len(ids) for ids in state.candidates.values())
        decided = len(state.verdicts)
        accepted = sum(1 for d in state.verdicts.values() if d.verdict == "accept")
        per_person = {}
        for person_id in sorted(state.roster):
            cluster_ids = state.candidates.get(person_id, [])
            pending = state.pending_count(person_id)
            per_person[person_id] = {
                "candidates": len(cluster_ids),
                "decided": len(cluster_ids) - pending,
                "pending": pending,
            }
        return {
            "total": total,
            "decided": decided,
            "pending": total - decided,
            "accepted": accepted,
            "rejected": decided - accepted,
            "per_person": per_person,
        }

    if static_dir is not None:
        app.mount("/", StaticFiles(directory=str(static_dir), html=True), name="static")

    return app
