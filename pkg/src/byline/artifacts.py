"""Deterministic file artifacts shared between pipeline stages.

Every artifact is byte-reproducible: JSON is dumped with sorted keys and
fixed separators, CSV rows are pre-sorted by the caller, and manifests
carry input digests plus the resolved configuration but no timestamps.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
from pathlib import Path
from typing import Iterable, Sequence

from .clustering import Cluster


def dump_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def write_jsonl(path: str | Path, objects: Iterable[dict]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as handle:
        for obj in objects:
            handle.write(dump_json(obj) + "\n")
    return path


def read_jsonl(path: str | Path) -> list[dict]:
    with open(path, encoding="utf-8") as handle:
        return [json.loads(line) for line in handle if line.strip()]


def write_clusters(path: str | Path, clusters: Sequence[Cluster]) -> Path:
    return write_jsonl(path, (c.to_dict() for c in sorted(clusters, key=lambda c: c.cluster_id)))


def read_clusters(path: str | Path) -> list[Cluster]:
    return [Cluster.from_dict(obj) for obj in read_jsonl(path)]


def write_csv(path: str | Path, header: Sequence[str], rows: Iterable[Sequence]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow(row)
    path.write_text(buffer.getvalue(), encoding="utf-8")
    return path


def read_authorships(path: str | Path) -> set[tuple[str, str]]:
    """Read (person_id, pub_id) pairs from a CSV with at least those two
    columns (gold files and portfolio files both qualify)."""
    with open(path, encoding="utf-8", newline="") as handle:
        reader = csv.DictReader(handle)
        if reader.fieldnames is None or not {"person_id", "pub_id"} <= set(reader.fieldnames):
            raise ValueError(f"{path}: expected person_id and pub_id columns")
        return {(row["person_id"], row["pub_id"]) for row in reader}


def sha256_file(path: str | Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as handle:
        for chunk in iter(lambda: handle.read(65536), b""):
            digest.update(chunk)
    return digest.hexdigest()


def write_manifest(
    out_dir: str | Path,
    command: str,
    inputs: dict[str, str | Path],
    outputs: dict[str, str | Path],
    config: dict,
) -> Path:
    """Digest inputs and outputs alongside the resolved configuration.

    Deliberately timestamp-free so identical runs yield identical bytes.
    """
    manifest = {
        "command": command,
        "config": config,
        "inputs": {
            name: {"path": str(path), "sha256": sha256_file(path)}
            for name, path in sorted(inputs.items())
        },
        "outputs": {
            name: {"path": str(path), "sha256": sha256_file(path)}
            for name, path in sorted(outputs.items())
        },
    }
    path = Path(out_dir) / f"manifest-{command}.json"
    path.write_text(json.dumps(manifest, sort_keys=True, indent=2) + "\n", encoding="utf-8")
    return path
