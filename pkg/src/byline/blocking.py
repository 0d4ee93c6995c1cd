"""Name-block construction and block-size pairing thresholds.

Every PAC lands in exactly one block keyed by compacted last name plus the
first letter of the initials. Pairwise comparison happens only inside a
block, against a score threshold that grows with block size.
"""

from __future__ import annotations

import math

from .corpus import Corpus, PacId


class BlockingError(ValueError):
    pass


def block_key(normalized_last: str, normalized_initials: str, normalized_first: str = "") -> str:
    """Key = last name without separators + first initial.

    The initial falls back to the first name when the initials string is
    empty. Empty last name, or no initial at all, cannot be keyed.
    """
    compact_last = normalized_last.replace(" ", "").replace("-", "")
    if not compact_last:
        raise BlockingError("cannot build block key without a last name")
    initial = normalized_initials[:1] or normalized_first[:1]
    if not initial:
        raise BlockingError("cannot build block key without initials or first name")
    return compact_last + initial


def build_blocks(corpus: Corpus) -> dict[str, list[PacId]]:
    """Partition all PACs into name blocks.

    Output lists keep deterministic order (sorted by pac_id) so downstream
    pairing and clustering are reproducible.
    """
    blocks: dict[str, list[PacId]] = {}
    for pac_id in sorted(corpus.pacs):
        pac = corpus.pacs[pac_id]
        key = block_key(pac.normalized_last, pac.normalized_initials, pac.normalized_first)
        blocks.setdefault(key, []).append(pac_id)
    return blocks


# (max block size inclusive, threshold); the last band is open-ended
_THRESHOLD_BANDS = (
    (500, 11),
    (1500, 13),
    (7000, 17),
    (22500, 21),
)
_TOP_THRESHOLD = 90


def threshold_for(block_size: int) -> float:
    """Pairing threshold for a block of the given size.

    A singleton block pairs nothing, expressed as an unreachable threshold.
    """
    if block_size < 1:
        raise BlockingError(f"block size must be >= 1, got {block_size}")
    if block_size == 1:
        return math.inf
    for upper, threshold in _THRESHOLD_BANDS:
        if block_size <= upper:
            return threshold
    return _TOP_THRESHOLD
