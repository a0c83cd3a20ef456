"""Text ingestion and per-trial context/block assembly.

Sentences arrive one per line, are filtered by byte length, and padded with
spaces to the fixed 64-byte form (eight 8-byte blocks). A trial picks a
block index g in {2..7}; the g leading blocks form the error-free context
the prior conditions on, per the streaming model (earlier blocks of the
sentence were already delivered).

A deterministic template generator provides desk-scale English-like
corpora when no real sentence file is at hand.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from pathlib import Path

import numpy as np

SENTENCE_BYTES = 64
BLOCK_BYTES = 8
G_MIN, G_MAX = 2, 7  # admissible current-block indices (block 0..7 layout)


@dataclass(frozen=True)
class Trial:
    ctx: bytes  # blocks 0..g-1, error-free
    block: bytes  # the k true source bytes of block g
    g: int
    sentence_id: int


def load_sentences(path, min_len: int = 60, max_len: int = 64) -> list[bytes]:
    """Length-filtered sentences, each padded with 0x20 to 64 bytes."""
    raw = Path(path).read_bytes().splitlines()
    out = []
    for line in raw:
        if min_len <= len(line) <= max_len:
            out.append(line + b" " * (SENTENCE_BYTES - len(line)))
    if not out:
        raise ValueError(f"no sentences of length [{min_len},{max_len}] in {path}")
    return out


def make_trial(sentence: bytes, rng: np.random.Generator, sentence_id: int = 0, k: int = BLOCK_BYTES) -> Trial:
    if len(sentence) != SENTENCE_BYTES:
        raise ValueError(f"sentence must be {SENTENCE_BYTES} bytes, got {len(sentence)}")
    g = int(rng.integers(G_MIN, G_MAX + 1))
    return Trial(ctx=sentence[: g * k], block=sentence[g * k : (g + 1) * k], g=g, sentence_id=sentence_id)


def split_train_test(sentences, ratio: float, seed: int) -> tuple[list[bytes], list[bytes]]:
    """Deterministic disjoint split keyed on a seeded hash of the line index."""
    train, test = [], []
    for sid, s in enumerate(sentences):
        digest = hashlib.sha256(f"{seed}:{sid}".encode()).digest()
        frac = int.from_bytes(digest[:8], "big") / 2**64
        (train if frac < ratio else test).append(s)
    return train, test


# ---------------------------------------------------------------------------
# Synthetic corpus
# ---------------------------------------------------------------------------

_SUBJECTS = [
    "The cat", "The dog", "A man", "A woman", "The girl", "The boy",
    "An old man", "The child", "A small bird", "The tall man", "A young girl",
    "The teacher", "The farmer", "A soldier", "The waiter", "A tourist",
]
_VERBS = [
    "is sleeping", "is sitting", "is resting", "is reading", "is waiting",
    "is standing", "is playing", "is walking", "is eating", "is singing",
    "is working", "is smiling", "is dancing", "is jumping", "is running",
]
_PLACES = [
    "on the sofa", "on the bench", "in the park", "near the door",
    "on the beach", "in the rain", "by the lake", "on the grass",
    "in the garden", "at the table", "on the floor", "in the kitchen",
    "near the river", "at the station", "on the porch", "in the library",
]
_TAILS = [
    "while the sun goes down", "as the children watch quietly",
    "and the music keeps playing", "while everyone else is busy",
    "as the evening slowly passes", "and nobody seems to notice",
    "while the rain keeps falling", "as the crowd walks past them",
    "and the day feels very long", "while a dog barks somewhere",
    "as the light begins to fade", "and time moves along slowly",
]


def synthetic_sentences(n: int, seed: int = 0) -> list[bytes]:
    """Deterministic English-like sentences, 60-64 bytes before padding.

    Template prose over small vocabularies, predictable enough for an
    n-gram prior to learn from; a stand-in for a real hypothesis corpus.
    """
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < n:
        parts = [
            _SUBJECTS[rng.integers(len(_SUBJECTS))],
            _VERBS[rng.integers(len(_VERBS))],
            _PLACES[rng.integers(len(_PLACES))],
            _TAILS[rng.integers(len(_TAILS))],
        ]
        s = " ".join(parts) + "."
        if len(s) < 60:
            s = s[:-1] + " now."
        if not 60 <= len(s) <= 64:
            continue
        out.append(s.encode() + b" " * (SENTENCE_BYTES - len(s)))
    return out


def write_corpus(path, sentences) -> None:
    with open(path, "wb") as fh:
        for s in sentences:
            fh.write(bytes(s).rstrip(b" ") + b"\n")
