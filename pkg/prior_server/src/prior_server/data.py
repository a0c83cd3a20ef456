"""Training-sample construction for the byte denoiser.

Sentences are fixed 64-byte strings split into eight 8-byte groups. A
sample picks one group past the first, flips each of its bits independently
at the corruption rate, and asks the model to recover the clean group given
the clean prefix and the corrupted group.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

SENTENCE_BYTES = 64
GROUP_BYTES = 8
N_GROUPS = SENTENCE_BYTES // GROUP_BYTES


@dataclass(frozen=True)
class TrainSample:
    sentence: bytes
    g: int
    corrupted: bytes  # the g-th group after bit flips
    target: bytes  # the true g-th group

    @property
    def model_input(self) -> bytes:
        return self.sentence[: self.g * GROUP_BYTES] + self.corrupted


def load_sentences(path, min_len: int = 60, max_len: int = 64) -> list[bytes]:
    out = []
    for line in Path(path).read_bytes().splitlines():
        if min_len <= len(line) <= max_len:
            out.append(line + b" " * (SENTENCE_BYTES - len(line)))
    if not out:
        raise ValueError(f"no usable sentences in {path}")
    return out


def corrupt_group(group: bytes, p: float, rng: np.random.Generator) -> bytes:
    arr = np.frombuffer(group, dtype=np.uint8)
    flips = rng.random((len(group), 8)) < p
    masks = (flips << np.arange(8)).sum(axis=1).astype(np.uint8)
    return (arr ^ masks).tobytes()


def make_sample(sentence: bytes, p: float, rng: np.random.Generator) -> TrainSample:
    if len(sentence) != SENTENCE_BYTES:
        raise ValueError(f"need {SENTENCE_BYTES}-byte sentences, got {len(sentence)}")
    g = int(rng.integers(1, N_GROUPS))  # groups 1..7; group 0 is always context
    target = sentence[g * GROUP_BYTES : (g + 1) * GROUP_BYTES]
    return TrainSample(sentence=sentence, g=g, corrupted=corrupt_group(target, p, rng), target=target)
