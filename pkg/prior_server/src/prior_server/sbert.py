"""Sentence-similarity scoring of decoded text against the source."""

from __future__ import annotations

import csv

import numpy as np

DEFAULT_MODEL = "sentence-transformers/all-MiniLM-L6-v2"


def load_pairs(path) -> list[tuple[str, str]]:
    """Two-column TSV of (decoded, reference) sentences."""
    pairs = []
    with open(path, newline="") as fh:
        for row in csv.reader(fh, delimiter="\t"):
            if len(row) != 2:
                raise ValueError(f"expected 2 tab-separated columns, got {len(row)}")
            pairs.append((row[0], row[1]))
    if not pairs:
        raise ValueError(f"no pairs in {path}")
    return pairs


def sbert_eval(pairs_path, model_name: str = DEFAULT_MODEL) -> float:
    """Mean embedding cosine similarity over the pair file."""
    try:
        from sentence_transformers import SentenceTransformer
    except ImportError as e:
        raise RuntimeError("sentence-transformers is not installed") from e
    try:
        model = SentenceTransformer(model_name)
    except Exception as e:
        raise RuntimeError(f"missing sentence-embedding model {model_name!r}: {e}") from e
    pairs = load_pairs(pairs_path)
    left = model.encode([a for a, _ in pairs], convert_to_numpy=True, normalize_embeddings=True)
    right = model.encode([b for _, b in pairs], convert_to_numpy=True, normalize_embeddings=True)
    return float(np.mean(np.sum(left * right, axis=1)))
