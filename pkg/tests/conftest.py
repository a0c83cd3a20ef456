import numpy as np
import pytest

from semosd.corpus import synthetic_sentences, write_corpus


@pytest.fixture(scope="session")
def corpus_file(tmp_path_factory):
    """Deterministic 12k-sentence synthetic corpus shared across tests."""
    path = tmp_path_factory.mktemp("corpus") / "sentences.txt"
    write_corpus(path, synthetic_sentences(12_000, seed=7))
    return str(path)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
