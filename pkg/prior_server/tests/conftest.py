import warnings

import numpy as np
import pytest

warnings.filterwarnings("ignore", message=".*nested_tensor.*")

# deterministic template corpus, generated without importing the decoder package
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


def make_sentences(n: int, seed: int = 0) -> list[bytes]:
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < n:
        s = " ".join(
            [
                _SUBJECTS[rng.integers(len(_SUBJECTS))],
                _VERBS[rng.integers(len(_VERBS))],
                _PLACES[rng.integers(len(_PLACES))],
                _TAILS[rng.integers(len(_TAILS))],
            ]
        ) + "."
        if len(s) < 60:
            s = s[:-1] + " now."
        if 60 <= len(s) <= 64:
            out.append(s.encode())
    return out


@pytest.fixture(scope="session")
def corpus_file(tmp_path_factory):
    path = tmp_path_factory.mktemp("corpus") / "sentences.txt"
    path.write_bytes(b"\n".join(make_sentences(4000, seed=21)) + b"\n")
    return str(path)


@pytest.fixture(scope="session")
def small_training(corpus_file, tmp_path_factory):
    """The 10^3-sentence, 5-epoch run; (losses, checkpoint path)."""
    from prior_server.train import finetune

    ckpt = tmp_path_factory.mktemp("ckpt") / "small.pt"
    losses = finetune(corpus_file, ckpt, epochs=5, max_sentences=1000, seed=0, log=lambda *a: None)
    return losses, str(ckpt)


@pytest.fixture(scope="session")
def strong_checkpoint(corpus_file, tmp_path_factory):
    """Larger run used for the contextual-recovery scenario."""
    from prior_server.train import finetune

    ckpt = tmp_path_factory.mktemp("ckpt") / "strong.pt"
    finetune(corpus_file, ckpt, epochs=5, max_sentences=2500, seed=0, lr=3e-4, log=lambda *a: None)
    return str(ckpt)


@pytest.fixture(scope="session")
def uniform_checkpoint(tmp_path_factory):
    from prior_server.model import build_model, save_checkpoint

    path = tmp_path_factory.mktemp("ckpt") / "uniform.pt"
    save_checkpoint(path, build_model("uniform"), "uniform", {})
    return str(path)
