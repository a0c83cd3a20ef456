"""Fine-tuning sanity: the loss moves and the context actually helps."""

import numpy as np
import pytest

from prior_server.data import corrupt_group, load_sentences, make_sample
from prior_server.model import load_checkpoint
from prior_server.train import eval_top1


class TestLossTrajectory:
    def test_loss_strictly_decreases_over_five_epochs(self, small_training):
        losses, _ = small_training
        assert len(losses) == 5
        assert all(b < a for a, b in zip(losses, losses[1:])), losses


class TestDenoisingQuality:
    def test_beats_flip_likelihood_baseline_on_held_out(self, small_training, corpus_file):
        # the flip-likelihood argmax is the corrupted byte itself, so the
        # baseline accuracy is the per-byte survival rate (~0.9^8)
        _, ckpt = small_training
        model = load_checkpoint(ckpt)
        held = load_sentences(corpus_file)[1000:2000]
        acc, baseline = eval_top1(model, held, p=0.1, n=400)
        assert baseline == pytest.approx(0.43, abs=0.05)
        assert acc > baseline + 0.02, (acc, baseline)


class TestByt5Path:
    def test_missing_pretrained_weights_error(self, monkeypatch):
        pytest.importorskip("transformers")
        monkeypatch.setenv("HF_HUB_OFFLINE", "1")
        monkeypatch.setenv("TRANSFORMERS_OFFLINE", "1")
        from prior_server.model import build_model

        with pytest.raises(RuntimeError, match="missing pretrained weights"):
            build_model("byt5")


class TestData:
    def test_corruption_rate(self):
        rng = np.random.default_rng(0)
        flips = 0
        trials = 2000
        for _ in range(trials):
            corrupted = corrupt_group(b"\x00" * 8, 0.1, rng)
            flips += sum(bin(b).count("1") for b in corrupted)
        rate = flips / (trials * 64)
        assert rate == pytest.approx(0.1, abs=0.01)

    def test_sample_touches_exactly_one_group(self):
        rng = np.random.default_rng(1)
        sentence = bytes(range(64))
        s = make_sample(sentence, 0.5, rng)
        assert 1 <= s.g <= 7
        assert s.model_input[: s.g * 8] == sentence[: s.g * 8]
        assert s.target == sentence[s.g * 8 : (s.g + 1) * 8]
        assert len(s.corrupted) == 8

    def test_sentences_padded(self, corpus_file):
        sentences = load_sentences(corpus_file)
        assert all(len(s) == 64 for s in sentences)
