"""Fine-tuning loop: per-position cross-entropy on corrupted groups."""

from __future__ import annotations

import numpy as np
import torch
import torch.nn.functional as F

from .data import GROUP_BYTES, load_sentences, make_sample
from .model import batch_tokens, build_model, save_checkpoint


def _batch_loss(model, samples, device) -> torch.Tensor:
    tokens, pad = batch_tokens([s.model_input for s in samples], device=device)
    logits = model(tokens, pad)
    losses = []
    for i, s in enumerate(samples):
        start = s.g * GROUP_BYTES
        target = torch.frombuffer(bytearray(s.target), dtype=torch.uint8).long().to(device)
        losses.append(F.cross_entropy(logits[i, start : start + GROUP_BYTES], target, reduction="sum"))
    return torch.stack(losses).sum() / len(samples)


def finetune(
    corpus_path,
    out_path,
    arch: str = "scratch",
    epochs: int = 5,
    lr: float = 1e-4,
    batch: int = 32,
    p: float = 0.1,
    seed: int = 0,
    max_sentences: int | None = None,
    d_model: int = 128,
    layers: int = 5,
    log=print,
) -> list[float]:
    """Train a denoiser; returns the per-epoch mean losses."""
    torch.manual_seed(seed)
    sentences = load_sentences(corpus_path)
    if max_sentences:
        sentences = sentences[:max_sentences]
    config = {"d_model": d_model, "layers": layers} if arch == "scratch" else {}
    model = build_model(arch, **config)
    device = "cpu"
    model.to(device)
    opt = torch.optim.Adam([p_ for p_ in model.parameters() if p_.requires_grad], lr=lr)
    rng = np.random.default_rng(seed)

    epoch_losses = []
    for epoch in range(epochs):
        order = rng.permutation(len(sentences))
        total, count = 0.0, 0
        model.train()
        for lo in range(0, len(order), batch):
            samples = [make_sample(sentences[i], p, rng) for i in order[lo : lo + batch]]
            loss = _batch_loss(model, samples, device)
            opt.zero_grad()
            loss.backward()
            opt.step()
            total += float(loss.detach()) * len(samples)
            count += len(samples)
        epoch_losses.append(total / count)
        log(f"epoch {epoch + 1}/{epochs}: loss {epoch_losses[-1]:.4f}")
    save_checkpoint(out_path, model, arch, config)
    return epoch_losses


@torch.no_grad()
def eval_top1(model, sentences, p: float, seed: int = 1, n: int = 500) -> tuple[float, float]:
    """(model top-1 accuracy, flip-likelihood baseline accuracy) on held-out blocks.

    The flip-likelihood baseline's argmax is always the corrupted byte
    itself, so its accuracy is the fraction of bytes the corruption left
    untouched.
    """
    rng = np.random.default_rng(seed)
    model.eval()
    hits = base_hits = total = 0
    for i in range(min(n, len(sentences))):
        s = make_sample(sentences[i], p, rng)
        tokens, pad = batch_tokens([s.model_input])
        start = s.g * GROUP_BYTES
        pred = model(tokens, pad)[0, start : start + GROUP_BYTES].argmax(dim=-1)
        for j in range(GROUP_BYTES):
            hits += int(pred[j]) == s.target[j]
            base_hits += s.corrupted[j] == s.target[j]
            total += 1
    return hits / total, base_hits / total
