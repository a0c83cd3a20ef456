"""Byte-level denoising models behind the serving protocol.

Three architectures share one interface (log-probabilities over 256 byte
values at the k block positions, conditioned on prefix + hard decision):

* ``scratch`` - a compact bidirectional Transformer encoder trained from
  random init; the offline-friendly default.
* ``byt5`` - classifier head on a pretrained ByT5-small encoder with the
  bottom four transformer blocks frozen; needs the pretrained weights to be
  downloadable or cached.
* ``uniform`` - a constant -log 256 debug head for protocol testing.
"""

from __future__ import annotations

import torch
import torch.nn as nn
import torch.nn.functional as F

MAX_CTX_BYTES = 256
VOCAB = 257  # 256 byte values + padding
PAD = 256


class ScratchDenoiser(nn.Module):
    """Small encoder: byte embedding + learned positions + self-attention."""

    def __init__(self, d_model: int = 128, nhead: int = 4, layers: int = 5, ff: int = 256):
        super().__init__()
        self.embed = nn.Embedding(VOCAB, d_model, padding_idx=PAD)
        with torch.no_grad():
            # seed the first 8 embedding dims with the byte's bit pattern, so
            # bit-flip proximity is visible from the start of training
            bits = (torch.arange(256)[:, None] >> torch.arange(8)[None, :]) & 1
            self.embed.weight[:256, :8] = bits.float() * 2.0 - 1.0
        self.pos = nn.Embedding(MAX_CTX_BYTES + 16, d_model)
        layer = nn.TransformerEncoderLayer(
            d_model, nhead, dim_feedforward=ff, batch_first=True, dropout=0.1, norm_first=True
        )
        self.encoder = nn.TransformerEncoder(layer, layers)
        self.head = nn.Linear(d_model, 256)

    def forward(self, tokens: torch.Tensor, pad_mask: torch.Tensor) -> torch.Tensor:
        x = self.embed(tokens) + self.pos(torch.arange(tokens.shape[1], device=tokens.device))
        h = self.encoder(x, src_key_padding_mask=pad_mask)
        return self.head(h)


class UniformDenoiser(nn.Module):
    """Debug model: every position gets the flat distribution."""

    def forward(self, tokens: torch.Tensor, pad_mask: torch.Tensor) -> torch.Tensor:
        return torch.zeros(*tokens.shape, 256, device=tokens.device)


class Byt5Denoiser(nn.Module):
    """ByT5-small encoder + per-position classifier, bottom 4 blocks frozen."""

    def __init__(self, freeze_bottom: int = 4):
        super().__init__()
        try:
            from transformers import T5EncoderModel
        except ImportError as e:
            raise RuntimeError("byt5 architecture needs the 'transformers' package") from e
        try:
            self.encoder = T5EncoderModel.from_pretrained("google/byt5-small")
        except Exception as e:
            raise RuntimeError(f"missing pretrained weights for ByT5-small: {e}") from e
        for block in self.encoder.encoder.block[:freeze_bottom]:
            for p in block.parameters():
                p.requires_grad_(False)
        self.head = nn.Linear(self.encoder.config.d_model, 256)

    def forward(self, tokens: torch.Tensor, pad_mask: torch.Tensor) -> torch.Tensor:
        # ByT5 tokenization: byte value + 3 (special tokens occupy 0..2)
        ids = torch.where(tokens == PAD, torch.zeros_like(tokens), tokens + 3)
        h = self.encoder(input_ids=ids, attention_mask=(~pad_mask).long()).last_hidden_state
        return self.head(h)


def build_model(arch: str, **kw) -> nn.Module:
    if arch == "scratch":
        return ScratchDenoiser(**kw)
    if arch == "uniform":
        return UniformDenoiser()
    if arch == "byt5":
        return Byt5Denoiser(**kw)
    raise ValueError(f"unknown architecture {arch!r}")


def batch_tokens(byte_strings: list[bytes], device=None) -> tuple[torch.Tensor, torch.Tensor]:
    """Pad a batch of byte strings into (tokens, pad_mask)."""
    width = max(len(b) for b in byte_strings)
    tokens = torch.full((len(byte_strings), width), PAD, dtype=torch.long, device=device)
    for i, b in enumerate(byte_strings):
        tokens[i, : len(b)] = torch.frombuffer(bytearray(b), dtype=torch.uint8).long()
    return tokens, tokens == PAD


@torch.no_grad()
def query_logp(model: nn.Module, ctx: bytes, hd: bytes) -> tuple[list[list[float]], bool]:
    """Log-probability rows for the k block positions; flags ctx truncation."""
    truncated = False
    if len(ctx) > MAX_CTX_BYTES:
        ctx = ctx[-MAX_CTX_BYTES:]
        truncated = True
    model.eval()
    tokens, pad = batch_tokens([ctx + hd])
    logits = model(tokens, pad)[0, len(ctx) : len(ctx) + len(hd)]
    rows = F.log_softmax(logits, dim=-1)
    return rows.double().tolist(), truncated


def save_checkpoint(path, model: nn.Module, arch: str, config: dict) -> None:
    torch.save({"arch": arch, "config": config, "state": model.state_dict()}, path)


def load_checkpoint(path) -> nn.Module:
    blob = torch.load(path, map_location="cpu", weights_only=False)
    model = build_model(blob["arch"], **blob.get("config", {}))
    model.load_state_dict(blob["state"])
    model.eval()
    return model
