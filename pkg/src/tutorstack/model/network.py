"""The sequence model: summed feature embeddings, pre-LN encoder blocks with
monotonic convolutional multi-head attention, and a per-position correctness
head.

Attention gives each head an optional distance decay: logits are
QK^T/sqrt(d_head) - theta_h * |i - j| with theta_h >= 0 via softplus. The
first ceil(heads/2) heads learn theta (monotonic); the rest pin theta = 0
(pure content) — the head-wise mixture. Keys and values pass through a
zero-padded depthwise 1-D convolution before scoring; PAD positions are
zeroed first so padding content can never bleed into real keys.
"""

from __future__ import annotations

import math

import torch
from torch import nn

from tutorstack.model.config import ModelConfig


class NumericsError(RuntimeError):
    """A forward pass produced non-finite activations."""


def sinusoidal_positions(length: int, dim: int, dtype=torch.float32) -> torch.Tensor:
    position = torch.arange(length, dtype=torch.float64).unsqueeze(1)
    div = torch.exp(torch.arange(0, dim, 2, dtype=torch.float64) * (-math.log(10000.0) / dim))
    pe = torch.zeros(length, dim, dtype=torch.float64)
    pe[:, 0::2] = torch.sin(position * div)
    pe[:, 1::2] = torch.cos(position * div)
    return pe.to(dtype)


def attention_weights(
    q: torch.Tensor,
    k: torch.Tensor,
    real_mask: torch.Tensor,
    theta: torch.Tensor,
) -> torch.Tensor:
    """Distance-penalized masked softmax.

    q, k: [B, H, L, Dh]; real_mask: [B, L] (False = PAD); theta: [H] >= 0.
    PAD keys are excluded; a fully-masked row (a PAD query) attends to itself.
    """
    b, h, length, dh = q.shape
    logits = q @ k.transpose(-2, -1) / math.sqrt(dh)
    idx = torch.arange(length, device=q.device)
    dist = (idx[:, None] - idx[None, :]).abs().to(q.dtype)
    logits = logits - theta.view(1, h, 1, 1) * dist
    allowed = real_mask[:, None, None, :].expand(b, h, length, length)
    self_only = torch.eye(length, dtype=torch.bool, device=q.device)
    allowed = torch.where(
        real_mask[:, None, :, None].expand(b, h, length, length),
        allowed,
        self_only.expand(b, h, length, length),
    )
    logits = logits.masked_fill(~allowed, float("-inf"))
    return torch.softmax(logits, dim=-1)


class MonotonicConvAttention(nn.Module):
    def __init__(self, config: ModelConfig):
        super().__init__()
        d, h = config.embed_dim, config.num_heads
        self.num_heads = h
        self.head_dim = d // h
        self.wq = nn.Linear(d, d)
        self.wk = nn.Linear(d, d)
        self.wv = nn.Linear(d, d)
        self.wo = nn.Linear(d, d)
        self.conv_k = nn.Conv1d(d, d, config.conv_kernel, padding=config.conv_kernel // 2, groups=d)
        self.conv_v = nn.Conv1d(d, d, config.conv_kernel, padding=config.conv_kernel // 2, groups=d)
        self.theta_raw = nn.Parameter(torch.zeros(h))
        n_monotonic = (h + 1) // 2
        self.register_buffer(
            "monotonic_heads",
            torch.tensor([1.0] * n_monotonic + [0.0] * (h - n_monotonic)),
            persistent=False,
        )

    def theta(self) -> torch.Tensor:
        return nn.functional.softplus(self.theta_raw) * self.monotonic_heads

    def _split(self, x: torch.Tensor) -> torch.Tensor:
        b, length, _ = x.shape
        return x.view(b, length, self.num_heads, self.head_dim).transpose(1, 2)

    def forward(self, x: torch.Tensor, real_mask: torch.Tensor) -> torch.Tensor:
        b, length, d = x.shape
        q = self.wq(x)
        keep = real_mask.unsqueeze(-1).to(x.dtype)
        k = (self.wk(x) * keep).transpose(1, 2)
        v = (self.wv(x) * keep).transpose(1, 2)
        k = self.conv_k(k).transpose(1, 2)
        v = self.conv_v(v).transpose(1, 2)
        weights = attention_weights(self._split(q), self._split(k), real_mask, self.theta())
        out = weights @ self._split(v)
        out = out.transpose(1, 2).reshape(b, length, d)
        return self.wo(out)


class EncoderBlock(nn.Module):
    def __init__(self, config: ModelConfig):
        super().__init__()
        d = config.embed_dim
        self.ln_attn = nn.LayerNorm(d)
        self.attn = MonotonicConvAttention(config)
        self.ln_ffn = nn.LayerNorm(d)
        self.ffn = nn.Sequential(
            nn.Linear(d, config.ffn_dim),
            nn.LeakyReLU(config.leaky_slope),
            nn.Linear(config.ffn_dim, d),
        )
        self.drop = nn.Dropout(config.dropout)

    def forward(self, x: torch.Tensor, real_mask: torch.Tensor) -> torch.Tensor:
        x = x + self.drop(self.attn(self.ln_attn(x), real_mask))
        x = x + self.drop(self.ffn(self.ln_ffn(x)))
        if not torch.isfinite(x).all():
            raise NumericsError(
                f"non-finite activations after encoder block (shape {tuple(x.shape)})"
            )
        return x


class MlfbkNet(nn.Module):
    """Embedding sum -> positional encoding -> encoder stack -> logit head."""

    CHANNELS = ("question", "skill", "response", "mastery", "cluster", "difficulty")

    def __init__(self, config: ModelConfig):
        super().__init__()
        self.config = config
        d = config.embed_dim
        self.emb_question = nn.Embedding(config.question_vocab, d)
        self.emb_skill = nn.Embedding(config.skill_vocab, d)
        self.emb_response = nn.Embedding(config.response_vocab, d)
        self.emb_mastery = nn.Embedding(config.mastery_vocab, d)
        self.emb_cluster = nn.Embedding(config.cluster_vocab, d)
        self.emb_difficulty = nn.Embedding(config.difficulty_vocab, d)
        self.register_buffer(
            "positions", sinusoidal_positions(config.max_seq_len, d), persistent=False
        )
        self.blocks = nn.ModuleList(EncoderBlock(config) for _ in range(config.num_layers))
        self.drop = nn.Dropout(config.dropout)
        self.head = nn.Linear(d, 1)
        self._init_weights()

    def _init_weights(self):
        for emb in (self.emb_question, self.emb_skill, self.emb_response,
                    self.emb_mastery, self.emb_cluster, self.emb_difficulty):
            nn.init.normal_(emb.weight, std=0.02)

    def embed(self, tokens: dict[str, torch.Tensor]) -> torch.Tensor:
        """Sum of the six channel embeddings plus sinusoidal positions."""
        x = (
            self.emb_question(tokens["question"])
            + self.emb_skill(tokens["skill"])
            + self.emb_response(tokens["response"])
            + self.emb_mastery(tokens["mastery"])
            + self.emb_cluster(tokens["cluster"])
            + self.emb_difficulty(tokens["difficulty"])
        )
        length = x.shape[1]
        return x + self.positions[:length].to(x.dtype)

    def encode(self, tokens: dict[str, torch.Tensor], real_mask: torch.Tensor) -> torch.Tensor:
        x = self.drop(self.embed(tokens))
        for block in self.blocks:
            x = block(x, real_mask)
        return x

    def forward(self, tokens: dict[str, torch.Tensor], real_mask: torch.Tensor) -> torch.Tensor:
        """Per-position correctness logits [B, L]."""
        return self.head(self.encode(tokens, real_mask)).squeeze(-1)

    def probabilities(self, tokens: dict[str, torch.Tensor], real_mask: torch.Tensor) -> torch.Tensor:
        return torch.sigmoid(self.forward(tokens, real_mask))
