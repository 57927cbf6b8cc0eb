"""Finite-difference verification of the backward pass.

Builds the tiny 64-bit model, computes the masked-response loss, and
compares every analytic parameter gradient against central differences.
"""

from __future__ import annotations

import torch

from tutorstack.model.config import ModelConfig, tiny_config
from tutorstack.model.network import MlfbkNet

FD_EPSILON = 1e-5
# gradients smaller than this are compared absolutely, not relatively,
# to keep finite-difference round-off from inflating the reported error
GRAD_FLOOR = 1e-6


def _tiny_batch(config: ModelConfig, generator: torch.Generator):
    b, length = 2, config.max_seq_len
    tokens = {
        "question": torch.randint(0, config.num_questions, (b, length), generator=generator),
        "skill": torch.randint(0, config.num_skills, (b, length), generator=generator),
        "response": torch.randint(0, 2, (b, length), generator=generator),
        "mastery": torch.randint(0, config.mastery_buckets, (b, length), generator=generator),
        "cluster": torch.randint(0, config.k_clusters, (b, length), generator=generator),
        "difficulty": torch.randint(0, config.difficulty_levels, (b, length), generator=generator),
    }
    real = torch.ones(b, length, dtype=torch.bool)
    # one PAD position exercises the masking path
    real[0, 0] = False
    tokens["question"][0, 0] = config.question_pad
    tokens["skill"][0, 0] = config.skill_pad
    tokens["response"][0, 0] = config.RESPONSE_PAD
    tokens["mastery"][0, 0] = config.mastery_pad
    tokens["cluster"][0, 0] = config.cluster_pad
    tokens["difficulty"][0, 0] = config.difficulty_pad
    labels = (tokens["response"] == config.RESPONSE_CORRECT).double()
    # mask half of the real positions as prediction targets
    mask = (torch.rand(b, length, generator=generator) < 0.5) & real
    mask[:, -1] = True
    inputs = dict(tokens)
    inputs["response"] = tokens["response"].masked_fill(mask, config.RESPONSE_MASK)
    return inputs, real, labels, mask


def grad_check(seed: int, config: ModelConfig | None = None, epsilon: float = FD_EPSILON) -> float:
    """Worst relative error between analytic and central-difference gradients."""
    torch.set_num_threads(1)
    config = config or tiny_config()
    torch.manual_seed(seed)
    net = MlfbkNet(config).double()
    net.eval()  # deterministic loss: no dropout

    generator = torch.Generator().manual_seed(seed + 17)
    tokens, real, labels, mask = _tiny_batch(config, generator)
    loss_fn = torch.nn.BCEWithLogitsLoss()

    def compute_loss() -> torch.Tensor:
        logits = net(tokens, real)
        return loss_fn(logits[mask], labels[mask])

    net.zero_grad()
    compute_loss().backward()
    analytic = {
        name: (p.grad.clone() if p.grad is not None else torch.zeros_like(p))
        for name, p in net.named_parameters()
    }

    worst = 0.0
    with torch.no_grad():
        for name, param in net.named_parameters():
            flat = param.view(-1)
            grad = analytic[name].view(-1)
            for i in range(flat.numel()):
                original = flat[i].item()
                flat[i] = original + epsilon
                up = compute_loss().item()
                flat[i] = original - epsilon
                down = compute_loss().item()
                flat[i] = original
                fd = (up - down) / (2.0 * epsilon)
                a = grad[i].item()
                scale = max(abs(a), abs(fd))
                if scale < 1e-10:
                    continue
                err = abs(a - fd) / max(scale, GRAD_FLOOR)
                worst = max(worst, err)
    return worst
