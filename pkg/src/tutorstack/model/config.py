"""Model configuration and token-channel layout.

Every input position carries six categorical channels (question, skill,
response, mastery bucket, ability cluster, difficulty level). Each channel
has its own embedding table with a trailing PAD slot; question and skill
also reserve an UNK slot for ids unseen at training time, and the response
channel reserves MASK for hidden / to-be-predicted responses.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field


@dataclass(frozen=True)
class ModelConfig:
    num_questions: int
    num_skills: int
    embed_dim: int = 64
    num_layers: int = 2
    num_heads: int = 4
    ffn_dim: int = 256
    max_seq_len: int = 128
    conv_kernel: int = 7
    leaky_slope: float = 0.01
    dropout: float = 0.1
    mastery_buckets: int = 10
    difficulty_levels: int = 10
    k_clusters: int = 5

    def __post_init__(self):
        if self.embed_dim % self.num_heads != 0:
            raise ValueError(
                f"embed_dim {self.embed_dim} must be divisible by num_heads {self.num_heads}"
            )
        if self.conv_kernel % 2 == 0:
            raise ValueError(f"conv_kernel must be odd, got {self.conv_kernel}")
        for name in ("num_questions", "num_skills", "embed_dim", "num_layers",
                     "num_heads", "ffn_dim", "max_seq_len", "conv_kernel",
                     "mastery_buckets", "difficulty_levels", "k_clusters"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")

    # question channel: [0, nq) real | nq UNK | nq+1 PAD
    @property
    def question_unk(self) -> int:
        return self.num_questions

    @property
    def question_pad(self) -> int:
        return self.num_questions + 1

    @property
    def question_vocab(self) -> int:
        return self.num_questions + 2

    # skill channel: [0, ns) real | ns UNK | ns+1 PAD
    @property
    def skill_unk(self) -> int:
        return self.num_skills

    @property
    def skill_pad(self) -> int:
        return self.num_skills + 1

    @property
    def skill_vocab(self) -> int:
        return self.num_skills + 2

    # response channel: 0 incorrect | 1 correct | 2 MASK | 3 PAD
    RESPONSE_INCORRECT: int = field(default=0, init=False, repr=False)
    RESPONSE_CORRECT: int = field(default=1, init=False, repr=False)
    RESPONSE_MASK: int = field(default=2, init=False, repr=False)
    RESPONSE_PAD: int = field(default=3, init=False, repr=False)

    @property
    def response_vocab(self) -> int:
        return 4

    @property
    def mastery_pad(self) -> int:
        return self.mastery_buckets

    @property
    def mastery_vocab(self) -> int:
        return self.mastery_buckets + 1

    @property
    def cluster_pad(self) -> int:
        return self.k_clusters

    @property
    def cluster_vocab(self) -> int:
        return self.k_clusters + 1

    @property
    def difficulty_pad(self) -> int:
        return self.difficulty_levels

    @property
    def difficulty_vocab(self) -> int:
        return self.difficulty_levels + 1

    def to_dict(self) -> dict:
        return {k: v for k, v in asdict(self).items() if not k.startswith("RESPONSE")}

    @classmethod
    def from_dict(cls, data: dict) -> "ModelConfig":
        return cls(**data)


def tiny_config(**overrides) -> ModelConfig:
    """The 64-bit gradient-check model: d=8, 1 layer, 1 head, length 4."""
    base = dict(
        num_questions=4,
        num_skills=3,
        embed_dim=8,
        num_layers=1,
        num_heads=1,
        ffn_dim=16,
        max_seq_len=4,
        conv_kernel=3,
        dropout=0.0,
        k_clusters=2,
    )
    base.update(overrides)
    return ModelConfig(**base)
