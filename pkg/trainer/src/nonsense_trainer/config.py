"""Training configuration with compact-model defaults."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field


@dataclass
class TrainConfig:
    # architecture (a miniature stand-in, around 1-2M parameters)
    d_model: int = 128
    num_heads: int = 4
    enc_layers: int = 2
    dec_layers: int = 2
    ffn_dim: int = 256
    dropout: float = 0.1

    # optimization
    lr: float = 1e-4
    batch_size: int = 64
    max_epochs: int = 30
    patience: int = 5  # epochs without validation improvement
    grad_clip: float = 1.0
    val_fraction: float = 0.05

    # sequence limits (training-time truncation)
    max_source_len: int = 256
    max_target_len: int = 64

    seed: int = 0
    ablate_input: bool = False  # replace every source with a constant stub

    def __post_init__(self) -> None:
        if min(self.d_model, self.num_heads, self.enc_layers, self.dec_layers,
               self.ffn_dim, self.batch_size, self.max_epochs) < 1:
            raise ValueError("model and optimization sizes must be positive")
        if self.d_model % self.num_heads:
            raise ValueError("d_model must be divisible by num_heads")
        if not 0.0 < self.val_fraction < 1.0:
            raise ValueError("val_fraction must be in (0, 1)")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "TrainConfig":
        return cls(**d)
