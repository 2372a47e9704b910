"""Compact encoder-decoder transformer with tied embeddings."""

from __future__ import annotations

import torch
from torch import nn

from .config import TrainConfig
from .data import PAD

MAX_POSITIONS = 640


class MiniSeq2Seq(nn.Module):
    def __init__(self, vocab_size: int, cfg: TrainConfig):
        super().__init__()
        self.cfg = cfg
        self.vocab_size = vocab_size
        d = cfg.d_model
        self.embed = nn.Embedding(vocab_size, d, padding_idx=PAD)
        self.pos_enc = nn.Embedding(MAX_POSITIONS, d)
        self.pos_dec = nn.Embedding(MAX_POSITIONS, d)
        self.drop = nn.Dropout(cfg.dropout)
        enc_layer = nn.TransformerEncoderLayer(
            d, cfg.num_heads, cfg.ffn_dim, cfg.dropout,
            batch_first=True, norm_first=True,
        )
        dec_layer = nn.TransformerDecoderLayer(
            d, cfg.num_heads, cfg.ffn_dim, cfg.dropout,
            batch_first=True, norm_first=True,
        )
        # final norms keep the residual stream bounded for the tied projection
        self.encoder = nn.TransformerEncoder(
            enc_layer, cfg.enc_layers, norm=nn.LayerNorm(d), enable_nested_tensor=False
        )
        self.decoder = nn.TransformerDecoder(
            dec_layer, cfg.dec_layers, norm=nn.LayerNorm(d)
        )
        # small-std init keeps tied-projection logits near zero at the start
        nn.init.normal_(self.embed.weight, std=0.02)
        nn.init.normal_(self.pos_enc.weight, std=0.02)
        nn.init.normal_(self.pos_dec.weight, std=0.02)
        with torch.no_grad():
            self.embed.weight[PAD].zero_()

    def _embed(self, ids: torch.Tensor, pos_table: nn.Embedding) -> torch.Tensor:
        positions = torch.arange(ids.size(1), device=ids.device)
        return self.drop(self.embed(ids) + pos_table(positions)[None, :, :])

    def encode(self, src: torch.Tensor):
        pad_mask = src.eq(PAD)
        memory = self.encoder(self._embed(src, self.pos_enc),
                              src_key_padding_mask=pad_mask)
        return memory, pad_mask

    def decode(self, tgt_in: torch.Tensor, memory: torch.Tensor,
               memory_pad_mask: torch.Tensor) -> torch.Tensor:
        t = tgt_in.size(1)
        causal = torch.triu(
            torch.ones(t, t, dtype=torch.bool, device=tgt_in.device), 1
        )
        hidden = self.decoder(
            self._embed(tgt_in, self.pos_dec),
            memory,
            tgt_mask=causal,
            tgt_key_padding_mask=tgt_in.eq(PAD),
            memory_key_padding_mask=memory_pad_mask,
        )
        # output projection tied to the input embedding
        return hidden @ self.embed.weight.T

    def forward(self, src: torch.Tensor, tgt_in: torch.Tensor) -> torch.Tensor:
        memory, pad_mask = self.encode(src)
        return self.decode(tgt_in, memory, pad_mask)

    def parameter_count(self) -> int:
        return sum(p.numel() for p in self.parameters())


def build_model(vocab_size: int, cfg: TrainConfig) -> MiniSeq2Seq:
    torch.manual_seed(cfg.seed)
    return MiniSeq2Seq(vocab_size, cfg)
