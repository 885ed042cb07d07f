"""Encoder-based models: token tagger (optional CRF) and sequence classifier.

The encoder is any HuggingFace model usable with AutoModel (a hub name
or a local directory). Word streams are tokenized with
``is_split_into_words=True``; each original token is represented by its
first sub-token's hidden state, so emissions and losses live at the
word level regardless of the sub-word segmentation.
"""

from __future__ import annotations

import torch
from torch import nn
from transformers import AutoModel, AutoTokenizer

from .crf import LinearChainCRF
from .marking import MARKERS

IGNORE = -100


def load_tokenizer(name_or_path: str):
    """Tokenizer with the reserved span markers registered."""
    tokenizer = AutoTokenizer.from_pretrained(name_or_path)
    tokenizer.add_special_tokens({"additional_special_tokens": MARKERS})
    return tokenizer


def load_encoder(name_or_path: str, tokenizer):
    encoder = AutoModel.from_pretrained(name_or_path)
    if encoder.get_input_embeddings().num_embeddings < len(tokenizer):
        encoder.resize_token_embeddings(len(tokenizer))
    return encoder


class Batch:
    """Tokenized batch with word-level gather indices.

    ``word_index[b, k]`` is the sub-token position holding original
    token k of sample b (0 where absent); ``word_mask`` marks the
    original tokens that survived truncation.
    """

    def __init__(self, enc, streams, alignments, device):
        self.enc = {k: v.to(device) for k, v in enc.items()}
        batch = len(streams)
        n_words = max((max((a for a in al if a is not None), default=-1) + 1)
                      for al in alignments)
        n_words = max(n_words, 1)
        self.word_index = torch.zeros(batch, n_words, dtype=torch.long, device=device)
        self.word_mask = torch.zeros(batch, n_words, dtype=torch.bool, device=device)
        for b in range(batch):
            seen: set[int] = set()
            for sub_pos, word_id in enumerate(enc.word_ids(b)):
                if word_id is None or word_id in seen:
                    continue
                seen.add(word_id)
                orig = alignments[b][word_id]
                if orig is not None:
                    self.word_index[b, orig] = sub_pos
                    self.word_mask[b, orig] = True

    @property
    def n_words(self) -> int:
        return self.word_index.shape[1]


def encode_batch(tokenizer, streams, alignments, max_length, device) -> Batch:
    """Tokenize marked word streams and build word-level gather indices.

    ``alignments[b]`` maps stream position -> original token index (None
    for markers), as produced by ``marking.mark_spans``; pass identity
    alignments for unmarked streams.
    """
    enc = tokenizer(
        [list(s) for s in streams],
        is_split_into_words=True,
        padding=True,
        truncation=True,
        max_length=max_length,
        return_tensors="pt",
    )
    return Batch(enc, streams, alignments, device)


class TokenTagger(nn.Module):
    def __init__(self, encoder, num_tags: int, use_crf: bool, dropout: float = 0.1):
        super().__init__()
        self.encoder = encoder
        self.dropout = nn.Dropout(dropout)
        self.classifier = nn.Linear(encoder.config.hidden_size, num_tags)
        self.crf = LinearChainCRF(num_tags) if use_crf else None

    def emissions(self, batch: Batch) -> torch.Tensor:
        hidden = self.encoder(**batch.enc).last_hidden_state
        gathered = hidden.gather(
            1, batch.word_index.unsqueeze(-1).expand(-1, -1, hidden.shape[-1])
        )
        return self.classifier(self.dropout(gathered))

    def loss(self, batch: Batch, labels: torch.Tensor) -> torch.Tensor:
        emissions = self.emissions(batch)
        if self.crf is not None:
            tags = labels.clamp(min=0)
            return self.crf.nll(emissions, tags, batch.word_mask)
        flat = emissions.reshape(-1, emissions.shape[-1])
        target = labels.masked_fill(~batch.word_mask, IGNORE).reshape(-1)
        return nn.functional.cross_entropy(flat, target, ignore_index=IGNORE)

    @torch.no_grad()
    def predict(self, batch: Batch) -> list[list[int]]:
        emissions = self.emissions(batch)
        lengths = batch.word_mask.long().sum(dim=1)
        if self.crf is not None:
            paths = self.crf.decode(emissions, batch.word_mask)
            return [p[: int(n)] for p, n in zip(paths, lengths)]
        best = emissions.argmax(dim=-1)
        return [best[b, : int(n)].tolist() for b, n in enumerate(lengths)]


class SequenceClassifier(nn.Module):
    def __init__(self, encoder, num_labels: int, dropout: float = 0.1):
        super().__init__()
        self.encoder = encoder
        self.dropout = nn.Dropout(dropout)
        self.classifier = nn.Linear(encoder.config.hidden_size, num_labels)

    def logits(self, enc: dict) -> torch.Tensor:
        hidden = self.encoder(**enc).last_hidden_state
        return self.classifier(self.dropout(hidden[:, 0]))

    def loss(self, enc: dict, labels: torch.Tensor) -> torch.Tensor:
        return nn.functional.cross_entropy(self.logits(enc), labels)

    @torch.no_grad()
    def predict(self, enc: dict) -> list[int]:
        return self.logits(enc).argmax(dim=-1).tolist()


def make_optimizer(name: str, parameters, lr: float):
    if name == "adam":
        return torch.optim.Adam(parameters, lr=lr)
    return torch.optim.AdamW(parameters, lr=lr)


def set_seed(seed: int) -> None:
    import random

    import numpy as np

    random.seed(seed)
    np.random.seed(seed)
    torch.manual_seed(seed)
