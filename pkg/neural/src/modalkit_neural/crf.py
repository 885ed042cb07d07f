"""Linear-chain CRF layer: forward-algorithm NLL and Viterbi decoding.

Emissions are word-level scores of shape (batch, length, num_tags);
``mask`` is a bool tensor marking real positions (right-padded batches,
at least one real position per row).
"""

from __future__ import annotations

import torch
from torch import nn


class LinearChainCRF(nn.Module):
    def __init__(self, num_tags: int):
        super().__init__()
        self.num_tags = num_tags
        self.start = nn.Parameter(torch.zeros(num_tags))
        self.end = nn.Parameter(torch.zeros(num_tags))
        self.transitions = nn.Parameter(torch.zeros(num_tags, num_tags))

    def _score(self, emissions, tags, mask):
        batch, length, _ = emissions.shape
        idx = torch.arange(batch, device=emissions.device)
        score = self.start[tags[:, 0]] + emissions[idx, 0, tags[:, 0]]
        for t in range(1, length):
            step = (
                self.transitions[tags[:, t - 1], tags[:, t]]
                + emissions[idx, t, tags[:, t]]
            )
            score = score + step * mask[:, t]
        last = mask.long().sum(dim=1) - 1
        score = score + self.end[tags[idx, last]]
        return score

    def _log_partition(self, emissions, mask):
        batch, length, _ = emissions.shape
        alpha = self.start.unsqueeze(0) + emissions[:, 0]
        for t in range(1, length):
            next_alpha = torch.logsumexp(
                alpha.unsqueeze(2) + self.transitions.unsqueeze(0), dim=1
            ) + emissions[:, t]
            keep = mask[:, t].unsqueeze(1)
            alpha = torch.where(keep, next_alpha, alpha)
        return torch.logsumexp(alpha + self.end.unsqueeze(0), dim=1)

    def nll(self, emissions, tags, mask) -> torch.Tensor:
        """Mean negative log-likelihood of the gold tag sequences."""
        mask = mask.bool()
        gold = self._score(emissions, tags, mask.float())
        log_z = self._log_partition(emissions, mask)
        return (log_z - gold).mean()

    @torch.no_grad()
    def decode(self, emissions, mask) -> list[list[int]]:
        """Viterbi-best tag sequence per batch row."""
        mask = mask.bool()
        batch, length, _ = emissions.shape
        lengths = mask.long().sum(dim=1)
        out = []
        for b in range(batch):
            n = int(lengths[b])
            scores = self.start + emissions[b, 0]
            backpointers = []
            for t in range(1, n):
                total = scores.unsqueeze(1) + self.transitions + emissions[b, t].unsqueeze(0)
                scores, best_prev = total.max(dim=0)
                backpointers.append(best_prev)
            scores = scores + self.end
            tag = int(scores.argmax())
            path = [tag]
            for best_prev in reversed(backpointers):
                tag = int(best_prev[tag])
                path.append(tag)
            out.append(path[::-1])
        return out
