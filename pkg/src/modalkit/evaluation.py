"""Chunk-level precision/recall/F1 with labeled and unlabeled modes.

Chunk boundaries follow ConllEval semantics (see ``schemes.scan_chunks``);
a predicted chunk is correct iff a gold chunk matches its boundaries and
label exactly, one-to-one. Unlabeled mode erases sense labels (every
sense becomes ``modal``; role letters are kept) before matching, so it
measures modal/not-modal identification only.

Both the overall micro scores (ConllEval's headline numbers) and the
unweighted macro average over labels are reported; per-label scores use
gold-count support.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Sequence

from .corpus import Sentence
from .schemes import TagSequence, scan_chunks
from .taxonomy import TaxonomyError, sense_granularity

Tags = Sequence[str]


class EvalError(ValueError):
    pass


@dataclass(frozen=True)
class Chunk:
    sent: int
    start: int
    end: int
    label: str


@dataclass(frozen=True)
class LabelScore:
    precision: float
    recall: float
    f1: float
    gold: int
    pred: int
    correct: int


@dataclass
class ChunkMetrics:
    mode: str
    precision: float  # micro, in [0, 1]
    recall: float
    f1: float
    macro_f1: float
    n_gold: int
    n_pred: int
    n_correct: int
    n_tokens: int
    n_correct_tags: int
    per_label: dict[str, LabelScore] = field(default_factory=dict)

    @property
    def micro_f1(self) -> float:
        return self.f1

    @property
    def token_accuracy(self) -> float:
        return self.n_correct_tags / self.n_tokens if self.n_tokens else 0.0

    def as_dict(self) -> dict:
        pct = lambda x: round(100 * x, 4)
        return {
            "mode": self.mode,
            "micro": {"precision": pct(self.precision), "recall": pct(self.recall),
                      "f1": pct(self.f1)},
            "macro_f1": pct(self.macro_f1),
            "token_accuracy": pct(self.token_accuracy),
            "counts": {"gold": self.n_gold, "pred": self.n_pred,
                       "correct": self.n_correct, "tokens": self.n_tokens},
            "per_label": {
                label: {"precision": pct(s.precision), "recall": pct(s.recall),
                        "f1": pct(s.f1), "gold": s.gold, "pred": s.pred,
                        "correct": s.correct}
                for label, s in sorted(self.per_label.items())
            },
        }

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), indent=2, sort_keys=True)


def _tags_of(seq: TagSequence | Tags) -> Sequence[str]:
    return seq.tags if isinstance(seq, TagSequence) else seq


def _label_of(ctype: str) -> str:
    return ctype if ctype else "modal"


def unlabel(label: str) -> str:
    """Erase the sense component of a chunk label (unlabeled evaluation)."""
    if label.startswith("T-"):
        return "T"
    try:
        sense_granularity(label)
    except TaxonomyError:
        return label  # modal, T, E, H stay as they are
    return "modal"


def extract_chunks(seq: TagSequence | Tags, sent: int = 0, mode: str = "labeled") -> list[Chunk]:
    """Chunks of one sequence; ill-formed transitions are repaired tolerantly."""
    chunks = []
    for start, end, ctype in scan_chunks(_tags_of(seq)):
        label = _label_of(ctype)
        if mode == "unlabeled":
            label = unlabel(label)
        chunks.append(Chunk(sent, start, end, label))
    return chunks


def _prf(correct: int, pred: int, gold: int) -> tuple[float, float, float]:
    precision = correct / pred if pred else 0.0
    recall = correct / gold if gold else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return precision, recall, f1


def score(
    gold: Sequence[TagSequence | Tags],
    pred: Sequence[TagSequence | Tags],
    mode: str = "labeled",
) -> ChunkMetrics:
    """Score predicted tag sequences against gold, chunk by chunk."""
    if mode not in ("labeled", "unlabeled"):
        raise EvalError(f"mode must be 'labeled' or 'unlabeled', got {mode!r}")
    if len(gold) != len(pred):
        raise EvalError(f"{len(gold)} gold sentences vs {len(pred)} predicted")
    n_tokens = 0
    n_correct_tags = 0
    gold_counts: dict[str, int] = {}
    pred_counts: dict[str, int] = {}
    correct_counts: dict[str, int] = {}
    for i, (g, p) in enumerate(zip(gold, pred)):
        g_tags, p_tags = _tags_of(g), _tags_of(p)
        if len(g_tags) != len(p_tags):
            raise EvalError(
                f"sentence {i}: {len(g_tags)} gold tags vs {len(p_tags)} predicted"
            )
        n_tokens += len(g_tags)
        n_correct_tags += sum(1 for a, b in zip(g_tags, p_tags) if a == b)
        g_chunks = set(extract_chunks(g_tags, i, mode))
        p_chunks = set(extract_chunks(p_tags, i, mode))
        for c in g_chunks:
            gold_counts[c.label] = gold_counts.get(c.label, 0) + 1
        for c in p_chunks:
            pred_counts[c.label] = pred_counts.get(c.label, 0) + 1
        for c in g_chunks & p_chunks:
            correct_counts[c.label] = correct_counts.get(c.label, 0) + 1

    labels = sorted(set(gold_counts) | set(pred_counts))
    per_label = {}
    for label in labels:
        c = correct_counts.get(label, 0)
        p = pred_counts.get(label, 0)
        g = gold_counts.get(label, 0)
        per_label[label] = LabelScore(*_prf(c, p, g), gold=g, pred=p, correct=c)
    n_gold = sum(gold_counts.values())
    n_pred = sum(pred_counts.values())
    n_correct = sum(correct_counts.values())
    precision, recall, f1 = _prf(n_correct, n_pred, n_gold)
    macro = (
        sum(s.f1 for s in per_label.values()) / len(per_label) if per_label else 0.0
    )
    return ChunkMetrics(
        mode=mode, precision=precision, recall=recall, f1=f1, macro_f1=macro,
        n_gold=n_gold, n_pred=n_pred, n_correct=n_correct,
        n_tokens=n_tokens, n_correct_tags=n_correct_tags, per_label=per_label,
    )


def sentence_sense_accuracy(gold: Sequence[str], pred: Sequence[str]) -> float:
    """Exact-match fraction for one sense label per sentence."""
    if len(gold) != len(pred):
        raise EvalError(f"{len(gold)} gold labels vs {len(pred)} predicted")
    if not gold:
        return 1.0
    return sum(1 for g, p in zip(gold, pred) if g == p) / len(gold)


def breakdown_by_pos(
    gold: Sequence[TagSequence | Tags],
    pred: Sequence[TagSequence | Tags],
    sentences: Sequence[Sentence],
    mode: str = "labeled",
) -> dict[str, LabelScore]:
    """Per-POS chunk F1; each chunk is attributed to the POS of its first token."""
    if not (len(gold) == len(pred) == len(sentences)):
        raise EvalError("gold, predictions, and sentences must align")
    gold_counts: dict[str, int] = {}
    pred_counts: dict[str, int] = {}
    correct_counts: dict[str, int] = {}
    for i, (g, p, sent) in enumerate(zip(gold, pred, sentences)):
        g_chunks = set(extract_chunks(_tags_of(g), i, mode))
        p_chunks = set(extract_chunks(_tags_of(p), i, mode))
        pos_of = lambda c: sent.tokens[c.start].pos
        for c in g_chunks:
            gold_counts[pos_of(c)] = gold_counts.get(pos_of(c), 0) + 1
        for c in p_chunks:
            pred_counts[pos_of(c)] = pred_counts.get(pos_of(c), 0) + 1
        for c in g_chunks & p_chunks:
            correct_counts[pos_of(c)] = correct_counts.get(pos_of(c), 0) + 1
    out = {}
    for pos in sorted(set(gold_counts) | set(pred_counts)):
        c = correct_counts.get(pos, 0)
        p = pred_counts.get(pos, 0)
        g = gold_counts.get(pos, 0)
        out[pos] = LabelScore(*_prf(c, p, g), gold=g, pred=p, correct=c)
    return out


def format_report(metrics: ChunkMetrics) -> str:
    """Aligned plain-text report in the style of the ConllEval script."""
    lines = [
        f"processed {metrics.n_tokens} tokens with {metrics.n_gold} phrases; "
        f"found: {metrics.n_pred} phrases; correct: {metrics.n_correct}.",
        f"accuracy: {100 * metrics.token_accuracy:6.2f}%; "
        f"precision: {100 * metrics.precision:6.2f}%; "
        f"recall: {100 * metrics.recall:6.2f}%; "
        f"FB1: {100 * metrics.f1:6.2f}",
    ]
    for label, s in sorted(metrics.per_label.items()):
        lines.append(
            f"{label:>17}: precision: {100 * s.precision:6.2f}%; "
            f"recall: {100 * s.recall:6.2f}%; FB1: {100 * s.f1:6.2f}  {s.pred}"
        )
    lines.append(f"macro F1: {100 * metrics.macro_f1:6.2f}  (mode: {metrics.mode})")
    return "\n".join(lines) + "\n"
