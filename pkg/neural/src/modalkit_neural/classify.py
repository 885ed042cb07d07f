"""Sense classification with oracle triggers: the six input variants.

``vote`` is a lemma-majority baseline needing no encoder. The encoder
variants differ only in how the input stream is built:

* ``token``        the trigger words alone, out of context
* ``context``      the full sentence with the trigger span marked
* ``masked``       the full sentence with the trigger words masked out
* ``trigger_plus_head``  trigger words and event-head word only, marked
* ``full_plus_head``     full sentence with trigger and head marked
"""

from __future__ import annotations

import json
import logging
from collections import Counter
from dataclasses import dataclass
from pathlib import Path

import torch

from .config import ClassifierConfig
from .data import (
    DataError,
    InstanceRecord,
    SentenceRecord,
    TagBlock,
    read_corpus,
    read_manifest,
    split_ids,
    write_tags,
)
from .marking import assert_masked, mark_spans, mask_spans, sense_labels
from .models import (
    SequenceClassifier,
    load_encoder,
    load_tokenizer,
    make_optimizer,
    set_seed,
)

logger = logging.getLogger(__name__)

_CONFLATION = {"desires_wishes": "intentions", "plans_goals": "intentions"}
_BRANCH = {
    "rules_norms": "priority",
    "desires_wishes": "priority",
    "plans_goals": "priority",
    "intentions": "priority",
    "knowledge": "plausibility",
    "world": "plausibility",
    "agent": "plausibility",
}


def project_label(sense: str, granularity: str) -> str:
    if granularity == "fine_full":
        return sense
    if granularity == "fine_conflated":
        return _CONFLATION.get(sense, sense)
    if granularity == "coarse":
        return _BRANCH[sense]
    raise DataError(f"unsupported granularity {granularity!r}")


@dataclass
class ClassifyExample:
    doc_id: str
    sent_id: int
    instance_index: int
    trigger_span: tuple[int, int]
    lemma_key: tuple[str, ...]
    stream: list[str]
    gold: str | None


def _require_head(inst: InstanceRecord, record: SentenceRecord, variant: str) -> int:
    if inst.event_head is None:
        raise DataError(
            f"sentence {record.sentence_id}: instance at {inst.trigger_span} has "
            f"no event head, required by the {variant!r} variant"
        )
    return inst.event_head


def build_stream(record: SentenceRecord, inst: InstanceRecord, variant: str,
                 mask_token: str) -> list[str]:
    span = inst.trigger_span
    trigger_words = record.forms[span[0] : span[1] + 1]
    if variant in ("token", "vote"):  # vote never feeds an encoder
        return list(trigger_words)
    if variant == "context":
        stream, _ = mark_spans(record.forms, [(span, "trigger")])
        return stream
    if variant == "masked":
        stream = mask_spans(record.forms, [span], mask_token)
        assert_masked(stream, record.forms, [span])
        return stream
    if variant == "trigger_plus_head":
        head = _require_head(inst, record, variant)
        return ["<t>", *trigger_words, "</t>", "<h>", record.forms[head], "</h>"]
    if variant == "full_plus_head":
        head = _require_head(inst, record, variant)
        spans = [(span, "trigger")]
        if not (span[0] <= head <= span[1]):
            spans.append(((head, head), "head"))
        stream, _ = mark_spans(record.forms, spans)
        return stream
    raise DataError(f"unknown variant {variant!r}")


def collect_examples(records: list[SentenceRecord], variant: str, granularity: str,
                     mask_token: str, with_gold: bool = True) -> list[ClassifyExample]:
    examples = []
    for record in records:
        for k, inst in enumerate(record.instances):
            if inst.trigger_span is None:
                continue
            gold = None
            if with_gold:
                if inst.sense is None:
                    continue
                gold = project_label(inst.sense, granularity)
            span = inst.trigger_span
            examples.append(ClassifyExample(
                doc_id=record.doc_id,
                sent_id=record.sent_id,
                instance_index=k,
                trigger_span=span,
                lemma_key=tuple(
                    l.lower() for l in record.lemmas[span[0] : span[1] + 1]
                ),
                stream=build_stream(record, inst, variant, mask_token),
                gold=gold,
            ))
    return examples


# ---------------------------------------------------------------------------
# vote baseline


def train_vote(examples: list[ClassifyExample]) -> dict:
    by_lemma: dict[tuple[str, ...], Counter] = {}
    overall: Counter = Counter()
    for ex in examples:
        by_lemma.setdefault(ex.lemma_key, Counter())[ex.gold] += 1
        overall[ex.gold] += 1
    fallback = min(overall.items(), key=lambda kv: (-kv[1], kv[0]))[0] if overall else None
    return {"by_lemma": by_lemma, "fallback": fallback}


def predict_vote(model: dict, examples: list[ClassifyExample]) -> list[str]:
    out = []
    for ex in examples:
        table = model["by_lemma"].get(ex.lemma_key)
        if table:
            out.append(min(table.items(), key=lambda kv: (-kv[1], kv[0]))[0])
        else:
            out.append(model["fallback"])
    return out


# ---------------------------------------------------------------------------
# encoder variants


def _batches(n: int, batch_size: int, generator=None):
    order = torch.randperm(n, generator=generator).tolist() if generator else list(range(n))
    for i in range(0, n, batch_size):
        yield order[i : i + batch_size]


def _encode(tokenizer, streams, max_length, device):
    enc = tokenizer(
        [list(s) for s in streams],
        is_split_into_words=True,
        padding=True,
        truncation=True,
        max_length=max_length,
        return_tensors="pt",
    )
    return {k: v.to(device) for k, v in enc.items()}


def run_classifier(config: ClassifierConfig, out_dir: str | Path) -> dict:
    """Train one variant on the fold's train split, evaluate on val and test.

    Returns a summary dict (also written to ``out_dir``) and emits test
    predictions both as JSON and as a trigger-scheme ``.tags`` file the
    toolkit can decode and score.
    """
    set_seed(config.seed)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    records = read_corpus(config.corpus)
    manifest = read_manifest(config.manifest)
    all_ids = [r.sentence_id for r in records]
    parts = {
        split: split_ids(manifest, all_ids, split, config.fold)
        for split in ("train", "val", "test")
    }

    labels = sense_labels(config.granularity)
    label_index = {l: i for i, l in enumerate(labels)}

    if config.variant == "vote":
        mask_token = "<mask>"
        tokenizer = None
        model = None
    else:
        tokenizer = load_tokenizer(config.encoder)
        mask_token = tokenizer.mask_token or "<mask>"

    examples = {
        split: collect_examples(
            [r for r in records if r.sentence_id in parts[split]],
            config.variant, config.granularity, mask_token,
        )
        for split in parts
    }

    if config.variant == "vote":
        vote = train_vote(examples["train"])
        predictions = {s: predict_vote(vote, examples[s]) for s in ("val", "test")}
    else:
        encoder = load_encoder(config.encoder, tokenizer)
        model = SequenceClassifier(encoder, len(labels)).to(config.device)
        optimizer = make_optimizer(config.optimizer, model.parameters(),
                                   config.learning_rate)
        generator = torch.Generator().manual_seed(config.seed)
        train = examples["train"]
        target = torch.tensor([label_index[ex.gold] for ex in train])
        best = (-1.0, None)
        history = []
        for epoch in range(config.epochs):
            model.train()
            total = 0.0
            n_batches = 0
            for idx in _batches(len(train), config.batch_size, generator):
                enc = _encode(tokenizer, [train[i].stream for i in idx],
                              config.max_length, config.device)
                loss = model.loss(enc, target[idx].to(config.device))
                optimizer.zero_grad()
                loss.backward()
                optimizer.step()
                total += float(loss.detach())
                n_batches += 1
            val_acc = _accuracy(model, tokenizer, examples["val"], labels, config)
            history.append({"epoch": epoch,
                            "train_loss": round(total / max(n_batches, 1), 6),
                            "val_accuracy": round(val_acc, 6)})
            logger.info("epoch %d: loss %.4f, val acc %.4f",
                        epoch, history[-1]["train_loss"], val_acc)
            if config.select_best and val_acc > best[0]:
                best = (val_acc, {k: v.detach().clone()
                                  for k, v in model.state_dict().items()})
        if config.select_best and best[1] is not None:
            model.load_state_dict(best[1])
        (out / "training_log.json").write_text(json.dumps(history, indent=2))
        predictions = {
            s: _predict(model, tokenizer, examples[s], labels, config)
            for s in ("val", "test")
        }

    summary = {"variant": config.variant, "granularity": config.granularity}
    for split in ("val", "test"):
        gold = [ex.gold for ex in examples[split]]
        pred = predictions[split]
        correct = sum(1 for g, p in zip(gold, pred) if g == p)
        summary[f"{split}_n"] = len(gold)
        summary[f"{split}_accuracy"] = round(correct / len(gold), 6) if gold else 0.0
    (out / "summary.json").write_text(json.dumps(summary, indent=2, sort_keys=True))

    payload = [
        {"doc_id": ex.doc_id, "sent_id": ex.sent_id, "instance": ex.instance_index,
         "trigger_span": list(ex.trigger_span), "gold": ex.gold, "pred": p}
        for ex, p in zip(examples["test"], predictions["test"])
    ]
    (out / "test_predictions.json").write_text(json.dumps(payload, indent=2))
    _write_prediction_tags(out / "test_predictions.tags", records, parts["test"],
                           examples["test"], predictions["test"], config.granularity)
    return summary


def _accuracy(model, tokenizer, examples, labels, config) -> float:
    if not examples:
        return 0.0
    pred = _predict(model, tokenizer, examples, labels, config)
    return sum(1 for ex, p in zip(examples, pred) if ex.gold == p) / len(examples)


def _predict(model, tokenizer, examples, labels, config) -> list[str]:
    model.eval()
    out = []
    for i in range(0, len(examples), config.batch_size):
        chunk = examples[i : i + config.batch_size]
        enc = _encode(tokenizer, [ex.stream for ex in chunk],
                      config.max_length, config.device)
        out.extend(labels[j] for j in model.predict(enc))
    return out


def _write_prediction_tags(path, records, test_ids, examples, predictions,
                           granularity) -> None:
    """Oracle trigger spans with predicted senses, as a trigger-scheme file."""
    by_sentence: dict[tuple[str, int], list[tuple[tuple[int, int], str]]] = {}
    for ex, pred in zip(examples, predictions):
        by_sentence.setdefault((ex.doc_id, ex.sent_id), []).append(
            (ex.trigger_span, pred)
        )
    blocks = []
    for record in records:
        if record.sentence_id not in test_ids:
            continue
        n = len(record.forms)
        sequences: list[list[str]] = [["O"] * n]
        for span, sense in sorted(by_sentence.get(record.sentence_id, [])):
            painted = None
            for tags in sequences:
                if all(tags[i] == "O" for i in range(span[0], span[1] + 1)):
                    painted = tags
                    break
            if painted is None:
                painted = ["O"] * n
                sequences.append(painted)
            if span[0] == span[1]:
                painted[span[0]] = f"S-{sense}"
            else:
                painted[span[0]] = f"B-{sense}"
                for i in range(span[0] + 1, span[1]):
                    painted[i] = f"I-{sense}"
                painted[span[1]] = f"E-{sense}"
        for k, tags in enumerate(sequences):
            blocks.append(TagBlock(record.doc_id, record.sent_id, k,
                                   tuple(record.forms), tuple(tags)))
    write_tags(path, f"trigger_biose:{granularity}", blocks)
