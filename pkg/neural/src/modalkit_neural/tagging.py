"""Sequence-tagging fine-tuning: trigger, event-span, and joint schemes.

Training reads the toolkit's ``.tags`` encodings (including overflow
sequences) plus the corpus file for feature spans; predictions are
written back as ``.tags`` files that the toolkit's ``decode``/``score``
commands consume.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from pathlib import Path

import torch

from .config import TaggerConfig
from .data import (
    DataError,
    SentenceRecord,
    TagBlock,
    read_corpus,
    read_manifest,
    read_tags,
    split_ids,
    write_tags,
)
from .marking import mark_spans, tag_vocabulary
from .models import (
    TokenTagger,
    encode_batch,
    load_encoder,
    load_tokenizer,
    make_optimizer,
    set_seed,
)

logger = logging.getLogger(__name__)


@dataclass
class Example:
    doc_id: str
    sent_id: int
    stream: list[str]           # marked word stream fed to the encoder
    alignment: list[int | None]  # stream position -> original token index
    n_tokens: int
    labels: list[int] | None    # per original token; None at prediction time


def _identity_alignment(n: int) -> list[int | None]:
    return list(range(n))


def feature_spans(record: SentenceRecord, feature: str) -> list[tuple[tuple[int, int], str]]:
    """Spans to mark in the input, from gold or first-stage predictions."""
    if feature == "none":
        return []
    spans: list[tuple[tuple[int, int], str]] = []
    seen: set[int] = set()
    if feature == "head":
        wanted = [( (h, h), "head") for h in record.head_positions()]
    else:
        wanted = [(span, "trigger") for span in record.trigger_spans()]
    for span, role in wanted:
        positions = set(range(span[0], span[1] + 1))
        if positions & seen:
            continue  # overlapping feature spans cannot both be marked
        seen |= positions
        spans.append((span, role))
    return spans


def build_examples(
    blocks: list[TagBlock],
    features: dict[tuple[str, int], list[tuple[tuple[int, int], str]]],
    label_index: dict[str, int] | None,
) -> list[Example]:
    examples = []
    for block in blocks:
        spans = features.get(block.sentence_id, [])
        if spans:
            stream, alignment = mark_spans(list(block.forms), spans)
        else:
            stream = list(block.forms)
            alignment = _identity_alignment(len(block.forms))
        labels = None
        if label_index is not None:
            try:
                labels = [label_index[t] for t in block.tags]
            except KeyError as exc:
                raise DataError(
                    f"sentence {block.sentence_id}: tag {exc} is outside the "
                    f"scheme's label vocabulary"
                )
        examples.append(Example(block.doc_id, block.sent_id, stream, alignment,
                                len(block.forms), labels))
    return examples


def _batches(examples: list[Example], batch_size: int, generator=None):
    order = list(range(len(examples)))
    if generator is not None:
        order = torch.randperm(len(examples), generator=generator).tolist()
    for i in range(0, len(order), batch_size):
        yield [examples[j] for j in order[i : i + batch_size]]


def _labels_tensor(chunk: list[Example], n_words: int, device) -> torch.Tensor:
    out = torch.full((len(chunk), n_words), -100, dtype=torch.long, device=device)
    for b, ex in enumerate(chunk):
        out[b, : len(ex.labels)] = torch.tensor(ex.labels[:n_words], device=device)
    return out


def _run_predictions(model, tokenizer, examples, labels, batch_size, max_length,
                     device) -> list[list[str]]:
    model.eval()
    out: list[list[str]] = []
    for chunk in _batches(examples, batch_size):
        batch = encode_batch(
            tokenizer, [ex.stream for ex in chunk], [ex.alignment for ex in chunk],
            max_length, device,
        )
        for ex, ids in zip(chunk, model.predict(batch)):
            tags = [labels[i] for i in ids]
            tags.extend("O" for _ in range(ex.n_tokens - len(tags)))
            out.append(tags)
    return out


# span F1 used only to pick the best epoch; reported scores always come
# from the toolkit's scorer
def _selection_f1(gold: list[list[str]], pred: list[list[str]]) -> float:
    def spans(tags):
        found = set()
        start, label = None, None
        for i, tag in enumerate(tags + ["O"]):
            prefix, _, ctype = tag.partition("-")
            boundary = prefix in ("O", "B", "S") or (label is not None and ctype != label)
            if start is not None and boundary:
                found.add((start, i - 1, label))
                start, label = None, None
            if prefix in ("B", "S", "I", "E") and start is None:
                start, label = i, ctype
            if prefix in ("S", "E") and start is not None:
                found.add((start, i, label))
                start, label = None, None
            if prefix == "H":
                found.add((i, i, "H"))
        return found

    n_gold = n_pred = n_correct = 0
    for g, p in zip(gold, pred):
        gs, ps = spans(g), spans(p)
        n_gold += len(gs)
        n_pred += len(ps)
        n_correct += len(gs & ps)
    if not n_gold or not n_pred or not n_correct:
        return 0.0
    precision = n_correct / n_pred
    recall = n_correct / n_gold
    return 2 * precision * recall / (precision + recall)


def train_tagger(config: TaggerConfig, out_dir: str | Path) -> Path:
    """Fine-tune a tagger; returns the artifact directory."""
    set_seed(config.seed)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    scheme, blocks = read_tags(config.tags)
    if scheme != config.scheme:
        raise DataError(f"tags file is {scheme!r} but config expects {config.scheme!r}")
    records = {r.sentence_id: r for r in read_corpus(config.corpus)}
    manifest = read_manifest(config.manifest)
    all_ids = [r for r in records]
    train_ids = split_ids(manifest, all_ids, "train", config.fold)
    val_ids = split_ids(manifest, all_ids, "val", config.fold)

    source = records
    if config.feature != "none" and config.feature_file:
        source = {r.sentence_id: r for r in read_corpus(config.feature_file)}
    features = {
        sid: feature_spans(source[sid], config.feature) if sid in source else []
        for sid in records
    }

    labels = tag_vocabulary(config.scheme)
    label_index = {t: i for i, t in enumerate(labels)}
    train_blocks = [b for b in blocks if b.sentence_id in train_ids]
    val_blocks = [b for b in blocks if b.sentence_id in val_ids and b.overflow == 0]
    train_examples = build_examples(train_blocks, features, label_index)
    val_examples = build_examples(val_blocks, features, label_index)
    val_gold = [[labels[i] for i in ex.labels] for ex in val_examples]

    tokenizer = load_tokenizer(config.encoder)
    encoder = load_encoder(config.encoder, tokenizer)
    model = TokenTagger(encoder, len(labels), use_crf=config.crf).to(config.device)
    optimizer = make_optimizer(config.optimizer, model.parameters(), config.learning_rate)
    generator = torch.Generator().manual_seed(config.seed)

    history = []
    best = (-1.0, -1, None)  # (f1, epoch, state_dict)
    for epoch in range(config.epochs):
        model.train()
        total_loss = 0.0
        n_batches = 0
        for chunk in _batches(train_examples, config.batch_size, generator):
            batch = encode_batch(
                tokenizer, [ex.stream for ex in chunk], [ex.alignment for ex in chunk],
                config.max_length, config.device,
            )
            loss = model.loss(batch, _labels_tensor(chunk, batch.n_words, config.device))
            optimizer.zero_grad()
            loss.backward()
            optimizer.step()
            total_loss += float(loss.detach())
            n_batches += 1
        val_pred = _run_predictions(model, tokenizer, val_examples, labels,
                                    config.batch_size, config.max_length, config.device)
        val_f1 = _selection_f1(val_gold, val_pred) if val_examples else 0.0
        history.append({
            "epoch": epoch,
            "train_loss": round(total_loss / max(n_batches, 1), 6),
            "val_span_f1": round(val_f1, 6),
        })
        logger.info("epoch %d: loss %.4f, val span F1 %.4f",
                    epoch, history[-1]["train_loss"], val_f1)
        if config.select_best and val_f1 > best[0]:
            best = (val_f1, epoch, {k: v.detach().clone() for k, v in model.state_dict().items()})

    if config.select_best and best[2] is not None:
        model.load_state_dict(best[2])

    encoder_dir = out / "encoder"
    model.encoder.save_pretrained(encoder_dir)
    tokenizer.save_pretrained(out / "tokenizer")
    torch.save(
        {"classifier": model.classifier.state_dict(),
         "crf": model.crf.state_dict() if model.crf is not None else None},
        out / "head.pt",
    )
    meta = {
        "kind": "tagger",
        "scheme": config.scheme,
        "labels": labels,
        "feature": config.feature,
        "crf": config.crf,
        "max_length": config.max_length,
        "best_epoch": best[1] if config.select_best else config.epochs - 1,
    }
    (out / "meta.json").write_text(json.dumps(meta, indent=2, sort_keys=True))
    (out / "training_log.json").write_text(json.dumps(history, indent=2))
    return out


@dataclass
class LoadedTagger:
    model: TokenTagger
    tokenizer: object
    labels: list[str]
    meta: dict


def load_tagger(artifact: str | Path, device: str = "cpu") -> LoadedTagger:
    artifact = Path(artifact)
    meta = json.loads((artifact / "meta.json").read_text())
    tokenizer = load_tokenizer(str(artifact / "tokenizer"))
    encoder = load_encoder(str(artifact / "encoder"), tokenizer)
    model = TokenTagger(encoder, len(meta["labels"]), use_crf=meta["crf"]).to(device)
    head = torch.load(artifact / "head.pt", map_location=device, weights_only=True)
    model.classifier.load_state_dict(head["classifier"])
    if meta["crf"]:
        model.crf.load_state_dict(head["crf"])
    model.eval()
    return LoadedTagger(model=model, tokenizer=tokenizer, labels=meta["labels"], meta=meta)


def predict_tagger(
    loaded: LoadedTagger,
    corpus_path: str | Path,
    out_path: str | Path,
    manifest_path: str | Path | None = None,
    split: str = "test",
    fold: int = 0,
    feature_file: str | Path | None = None,
    batch_size: int = 8,
    device: str = "cpu",
) -> Path:
    """Tag a corpus (or one split of it) and write a ``.tags`` file."""
    records = read_corpus(corpus_path)
    if manifest_path:
        manifest = read_manifest(manifest_path)
        wanted = split_ids(manifest, [r.sentence_id for r in records], split, fold)
        records = [r for r in records if r.sentence_id in wanted]
    feature = loaded.meta["feature"]
    source = {r.sentence_id: r for r in records}
    if feature != "none" and feature_file:
        source = {r.sentence_id: r for r in read_corpus(feature_file)}
    blocks = [
        TagBlock(r.doc_id, r.sent_id, 0, tuple(r.forms), ("O",) * len(r.forms))
        for r in records
    ]
    features = {
        r.sentence_id: feature_spans(source[r.sentence_id], feature)
        if r.sentence_id in source else []
        for r in records
    }
    examples = build_examples(blocks, features, None)
    predictions = _run_predictions(loaded.model, loaded.tokenizer, examples,
                                   loaded.labels, batch_size,
                                   loaded.meta["max_length"], device)
    out_blocks = [
        TagBlock(r.doc_id, r.sent_id, 0, tuple(r.forms), tuple(tags))
        for r, tags in zip(records, predictions)
    ]
    write_tags(out_path, loaded.meta["scheme"], out_blocks)
    return Path(out_path)
