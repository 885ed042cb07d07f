"""Readers and writers for the toolkit's exchange formats.

The neural package talks to the corpus toolkit only through its file
contracts: the ten-column corpus grammar, two-column ``.tags`` files,
and split manifest JSON. The readers here pull exactly what the models
need (forms, lemmas, per-instance spans, gold tag sequences); full
validation stays with the toolkit's own parser.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

SentenceId = tuple[str, int]


class DataError(ValueError):
    pass


@dataclass(frozen=True)
class InstanceRecord:
    trigger_span: tuple[int, int] | None
    sense: str | None
    event_head: int | None
    event_span: tuple[int, int] | None


@dataclass
class SentenceRecord:
    doc_id: str
    sent_id: int
    forms: list[str]
    lemmas: list[str]
    pos: list[str]
    instances: list[InstanceRecord] = field(default_factory=list)

    @property
    def sentence_id(self) -> SentenceId:
        return (self.doc_id, self.sent_id)

    def trigger_spans(self) -> list[tuple[int, int]]:
        return [i.trigger_span for i in self.instances if i.trigger_span is not None]

    def head_positions(self) -> list[int]:
        return [i.event_head for i in self.instances if i.event_head is not None]


def _cell_components(cell: str, n: int) -> list[str]:
    parts = cell.split("|")
    if len(parts) == n:
        return parts
    if len(parts) == 1:
        return parts * n
    raise DataError(f"cell {cell!r} does not align with {n} instance ids")


def _span_of(positions: list[int]) -> tuple[int, int] | None:
    if not positions:
        return None
    return (min(positions), max(positions))


def read_corpus(path: str | Path) -> list[SentenceRecord]:
    """Read a ten-column corpus file into light-weight records."""
    sentences: list[SentenceRecord] = []
    doc_id = ""
    auto_sent: dict[str, int] = {}
    pending_sent: int | None = None
    rows: list[list[str]] = []

    def flush():
        nonlocal rows, pending_sent
        if not rows:
            return
        sid = pending_sent if pending_sent is not None else auto_sent.get(doc_id, 0)
        auto_sent[doc_id] = sid + 1
        pending_sent = None
        record = SentenceRecord(
            doc_id, sid,
            forms=[r[1] for r in rows],
            lemmas=[r[2] for r in rows],
            pos=[r[3] for r in rows],
        )
        # collect per-instance cells
        trig: dict[int, dict[int, str]] = {}
        head: dict[int, dict[int, str]] = {}
        event: dict[int, dict[int, str]] = {}
        for pos_idx, r in enumerate(rows):
            id_cell = r[9]
            if id_cell == "_":
                continue
            ids = [int(p) for p in id_cell.split("|")]
            for store, cell in ((trig, r[6]), (head, r[7]), (event, r[8])):
                for inst_id, tag in zip(ids, _cell_components(cell, len(ids))):
                    if tag != "O":
                        store.setdefault(inst_id, {})[pos_idx] = tag
        for inst_id in sorted(set(trig) | set(head) | set(event)):
            trigger_positions = sorted(trig.get(inst_id, {}))
            sense = None
            for tag in trig.get(inst_id, {}).values():
                if "-" in tag:
                    sense = tag.split("-", 1)[1]
                    break
            head_positions = sorted(head.get(inst_id, {}))
            event_positions = sorted(
                p for p, t in event.get(inst_id, {}).items() if t.endswith("E")
            )
            record.instances.append(InstanceRecord(
                trigger_span=_span_of(trigger_positions),
                sense=sense,
                event_head=head_positions[0] if head_positions else None,
                event_span=_span_of(event_positions),
            ))
        sentences.append(record)
        rows = []

    with open(path, encoding="utf-8") as f:
        for line_no, raw in enumerate(f, start=1):
            line = raw.rstrip()
            if not line:
                flush()
                continue
            if line.startswith("# doc_id ="):
                flush()
                doc_id = line[len("# doc_id ="):].strip()
                continue
            if line.startswith("# sent_id ="):
                flush()
                pending_sent = int(line.partition("=")[2].strip())
                continue
            if line.startswith("#"):
                continue
            fields = line.split("\t")
            if len(fields) != 10:
                raise DataError(f"{path}:{line_no}: expected 10 columns, got {len(fields)}")
            rows.append(fields)
    flush()
    return sentences


@dataclass(frozen=True)
class TagBlock:
    doc_id: str
    sent_id: int
    overflow: int
    forms: tuple[str, ...]
    tags: tuple[str, ...]

    @property
    def sentence_id(self) -> SentenceId:
        return (self.doc_id, self.sent_id)


def read_tags(path: str | Path) -> tuple[str, list[TagBlock]]:
    """Read a ``.tags`` file; returns (scheme string, blocks)."""
    scheme: str | None = None
    blocks: list[TagBlock] = []
    doc_id = ""
    sent_id: int | None = None
    overflow = 0
    forms: list[str] = []
    tags: list[str] = []
    auto_sent: dict[str, int] = {}

    def flush():
        nonlocal forms, tags, sent_id, overflow
        if not forms:
            return
        sid = sent_id if sent_id is not None else auto_sent.get(doc_id, 0)
        if overflow == 0:
            auto_sent[doc_id] = sid + 1
        blocks.append(TagBlock(doc_id, sid, overflow, tuple(forms), tuple(tags)))
        forms, tags = [], []
        sent_id = None
        overflow = 0

    with open(path, encoding="utf-8") as f:
        for raw in f:
            line = raw.rstrip()
            if not line:
                flush()
                continue
            if line.startswith("# scheme ="):
                scheme = line.partition("=")[2].strip()
            elif line.startswith("# doc_id ="):
                flush()
                doc_id = line[len("# doc_id ="):].strip()
            elif line.startswith("# sent_id ="):
                flush()
                sent_id = int(line.partition("=")[2].strip())
            elif line.startswith("# overflow ="):
                overflow = int(line.partition("=")[2].strip())
            elif line.startswith("#"):
                continue
            else:
                form, _, tag = line.partition("\t")
                if not tag:
                    raise DataError(f"{path}: malformed row {line!r}")
                forms.append(form)
                tags.append(tag)
    flush()
    if scheme is None:
        raise DataError(f"{path}: missing '# scheme =' header")
    return scheme, blocks


def write_tags(path: str | Path, scheme: str, blocks: list[TagBlock]) -> None:
    with open(path, "w", encoding="utf-8") as f:
        f.write(f"# scheme = {scheme}\n")
        current_doc = None
        for block in blocks:
            if block.doc_id != current_doc:
                f.write(f"# doc_id = {block.doc_id}\n")
                current_doc = block.doc_id
            f.write(f"# sent_id = {block.sent_id}\n")
            if block.overflow:
                f.write(f"# overflow = {block.overflow}\n")
            for form, tag in zip(block.forms, block.tags):
                f.write(f"{form}\t{tag}\n")
            f.write("\n")


def read_manifest(path: str | Path) -> dict:
    with open(path, encoding="utf-8") as f:
        payload = json.load(f)
    test = [tuple([str(d), int(s)]) for d, s in payload["test"]]
    folds = [[tuple([str(d), int(s)]) for d, s in fold] for fold in payload["folds"]]
    return {"seed": payload.get("seed"), "test": test, "folds": folds}


def split_ids(manifest: dict, all_ids: list[SentenceId], split: str, fold: int = 0
              ) -> set[SentenceId]:
    test = set(manifest["test"])
    if split == "test":
        return test
    if split == "pool":
        return {sid for sid in all_ids if sid not in test}
    val = set(manifest["folds"][fold])
    if split == "val":
        return val
    if split == "train":
        return {sid for sid in all_ids if sid not in test and sid not in val}
    raise DataError(f"unknown split {split!r}")
