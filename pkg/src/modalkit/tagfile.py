"""Encoded tag files: the model-facing exchange format.

Two tab-separated columns, ``FORM`` and ``TAG``, one token per row, blank
line between sentences, with comment headers::

    # scheme = trigger_biose:fine_conflated
    # doc_id = <string>         before each document
    # sent_id = <int>           before each sentence
    # overflow = <int>          extra training sequence for a sentence

Overflow blocks repeat a sentence's tokens with the tags of instances
that could not share the primary sequence; they are training-only and
are skipped when aligning predictions against gold.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, TextIO

from .schemes import Scheme, TagSequence, parse_scheme


class TagFileError(ValueError):
    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


@dataclass(frozen=True)
class TaggedBlock:
    doc_id: str
    sent_id: int
    overflow: int  # 0 for the primary sequence
    forms: tuple[str, ...]
    tags: tuple[str, ...]


def write_tagfile(
    scheme: Scheme,
    blocks: Iterable[TaggedBlock],
    out: TextIO,
) -> None:
    out.write(f"# scheme = {scheme}\n")
    current_doc: str | None = None
    for block in blocks:
        if block.doc_id != current_doc:
            out.write(f"# doc_id = {block.doc_id}\n")
            current_doc = block.doc_id
        out.write(f"# sent_id = {block.sent_id}\n")
        if block.overflow:
            out.write(f"# overflow = {block.overflow}\n")
        for form, tag in zip(block.forms, block.tags):
            out.write(f"{form}\t{tag}\n")
        out.write("\n")


def read_tagfile(source: TextIO | str) -> tuple[Scheme, list[TaggedBlock]]:
    lines = source.splitlines() if isinstance(source, str) else [
        line.rstrip("\n") for line in source
    ]
    scheme: Scheme | None = None
    blocks: list[TaggedBlock] = []
    doc_id = ""
    sent_id: int | None = None
    overflow = 0
    forms: list[str] = []
    tags: list[str] = []
    auto_sent: dict[str, int] = {}

    def flush(line_no: int) -> None:
        nonlocal sent_id, overflow, forms, tags
        if not forms:
            return
        sid = sent_id if sent_id is not None else auto_sent.get(doc_id, 0)
        blocks.append(TaggedBlock(doc_id, sid, overflow, tuple(forms), tuple(tags)))
        if overflow == 0:
            auto_sent[doc_id] = sid + 1
        sent_id = None
        overflow = 0
        forms, tags = [], []

    for line_no, line in enumerate(lines, start=1):
        line = line.rstrip()
        if not line:
            flush(line_no)
            continue
        if line.startswith("# scheme ="):
            scheme = parse_scheme(line.partition("=")[2].strip())
        elif line.startswith("# doc_id ="):
            flush(line_no)
            doc_id = line[len("# doc_id ="):].strip()
        elif line.startswith("# sent_id ="):
            flush(line_no)
            try:
                sent_id = int(line.partition("=")[2].strip())
            except ValueError:
                raise TagFileError(line_no, "non-integer sent_id")
        elif line.startswith("# overflow ="):
            try:
                overflow = int(line.partition("=")[2].strip())
            except ValueError:
                raise TagFileError(line_no, "non-integer overflow index")
        elif line.startswith("#"):
            raise TagFileError(line_no, f"unknown comment {line!r}")
        else:
            fields = line.split("\t")
            if len(fields) != 2:
                raise TagFileError(line_no, "expected FORM<TAB>TAG")
            forms.append(fields[0])
            tags.append(fields[1])
    flush(len(lines) + 1)
    if scheme is None:
        raise TagFileError(1, "missing '# scheme =' header")
    return scheme, blocks


def primary_sequences(
    scheme: Scheme, blocks: list[TaggedBlock]
) -> dict[tuple[str, int], TagSequence]:
    out: dict[tuple[str, int], TagSequence] = {}
    for block in blocks:
        if block.overflow:
            continue
        key = (block.doc_id, block.sent_id)
        if key in out:
            raise ValueError(f"duplicate sentence {key} in tag file")
        out[key] = TagSequence(scheme, block.tags)
    return out
