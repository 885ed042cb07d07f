"""CoNLL-style corpus file format.

One token per row, UTF-8, tab-separated, columns exactly::

    TOKEN_INDEX FORM LEMMA UPOS DEP_HEAD DEP_REL TRIGGER_TAG EVENT_HEAD_TAG EVENT_SPAN_TAG INSTANCE_ID

A blank line ends a sentence; ``# doc_id = <string>`` precedes each
document and ``# sent_id = <int>`` each sentence. ``DEP_HEAD`` is ``-1``
for the root. The tag columns hold, per modal instance:

* ``TRIGGER_TAG``: BIOSE tags with the sense suffix (bare at binary
  granularity),
* ``EVENT_HEAD_TAG``: ``H`` on the event head,
* ``EVENT_SPAN_TAG``: the joint BIO region over trigger and event with
  ``T``/``E`` role suffixes (no sense; only painted when the instance
  has an event span).

``INSTANCE_ID`` links the rows of one instance (``_`` when the row has
no annotation). When a token participates in several instances the id
cell holds ``|``-separated ids and each tag cell holds the same number
of ``|``-aligned components, one per id; single-instance rows use plain
cells. Parsing is strict: malformed rows raise ConllParseError with
their line number.
"""

from __future__ import annotations

import io
from typing import Iterable, TextIO

from .corpus import (
    Corpus,
    CorpusError,
    ModalInstance,
    Sentence,
    Token,
    validate_sentence,
)
from .schemes import (
    Scheme,
    SchemeError,
    SchemeKind,
    TagSequence,
    canonical_instance,
    decode,
    validate,
)
from .taxonomy import Granularity

N_COLUMNS = 10
_DOC_PREFIX = "# doc_id ="
_SENT_PREFIX = "# sent_id ="


class ConllParseError(ValueError):
    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


# ---------------------------------------------------------------------------
# writing


def _paint_instance_columns(
    sentence: Sentence, n: int
) -> tuple[list[dict[int, str]], list[dict[int, str]], list[dict[int, str]]]:
    """Per-instance cell maps for the trigger, head, and event columns."""
    trig_cols, head_cols, event_cols = [], [], []
    for inst in sentence.instances:
        trig: dict[int, str] = {}
        head: dict[int, str] = {}
        event: dict[int, str] = {}
        if inst.trigger_span is not None:
            start, end = inst.trigger_span
            suffix = f"-{inst.sense}" if inst.sense is not None else ""
            if start == end:
                trig[start] = f"S{suffix}"
            else:
                trig[start] = f"B{suffix}"
                for i in range(start + 1, end):
                    trig[i] = f"I{suffix}"
                trig[end] = f"E{suffix}"
        if inst.event_head is not None:
            head[inst.event_head] = "H"
        if inst.event_span is not None:
            t = inst.trigger_span
            e = inst.event_span
            if t is not None and t[1] + 1 >= e[0] and e[1] + 1 >= t[0]:
                regions = [range(min(t[0], e[0]), max(t[1], e[1]) + 1)]
            elif t is not None:
                first, second = sorted([t, e])
                regions = [range(first[0], first[1] + 1), range(second[0], second[1] + 1)]
            else:
                regions = [range(e[0], e[1] + 1)]
            for region in regions:
                for j, pos in enumerate(region):
                    in_trigger = t is not None and t[0] <= pos <= t[1]
                    event[pos] = f"{'B' if j == 0 else 'I'}-{'T' if in_trigger else 'E'}"
        trig_cols.append(trig)
        head_cols.append(head)
        event_cols.append(event)
    return trig_cols, head_cols, event_cols


def write_sentence(sentence: Sentence, out: TextIO) -> None:
    sentence = Sentence(
        doc_id=sentence.doc_id,
        sent_id=sentence.sent_id,
        tokens=sentence.tokens,
        instances=tuple(canonical_instance(i) for i in sentence.instances),
    )
    n = len(sentence.tokens)
    trig_cols, head_cols, event_cols = _paint_instance_columns(sentence, n)
    out.write(f"{_SENT_PREFIX} {sentence.sent_id}\n")
    for pos, tok in enumerate(sentence.tokens):
        ids = sorted(
            i for i in range(len(sentence.instances))
            if pos in trig_cols[i] or pos in head_cols[i] or pos in event_cols[i]
        )
        if not ids:
            cells = ["O", "O", "O", "_"]
        else:
            cells = [
                "|".join(col[i].get(pos, "O") for i in ids)
                for col in (trig_cols, head_cols, event_cols)
            ]
            cells.append("|".join(str(i) for i in ids))
        row = [
            str(tok.index), tok.form, tok.lemma, tok.pos,
            str(tok.dep_head), tok.dep_rel, *cells,
        ]
        for value in row:
            if "\t" in value or "\n" in value:
                raise CorpusError(f"field {value!r} contains a tab or newline")
            if value == "":
                raise CorpusError("empty field cannot be serialized")
        out.write("\t".join(row) + "\n")
    out.write("\n")


def write_conll(corpus: Corpus, out: TextIO | None = None) -> str | None:
    """Serialize a corpus; returns the text when ``out`` is None."""
    buffer = out or io.StringIO()
    current_doc: str | None = None
    for sentence in corpus.sentences:
        if sentence.doc_id != current_doc:
            buffer.write(f"{_DOC_PREFIX} {sentence.doc_id}\n")
            current_doc = sentence.doc_id
        write_sentence(sentence, buffer)
    if out is None:
        return buffer.getvalue()
    return None


# ---------------------------------------------------------------------------
# parsing


class _SentenceBuilder:
    def __init__(self, doc_id: str, sent_id: int, granularity: Granularity, line_no: int):
        self.doc_id = doc_id
        self.sent_id = sent_id
        self.granularity = granularity
        self.start_line = line_no
        self.tokens: list[Token] = []
        self.row_lines: list[int] = []
        self.ids: list[int] = []  # instance ids, ordered numerically at build time
        self.trig: dict[int, dict[int, str]] = {}
        self.head: dict[int, dict[int, str]] = {}
        self.event: dict[int, dict[int, str]] = {}

    def add_row(self, fields: list[str], line_no: int) -> None:
        pos = len(self.tokens)
        try:
            index = int(fields[0])
        except ValueError:
            raise ConllParseError(line_no, f"non-integer token index {fields[0]!r}")
        if index != pos:
            raise ConllParseError(line_no, f"token index {index} out of order (expected {pos})")
        try:
            dep_head = int(fields[4])
        except ValueError:
            raise ConllParseError(line_no, f"non-integer dependency head {fields[4]!r}")
        self.tokens.append(Token(index, fields[1], fields[2], fields[3], dep_head, fields[5]))
        self.row_lines.append(line_no)

        trig_cell, head_cell, event_cell, id_cell = fields[6:10]
        if id_cell == "_":
            if (trig_cell, head_cell, event_cell) != ("O", "O", "O"):
                raise ConllParseError(line_no, "annotation tags on a row without an instance id")
            return
        id_parts = id_cell.split("|")
        try:
            ids = [int(p) for p in id_parts]
        except ValueError:
            raise ConllParseError(line_no, f"non-integer instance id in {id_cell!r}")
        if len(set(ids)) != len(ids):
            raise ConllParseError(line_no, f"duplicate instance id in {id_cell!r}")
        for cell, store in ((trig_cell, self.trig), (head_cell, self.head), (event_cell, self.event)):
            parts = cell.split("|")
            if len(parts) != len(ids):
                raise ConllParseError(
                    line_no,
                    f"cell {cell!r} has {len(parts)} components for {len(ids)} instance ids",
                )
            for inst_id, tag in zip(ids, parts):
                if inst_id not in self.ids:
                    self.ids.append(inst_id)
                    self.trig.setdefault(inst_id, {})
                    self.head.setdefault(inst_id, {})
                    self.event.setdefault(inst_id, {})
                if tag != "O":
                    store[inst_id][pos] = tag
        for inst_id in ids:
            if all(
                store[inst_id].get(pos, "O") == "O"
                for store in (self.trig, self.head, self.event)
            ):
                raise ConllParseError(
                    line_no, f"instance id {inst_id} listed on a row it does not annotate"
                )

    def _tags(self, cells: dict[int, str]) -> tuple[str, ...]:
        return tuple(cells.get(i, "O") for i in range(len(self.tokens)))

    def _decode_instance(self, inst_id: int) -> ModalInstance:
        painted = [
            pos for store in (self.trig, self.head, self.event)
            for pos in store[inst_id]
        ]
        line = self.row_lines[min(painted)] if painted else self.start_line
        trig_tags = self._tags(self.trig[inst_id])
        trigger_span = None
        sense = None
        if any(t != "O" for t in trig_tags):
            seq = TagSequence(Scheme(SchemeKind.TRIGGER, self.granularity), trig_tags)
            try:
                chunks = decode(seq, strict=True)
            except SchemeError as exc:
                raise ConllParseError(line, f"instance {inst_id}: bad trigger tags: {exc}")
            if len(chunks) != 1:
                raise ConllParseError(
                    line, f"instance {inst_id}: trigger column holds {len(chunks)} chunks"
                )
            trigger_span = (chunks[0].start, chunks[0].end)
            sense = chunks[0].sense

        head_tags = self._tags(self.head[inst_id])
        heads = [i for i, t in enumerate(head_tags) if t == "H"]
        if any(t not in ("O", "H") for t in head_tags):
            raise ConllParseError(line, f"instance {inst_id}: bad event-head tag")
        if len(heads) > 1:
            raise ConllParseError(line, f"instance {inst_id}: multiple event heads")
        event_head = heads[0] if heads else None

        event_tags = self._tags(self.event[inst_id])
        event_span = None
        if any(t != "O" for t in event_tags):
            seq = TagSequence(Scheme(SchemeKind.JOINT, Granularity.BINARY), event_tags)
            try:
                validate(seq)
            except SchemeError as exc:
                raise ConllParseError(line, f"instance {inst_id}: bad event tags: {exc}")
            t_pos = {i for i, t in enumerate(event_tags) if t.endswith("T")}
            e_pos = {i for i, t in enumerate(event_tags) if t.endswith("E")}
            if t_pos:
                expected = (
                    set(range(trigger_span[0], trigger_span[1] + 1))
                    if trigger_span is not None else set()
                )
                if t_pos != expected:
                    raise ConllParseError(
                        line,
                        f"instance {inst_id}: T roles in the event column do not "
                        f"match the trigger span",
                    )
            if not e_pos:
                raise ConllParseError(
                    line, f"instance {inst_id}: event column has no E role"
                )
            lo, hi = min(e_pos), max(e_pos)
            if any(i not in e_pos and i not in t_pos for i in range(lo, hi + 1)):
                raise ConllParseError(
                    line, f"instance {inst_id}: event span has unannotated gaps"
                )
            event_span = (lo, hi)

        if trigger_span is None and event_span is None and event_head is None:
            raise ConllParseError(line, f"instance {inst_id} has no annotation")
        return ModalInstance(trigger_span, sense, event_span, event_head)

    def build(self) -> Sentence:
        # numeric id order mirrors the writer's tuple positions, so
        # parse(write(corpus)) preserves instance order exactly
        instances = tuple(self._decode_instance(i) for i in sorted(self.ids))
        return Sentence(self.doc_id, self.sent_id, tuple(self.tokens), instances)


def parse_conll(
    source: str | TextIO | Iterable[str],
    granularity: Granularity = Granularity.FINE_FULL,
) -> Corpus:
    """Parse a corpus file; strict, with line numbers on every error.

    ``granularity`` declares the sense label set of the trigger column
    (prediction corpora from coarser models parse with their own level;
    gold corpora use the default fine_full).
    """
    if isinstance(source, str):
        lines = source.splitlines()
    else:
        lines = (line.rstrip("\n") for line in source)

    sentences: list[Sentence] = []
    seen_ids: set[tuple[str, int]] = set()
    doc_id = ""
    next_sent_id: dict[str, int] = {}
    pending_sent_id: int | None = None
    builder: _SentenceBuilder | None = None

    def finish(b: _SentenceBuilder) -> None:
        try:
            sentence = b.build()
            validate_sentence(sentence, granularity)
        except CorpusError as exc:
            raise ConllParseError(b.start_line, str(exc))
        if sentence.sentence_id in seen_ids:
            raise ConllParseError(b.start_line, f"duplicate sentence id {sentence.sentence_id}")
        seen_ids.add(sentence.sentence_id)
        sentences.append(sentence)
        next_sent_id[b.doc_id] = max(next_sent_id.get(b.doc_id, 0), b.sent_id + 1)

    for line_no, raw in enumerate(lines, start=1):
        line = raw.rstrip()
        if not line:
            if builder is not None:
                finish(builder)
                builder = None
            continue
        if line.startswith("#"):
            if builder is not None:
                raise ConllParseError(line_no, "comment inside a sentence")
            if line.startswith(_DOC_PREFIX):
                doc_id = line[len(_DOC_PREFIX):].strip()
            elif line.startswith(_SENT_PREFIX):
                try:
                    pending_sent_id = int(line[len(_SENT_PREFIX):].strip())
                except ValueError:
                    raise ConllParseError(line_no, "non-integer sent_id")
            else:
                raise ConllParseError(line_no, f"unknown comment {line!r}")
            continue
        fields = line.split("\t")
        if len(fields) != N_COLUMNS:
            raise ConllParseError(
                line_no, f"expected {N_COLUMNS} tab-separated columns, got {len(fields)}"
            )
        if builder is None:
            sent_id = pending_sent_id if pending_sent_id is not None else next_sent_id.get(doc_id, 0)
            pending_sent_id = None
            builder = _SentenceBuilder(doc_id, sent_id, granularity, line_no)
        builder.add_row(fields, line_no)
    if builder is not None:
        finish(builder)
    return Corpus(tuple(sentences), granularity)


def load_conll(path, granularity: Granularity = Granularity.FINE_FULL) -> Corpus:
    with open(path, encoding="utf-8") as f:
        return parse_conll(f, granularity)


def save_conll(corpus: Corpus, path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        write_conll(corpus, f)
