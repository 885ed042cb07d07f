"""In-memory corpus model: tokens, sentences, modal instances, statistics.

Corpora are immutable after construction. Spans are inclusive
``(start, end)`` token-index pairs; dependency heads use ``-1`` as the
root sentinel.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable

from .taxonomy import Granularity, TaxonomyError, labels_at, sense_granularity

ROOT = -1

Span = tuple[int, int]
SentenceId = tuple[str, int]


class CorpusError(ValueError):
    """Raised for structurally invalid corpus objects."""


@dataclass(frozen=True)
class Token:
    index: int
    form: str
    lemma: str
    pos: str
    dep_head: int
    dep_rel: str


@dataclass(frozen=True)
class ModalInstance:
    """A modal trigger with its sense and (optionally) the modified event.

    ``sense`` is a canonical sense label at the owning corpus's
    granularity, or None for binary-granularity (sense-free) corpora.
    """

    trigger_span: Span
    sense: str | None
    event_span: Span | None = None
    event_head: int | None = None


@dataclass(frozen=True)
class Sentence:
    doc_id: str
    sent_id: int
    tokens: tuple[Token, ...]
    instances: tuple[ModalInstance, ...] = ()

    @property
    def sentence_id(self) -> SentenceId:
        return (self.doc_id, self.sent_id)

    def forms(self) -> list[str]:
        return [t.form for t in self.tokens]


@dataclass(frozen=True)
class Corpus:
    sentences: tuple[Sentence, ...]
    granularity: Granularity = Granularity.FINE_FULL

    def __len__(self) -> int:
        return len(self.sentences)

    def __iter__(self):
        return iter(self.sentences)

    def ids(self) -> list[SentenceId]:
        return [s.sentence_id for s in self.sentences]

    def by_id(self) -> dict[SentenceId, Sentence]:
        return {s.sentence_id: s for s in self.sentences}


def _check_span(span: Span, n: int, what: str) -> None:
    start, end = span
    if not (0 <= start <= end < n):
        raise CorpusError(f"{what} span {span} out of bounds for {n} tokens")


def validate_sentence(sentence: Sentence, granularity: Granularity = Granularity.FINE_FULL) -> None:
    """Check token indexing, dependency acyclicity, and instance spans."""
    n = len(sentence.tokens)
    for i, tok in enumerate(sentence.tokens):
        if tok.index != i:
            raise CorpusError(
                f"token indices must be contiguous from 0; got {tok.index} at position {i}"
            )
        if tok.dep_head == tok.index:
            raise CorpusError(f"token {i} is its own dependency head")
        if tok.dep_head != ROOT and not (0 <= tok.dep_head < n):
            raise CorpusError(f"token {i} has out-of-range dependency head {tok.dep_head}")
    # Every head chain must terminate at the root.
    for i in range(n):
        seen = set()
        j = i
        while j != ROOT:
            if j in seen:
                raise CorpusError(f"dependency cycle through token {i}")
            seen.add(j)
            j = sentence.tokens[j].dep_head
    allowed = set(labels_at(granularity))
    for inst in sentence.instances:
        _check_span(inst.trigger_span, n, "trigger")
        if inst.sense is None:
            if granularity is not Granularity.BINARY:
                raise CorpusError(
                    f"instance at {inst.trigger_span} lacks a sense label "
                    f"(required at {granularity.value} granularity)"
                )
        elif inst.sense not in allowed:
            raise CorpusError(
                f"sense {inst.sense!r} is not a {granularity.value} label"
            )
        if inst.event_span is not None:
            _check_span(inst.event_span, n, "event")
        if inst.event_head is not None:
            if not (0 <= inst.event_head < n):
                raise CorpusError(f"event head {inst.event_head} out of bounds")
            if inst.event_span is not None:
                lo, hi = inst.event_span
                if not (lo <= inst.event_head <= hi):
                    raise CorpusError(
                        f"event head {inst.event_head} outside event span {inst.event_span}"
                    )


def validate_corpus(corpus: Corpus) -> None:
    seen: set[SentenceId] = set()
    for sent in corpus.sentences:
        if sent.sentence_id in seen:
            raise CorpusError(f"duplicate sentence id {sent.sentence_id}")
        seen.add(sent.sentence_id)
        validate_sentence(sent, corpus.granularity)


def trigger_span_from_positions(positions: Iterable[int]) -> Span:
    """Collapse annotated trigger positions to one contiguous span.

    Tagging schemes cannot express gaps, so a discontiguous annotation
    keeps only its leftmost maximal run; the dropped runs are logged.
    For converters ingesting raw annotation exports.
    """
    import logging

    ordered = sorted(set(positions))
    if not ordered:
        raise CorpusError("trigger annotation has no positions")
    runs: list[list[int]] = [[ordered[0]]]
    for pos in ordered[1:]:
        if pos == runs[-1][-1] + 1:
            runs[-1].append(pos)
        else:
            runs.append([pos])
    if len(runs) > 1:
        logging.getLogger(__name__).warning(
            "discontiguous trigger %s: keeping leftmost run %s, dropping %s",
            ordered, runs[0], runs[1:],
        )
    return (runs[0][0], runs[0][-1])


def extract_event_head(sentence: Sentence, span: Span) -> int:
    """Topmost token of ``span`` in the dependency tree.

    Returns the leftmost token whose dependency parent lies outside the
    span (or is the root). Always a member of the span: in an acyclic
    parse at least one token's parent escapes any finite span.
    """
    start, end = span
    _check_span(span, len(sentence.tokens), "event")
    for i in range(start, end + 1):
        parent = sentence.tokens[i].dep_head
        if parent == ROOT or parent < start or parent > end:
            return i
    raise CorpusError(f"span {span} has no externally attached token (cyclic parse?)")


@dataclass(frozen=True)
class CorpusStats:
    """Corpus-level counts.

    Two trigger countings are reported: ``n_trigger_instances`` counts
    every annotated instance, while ``n_trigger_spans_distinct``
    collapses instances sharing the same trigger span in a sentence
    (ambiguously annotated triggers). ``per_sense`` uses the key
    ``unlabeled`` for instances without a sense label.
    """

    n_documents: int
    n_sentences: int
    n_sentences_with_trigger: int
    n_trigger_instances: int
    n_trigger_spans_distinct: int
    n_unique_trigger_types: int
    per_sense: dict[str, int] = field(default_factory=dict)
    per_pos: dict[str, int] = field(default_factory=dict)


def compute_stats(corpus: Corpus) -> CorpusStats:
    """Deterministic corpus statistics; trigger types key on lowercased lemmas."""
    docs: set[str] = set()
    with_trigger = 0
    instances = 0
    spans: set[tuple[SentenceId, Span]] = set()
    types: set[tuple[str, ...]] = set()
    per_sense: Counter[str] = Counter()
    per_pos: Counter[str] = Counter()
    for sent in corpus.sentences:
        docs.add(sent.doc_id)
        if sent.instances:
            with_trigger += 1
        for inst in sent.instances:
            instances += 1
            spans.add((sent.sentence_id, inst.trigger_span))
            start, end = inst.trigger_span
            types.add(tuple(t.lemma.lower() for t in sent.tokens[start : end + 1]))
            per_sense[inst.sense if inst.sense is not None else "unlabeled"] += 1
            per_pos[sent.tokens[start].pos] += 1
    return CorpusStats(
        n_documents=len(docs),
        n_sentences=len(corpus.sentences),
        n_sentences_with_trigger=with_trigger,
        n_trigger_instances=instances,
        n_trigger_spans_distinct=len(spans),
        n_unique_trigger_types=len(types),
        per_sense=dict(sorted(per_sense.items())),
        per_pos=dict(sorted(per_pos.items())),
    )


def derive_event_heads(corpus: Corpus) -> Corpus:
    """Fill in missing event heads from event spans (re-derivation mode).

    Heads already present in the data are trusted and left untouched;
    only instances with an event span but no head get
    :func:`extract_event_head` applied.
    """
    sentences = []
    for sent in corpus.sentences:
        instances = tuple(
            ModalInstance(
                inst.trigger_span,
                inst.sense,
                inst.event_span,
                extract_event_head(sent, inst.event_span)
                if inst.event_head is None and inst.event_span is not None
                else inst.event_head,
            )
            for inst in sent.instances
        )
        sentences.append(Sentence(sent.doc_id, sent.sent_id, sent.tokens, instances))
    return Corpus(tuple(sentences), corpus.granularity)


def subset(corpus: Corpus, ids: Iterable[SentenceId]) -> Corpus:
    """Sentences for ``ids``, in the given order. Unknown ids raise CorpusError."""
    index = corpus.by_id()
    picked = []
    for sid in ids:
        if sid not in index:
            raise CorpusError(f"sentence id {sid} not in corpus")
        picked.append(index[sid])
    return Corpus(sentences=tuple(picked), granularity=corpus.granularity)
