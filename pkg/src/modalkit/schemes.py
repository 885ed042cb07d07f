"""Codecs between modal-instance annotations and per-token tag sequences.

Six scheme families are supported:

===========================  ====================================================
``trigger_biose``            BIOSE trigger tags with a sense suffix
``trigger_biose_feat_head``  same tags; the event head is a model input feature
``trigger_biose_plus_head``  BIOSE trigger tags plus an ``H`` tag on the event head
``event_span``               BIO tags over the propositional (event) span
``event_head``               a single ``H`` tag on the event head
``joint``                    one BIO region covering trigger and event, with
                             ``T``/``E`` role suffixes (sense appended to T tags)
===========================  ====================================================

Tag grammar (``<s>`` is a sense label at the scheme granularity; at binary
granularity the sense suffix is dropped)::

    O
    S-<s> B-<s> I-<s> E-<s>        trigger schemes (bare S/B/I/E at binary)
    H                              head-bearing schemes
    B-E I-E                        event_span
    B-T[-<s>] I-T[-<s>] B-E I-E    joint

Chunk boundaries follow ConllEval semantics: a type change (including the
T/E role switch inside a joint region) starts a new chunk.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Iterable, Sequence

from .corpus import ModalInstance, Sentence, Span
from .taxonomy import Granularity, TaxonomyError, labels_at, project_sense

logger = logging.getLogger(__name__)

TRIGGER_OPEN = "<t>"
TRIGGER_CLOSE = "</t>"
HEAD_OPEN = "<h>"
HEAD_CLOSE = "</h>"
_MARKERS = (TRIGGER_OPEN, TRIGGER_CLOSE, HEAD_OPEN, HEAD_CLOSE)


class SchemeError(ValueError):
    """Raised for ill-formed tag sequences or invalid scheme configurations."""

    def __init__(self, message: str, index: int | None = None):
        super().__init__(message if index is None else f"at index {index}: {message}")
        self.index = index


class SchemeKind(str, Enum):
    TRIGGER = "trigger_biose"
    TRIGGER_FEAT_HEAD = "trigger_biose_feat_head"
    TRIGGER_PLUS_HEAD = "trigger_biose_plus_head"
    EVENT_SPAN = "event_span"
    EVENT_HEAD = "event_head"
    JOINT = "joint"


_TRIGGER_KINDS = {SchemeKind.TRIGGER, SchemeKind.TRIGGER_FEAT_HEAD, SchemeKind.TRIGGER_PLUS_HEAD}
_SENSELESS_KINDS = {SchemeKind.EVENT_SPAN, SchemeKind.EVENT_HEAD}


@dataclass(frozen=True)
class Scheme:
    """A named encode/decode pair: kind plus sense granularity."""

    kind: SchemeKind
    granularity: Granularity = Granularity.FINE_CONFLATED

    def __post_init__(self):
        if self.kind in _SENSELESS_KINDS:
            object.__setattr__(self, "granularity", Granularity.BINARY)

    @property
    def sense_on(self) -> bool:
        return self.granularity is not Granularity.BINARY

    def __str__(self) -> str:
        if self.kind in _SENSELESS_KINDS:
            return self.kind.value
        return f"{self.kind.value}:{self.granularity.value}"


def parse_scheme(text: str) -> Scheme:
    """Parse a scheme string such as ``trigger_biose:coarse`` or ``joint:nosense``."""
    name, _, gran = text.partition(":")
    try:
        kind = SchemeKind(name)
    except ValueError:
        raise SchemeError(f"unknown scheme {name!r}") from None
    if not gran:
        return Scheme(kind)
    if gran == "nosense" and kind is SchemeKind.JOINT:
        return Scheme(kind, Granularity.BINARY)
    try:
        g = Granularity(gran)
    except ValueError:
        raise SchemeError(f"unknown granularity {gran!r} in scheme {text!r}") from None
    if kind in _SENSELESS_KINDS and g is not Granularity.BINARY:
        raise SchemeError(f"scheme {name!r} does not take a granularity")
    return Scheme(kind, g)


@dataclass(frozen=True)
class TagSequence:
    scheme: Scheme
    tags: tuple[str, ...]

    def __len__(self) -> int:
        return len(self.tags)


@dataclass(frozen=True)
class DecodedChunk:
    """A maximal chunk with its role and (optional) sense label.

    ``ctype`` is the ConllEval-style type string (everything after the
    prefix letter), empty for bare binary tags.
    """

    start: int
    end: int
    role: str  # trigger | event | head
    sense: str | None
    ctype: str


@dataclass(frozen=True)
class DecodedInstance:
    trigger_span: Span | None = None
    sense: str | None = None
    event_span: Span | None = None
    event_head: int | None = None


# ---------------------------------------------------------------------------
# low-level tag scanning


def split_tag(tag: str) -> tuple[str, str]:
    """Split a tag into (prefix, type); ``O`` and ``H`` have empty types."""
    if tag == "O":
        return "O", ""
    if tag == "H":
        return "H", ""
    prefix, dash, ctype = tag.partition("-")
    if prefix not in ("B", "I", "E", "S"):
        raise SchemeError(f"unknown tag {tag!r}")
    return prefix, ctype


def scan_chunks(tags: Sequence[str]) -> list[tuple[int, int, str]]:
    """Extract maximal (start, end, type) chunks under ConllEval boundaries.

    Scanning is tolerant, applying the standard repairs: an I without a
    matching open chunk begins a new chunk at that position; a dangling
    E becomes a singleton.
    """
    chunks: list[tuple[int, int, str]] = []
    open_start: int | None = None
    open_type = ""

    def close(end: int) -> None:
        nonlocal open_start
        if open_start is not None:
            chunks.append((open_start, end, open_type))
            open_start = None

    for i, tag in enumerate(tags):
        prefix, ctype = split_tag(tag)
        if prefix == "O":
            close(i - 1)
        elif prefix == "H":
            close(i - 1)
            chunks.append((i, i, "H"))
        elif prefix == "S":
            close(i - 1)
            chunks.append((i, i, ctype))
        elif prefix == "B":
            close(i - 1)
            open_start, open_type = i, ctype
        elif prefix == "I":
            if open_start is not None and open_type == ctype:
                continue
            close(i - 1)
            open_start, open_type = i, ctype
        else:  # E
            if open_start is not None and open_type == ctype:
                chunks.append((open_start, i, ctype))
                open_start = None
            else:
                close(i - 1)
                chunks.append((i, i, ctype))
    close(len(tags) - 1)
    return chunks


def _chunk_role_sense(ctype: str) -> tuple[str, str | None]:
    if ctype == "H":
        return "head", None
    if ctype == "E":
        return "event", None
    if ctype == "T":
        return "trigger", None
    if ctype.startswith("T-"):
        return "trigger", ctype[2:]
    if ctype == "":
        return "trigger", None
    return "trigger", ctype


def decode(tags: Sequence[str] | TagSequence, scheme: Scheme | None = None,
           strict: bool = False) -> list[DecodedChunk]:
    """Decode a tag sequence into chunks with roles and senses.

    Tolerant mode (default) repairs ill-formed transitions so model
    output is always decodable; strict mode validates against the scheme
    grammar first and raises SchemeError with the offending index.
    """
    if isinstance(tags, TagSequence):
        scheme = scheme or tags.scheme
        tags = tags.tags
    if strict:
        if scheme is None:
            raise SchemeError("strict decoding requires a scheme")
        validate(TagSequence(scheme, tuple(tags)))
    out = []
    for start, end, ctype in scan_chunks(tags):
        role, sense = _chunk_role_sense(ctype)
        out.append(DecodedChunk(start, end, role, sense, ctype))
    return out


def validate(seq: TagSequence) -> None:
    """Scheme-aware well-formedness check; raises SchemeError on violation."""
    scheme, tags = seq.scheme, seq.tags
    kind = scheme.kind
    allowed_senses = set(labels_at(scheme.granularity))

    def check_sense(ctype: str, i: int) -> None:
        if scheme.sense_on:
            if ctype not in allowed_senses:
                raise SchemeError(
                    f"sense {ctype!r} is not a {scheme.granularity.value} label", i
                )
        elif ctype != "":
            raise SchemeError(f"unexpected sense suffix in {tags[i]!r}", i)

    if kind in _TRIGGER_KINDS:
        open_type: str | None = None
        for i, tag in enumerate(tags):
            prefix, ctype = split_tag(tag)
            if prefix == "H":
                if kind is not SchemeKind.TRIGGER_PLUS_HEAD:
                    raise SchemeError("H tag outside a head-bearing scheme", i)
                if open_type is not None:
                    raise SchemeError("H inside an open trigger chunk", i)
                continue
            if prefix == "O":
                if open_type is not None:
                    raise SchemeError("chunk left open (missing E)", i)
                continue
            check_sense(ctype, i)
            if prefix == "S":
                if open_type is not None:
                    raise SchemeError("chunk left open (missing E)", i)
            elif prefix == "B":
                if open_type is not None:
                    raise SchemeError("chunk left open (missing E)", i)
                open_type = ctype
            elif prefix == "I":
                if open_type != ctype:
                    raise SchemeError(f"I-{ctype} does not continue an open chunk", i)
            else:  # E
                if open_type != ctype:
                    raise SchemeError(f"E-{ctype} does not close an open chunk", i)
                open_type = None
        if open_type is not None:
            raise SchemeError("chunk left open at end of sentence", len(tags) - 1)
        return

    if kind is SchemeKind.EVENT_HEAD:
        for i, tag in enumerate(tags):
            if tag not in ("O", "H"):
                raise SchemeError(f"tag {tag!r} invalid in event_head scheme", i)
        return

    # BIO families: event_span and joint
    in_region = False
    for i, tag in enumerate(tags):
        prefix, ctype = split_tag(tag)
        if prefix == "O":
            in_region = False
            continue
        if prefix in ("S", "E", "H"):
            raise SchemeError(f"prefix {prefix!r} invalid in a BIO scheme", i)
        if kind is SchemeKind.EVENT_SPAN:
            if ctype != "E":
                raise SchemeError(f"event_span tags must carry role E, got {tag!r}", i)
        else:  # joint
            if ctype == "E":
                pass
            elif ctype == "T" or ctype.startswith("T-"):
                check_sense(ctype[2:] if ctype.startswith("T-") else "", i)
            else:
                raise SchemeError(f"joint tags must carry role T or E, got {tag!r}", i)
        if prefix == "I" and not in_region:
            raise SchemeError("I tag does not continue an open region", i)
        in_region = True


def repair(tags: Sequence[str], scheme: Scheme) -> tuple[str, ...]:
    """Rewrite a possibly ill-formed sequence into a well-formed one.

    Chunks found by tolerant scanning are re-emitted in the scheme's
    family (BIOSE for trigger schemes, BIO otherwise); chunk boundaries
    and types are preserved, so tolerant decoding is idempotent.
    """
    out = ["O"] * len(tags)
    biose = scheme.kind in _TRIGGER_KINDS
    for start, end, ctype in scan_chunks(tags):
        if ctype == "H":
            out[start] = "H"
            continue
        suffix = f"-{ctype}" if ctype else ""
        if start == end:
            out[start] = (f"S{suffix}" if biose else f"B{suffix}")
            continue
        out[start] = f"B{suffix}"
        for i in range(start + 1, end):
            out[i] = f"I{suffix}"
        out[end] = (f"E{suffix}" if biose else f"I{suffix}")
    return tuple(out)


# ---------------------------------------------------------------------------
# instance-level encoding


def canonical_instance(instance: ModalInstance) -> ModalInstance:
    """Trim event-span edge tokens that coincide with the trigger span.

    The Table-style joint encodings mark trigger tokens with the T role,
    so an event span whose first/last tokens lie inside the trigger
    cannot be distinguished from a shorter span; such spans are
    normalized to their representable form. Interior overlap is kept.
    """
    if instance.event_span is None or instance.trigger_span is None:
        return instance
    t0, t1 = instance.trigger_span
    lo, hi = instance.event_span
    while lo <= hi and t0 <= lo <= t1:
        lo += 1
    while hi >= lo and t0 <= hi <= t1:
        hi -= 1
    if (lo, hi) == instance.event_span:
        return instance
    logger.warning(
        "event span %s trimmed to (%s, %s): edge tokens overlap trigger %s",
        instance.event_span, lo, hi, instance.trigger_span,
    )
    if lo > hi:
        return replace(instance, event_span=None)
    head = instance.event_head
    if head is not None and not (lo <= head <= hi):
        return replace(instance, event_span=None)
    return replace(instance, event_span=(lo, hi))


def _sense_suffix(instance: ModalInstance, scheme: Scheme) -> str:
    if not scheme.sense_on:
        return ""
    if instance.sense is None:
        raise SchemeError(
            f"instance at {instance.trigger_span} has no sense label; cannot "
            f"encode at {scheme.granularity.value} granularity"
        )
    try:
        return "-" + project_sense(instance.sense, scheme.granularity)
    except TaxonomyError as exc:
        raise SchemeError(str(exc)) from exc


def _paint_biose(cells: dict[int, str], span: Span, suffix: str) -> None:
    start, end = span
    if start == end:
        cells[start] = f"S{suffix}"
        return
    cells[start] = f"B{suffix}"
    for i in range(start + 1, end):
        cells[i] = f"I{suffix}"
    cells[end] = f"E{suffix}"


def _joint_regions(instance: ModalInstance) -> list[list[int]]:
    """Token regions of the joint encoding: one when trigger and event
    touch or overlap, two when a gap separates them."""
    t = instance.trigger_span
    e = instance.event_span
    if e is None:
        return [list(range(t[0], t[1] + 1))]
    if t is None:
        return [list(range(e[0], e[1] + 1))]
    if t[1] + 1 >= e[0] and e[1] + 1 >= t[0]:
        lo, hi = min(t[0], e[0]), max(t[1], e[1])
        return [list(range(lo, hi + 1))]
    first, second = sorted([t, e])
    return [list(range(first[0], first[1] + 1)), list(range(second[0], second[1] + 1))]


def _needed_cells(instance: ModalInstance, scheme: Scheme) -> dict[int, str] | None:
    """The cells this instance paints under the scheme, or None when the
    scheme has nothing to represent for it."""
    kind = scheme.kind
    if kind in _TRIGGER_KINDS:
        if instance.trigger_span is None:
            return None
        cells: dict[int, str] = {}
        _paint_biose(cells, instance.trigger_span, _sense_suffix(instance, scheme))
        if kind is SchemeKind.TRIGGER_PLUS_HEAD and instance.event_head is not None:
            t0, t1 = instance.trigger_span
            if t0 <= instance.event_head <= t1:
                logger.warning(
                    "event head %d inside trigger span %s; head mark dropped",
                    instance.event_head, instance.trigger_span,
                )
            else:
                cells[instance.event_head] = "H"
        return cells
    if kind is SchemeKind.EVENT_SPAN:
        if instance.event_span is None:
            return None
        cells = {}
        start, end = instance.event_span
        cells[start] = "B-E"
        for i in range(start + 1, end + 1):
            cells[i] = "I-E"
        return cells
    if kind is SchemeKind.EVENT_HEAD:
        if instance.event_head is None:
            return None
        return {instance.event_head: "H"}
    # joint
    if instance.trigger_span is None and instance.event_span is None:
        return None
    suffix = _sense_suffix(instance, scheme) if instance.trigger_span is not None else ""
    cells = {}
    t = instance.trigger_span
    for region in _joint_regions(instance):
        for j, pos in enumerate(region):
            in_trigger = t is not None and t[0] <= pos <= t[1]
            role = f"T{suffix}" if in_trigger else "E"
            cells[pos] = f"{'B' if j == 0 else 'I'}-{role}"
    return cells


def _instance_key(instance: ModalInstance, scheme: Scheme) -> tuple:
    """The annotation content a decode must recover for this scheme."""
    kind = scheme.kind
    sense = None
    if scheme.sense_on and instance.sense is not None:
        sense = project_sense(instance.sense, scheme.granularity)
    if kind in (SchemeKind.TRIGGER, SchemeKind.TRIGGER_FEAT_HEAD):
        return (instance.trigger_span, sense)
    if kind is SchemeKind.TRIGGER_PLUS_HEAD:
        head = instance.event_head
        if head is not None and instance.trigger_span is not None:
            t0, t1 = instance.trigger_span
            if t0 <= head <= t1:
                head = None  # not representable; dropped at paint time
        return (instance.trigger_span, sense, head)
    if kind is SchemeKind.EVENT_SPAN:
        return (instance.event_span,)
    if kind is SchemeKind.EVENT_HEAD:
        return (instance.event_head,)
    # joint: the sense rides on T tags, so trigger-less instances lose it
    if instance.trigger_span is None:
        sense = None
    return (instance.trigger_span, sense, instance.event_span)


def _decoded_key(dec: DecodedInstance, scheme: Scheme) -> tuple:
    kind = scheme.kind
    if kind in (SchemeKind.TRIGGER, SchemeKind.TRIGGER_FEAT_HEAD):
        return (dec.trigger_span, dec.sense)
    if kind is SchemeKind.TRIGGER_PLUS_HEAD:
        return (dec.trigger_span, dec.sense, dec.event_head)
    if kind is SchemeKind.EVENT_SPAN:
        return (dec.event_span,)
    if kind is SchemeKind.EVENT_HEAD:
        return (dec.event_head,)
    return (dec.trigger_span, dec.sense, dec.event_span)


@dataclass
class EncodeResult:
    """Sequences produced for one sentence, with placement bookkeeping.

    ``sequences[0]`` is the primary sequence; conflicting instances
    overflow into additional sequences. ``placements[k]`` lists the
    original instance indices encoded in ``sequences[k]``.
    """

    sequences: list[TagSequence]
    placements: list[list[int]] = field(default_factory=list)
    unrepresentable: list[int] = field(default_factory=list)

    @property
    def primary(self) -> TagSequence:
        return self.sequences[0]


def _ordering(scheme: Scheme, instances: Sequence[ModalInstance]) -> list[int]:
    def span_len(span: Span | None) -> int:
        return 0 if span is None else span[1] - span[0] + 1

    idx = list(range(len(instances)))
    kind = scheme.kind
    if kind is SchemeKind.JOINT:
        idx.sort(key=lambda i: (
            instances[i].trigger_span or instances[i].event_span or (0, 0), i))
    elif kind in _TRIGGER_KINDS:
        idx.sort(key=lambda i: (
            -span_len(instances[i].trigger_span),
            instances[i].trigger_span or (0, 0), i))
    elif kind is SchemeKind.EVENT_SPAN:
        idx.sort(key=lambda i: (instances[i].event_span or (0, 0), i))
    else:
        idx.sort(key=lambda i: (instances[i].event_head or 0, i))
    return idx


def encode_all(sentence: Sentence, scheme: Scheme) -> EncodeResult:
    """Encode every instance, overflowing conflicting ones into extra sequences.

    An instance joins the first sequence where (a) its cells are free and
    (b) after painting, decoding the sequence still recovers exactly the
    instances placed in it; otherwise a new sequence is opened. This makes
    the per-sequence round trip hold by construction.
    """
    n = len(sentence.tokens)
    instances = [canonical_instance(inst) for inst in sentence.instances]
    cell_maps: list[dict[int, str]] = []
    keys: list[list[tuple]] = []
    placements: list[list[int]] = []
    unrepresentable: list[int] = []

    for i in _ordering(scheme, instances):
        inst = instances[i]
        cells = _needed_cells(inst, scheme)
        if cells is None:
            unrepresentable.append(i)
            continue
        key = _instance_key(inst, scheme)
        placed = False
        for k, existing in enumerate(cell_maps):
            if any(pos in existing for pos in cells):
                continue
            trial = dict(existing)
            trial.update(cells)
            trial_tags = _cells_to_tags(trial, n)
            decoded = {_decoded_key(d, scheme) for d in decode_instances(trial_tags, scheme)}
            if decoded == set(keys[k]) | {key}:
                existing.update(cells)
                keys[k].append(key)
                placements[k].append(i)
                placed = True
                break
        if not placed:
            cell_maps.append(dict(cells))
            keys.append([key])
            placements.append([i])

    if not cell_maps:
        cell_maps = [{}]
        placements = [[]]
    sequences = [TagSequence(scheme, _cells_to_tags(m, n)) for m in cell_maps]
    return EncodeResult(sequences, placements, unrepresentable)


def _cells_to_tags(cells: dict[int, str], n: int) -> tuple[str, ...]:
    return tuple(cells.get(i, "O") for i in range(n))


def encode(sentence: Sentence, scheme: Scheme) -> TagSequence:
    """The primary tag sequence for a sentence.

    Instances that cannot coexist with already-placed ones are dropped
    from this sequence (a warning names them); ``encode_all`` retains
    them in overflow sequences.
    """
    result = encode_all(sentence, scheme)
    for k, ids in enumerate(result.placements[1:], start=1):
        for i in ids:
            logger.warning(
                "sentence (%s, %s): instance %d conflicts and was dropped from "
                "the primary sequence (kept in overflow sequence %d)",
                sentence.doc_id, sentence.sent_id, i, k,
            )
    return result.primary


# ---------------------------------------------------------------------------
# instance-level decoding


def _hull(segments: list[DecodedChunk]) -> Span:
    return (min(s.start for s in segments), max(s.end for s in segments))


def _assemble_joint(chunks: list[DecodedChunk]) -> list[DecodedInstance]:
    # Group segments into maximal chains of token-adjacent segments; one
    # chain normally holds one instance (its T run plus surrounding E runs).
    chains: list[list[DecodedChunk]] = []
    for seg in chunks:
        if chains and chains[-1][-1].end + 1 == seg.start:
            chains[-1].append(seg)
        else:
            chains.append([seg])

    instances: list[DecodedInstance] = []
    free_triggers: list[int] = []  # trigger-only instances awaiting an event
    pending_events: list[Span] = []  # gap-separated event hulls
    for chain in chains:
        t_segs = [s for s in chain if s.role == "trigger"]
        e_segs = [s for s in chain if s.role == "event"]
        if t_segs and e_segs:
            # split chains with several T runs at each later T run
            groups: list[tuple[DecodedChunk | None, list[DecodedChunk]]] = []
            current_t: DecodedChunk | None = None
            current_e: list[DecodedChunk] = []
            for seg in chain:
                if seg.role == "trigger":
                    if current_t is not None:
                        groups.append((current_t, current_e))
                        current_e = []
                    current_t = seg
                else:
                    current_e.append(seg)
            groups.append((current_t, current_e))
            for t_seg, e_group in groups:
                event = _hull(e_group) if e_group else None
                if t_seg is None:
                    instances.append(DecodedInstance(event_span=event))
                else:
                    instances.append(DecodedInstance(
                        trigger_span=(t_seg.start, t_seg.end),
                        sense=t_seg.sense, event_span=event))
        elif t_segs:
            for t_seg in t_segs:
                free_triggers.append(len(instances))
                instances.append(DecodedInstance(
                    trigger_span=(t_seg.start, t_seg.end), sense=t_seg.sense))
        else:
            pending_events.append(_hull(e_segs))
    # each gap-separated event pairs with the nearest unpaired trigger-only
    # instance (either side), preferring the preceding one on ties
    for event in pending_events:
        best = None
        for idx in free_triggers:
            t0, t1 = instances[idx].trigger_span
            if t1 < event[0]:
                cand = (event[0] - t1, 0, idx)  # trigger precedes event
            else:
                cand = (t0 - event[1], 1, idx)
            if best is None or cand < best:
                best = cand
        if best is not None:
            idx = best[2]
            instances[idx] = replace(instances[idx], event_span=event)
            free_triggers.remove(idx)
        else:
            instances.append(DecodedInstance(event_span=event))
    return instances


def _assemble_plus_head(chunks: list[DecodedChunk]) -> list[DecodedInstance]:
    triggers = [c for c in chunks if c.role == "trigger"]
    heads = [c.start for c in chunks if c.role == "head"]
    instances = [
        DecodedInstance(trigger_span=(c.start, c.end), sense=c.sense) for c in triggers
    ]
    taken = [False] * len(instances)
    for h in heads:
        best = None
        for i, c in enumerate(triggers):
            if taken[i]:
                continue
            dist = c.start - h if h < c.start else h - c.end
            tie_break = 0 if h > c.end else 1  # prefer the preceding trigger
            cand = (dist, tie_break, i)
            if best is None or cand < best:
                best = cand
        if best is None:
            instances.append(DecodedInstance(event_head=h))
        else:
            i = best[2]
            taken[i] = True
            instances[i] = replace(instances[i], event_head=h)
    return instances


def decode_instances(tags: Sequence[str] | TagSequence,
                     scheme: Scheme | None = None) -> list[DecodedInstance]:
    """Reconstruct annotations from a (tolerantly decoded) tag sequence."""
    if isinstance(tags, TagSequence):
        scheme = scheme or tags.scheme
        tags = tags.tags
    if scheme is None:
        raise SchemeError("decode_instances requires a scheme")
    chunks = decode(tags, scheme)
    kind = scheme.kind
    if kind is SchemeKind.JOINT:
        return _assemble_joint(chunks)
    if kind is SchemeKind.TRIGGER_PLUS_HEAD:
        return _assemble_plus_head(chunks)
    if kind is SchemeKind.EVENT_SPAN:
        return [DecodedInstance(event_span=(c.start, c.end)) for c in chunks]
    if kind is SchemeKind.EVENT_HEAD:
        return [DecodedInstance(event_head=c.start) for c in chunks]
    return [
        DecodedInstance(trigger_span=(c.start, c.end), sense=c.sense) for c in chunks
    ]


def project_tags(seq: TagSequence, granularity: Granularity) -> TagSequence:
    """Project every tag's sense component to a coarser granularity."""
    from .taxonomy import project

    target = Scheme(seq.scheme.kind, granularity)
    return TagSequence(target, tuple(project(t, granularity) for t in seq.tags))


# ---------------------------------------------------------------------------
# feature-span marking


def attach_feature_marks(
    forms: Sequence[str],
    spans: Iterable[tuple[Span, str]],
) -> tuple[list[str], list[int | None]]:
    """Insert reserved span markers into a token stream.

    ``spans`` holds ``((start, end), role)`` pairs with role ``trigger``
    or ``head``; spans must lie within bounds and be pairwise
    non-overlapping. Returns the marked forms and an alignment list
    mapping each marked position to its original index (None for
    markers). Corpus tokens colliding with a marker string are escaped
    with a backslash.
    """
    n = len(forms)
    marker_pairs = {"trigger": (TRIGGER_OPEN, TRIGGER_CLOSE), "head": (HEAD_OPEN, HEAD_CLOSE)}
    ordered = sorted(spans, key=lambda s: s[0])
    covered: set[int] = set()
    for (start, end), role in ordered:
        if role not in marker_pairs:
            raise SchemeError(f"unknown span role {role!r}")
        if not (0 <= start <= end < n):
            raise SchemeError(f"span ({start}, {end}) out of bounds for {n} tokens")
        positions = set(range(start, end + 1))
        if positions & covered:
            raise SchemeError(f"span ({start}, {end}) overlaps another marked span")
        covered |= positions
    opens: dict[int, list[str]] = {}
    closes: dict[int, list[str]] = {}
    for (start, end), role in ordered:
        o, c = marker_pairs[role]
        opens.setdefault(start, []).append(o)
        closes.setdefault(end, []).append(c)
    marked: list[str] = []
    alignment: list[int | None] = []
    for i, form in enumerate(forms):
        for o in opens.get(i, ()):
            marked.append(o)
            alignment.append(None)
        marked.append(f"\\{form}" if form in _MARKERS else form)
        alignment.append(i)
        for c in closes.get(i, ()):
            marked.append(c)
            alignment.append(None)
    return marked, alignment
