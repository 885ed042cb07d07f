"""Majority-vote per-token tagger.

Each token is tagged with the most frequent tag its key (lowercased
surface form by default, lemma behind a flag) received in training;
unseen keys fall back to O. Ties prefer O, then the lexicographically
smallest tag, which biases precision. Output sequences are passed
through the scheme repair so chunks are always well formed.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Sequence, TextIO

from .corpus import Sentence
from .schemes import Scheme, SchemeError, TagSequence, parse_scheme, repair

FALLBACK = "O"


@dataclass
class MajorityLexicon:
    scheme: Scheme
    key_by: str = "form"  # or "lemma"
    counts: dict[str, Counter] = field(default_factory=dict)

    def key(self, token) -> str:
        value = token.form if self.key_by == "form" else token.lemma
        return value.lower()

    def majority_tag(self, key: str) -> str:
        table = self.counts.get(key)
        if not table:
            return FALLBACK
        # highest count wins; ties prefer O, then lexicographic order
        return min(table.items(), key=lambda kv: (-kv[1], kv[0] != FALLBACK, kv[0]))[0]


def train_majority(
    pairs: Iterable[tuple[Sentence, TagSequence]],
    key_by: str = "form",
    scheme: Scheme | None = None,
) -> MajorityLexicon:
    """Accumulate per-key tag counts over every token occurrence.

    All sequences must share one scheme. An empty training set yields an
    empty lexicon (everything falls back to O) but then requires an
    explicit ``scheme``.
    """
    if key_by not in ("form", "lemma"):
        raise ValueError(f"key_by must be 'form' or 'lemma', got {key_by!r}")
    lexicon = MajorityLexicon(scheme=scheme, key_by=key_by) if scheme else None
    for sentence, seq in pairs:
        if lexicon is None:
            lexicon = MajorityLexicon(scheme=seq.scheme, key_by=key_by)
        elif seq.scheme != lexicon.scheme:
            raise SchemeError(
                f"mixed schemes in training data: {lexicon.scheme} vs {seq.scheme}"
            )
        if len(seq.tags) != len(sentence.tokens):
            raise ValueError(
                f"sentence ({sentence.doc_id}, {sentence.sent_id}): "
                f"{len(seq.tags)} tags for {len(sentence.tokens)} tokens"
            )
        for token, tag in zip(sentence.tokens, seq.tags):
            lexicon.counts.setdefault(lexicon.key(token), Counter())[tag] += 1
    if lexicon is None:
        raise ValueError("empty training set: pass an explicit scheme")
    return lexicon


def tag_majority(lexicon: MajorityLexicon, sentence: Sentence) -> TagSequence:
    """Tag every token with its majority tag, then repair to well-formedness."""
    raw = [lexicon.majority_tag(lexicon.key(tok)) for tok in sentence.tokens]
    return TagSequence(lexicon.scheme, repair(raw, lexicon.scheme))


def tag_corpus(lexicon: MajorityLexicon, sentences: Sequence[Sentence]) -> list[TagSequence]:
    return [tag_majority(lexicon, s) for s in sentences]


def save_lexicon(lexicon: MajorityLexicon, out: TextIO) -> None:
    """Sorted ``key<TAB>tag<TAB>count`` rows for inspection and diffing."""
    out.write(f"# scheme = {lexicon.scheme}\n")
    out.write(f"# key_by = {lexicon.key_by}\n")
    for key in sorted(lexicon.counts):
        for tag in sorted(lexicon.counts[key]):
            out.write(f"{key}\t{tag}\t{lexicon.counts[key][tag]}\n")


def load_lexicon(source: TextIO) -> MajorityLexicon:
    scheme: Scheme | None = None
    key_by = "form"
    counts: dict[str, Counter] = {}
    for line_no, line in enumerate(source, start=1):
        line = line.rstrip("\n")
        if not line:
            continue
        if line.startswith("# scheme ="):
            scheme = parse_scheme(line.partition("=")[2].strip())
            continue
        if line.startswith("# key_by ="):
            key_by = line.partition("=")[2].strip()
            continue
        fields = line.split("\t")
        if len(fields) != 3:
            raise ValueError(f"lexicon line {line_no}: expected 3 columns")
        key, tag, count = fields
        counts.setdefault(key, Counter())[tag] = int(count)
    if scheme is None:
        raise ValueError("lexicon file lacks a '# scheme =' header")
    return MajorityLexicon(scheme=scheme, key_by=key_by, counts=counts)
