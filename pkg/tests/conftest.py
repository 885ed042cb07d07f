from __future__ import annotations

import random

import pytest

from modalkit.corpus import Corpus, ModalInstance, Sentence, Token
from modalkit.schemes import canonical_instance
from modalkit.taxonomy import FineSense

UPOS = ["NOUN", "VERB", "ADJ", "ADV", "AUX", "ADP", "DET", "PRON", "PART", "PROPN"]
VOCAB = [
    "the", "a", "must", "should", "can", "plan", "want", "need", "likely",
    "able", "rights", "drive", "hope", "report", "easy", "necessary", "goal",
    "law", "wish", "know", "world", "power", "try", "aim", "rule",
]
SENSES = [s.value for s in FineSense]


def make_tokens(words, lemmas=None, pos=None, heads=None, rels=None):
    n = len(words)
    lemmas = lemmas or [w.lower() for w in words]
    pos = pos or ["NOUN"] * n
    heads = heads if heads is not None else [-1] + [0] * (n - 1)
    rels = rels or ["dep"] * n
    return tuple(
        Token(i, words[i], lemmas[i], pos[i], heads[i], rels[i]) for i in range(n)
    )


@pytest.fixture
def drive_sentence() -> Sentence:
    words = "Japan has taken a leading role in the international drive to rebuild Afghanistan .".split()
    lemmas = "japan have take a lead role in the international drive to rebuild afghanistan .".split()
    pos = "PROPN AUX VERB DET ADJ NOUN ADP DET ADJ NOUN PART VERB PROPN PUNCT".split()
    heads = [2, 2, -1, 5, 5, 2, 5, 9, 9, 6, 11, 9, 11, 2]
    rels = "nsubj aux root det amod obj prep det amod pobj aux acl obj punct".split()
    tokens = make_tokens(words, lemmas, pos, heads, rels)
    instance = ModalInstance((9, 9), "plans_goals", (10, 12), 11)
    return Sentence("doc1", 0, tokens, (instance,))


@pytest.fixture
def drive_corpus(drive_sentence) -> Corpus:
    return Corpus((drive_sentence,))


def random_tree(rng: random.Random, n: int) -> list[int]:
    """Random dependency heads: acyclic, single root (-1)."""
    order = list(range(n))
    rng.shuffle(order)
    heads = [0] * n
    heads[order[0]] = -1
    for i in range(1, n):
        heads[order[i]] = order[rng.randrange(i)]
    return heads


def random_sentence(
    rng: random.Random,
    doc_id: str,
    sent_id: int,
    max_tokens: int = 14,
    max_instances: int = 3,
    with_events: bool = True,
) -> Sentence:
    n = rng.randint(2, max_tokens)
    words = [rng.choice(VOCAB) for _ in range(n)]
    tokens = make_tokens(
        words,
        pos=[rng.choice(UPOS) for _ in range(n)],
        heads=random_tree(rng, n),
    )
    instances = []
    for _ in range(rng.randint(0, max_instances)):
        t_start = rng.randrange(n)
        t_end = min(n - 1, t_start + rng.randint(0, 2))
        sense = rng.choice(SENSES)
        event_span = None
        event_head = None
        if with_events and rng.random() < 0.7:
            e_start = rng.randrange(n)
            e_end = min(n - 1, e_start + rng.randint(0, 4))
            event_span = (e_start, e_end)
            event_head = rng.randint(e_start, e_end)
        inst = canonical_instance(
            ModalInstance((t_start, t_end), sense, event_span, event_head)
        )
        instances.append(inst)
    return Sentence(doc_id, sent_id, tokens, tuple(instances))


def random_corpus(
    rng: random.Random,
    n_sentences: int,
    n_docs: int = 3,
    **kwargs,
) -> Corpus:
    sentences = []
    per_doc = {}
    for _ in range(n_sentences):
        doc = f"doc{rng.randrange(n_docs)}"
        sid = per_doc.get(doc, 0)
        per_doc[doc] = sid + 1
        sentences.append(random_sentence(rng, doc, sid, **kwargs))
    # keep one document's sentences contiguous, as the writer emits them
    sentences.sort(key=lambda s: (s.doc_id, s.sent_id))
    return Corpus(tuple(sentences))
