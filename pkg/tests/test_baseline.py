import io
import random

import pytest

from conftest import make_tokens, random_corpus
from modalkit.baseline import (
    load_lexicon,
    save_lexicon,
    tag_majority,
    train_majority,
)
from modalkit.corpus import ModalInstance, Sentence
from modalkit.schemes import SchemeError, TagSequence, encode, parse_scheme, validate

FINE = parse_scheme("trigger_biose:fine_full")


def seqs(sent, *tag_lists, scheme=FINE):
    return [(sent, TagSequence(scheme, tuple(tags))) for tags in tag_lists]


def single_token_sentences(word, n):
    return [
        Sentence("d", i, make_tokens([word], heads=[-1]))
        for i in range(n)
    ]


def test_majority_counting():
    pairs = []
    for i, sent in enumerate(single_token_sentences("must", 7)):
        tag = "S-rules_norms" if i < 5 else "O"
        pairs.append((sent, TagSequence(FINE, (tag,))))
    lexicon = train_majority(pairs)
    assert lexicon.majority_tag("must") == "S-rules_norms"
    assert lexicon.counts["must"]["S-rules_norms"] == 5
    assert lexicon.counts["must"]["O"] == 2


def test_empty_training_set_falls_back_to_O():
    lexicon = train_majority([], scheme=FINE)
    sent = Sentence("d", 0, make_tokens(["anything"], heads=[-1]))
    assert tag_majority(lexicon, sent).tags == ("O",)


def test_empty_training_set_requires_scheme():
    with pytest.raises(ValueError):
        train_majority([])


def test_unseen_token_gets_O():
    pairs = [(s, TagSequence(FINE, ("S-world",))) for s in single_token_sentences("can", 3)]
    lexicon = train_majority(pairs)
    assert lexicon.majority_tag("zyx") == "O"


def test_tie_breaks_toward_O_then_lexicographic():
    pairs = []
    for i, sent in enumerate(single_token_sentences("may", 4)):
        tag = "S-priority" if i % 2 else "O"
        pairs.append((sent, TagSequence(parse_scheme("trigger_biose:coarse"), (tag,))))
    lexicon = train_majority(pairs)
    assert lexicon.majority_tag("may") == "O"  # 2-2 tie prefers O
    # without O in the tie, the lexicographically smallest tag wins
    pairs = []
    for i, sent in enumerate(single_token_sentences("like", 4)):
        tag = "S-priority" if i % 2 else "S-plausibility"
        pairs.append((sent, TagSequence(parse_scheme("trigger_biose:coarse"), (tag,))))
    lexicon = train_majority(pairs)
    assert lexicon.majority_tag("like") == "S-plausibility"


def test_should_remain_calm_example():
    train = Sentence("d", 0, make_tokens(["should"], heads=[-1]))
    lexicon = train_majority([(train, TagSequence(FINE, ("S-rules_norms",)))])
    sent = Sentence("d", 1, make_tokens(["We", "should", "remain", "calm"], heads=[1, -1, 1, 2]))
    assert tag_majority(lexicon, sent).tags == ("O", "S-rules_norms", "O", "O")


def test_keying_is_case_insensitive():
    train = Sentence("d", 0, make_tokens(["Must"], heads=[-1]))
    lexicon = train_majority([(train, TagSequence(FINE, ("S-rules_norms",)))])
    sent = Sentence("d", 1, make_tokens(["MUST"], heads=[-1]))
    assert tag_majority(lexicon, sent).tags == ("S-rules_norms",)


def test_lemma_keyed_variant():
    train = Sentence("d", 0, make_tokens(["running"], lemmas=["run"], heads=[-1]))
    lexicon = train_majority([(train, TagSequence(FINE, ("S-agent",)))], key_by="lemma")
    ran = Sentence("d", 1, make_tokens(["ran"], lemmas=["run"], heads=[-1]))
    assert tag_majority(lexicon, ran).tags == ("S-agent",)


def test_mixed_schemes_rejected():
    sent = Sentence("d", 0, make_tokens(["x"], heads=[-1]))
    pairs = [
        (sent, TagSequence(FINE, ("O",))),
        (sent, TagSequence(parse_scheme("trigger_biose:coarse"), ("O",))),
    ]
    with pytest.raises(SchemeError):
        train_majority(pairs)


def test_order_invariance():
    rng = random.Random(17)
    corpus = random_corpus(rng, 25)
    pairs = [(s, encode(s, FINE)) for s in corpus]
    lexicon_a = train_majority(pairs)
    shuffled = pairs[:]
    rng.shuffle(shuffled)
    lexicon_b = train_majority(shuffled)
    assert lexicon_a.counts == lexicon_b.counts
    for sent in corpus:
        assert tag_majority(lexicon_a, sent) == tag_majority(lexicon_b, sent)


def test_unambiguous_corpus_self_tagging():
    # every key has exactly one tag: self-tagging reproduces training tags
    words = ["alpha", "beta", "gamma", "delta"]
    tags = ["O", "S-world", "O", "S-agent"]
    sent = Sentence("d", 0, make_tokens(words, heads=[-1, 0, 0, 0]))
    pairs = [(sent, TagSequence(FINE, tuple(tags)))]
    lexicon = train_majority(pairs)
    assert tag_majority(lexicon, sent).tags == tuple(tags)


def test_output_is_repaired_to_well_formed():
    # majority tags can produce dangling B/I; repair must fix them
    s1 = Sentence("d", 0, make_tokens(["have", "to"], heads=[-1, 0]))
    s2 = Sentence("d", 1, make_tokens(["have", "fun"], heads=[-1, 0]))
    pairs = [
        (s1, TagSequence(FINE, ("B-rules_norms", "E-rules_norms"))),
        (s1, TagSequence(FINE, ("B-rules_norms", "E-rules_norms"))),
        (s2, TagSequence(FINE, ("O", "O"))),
    ]
    lexicon = train_majority(pairs)
    seq = tag_majority(lexicon, s2)  # "have" majority is B-..., dangling
    validate(seq)
    assert seq.tags == ("S-rules_norms", "O")


def test_monotone_fallback_never_modal():
    rng = random.Random(29)
    corpus = random_corpus(rng, 10)
    pairs = [(s, encode(s, FINE)) for s in corpus]
    lexicon = train_majority(pairs)
    unseen = Sentence("zz", 0, make_tokens(["qqq", "zzz"], heads=[-1, 0]))
    assert tag_majority(lexicon, unseen).tags == ("O", "O")


def test_lexicon_tsv_round_trip():
    rng = random.Random(31)
    corpus = random_corpus(rng, 15)
    pairs = [(s, encode(s, FINE)) for s in corpus]
    lexicon = train_majority(pairs)
    buf = io.StringIO()
    save_lexicon(lexicon, buf)
    text = buf.getvalue()
    again = load_lexicon(io.StringIO(text))
    assert again.scheme == lexicon.scheme
    assert again.key_by == lexicon.key_by
    assert again.counts == lexicon.counts
    # sorted rows for diffing
    rows = [l for l in text.splitlines() if l and not l.startswith("#")]
    assert rows == sorted(rows)


def test_baseline_pipeline_synthetic_dry_run():
    # same composition as the corpus-gated acceptance criterion 2, on
    # synthetic data: train on the pool, score the held-out test split
    from modalkit.corpus import subset
    from modalkit.evaluation import score
    from modalkit.splits import make_splits, pool_ids

    rng = random.Random(77)
    corpus = random_corpus(rng, 80, n_docs=5)
    manifest = make_splits(corpus, seed=0)
    train_sents = subset(corpus, pool_ids(manifest, corpus)).sentences
    test_sents = subset(corpus, manifest.test).sentences
    for scheme_text, mode in [
        ("trigger_biose:binary", "unlabeled"),
        ("trigger_biose:coarse", "labeled"),
        ("trigger_biose:fine_conflated", "labeled"),
    ]:
        scheme = parse_scheme(scheme_text)
        lexicon = train_majority([(s, encode(s, scheme)) for s in train_sents])
        gold = [encode(s, scheme) for s in test_sents]
        pred = [tag_majority(lexicon, s) for s in test_sents]
        metrics = score(gold, pred, mode)
        assert 0.0 <= metrics.f1 <= 1.0
        for label_score in metrics.per_label.values():
            assert 0.0 <= label_score.f1 <= 1.0
