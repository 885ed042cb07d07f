"""Seeded train/validation/test splitting with reproducible manifests.

10% of sentences (nearest integer, ties to even) form the test set; the
rest is the train+validation pool. Each of the five folds independently
assigns 20% of the pool to validation, so one seed fully determines
every partition. Shuffling uses numpy's PCG64 generator, whose streams
are stable across platforms and library versions.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .corpus import Corpus, SentenceId

N_FOLDS = 5
TEST_FRACTION = 0.1
VAL_FRACTION = 0.2


class SplitError(ValueError):
    pass


@dataclass(frozen=True)
class SplitManifest:
    seed: int | None
    test: tuple[SentenceId, ...]
    folds: tuple[tuple[SentenceId, ...], ...]  # validation ids per fold


def make_splits(corpus: Corpus, seed: int) -> SplitManifest:
    """Build the test set and per-fold validation sets for a corpus.

    Sentences without modal triggers are included. Identical seed and
    corpus yield an identical manifest.
    """
    ids = corpus.ids()
    n = len(ids)
    if n < 10:
        raise SplitError(f"corpus has {n} sentences; at least 10 are required to split")
    rng = np.random.default_rng(seed)
    perm = rng.permutation(n)
    n_test = round(TEST_FRACTION * n)
    test = tuple(ids[i] for i in perm[:n_test])
    pool = [ids[i] for i in perm[n_test:]]
    n_val = round(VAL_FRACTION * len(pool))
    folds = []
    for _ in range(N_FOLDS):
        fold_perm = rng.permutation(len(pool))
        folds.append(tuple(pool[i] for i in fold_perm[:n_val]))
    return SplitManifest(seed=seed, test=test, folds=tuple(folds))


def validate_manifest(manifest: SplitManifest, corpus: Corpus) -> None:
    """Check that a manifest matches a corpus: known ids, no duplicates,
    no overlap between test and any fold's validation set."""
    known = set(corpus.ids())
    test = set(manifest.test)
    if len(test) != len(manifest.test):
        raise SplitError("duplicate sentence id in test set")
    for sid in manifest.test:
        if sid not in known:
            raise SplitError(f"test sentence id {sid} not in corpus")
    for k, fold in enumerate(manifest.folds):
        seen = set()
        for sid in fold:
            if sid not in known:
                raise SplitError(f"fold {k} sentence id {sid} not in corpus")
            if sid in test:
                raise SplitError(f"fold {k} sentence id {sid} overlaps the test set")
            if sid in seen:
                raise SplitError(f"duplicate sentence id {sid} in fold {k}")
            seen.add(sid)


def fold_partition(
    manifest: SplitManifest, corpus: Corpus, fold: int
) -> tuple[list[SentenceId], list[SentenceId]]:
    """(train_ids, val_ids) for one fold, in corpus order."""
    if not (0 <= fold < len(manifest.folds)):
        raise SplitError(f"fold {fold} out of range")
    test = set(manifest.test)
    val = set(manifest.folds[fold])
    train = [sid for sid in corpus.ids() if sid not in test and sid not in val]
    val_ordered = [sid for sid in corpus.ids() if sid in val]
    return train, val_ordered


def pool_ids(manifest: SplitManifest, corpus: Corpus) -> list[SentenceId]:
    """Train+validation pool (everything outside the test set), corpus order."""
    test = set(manifest.test)
    return [sid for sid in corpus.ids() if sid not in test]


def manifest_to_json(manifest: SplitManifest) -> str:
    payload = {
        "seed": manifest.seed,
        "test": [list(sid) for sid in manifest.test],
        "folds": [[list(sid) for sid in fold] for fold in manifest.folds],
    }
    return json.dumps(payload, indent=2, sort_keys=True)


def manifest_from_json(text: str) -> SplitManifest:
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SplitError(f"manifest is not valid JSON: {exc}")
    try:
        test = tuple((str(d), int(s)) for d, s in payload["test"])
        folds = tuple(
            tuple((str(d), int(s)) for d, s in fold) for fold in payload["folds"]
        )
        seed = payload.get("seed")
    except (KeyError, TypeError, ValueError) as exc:
        raise SplitError(f"malformed manifest: {exc}")
    return SplitManifest(seed=seed, test=test, folds=folds)


def save_manifest(manifest: SplitManifest, path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        f.write(manifest_to_json(manifest) + "\n")


def load_manifest(path) -> SplitManifest:
    with open(path, encoding="utf-8") as f:
        return manifest_from_json(f.read())
