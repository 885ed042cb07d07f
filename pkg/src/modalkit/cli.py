"""Command-line driver: reproducible pipelines over the toolkit modules.

Subcommands: ingest, stats, split, encode, decode, baseline (train|tag),
score, report. All outputs land under ``--out DIR`` and are byte-stable
across reruns with the same inputs and seeds. Exit codes: 0 success,
2 input error, 3 configuration error.
"""

from __future__ import annotations

import argparse
import json
import statistics
import sys
from pathlib import Path

from . import __version__
from .baseline import load_lexicon, save_lexicon, tag_majority, train_majority
from .conll import ConllParseError, load_conll, save_conll
from .corpus import Corpus, CorpusError, ModalInstance, Sentence, compute_stats
from .evaluation import EvalError, breakdown_by_pos, format_report, score
from .schemes import (
    Scheme,
    SchemeError,
    decode_instances,
    encode,
    encode_all,
    parse_scheme,
)
from .splits import (
    SplitError,
    fold_partition,
    load_manifest,
    make_splits,
    pool_ids,
    save_manifest,
    validate_manifest,
)
from .tagfile import TaggedBlock, TagFileError, primary_sequences, read_tagfile, write_tagfile

EXIT_INPUT = 2
EXIT_CONFIG = 3


class CliError(Exception):
    def __init__(self, message: str, code: int = EXIT_INPUT):
        super().__init__(message)
        self.code = code


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _load_corpus(path: str, granularity: str = "fine_full") -> Corpus:
    from .taxonomy import Granularity

    p = Path(path)
    if not p.exists():
        raise CliError(f"corpus file not found: {p}")
    try:
        return load_conll(p, Granularity(granularity))
    except ConllParseError as exc:
        raise CliError(f"{p}: {exc}")


def _parse_scheme(text: str) -> Scheme:
    try:
        return parse_scheme(text)
    except SchemeError as exc:
        raise CliError(str(exc), EXIT_CONFIG)


def _write_json(path: Path, payload) -> None:
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def _stats_payload(corpus: Corpus) -> dict:
    stats = compute_stats(corpus)
    return {
        "n_documents": stats.n_documents,
        "n_sentences": stats.n_sentences,
        "n_sentences_with_trigger": stats.n_sentences_with_trigger,
        "n_trigger_instances": stats.n_trigger_instances,
        "n_trigger_spans_distinct": stats.n_trigger_spans_distinct,
        "n_unique_trigger_types": stats.n_unique_trigger_types,
        "per_sense": stats.per_sense,
        "per_pos": stats.per_pos,
    }


# ---------------------------------------------------------------------------
# subcommands


def cmd_ingest(args) -> int:
    corpus = _load_corpus(args.corpus, args.granularity)
    if args.derive_heads:
        from .corpus import derive_event_heads

        corpus = derive_event_heads(corpus)
    out = _out_dir(args)
    save_conll(corpus, out / "corpus.conll")
    _write_json(out / "stats.json", _stats_payload(corpus))
    print(f"ingested {len(corpus)} sentences -> {out / 'corpus.conll'}")
    return 0


def cmd_stats(args) -> int:
    corpus = _load_corpus(args.corpus, args.granularity)
    payload = _stats_payload(corpus)
    text = json.dumps(payload, indent=2, sort_keys=True)
    if args.out:
        out = _out_dir(args)
        _write_json(out / "stats.json", payload)
    print(text)
    return 0


def cmd_split(args) -> int:
    corpus = _load_corpus(args.corpus)
    if args.manifest:
        try:
            manifest = load_manifest(args.manifest)
            validate_manifest(manifest, corpus)
        except (OSError, SplitError) as exc:
            raise CliError(f"manifest {args.manifest}: {exc}")
    else:
        if args.seed is None:
            raise CliError("either --seed or --manifest is required", EXIT_CONFIG)
        try:
            manifest = make_splits(corpus, args.seed)
        except SplitError as exc:
            raise CliError(str(exc))
    out = _out_dir(args)
    save_manifest(manifest, out / "manifest.json")
    sizes = {
        "test": len(manifest.test),
        "pool": len(corpus) - len(manifest.test),
        "folds": [
            {"val": len(f), "train": len(corpus) - len(manifest.test) - len(f)}
            for f in manifest.folds
        ],
    }
    _write_json(out / "split_sizes.json", sizes)
    if args.materialize:
        from .corpus import subset

        save_conll(subset(corpus, manifest.test), out / "test.conll")
        for k in range(len(manifest.folds)):
            train_ids, val_ids = fold_partition(manifest, corpus, k)
            save_conll(subset(corpus, train_ids), out / f"fold{k}.train.conll")
            save_conll(subset(corpus, val_ids), out / f"fold{k}.val.conll")
    print(f"split written: test={sizes['test']} pool={sizes['pool']}")
    return 0


def _encode_blocks(corpus: Corpus, scheme: Scheme, include_overflow: bool):
    for sentence in corpus:
        try:
            result = encode_all(sentence, scheme)
        except SchemeError as exc:
            raise CliError(
                f"sentence ({sentence.doc_id}, {sentence.sent_id}): {exc}", EXIT_CONFIG
            )
        forms = tuple(sentence.forms())
        limit = len(result.sequences) if include_overflow else 1
        for k, seq in enumerate(result.sequences[:limit]):
            yield TaggedBlock(sentence.doc_id, sentence.sent_id, k, forms, seq.tags)


def cmd_encode(args) -> int:
    corpus = _load_corpus(args.corpus, args.granularity)
    scheme = _parse_scheme(args.scheme)
    out = _out_dir(args)
    name = f"{Path(args.corpus).stem}.{scheme}".replace(":", ".")
    path = out / (name + ".tags")
    with open(path, "w", encoding="utf-8") as f:
        write_tagfile(scheme, _encode_blocks(corpus, scheme, args.all_sequences), f)
    print(f"encoded {len(corpus)} sentences -> {path}")
    return 0


def _instances_from_tags(tags, scheme: Scheme) -> tuple[ModalInstance, ...]:
    decoded = decode_instances(tags, scheme)
    return tuple(
        ModalInstance(d.trigger_span, d.sense, d.event_span, d.event_head)
        for d in decoded
    )


def cmd_decode(args) -> int:
    base = _load_corpus(args.corpus)
    try:
        scheme, blocks = read_tagfile(Path(args.tags).read_text(encoding="utf-8"))
    except (OSError, TagFileError, SchemeError) as exc:
        raise CliError(f"tag file {args.tags}: {exc}")
    by_id = primary_sequences(scheme, blocks)
    index = base.by_id()
    sentences = []
    for key, seq in by_id.items():
        if key not in index:
            raise CliError(f"tag file sentence {key} not in corpus")
        sent = index[key]
        if len(seq.tags) != len(sent.tokens):
            raise CliError(f"sentence {key}: tag count differs from token count")
        sentences.append(Sentence(sent.doc_id, sent.sent_id, sent.tokens,
                                  _instances_from_tags(seq, scheme)))
    out_corpus = Corpus(tuple(sentences), scheme.granularity)
    out = _out_dir(args)
    path = out / (Path(args.tags).stem + ".conll")
    save_conll(out_corpus, path)
    print(f"decoded {len(sentences)} sentences -> {path}")
    return 0


def _select_sentences(corpus: Corpus, args) -> list[Sentence]:
    if args.split == "all":
        return list(corpus.sentences)
    if not args.manifest:
        raise CliError(f"--split {args.split} requires --manifest", EXIT_CONFIG)
    try:
        manifest = load_manifest(args.manifest)
        validate_manifest(manifest, corpus)
    except (OSError, SplitError) as exc:
        raise CliError(f"manifest {args.manifest}: {exc}")
    index = corpus.by_id()
    if args.split == "test":
        ids = list(manifest.test)
    elif args.split == "pool":
        ids = pool_ids(manifest, corpus)
    elif args.split == "train":
        ids = fold_partition(manifest, corpus, args.fold)[0]
    else:  # val
        ids = fold_partition(manifest, corpus, args.fold)[1]
    return [index[sid] for sid in ids]


def cmd_baseline_train(args) -> int:
    corpus = _load_corpus(args.corpus, args.granularity)
    scheme = _parse_scheme(args.scheme)
    sentences = _select_sentences(corpus, args)
    try:
        pairs = [(s, encode(s, scheme)) for s in sentences]
        lexicon = train_majority(pairs, key_by=args.key_by, scheme=scheme)
    except (SchemeError, ValueError) as exc:
        raise CliError(str(exc), EXIT_CONFIG)
    out = _out_dir(args)
    path = out / "lexicon.tsv"
    with open(path, "w", encoding="utf-8") as f:
        save_lexicon(lexicon, f)
    print(f"trained majority lexicon on {len(sentences)} sentences -> {path}")
    return 0


def cmd_baseline_tag(args) -> int:
    corpus = _load_corpus(args.corpus, args.granularity)
    try:
        with open(args.lexicon, encoding="utf-8") as f:
            lexicon = load_lexicon(f)
    except (OSError, ValueError) as exc:
        raise CliError(f"lexicon {args.lexicon}: {exc}")
    sentences = _select_sentences(corpus, args)
    out = _out_dir(args)
    blocks = []
    pred_sentences = []
    for sent in sentences:
        seq = tag_majority(lexicon, sent)
        blocks.append(TaggedBlock(sent.doc_id, sent.sent_id, 0,
                                  tuple(sent.forms()), seq.tags))
        pred_sentences.append(Sentence(sent.doc_id, sent.sent_id, sent.tokens,
                                       _instances_from_tags(seq, lexicon.scheme)))
    tags_path = out / "predictions.tags"
    with open(tags_path, "w", encoding="utf-8") as f:
        write_tagfile(lexicon.scheme, blocks, f)
    conll_path = out / "predictions.conll"
    save_conll(Corpus(tuple(pred_sentences), lexicon.scheme.granularity), conll_path)
    print(f"tagged {len(sentences)} sentences -> {tags_path}, {conll_path}")
    return 0


_GRANULARITY_ALIASES = {"fine": "fine_conflated"}


def _gold_and_pred(args) -> tuple[list, list, list]:
    scheme = _parse_scheme(args.scheme)
    gold_corpus = _load_corpus(args.gold)
    gold_sentences = _select_sentences(gold_corpus, args)
    try:
        gold_seqs = [encode(s, scheme) for s in gold_sentences]
    except SchemeError as exc:
        raise CliError(str(exc), EXIT_CONFIG)

    pred_path = Path(args.pred)
    fmt = args.pred_format
    if fmt == "auto":
        fmt = "tags" if pred_path.suffix == ".tags" else "conll"
    if fmt == "tags":
        try:
            pred_scheme, blocks = read_tagfile(pred_path.read_text(encoding="utf-8"))
        except (OSError, TagFileError, SchemeError) as exc:
            raise CliError(f"predictions {pred_path}: {exc}")
        if pred_scheme != scheme:
            raise CliError(
                f"prediction scheme {pred_scheme} does not match --scheme {scheme}",
                EXIT_CONFIG,
            )
        by_id = primary_sequences(pred_scheme, blocks)
    else:
        pred_corpus = _load_corpus(str(pred_path), scheme.granularity.value)
        by_id = {}
        for sent in pred_corpus:
            try:
                by_id[sent.sentence_id] = encode(sent, scheme)
            except SchemeError as exc:
                raise CliError(f"predictions {pred_path}: {exc}", EXIT_CONFIG)
    pred_seqs = []
    for sent in gold_sentences:
        if sent.sentence_id not in by_id:
            raise CliError(f"predictions missing sentence {sent.sentence_id}")
        pred_seqs.append(by_id[sent.sentence_id])

    if args.granularity:
        from .schemes import project_tags
        from .taxonomy import Granularity, TaxonomyError

        name = _GRANULARITY_ALIASES.get(args.granularity, args.granularity)
        try:
            target = Granularity(name)
        except ValueError:
            raise CliError(f"unknown granularity {args.granularity!r}", EXIT_CONFIG)
        if target is not scheme.granularity:
            try:
                gold_seqs = [project_tags(s, target) for s in gold_seqs]
                pred_seqs = [project_tags(s, target) for s in pred_seqs]
            except TaxonomyError as exc:
                raise CliError(str(exc), EXIT_CONFIG)
    return gold_sentences, gold_seqs, pred_seqs


def cmd_score(args) -> int:
    gold_sentences, gold_seqs, pred_seqs = _gold_and_pred(args)
    out = _out_dir(args)
    modes = ["labeled", "unlabeled"] if args.mode == "both" else [args.mode]
    payload = {}
    report_text = []
    for mode in modes:
        try:
            metrics = score(gold_seqs, pred_seqs, mode)
        except EvalError as exc:
            raise CliError(str(exc))
        payload[mode] = metrics.as_dict()
        report_text.append(f"== {mode} ==\n{format_report(metrics)}")
        if args.by_pos:
            pos_scores = breakdown_by_pos(gold_seqs, pred_seqs, gold_sentences, mode)
            payload[mode]["per_pos"] = {
                pos: {"precision": round(100 * s.precision, 4),
                      "recall": round(100 * s.recall, 4),
                      "f1": round(100 * s.f1, 4), "gold": s.gold}
                for pos, s in pos_scores.items()
            }
    _write_json(out / "metrics.json", payload)
    (out / "report.txt").write_text("\n".join(report_text), encoding="utf-8")
    print("\n".join(report_text))
    return 0


def cmd_report(args) -> int:
    rows = []
    for path in args.metrics:
        try:
            rows.append(json.loads(Path(path).read_text(encoding="utf-8")))
        except (OSError, json.JSONDecodeError) as exc:
            raise CliError(f"metrics file {path}: {exc}")
    if not rows:
        raise CliError("no metrics files given", EXIT_CONFIG)
    modes = sorted({mode for row in rows for mode in row})
    aggregate: dict[str, dict] = {}
    lines = []
    for mode in modes:
        series: dict[str, list[float]] = {}
        for row in rows:
            if mode not in row:
                raise CliError(f"metrics files disagree on modes (missing {mode!r})")
            micro = row[mode]["micro"]
            for key in ("precision", "recall", "f1"):
                series.setdefault(key, []).append(micro[key])
            series.setdefault("macro_f1", []).append(row[mode]["macro_f1"])
            for label, s in row[mode].get("per_label", {}).items():
                series.setdefault(f"label:{label}:f1", []).append(s["f1"])
        aggregate[mode] = {
            key: {
                "mean": round(statistics.fmean(values), 4),
                "std": round(statistics.pstdev(values), 4),
                "n": len(values),
            }
            for key, values in sorted(series.items())
        }
        lines.append(f"== {mode} (mean over {len(rows)} runs) ==")
        for key, agg in aggregate[mode].items():
            lines.append(f"{key:>24}: {agg['mean']:7.2f}  (std {agg['std']:.2f})")
        lines.append("")
    out = _out_dir(args)
    _write_json(out / "aggregate.json", aggregate)
    text = "\n".join(lines)
    (out / "aggregate.txt").write_text(text, encoding="utf-8")
    print(text)
    return 0


# ---------------------------------------------------------------------------
# argument parsing


def _add_split_selection(p: argparse.ArgumentParser) -> None:
    p.add_argument("--split", choices=["all", "pool", "train", "val", "test"],
                   default="all", help="sentence subset to use")
    p.add_argument("--manifest", help="split manifest JSON")
    p.add_argument("--fold", type=int, default=0, help="fold index for train/val")


def _add_config(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="TOML file whose [<command>] table provides defaults")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="modalkit",
        description="Corpus toolkit and evaluation harness for event-based modality detection",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="validate a corpus and write the normalized form")
    p.add_argument("corpus", nargs="?")
    p.add_argument("--granularity", default="fine_full")
    p.add_argument("--derive-heads", action="store_true",
                   help="fill in missing event heads from event spans")
    p.add_argument("--out")
    _add_config(p)
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("stats", help="corpus statistics as JSON")
    p.add_argument("corpus", nargs="?")
    p.add_argument("--granularity", default="fine_full")
    p.add_argument("--out")
    _add_config(p)
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("split", help="build or validate a split manifest")
    p.add_argument("--corpus")
    p.add_argument("--seed", type=int)
    p.add_argument("--manifest", help="use a published manifest instead of --seed")
    p.add_argument("--materialize", action="store_true",
                   help="also write per-split corpus files")
    p.add_argument("--out")
    _add_config(p)
    p.set_defaults(func=cmd_split)

    p = sub.add_parser("encode", help="encode a corpus into a tag file")
    p.add_argument("--corpus")
    p.add_argument("--scheme")
    p.add_argument("--granularity", default="fine_full",
                   help="granularity of the corpus senses")
    p.add_argument("--all-sequences", action="store_true",
                   help="include overflow sequences for conflicting instances")
    p.add_argument("--out")
    _add_config(p)
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("decode", help="convert a tag file into a corpus file")
    p.add_argument("--tags")
    p.add_argument("--corpus", help="base corpus providing token columns")
    p.add_argument("--out")
    _add_config(p)
    p.set_defaults(func=cmd_decode)

    p = sub.add_parser("baseline", help="majority-vote baseline")
    bsub = p.add_subparsers(dest="baseline_command", required=True)
    pt = bsub.add_parser("train")
    pt.add_argument("--corpus")
    pt.add_argument("--scheme")
    pt.add_argument("--granularity", default="fine_full")
    pt.add_argument("--key-by", choices=["form", "lemma"], default="form")
    _add_split_selection(pt)
    pt.add_argument("--out")
    _add_config(pt)
    pt.set_defaults(func=cmd_baseline_train)
    pg = bsub.add_parser("tag")
    pg.add_argument("--corpus")
    pg.add_argument("--granularity", default="fine_full")
    pg.add_argument("--lexicon")
    _add_split_selection(pg)
    pg.add_argument("--out")
    _add_config(pg)
    pg.set_defaults(func=cmd_baseline_tag)

    p = sub.add_parser("score", help="score predictions against gold")
    p.add_argument("--gold")
    p.add_argument("--pred")
    p.add_argument("--pred-format", choices=["auto", "conll", "tags"], default="auto")
    p.add_argument("--scheme")
    p.add_argument("--mode", choices=["labeled", "unlabeled", "both"], default="both")
    p.add_argument("--granularity",
                   choices=["binary", "coarse", "fine", "fine_conflated", "fine_full"],
                   help="project gold and predictions to this granularity before scoring")
    p.add_argument("--by-pos", action="store_true")
    _add_split_selection(p)
    p.add_argument("--out")
    _add_config(p)
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("report", help="aggregate fold metrics")
    p.add_argument("--metrics", nargs="+")
    p.add_argument("--out")
    _add_config(p)
    p.set_defaults(func=cmd_report)

    return parser


def _apply_config(args, argv, parser) -> None:
    """Fill unset options from a TOML config file.

    Keys in the ``[<command>]`` table (dashes or underscores) act as
    defaults; flags given on the command line win.
    """
    try:
        import tomllib
    except ModuleNotFoundError:  # Python 3.10
        import tomli as tomllib

    try:
        with open(args.config, "rb") as f:
            data = tomllib.load(f)
    except OSError as exc:
        raise CliError(f"config {args.config}: {exc}", EXIT_CONFIG)
    except tomllib.TOMLDecodeError as exc:
        raise CliError(f"config {args.config}: {exc}", EXIT_CONFIG)
    section = data.get(args.command, {})
    if args.command == "baseline":
        section = section.get(args.baseline_command, {})
    given = set()
    for item in argv:
        if item.startswith("--"):
            given.add(item[2:].split("=", 1)[0].replace("-", "_"))
    for key, value in section.items():
        attr = key.replace("-", "_")
        if not hasattr(args, attr):
            raise CliError(
                f"config {args.config}: unknown option {key!r} for {args.command}",
                EXIT_CONFIG,
            )
        if attr not in given:
            setattr(args, attr, value)


_REQUIRED = {
    ("ingest", None): ("corpus", "out"),
    ("stats", None): ("corpus",),
    ("split", None): ("corpus", "out"),
    ("encode", None): ("corpus", "scheme", "out"),
    ("decode", None): ("tags", "corpus", "out"),
    ("baseline", "train"): ("corpus", "scheme", "out"),
    ("baseline", "tag"): ("corpus", "lexicon", "out"),
    ("score", None): ("gold", "pred", "scheme", "out"),
    ("report", None): ("metrics", "out"),
}


def _check_required(args) -> None:
    key = (args.command, getattr(args, "baseline_command", None))
    for name in _REQUIRED.get(key, ()):
        if getattr(args, name, None) in (None, []):
            raise CliError(f"--{name.replace('_', '-')} is required", EXIT_CONFIG)


def main(argv=None) -> int:
    import sys as _sys

    argv = list(_sys.argv[1:]) if argv is None else list(argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if getattr(args, "config", None):
            _apply_config(args, argv, parser)
        _check_required(args)
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except (ConllParseError, CorpusError, SplitError, EvalError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except SchemeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
