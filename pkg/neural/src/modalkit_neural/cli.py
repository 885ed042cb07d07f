"""Command-line driver for training taggers and sense classifiers.

Subcommands: ``train-tagger``, ``predict``, ``classify``. Configuration
comes from a TOML file mirroring the config dataclasses; flags override
file values. Predictions are ``.tags`` files; pass ``--emit-conll`` to
also run the toolkit's ``decode`` for a strict corpus file.
"""

from __future__ import annotations

import argparse
import json
import shutil
import subprocess
import sys
from pathlib import Path

from .config import ConfigError, load_classifier_config, load_tagger_config
from .data import DataError


class CliError(Exception):
    def __init__(self, message: str, code: int = 2):
        super().__init__(message)
        self.code = code


def _emit_conll(tags_path: Path, corpus: str, out_dir: Path) -> None:
    exe = shutil.which("modalkit")
    if exe is None:
        raise CliError("--emit-conll needs the modalkit CLI on PATH", code=3)
    proc = subprocess.run(
        [exe, "decode", "--tags", str(tags_path), "--corpus", corpus,
         "--out", str(out_dir)],
        capture_output=True, text=True,
    )
    if proc.returncode != 0:
        raise CliError(f"modalkit decode failed: {proc.stderr.strip()}")


def cmd_train_tagger(args) -> int:
    from .tagging import train_tagger

    config = load_tagger_config(
        args.config,
        encoder=args.encoder, corpus=args.corpus, tags=args.tags,
        manifest=args.manifest, scheme=args.scheme, fold=args.fold,
        epochs=args.epochs, seed=args.seed,
    )
    artifact = train_tagger(config, args.out)
    print(f"trained tagger -> {artifact}")
    return 0


def cmd_predict(args) -> int:
    from .tagging import load_tagger, predict_tagger

    loaded = load_tagger(args.model, device=args.device)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    tags_path = out_dir / "predictions.tags"
    predict_tagger(
        loaded, args.corpus, tags_path,
        manifest_path=args.manifest, split=args.split, fold=args.fold,
        feature_file=args.feature_file, device=args.device,
    )
    print(f"predictions -> {tags_path}")
    if args.emit_conll:
        _emit_conll(tags_path, args.corpus, out_dir)
        print(f"decoded corpus -> {out_dir / 'predictions.conll'}")
    return 0


def cmd_classify(args) -> int:
    from .classify import run_classifier

    config = load_classifier_config(
        args.config,
        encoder=args.encoder, corpus=args.corpus, manifest=args.manifest,
        variant=args.variant, granularity=args.granularity, fold=args.fold,
        epochs=args.epochs, seed=args.seed,
    )
    summary = run_classifier(config, args.out)
    print(json.dumps(summary, indent=2, sort_keys=True))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="modalkit-neural",
        description="Neural taggers and sense classifiers for event-based modality",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train-tagger", help="fine-tune a sequence tagger")
    p.add_argument("--config", help="TOML config (a [tagger] table or top-level keys)")
    p.add_argument("--encoder")
    p.add_argument("--corpus")
    p.add_argument("--tags")
    p.add_argument("--manifest")
    p.add_argument("--scheme")
    p.add_argument("--fold", type=int)
    p.add_argument("--epochs", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_train_tagger)

    p = sub.add_parser("predict", help="tag a corpus with a trained model")
    p.add_argument("--model", required=True, help="artifact directory from train-tagger")
    p.add_argument("--corpus", required=True)
    p.add_argument("--manifest")
    p.add_argument("--split", default="test",
                   choices=["all", "pool", "train", "val", "test"])
    p.add_argument("--fold", type=int, default=0)
    p.add_argument("--feature-file",
                   help="predictions corpus supplying feature spans (predicted features)")
    p.add_argument("--emit-conll", action="store_true",
                   help="also run `modalkit decode` on the predictions")
    p.add_argument("--device", default="cpu")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("classify", help="train and evaluate a sense classifier variant")
    p.add_argument("--config")
    p.add_argument("--encoder")
    p.add_argument("--corpus")
    p.add_argument("--manifest")
    p.add_argument("--variant")
    p.add_argument("--granularity")
    p.add_argument("--fold", type=int)
    p.add_argument("--epochs", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_classify)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (DataError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
