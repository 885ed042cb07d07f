"""modalkit: corpus toolkit and evaluation harness for event-based modality detection."""

from .baseline import MajorityLexicon, tag_majority, train_majority
from .conll import ConllParseError, load_conll, parse_conll, save_conll, write_conll
from .corpus import (
    Corpus,
    CorpusError,
    CorpusStats,
    ModalInstance,
    Sentence,
    Token,
    compute_stats,
    extract_event_head,
)
from .evaluation import (
    ChunkMetrics,
    breakdown_by_pos,
    extract_chunks,
    score,
    sentence_sense_accuracy,
)
from .schemes import (
    Scheme,
    SchemeError,
    SchemeKind,
    TagSequence,
    attach_feature_marks,
    decode,
    decode_instances,
    encode,
    encode_all,
    parse_scheme,
    repair,
)
from .splits import SplitManifest, load_manifest, make_splits, save_manifest
from .taxonomy import (
    CoarseSense,
    ConflatedSense,
    FineSense,
    Granularity,
    LegacySense,
    coarsen,
    conflate,
    map_legacy,
    project,
)

__version__ = "0.1.0"

__all__ = [
    "ChunkMetrics",
    "CoarseSense",
    "ConflatedSense",
    "ConllParseError",
    "Corpus",
    "CorpusError",
    "CorpusStats",
    "FineSense",
    "Granularity",
    "LegacySense",
    "MajorityLexicon",
    "ModalInstance",
    "Scheme",
    "SchemeError",
    "SchemeKind",
    "Sentence",
    "SplitManifest",
    "TagSequence",
    "Token",
    "attach_feature_marks",
    "breakdown_by_pos",
    "coarsen",
    "compute_stats",
    "conflate",
    "decode",
    "decode_instances",
    "encode",
    "encode_all",
    "extract_chunks",
    "extract_event_head",
    "load_conll",
    "load_manifest",
    "make_splits",
    "map_legacy",
    "parse_conll",
    "parse_scheme",
    "project",
    "repair",
    "save_conll",
    "save_manifest",
    "score",
    "sentence_sense_accuracy",
    "tag_majority",
    "train_majority",
    "write_conll",
]
