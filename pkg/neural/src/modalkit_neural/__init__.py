"""modalkit-neural: encoder-based taggers and sense classifiers for the
event-based modality toolkit. Talks to the toolkit through its file
formats (corpus CoNLL grammar, .tags files, split manifests) and CLI.
"""

from .config import ClassifierConfig, ConfigError, TaggerConfig
from .crf import LinearChainCRF

__version__ = "0.1.0"

__all__ = ["ClassifierConfig", "ConfigError", "LinearChainCRF", "TaggerConfig"]
