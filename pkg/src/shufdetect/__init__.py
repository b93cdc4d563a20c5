"""Zero-shot machine-generated-text detection from perplexity under shuffling.

A document and a randomly shuffled counterpart are scored by a small proxy
language model; five scalar features of the perplexity pair are looked up in
once-fitted per-class parametric densities, and per-feature votes decide the
label.  See README.md for the pipeline walkthrough.
"""

__version__ = "0.1.0"

from .features import FeatureType, FeatureVector, PerplexityPair, compute_all, compute_feature
from .segmentation import Document, Paragraph, Sentence, render, segment
from .shuffler import ShuffleSeed, shuffle, shuffle_text

__all__ = [
    "Document",
    "FeatureType",
    "FeatureVector",
    "Paragraph",
    "PerplexityPair",
    "Sentence",
    "ShuffleSeed",
    "compute_all",
    "compute_feature",
    "render",
    "segment",
    "shuffle",
    "shuffle_text",
    "__version__",
]
