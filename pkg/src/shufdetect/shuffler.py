"""Randomized text shuffling: the coherence-breaking step of the detector.

Per paragraph: a single-sentence paragraph gets its words permuted uniformly
at random (terminal punctuation stays in final position); a multi-sentence
paragraph gets its sentence order permuted with word order inside each
sentence untouched.  Paragraph order is always preserved.

Randomness comes from a seeded PCG64 generator driving an explicit
Fisher-Yates walk, so the exact output is reproducible across platforms from
the 64-bit seed alone.  An identity permutation drawn by chance is kept as-is
(uniform permutations include the identity; there is no resampling).
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np

from .segmentation import Document, Paragraph, Sentence, render, segment


@dataclass(frozen=True)
class ShuffleSeed:
    """64-bit seed; same seed and document give byte-identical output."""

    seed: int

    def __post_init__(self):
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must fit in an unsigned 64-bit integer")

    def generator(self) -> np.random.Generator:
        return np.random.Generator(np.random.PCG64(self.seed))


def _permutation(n: int, gen: np.random.Generator) -> list[int]:
    """Fisher-Yates with one bounded draw per step, low index last."""
    idx = list(range(n))
    for i in range(n - 1, 0, -1):
        j = int(gen.integers(0, i + 1))
        idx[i], idx[j] = idx[j], idx[i]
    return idx


def _shuffle_paragraph(par: Paragraph, gen: np.random.Generator) -> Paragraph:
    if len(par.sentences) == 1:
        sent = par.sentences[0]
        order = _permutation(len(sent.words), gen)
        words = tuple(sent.words[i] for i in order)
        return Paragraph(sentences=(Sentence(words=words, terminal=sent.terminal),))
    order = _permutation(len(par.sentences), gen)
    return Paragraph(sentences=tuple(par.sentences[i] for i in order))


def shuffle(doc: Document, seed: ShuffleSeed | int) -> Document:
    """Return the shuffled counterpart of ``doc``.

    Paragraphs are processed in order against a single seeded stream, so the
    result is a pure function of (document, seed).
    """
    if isinstance(seed, int):
        seed = ShuffleSeed(seed)
    gen = seed.generator()
    paragraphs = tuple(_shuffle_paragraph(p, gen) for p in doc.paragraphs)
    shuffled = Document(paragraphs=paragraphs)
    digest = hashlib.sha256(shuffled.render().encode("utf-8")).hexdigest()
    return Document(paragraphs=paragraphs, source_hash=digest)


def shuffle_text(text: str, seed: ShuffleSeed | int) -> str:
    """segment -> shuffle -> render composition for raw strings."""
    return render(shuffle(segment(text), seed))
