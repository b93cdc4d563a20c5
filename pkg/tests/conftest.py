from __future__ import annotations

import numpy as np
import pytest

WORDS = (
    "alpha bravo charlie delta echo foxtrot golf hotel india juliet kilo lima "
    "mike november oscar papa quebec romeo sierra tango uniform victor whiskey "
    "xray yankee zulu"
).split()

TERMINALS = [".", "!", "?", "..."]


def random_sentence(gen: np.random.Generator, max_words: int = 9) -> str:
    k = int(gen.integers(1, max_words + 1))
    words = [WORDS[int(gen.integers(0, len(WORDS)))] for _ in range(k)]
    return " ".join(words) + TERMINALS[int(gen.integers(0, len(TERMINALS)))]


def random_text(gen: np.random.Generator, max_paragraphs: int = 4,
                max_sentences: int = 6) -> str:
    paragraphs = []
    for _ in range(int(gen.integers(1, max_paragraphs + 1))):
        n = int(gen.integers(1, max_sentences + 1))
        paragraphs.append(" ".join(random_sentence(gen) for _ in range(n)))
    return "\n\n".join(paragraphs)


@pytest.fixture
def rng():
    return np.random.default_rng(20240811)
