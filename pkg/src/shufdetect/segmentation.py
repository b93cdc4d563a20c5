"""Parse raw text into a paragraph / sentence / word hierarchy and render it back.

The splitter is deliberately simple and purely punctuation based: paragraphs
are separated by blank lines, sentences end at a run of terminal punctuation
(optionally followed by closing quotes/brackets) before whitespace, and words
are whitespace tokens.  No abbreviation lexicon is used, so "Dr. Smith" splits
after "Dr." — the consumer only needs a *consistent* segmentation, not a
linguistically perfect one.  All whitespace runs inside a sentence are
normalized to single spaces so render/segment round trips are byte stable.
"""

from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass, field

from .errors import EmptyInput

# Terminal marks include the fullwidth CJK forms so multilingual input keeps
# sentence structure.  Closing quotes/brackets may trail the terminal run.
# Latin terminals only end a sentence before whitespace (so "3.14" stays one
# token); the fullwidth marks end one anywhere, since CJK uses no spaces.
_TERMINALS = ".!?…"
_CJK_TERMINALS = "。！？"
_CLOSERS = "\"'”’»)]」』"
_SENT_END = re.compile(
    rf"((?:[{re.escape(_TERMINALS)}{re.escape(_CJK_TERMINALS)}]+"
    rf"[{re.escape(_CLOSERS)}]*(?=\s|$))"
    rf"|(?:[{re.escape(_CJK_TERMINALS)}]+[{re.escape(_CLOSERS)}]*))"
)
_PARA_SPLIT = re.compile(r"\n[ \t\r]*\n+")


@dataclass(frozen=True)
class Sentence:
    """Ordered words plus the terminal punctuation that closed the sentence."""

    words: tuple[str, ...]
    terminal: str = ""

    def render(self) -> str:
        return " ".join(self.words) + self.terminal


@dataclass(frozen=True)
class Paragraph:
    sentences: tuple[Sentence, ...]

    def render(self) -> str:
        return " ".join(s.render() for s in self.sentences)


@dataclass(frozen=True)
class Document:
    paragraphs: tuple[Paragraph, ...]
    source_hash: str = field(default="", compare=False)

    def render(self) -> str:
        return "\n\n".join(p.render() for p in self.paragraphs)


def _split_sentences(paragraph_text: str) -> list[Sentence]:
    """Split one paragraph into sentences at terminal punctuation runs."""
    sentences: list[Sentence] = []
    pos = 0
    for m in _SENT_END.finditer(paragraph_text):
        body = paragraph_text[pos:m.start()]
        words = tuple(body.split())
        if words:
            sentences.append(Sentence(words=words, terminal=m.group(1)))
        # A terminal run with no preceding words (e.g. a stray "...") carries
        # no word content; it is dropped rather than forming an empty sentence.
        pos = m.end()
    tail = tuple(paragraph_text[pos:].split())
    if tail:
        sentences.append(Sentence(words=tail, terminal=""))
    if not sentences:
        # Paragraph made only of terminal punctuation: keep its tokens as
        # words so a non-blank input always yields a non-empty document.
        tokens = tuple(paragraph_text.split())
        if tokens:
            sentences.append(Sentence(words=tokens, terminal=""))
    return sentences


def segment(text: str) -> Document:
    """Build the Document hierarchy for ``text``.

    Raises EmptyInput when the text is all whitespace.
    """
    if not text or not text.strip():
        raise EmptyInput("text contains no non-whitespace characters")
    paragraphs: list[Paragraph] = []
    for block in _PARA_SPLIT.split(text.strip()):
        if not block.strip():
            continue
        sentences = _split_sentences(block)
        if sentences:
            paragraphs.append(Paragraph(sentences=tuple(sentences)))
    doc = Document(paragraphs=tuple(paragraphs))
    digest = hashlib.sha256(doc.render().encode("utf-8")).hexdigest()
    return Document(paragraphs=doc.paragraphs, source_hash=digest)


def render(doc: Document) -> str:
    """Inverse of segment up to whitespace normalization."""
    return doc.render()
