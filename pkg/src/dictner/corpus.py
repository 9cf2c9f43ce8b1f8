"""Raw-text ingestion: tokenization, corpus loading, word embeddings."""

import string
from dataclasses import dataclass, field

import numpy as np

from .errors import AllLinesEmpty, DimensionMismatch, EmptyLine, IoError

_PUNCT = set(string.punctuation)


@dataclass(frozen=True)
class Token:
    surface: str
    normalized: str

    @classmethod
    def make(cls, surface):
        return cls(surface=surface, normalized=surface.lower())


@dataclass(frozen=True)
class Sentence:
    tokens: tuple

    def __len__(self):
        return len(self.tokens)

    @property
    def surfaces(self):
        return tuple(t.surface for t in self.tokens)

    @property
    def normalized(self):
        return tuple(t.normalized for t in self.tokens)


@dataclass
class Corpus:
    sentences: list
    source_path: str = ""

    def __len__(self):
        return len(self.sentences)


def tokenize(line):
    """Split a line into tokens: whitespace first, then detach leading and
    trailing ASCII punctuation characters as their own tokens.

    Raises EmptyLine if nothing remains.
    """
    out = []
    for chunk in line.split():
        i, j = 0, len(chunk)
        lead, trail = [], []
        while i < j and chunk[i] in _PUNCT:
            lead.append(chunk[i])
            i += 1
        while j > i and chunk[j - 1] in _PUNCT:
            trail.append(chunk[j - 1])
            j -= 1
        trail.reverse()
        out.extend(lead)
        if i < j:
            out.append(chunk[i:j])
        out.extend(trail)
    if not out:
        raise EmptyLine(f"no tokens in line: {line!r}")
    return Sentence(tokens=tuple(Token.make(s) for s in out))


def load_corpus(path):
    """Read a one-sentence-per-line UTF-8 file, skipping blank lines."""
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise IoError(f"cannot read corpus {path}: {exc}") from exc
    sentences = []
    for line in lines:
        if not line.strip():
            continue
        sentences.append(tokenize(line))
    if not sentences:
        raise AllLinesEmpty(f"no sentences in {path}")
    return Corpus(sentences=sentences, source_path=str(path))


@dataclass
class EmbeddingTable:
    dimension: int
    vectors: dict = field(default_factory=dict)
    unk_vector: np.ndarray = None

    def lookup(self, normalized_word):
        vec = self.vectors.get(normalized_word)
        return self.unk_vector if vec is None else vec


def load_embeddings(path, expected_dim):
    """Load `word v1 .. vd` lines; keys are case-folded, first occurrence
    wins, and the unknown-word vector is the mean of all loaded vectors.
    """
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise IoError(f"cannot read embeddings {path}: {exc}") from exc
    vectors = {}
    total = np.zeros(expected_dim)
    count = 0
    for lineno, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        parts = line.split()
        if len(parts) - 1 != expected_dim:
            raise DimensionMismatch(lineno, expected_dim, len(parts) - 1)
        word = parts[0].lower()
        vec = np.array([float(v) for v in parts[1:]], dtype=np.float64)
        if word not in vectors:
            vectors[word] = vec
            total += vec
            count += 1
    if count == 0:
        raise AllLinesEmpty(f"no embedding entries in {path}")
    return EmbeddingTable(
        dimension=expected_dim, vectors=vectors, unk_vector=total / count
    )


def dump_embeddings(table):
    """Serialize a table back to the input format (round-trips exactly)."""
    lines = []
    for word, vec in table.vectors.items():
        lines.append(word + " " + " ".join(repr(float(v)) for v in vec))
    return "\n".join(lines) + "\n"
