"""Typed entity dictionary plus unknown-typed quality phrases.

Two reserved type names exist and are never user-supplied: NONE_TYPE marks
spans with no entity type, UNKNOWN_TYPE marks quality-phrase matches whose
type is undecided.
"""

from dataclasses import dataclass, field, replace

from .errors import IoError, MalformedLine

NONE_TYPE = "None"
UNKNOWN_TYPE = "Unknown"
RESERVED_TYPES = frozenset({NONE_TYPE, UNKNOWN_TYPE})


def _normalize_surface(text):
    toks = tuple(text.lower().split())
    return toks


@dataclass(frozen=True)
class DictEntry:
    entity_type: str
    canonical: tuple
    synonyms: tuple = ()

    def surfaces(self):
        yield self.canonical
        yield from self.synonyms


@dataclass(frozen=True)
class ScoredPhrase:
    phrase: tuple
    score: float

    def __post_init__(self):
        if not 0.0 <= self.score <= 1.0:
            raise ValueError(f"phrase score {self.score} outside [0, 1]")


@dataclass
class Dictionary:
    entries: list = field(default_factory=list)
    unknown_phrases: list = field(default_factory=list)

    def types(self):
        """Distinct user type names, sorted."""
        return sorted({e.entity_type for e in self.entries})

    def typed_surfaces(self):
        """Map surface tuple -> sorted list of types carrying it."""
        out = {}
        for entry in self.entries:
            for surface in entry.surfaces():
                out.setdefault(surface, set()).add(entry.entity_type)
        return {s: sorted(ts) for s, ts in out.items()}


def parse_dictionary(path):
    """Parse the TSV dictionary format: TYPE <TAB> canonical [<TAB> synonym]*"""
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise IoError(f"cannot read dictionary {path}: {exc}") from exc
    return parse_dictionary_lines(lines)


def parse_dictionary_lines(lines):
    entries = []
    seen = set()
    for lineno, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        fields = line.rstrip("\n").split("\t")
        if len(fields) < 2:
            raise MalformedLine(lineno, "expected TYPE<TAB>surface")
        etype = fields[0].strip()
        if not etype:
            raise MalformedLine(lineno, "empty type name")
        if etype in RESERVED_TYPES:
            raise MalformedLine(lineno, f"type name {etype!r} is reserved")
        canonical = _normalize_surface(fields[1])
        if not canonical:
            raise MalformedLine(lineno, "empty canonical surface")
        synonyms = []
        for raw in fields[2:]:
            surface = _normalize_surface(raw)
            if surface and surface != canonical and surface not in synonyms:
                synonyms.append(surface)
        key = (etype, canonical, tuple(synonyms))
        if key in seen:
            continue
        seen.add(key)
        entries.append(
            DictEntry(entity_type=etype, canonical=canonical, synonyms=tuple(synonyms))
        )
    return Dictionary(entries=entries)


def serialize_dictionary(dictionary):
    lines = []
    for entry in dictionary.entries:
        fields = [entry.entity_type, " ".join(entry.canonical)]
        fields.extend(" ".join(s) for s in entry.synonyms)
        lines.append("\t".join(fields))
    return "\n".join(lines) + ("\n" if lines else "")


def load_phrases(path):
    """Parse the quality-phrase file: score <TAB> phrase per line."""
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise IoError(f"cannot read phrases {path}: {exc}") from exc
    phrases = []
    for lineno, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        fields = line.split("\t")
        if len(fields) != 2:
            raise MalformedLine(lineno, "expected score<TAB>phrase")
        try:
            score = float(fields[0])
        except ValueError:
            raise MalformedLine(lineno, f"bad score {fields[0]!r}") from None
        if not 0.0 <= score <= 1.0:
            raise MalformedLine(lineno, f"score {score} outside [0, 1]")
        phrase = _normalize_surface(fields[1])
        if not phrase:
            raise MalformedLine(lineno, "empty phrase")
        phrases.append(ScoredPhrase(phrase=phrase, score=score))
    return phrases


def tailor(dictionary, corpus):
    """Drop entries whose canonical surface never occurs contiguously
    (case-folded) in the corpus. Synonyms of kept entries survive;
    unknown phrases are untouched.
    """
    max_len = max((len(e.canonical) for e in dictionary.entries), default=0)
    ngrams = set()
    for sentence in corpus.sentences:
        words = sentence.normalized
        for width in range(1, max_len + 1):
            for start in range(len(words) - width + 1):
                ngrams.add(words[start : start + width])
    kept = [e for e in dictionary.entries if e.canonical in ngrams]
    return replace(dictionary, entries=kept)


def merge_phrases(dictionary, phrases, multi_threshold=0.5, single_threshold=0.9):
    """Append quality phrases that clear their length-specific score
    threshold as unknown-typed surfaces. Phrases colliding with a typed
    surface are skipped: typed knowledge dominates.
    """
    typed = set()
    for entry in dictionary.entries:
        typed.update(entry.surfaces())
    existing = set(dictionary.unknown_phrases)
    added = list(dictionary.unknown_phrases)
    for sp in phrases:
        threshold = single_threshold if len(sp.phrase) == 1 else multi_threshold
        if sp.score < threshold:
            continue
        if sp.phrase in typed or sp.phrase in existing:
            continue
        existing.add(sp.phrase)
        added.append(sp.phrase)
    return replace(dictionary, unknown_phrases=added)
