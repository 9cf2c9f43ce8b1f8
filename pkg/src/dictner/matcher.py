"""Exact dictionary matching and conflict resolution.

Matching walks a token-level trie, so the per-sentence cost is linear in
sentence length times the number of emitted spans (depth is bounded by the
longest dictionary surface). Overlapping candidates are reduced to the
non-overlapping subset covering the most tokens; coverage ties prefer the
subset that is lexicographically smallest under (earlier start, then longer
span).
"""

from collections import Counter
from dataclasses import dataclass

from .dictionary import UNKNOWN_TYPE


@dataclass(frozen=True)
class MatchSpan:
    start: int
    end: int
    types: frozenset

    def __post_init__(self):
        if not self.start < self.end:
            raise ValueError(f"empty span [{self.start}, {self.end})")
        if not self.types:
            raise ValueError("span with no types")
        if UNKNOWN_TYPE in self.types and len(self.types) > 1:
            raise ValueError("Unknown cannot co-occur with a concrete type")

    @property
    def length(self):
        return self.end - self.start

    def sorted_types(self):
        return sorted(self.types)


@dataclass(frozen=True)
class AnnotatedSentence:
    sentence: "Sentence"
    spans: tuple

    def covering_span(self, index):
        for span in self.spans:
            if span.start <= index < span.end:
                return span
        return None


@dataclass(frozen=True)
class Mention:
    start: int
    end: int
    entity_type: str


class _TrieNode:
    __slots__ = ("children", "types", "unknown")

    def __init__(self):
        self.children = {}
        self.types = None
        self.unknown = False


class DictionaryMatcher:
    """Reusable matcher for one dictionary; build once, annotate many."""

    def __init__(self, dictionary, include_unknown=True):
        self.root = _TrieNode()
        for surface, types in dictionary.typed_surfaces().items():
            node = self._insert(surface)
            node.types = frozenset(types)
        if include_unknown:
            for phrase in dictionary.unknown_phrases:
                node = self._insert(phrase)
                if node.types is None:
                    node.unknown = True

    def _insert(self, surface):
        node = self.root
        for tok in surface:
            node = node.children.setdefault(tok, _TrieNode())
        return node

    def find_all(self, sentence):
        """All maximal-information matches; overlaps permitted. A typed
        match suppresses the Unknown match at the identical span.
        """
        words = sentence.normalized
        spans = []
        for start in range(len(words)):
            node = self.root
            for end in range(start, len(words)):
                node = node.children.get(words[end])
                if node is None:
                    break
                if node.types is not None:
                    spans.append(MatchSpan(start, end + 1, node.types))
                elif node.unknown:
                    spans.append(MatchSpan(start, end + 1, frozenset({UNKNOWN_TYPE})))
        return spans

    def annotate(self, sentence):
        spans = resolve_conflicts(self.find_all(sentence), len(sentence))
        return AnnotatedSentence(sentence=sentence, spans=tuple(spans))


def find_all_matches(sentence, dictionary):
    return DictionaryMatcher(dictionary).find_all(sentence)


def resolve_conflicts(spans, n):
    """Pick the non-overlapping subset maximizing covered tokens.

    best[i] is the maximum coverage using spans that start at or after i;
    reconstruction scans left to right, and at each position takes the
    longest span that still attains the optimum (skipping only when no
    span there can), which realizes the declared tie-break.
    """
    for span in spans:
        if span.start < 0 or span.end > n:
            raise ValueError(f"span [{span.start}, {span.end}) outside [0, {n})")
    by_start = [[] for _ in range(n + 1)]
    for span in spans:
        by_start[span.start].append(span)
    for bucket in by_start:
        bucket.sort(key=lambda s: -s.length)
    best = [0] * (n + 2)
    for i in range(n - 1, -1, -1):
        score = best[i + 1]
        for span in by_start[i]:
            score = max(score, span.length + best[span.end])
        best[i] = score
    chosen = []
    i = 0
    while i < n:
        picked = None
        for span in by_start[i]:
            if span.length + best[span.end] == best[i]:
                picked = span
                break
        if picked is None:
            i += 1
        else:
            chosen.append(picked)
            i = picked.end
    return chosen


def annotate(sentence, dictionary):
    return DictionaryMatcher(dictionary).annotate(sentence)


def build_type_votes(dictionary):
    """One vote per distinct (type, surface) pair."""
    pairs = set()
    for entry in dictionary.entries:
        for surface in entry.surfaces():
            pairs.add((entry.entity_type, surface))
    votes = {}
    for etype, surface in sorted(pairs):
        votes.setdefault(surface, Counter())[etype] += 1
    return votes


def majority_type(counter):
    """Winning type; vote ties broken by lexicographic type name."""
    top = max(counter.values())
    return min(t for t, c in counter.items() if c == top)


def baseline_tag(corpus, dictionary, type_votes=None):
    """Dictionary-match tagger: exact typed matches, conflict-resolved,
    each span typed by majority vote over its surface. Unknown phrases are
    ignored.
    """
    if type_votes is None:
        type_votes = build_type_votes(dictionary)
    matcher = DictionaryMatcher(dictionary, include_unknown=False)
    tagged = []
    for sentence in corpus.sentences:
        ann = matcher.annotate(sentence)
        words = sentence.normalized
        mentions = []
        for span in ann.spans:
            surface = words[span.start : span.end]
            etype = majority_type(type_votes[surface])
            mentions.append(Mention(span.start, span.end, etype))
        tagged.append(mentions)
    return tagged
