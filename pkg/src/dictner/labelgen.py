"""Supervision structures built from annotated sentences.

Two schemes are produced from the same annotation:

* a per-token allowed-label lattice over the IOBES-with-types vocabulary,
  where unknown-typed spans permit every label and uncovered tokens are
  pinned to O;
* gap labels between adjacent tokens (Tie / Break / Unknown) plus typed
  supervision spans for the runs whose extent is certain.
"""

from dataclasses import dataclass

import numpy as np

from .dictionary import NONE_TYPE, UNKNOWN_TYPE

TIE = "Tie"
BREAK = "Break"
UNKNOWN = "Unknown"

_POSITION_TAGS = ("B", "I", "E", "S")


class LabelVocab:
    """Ordered IOBES label vocabulary: O first, then B/I/E/S per sorted
    type, 4k+1 labels total. start/end exist only as transition indices.
    """

    def __init__(self, types):
        self.types = sorted(set(types))
        self.labels = ["O"]
        for etype in self.types:
            for tag in _POSITION_TAGS:
                self.labels.append(f"{tag}-{etype}")
        self._index = {lab: i for i, lab in enumerate(self.labels)}
        self.o_index = 0
        self.start = len(self.labels)
        self.end = len(self.labels) + 1

    def __len__(self):
        return len(self.labels)

    def index(self, label):
        return self._index[label]

    def label(self, index):
        return self.labels[index]


@dataclass
class IobesLattice:
    allowed: np.ndarray  # (n, len(vocab)) bool
    vocab: LabelVocab

    def __len__(self):
        return self.allowed.shape[0]

    def allowed_labels(self, i):
        return [self.vocab.label(j) for j in np.flatnonzero(self.allowed[i])]

    def is_unconstrained(self):
        return bool(self.allowed.all())


@dataclass(frozen=True)
class SupervisionSpan:
    start: int
    end: int
    types: frozenset


@dataclass
class TieBreakAnnotation:
    gap_labels: list  # length n-1, values TIE | BREAK | UNKNOWN
    supervision_spans: list  # SupervisionSpan, NONE_TYPE for untyped runs

    def __len__(self):
        return len(self.gap_labels) + 1


def build_iobes_lattice(ann, types):
    """Allowed-label sets per token: typed spans pin position tags for each
    matched type, unknown spans allow everything, uncovered tokens are O.
    """
    vocab = LabelVocab(types)
    n = len(ann.sentence)
    allowed = np.zeros((n, len(vocab)), dtype=bool)
    covered = np.zeros(n, dtype=bool)
    for span in ann.spans:
        covered[span.start : span.end] = True
        if UNKNOWN_TYPE in span.types:
            allowed[span.start : span.end, :] = True
            continue
        for etype in span.sorted_types():
            if f"S-{etype}" not in vocab._index:
                raise ValueError(f"span type {etype!r} not in type inventory")
            if span.length == 1:
                allowed[span.start, vocab.index(f"S-{etype}")] = True
            else:
                allowed[span.start, vocab.index(f"B-{etype}")] = True
                allowed[span.end - 1, vocab.index(f"E-{etype}")] = True
                for i in range(span.start + 1, span.end - 1):
                    allowed[i, vocab.index(f"I-{etype}")] = True
    allowed[~covered, vocab.o_index] = True
    return IobesLattice(allowed=allowed, vocab=vocab)


def _extended_gaps(ann):
    """Gap labels at positions 0..n (position i sits before token i); the
    sentence edges are Break unless the edge token lies in an unknown span.
    """
    n = len(ann.sentence)
    span_at = [None] * n
    for span in ann.spans:
        for i in range(span.start, span.end):
            span_at[i] = span

    def is_unknown(span):
        return span is not None and UNKNOWN_TYPE in span.types

    gaps = []
    for pos in range(n + 1):
        left = span_at[pos - 1] if pos > 0 else None
        right = span_at[pos] if pos < n else None
        if pos in (0, n):
            inner = right if pos == 0 else left
            gaps.append(UNKNOWN if is_unknown(inner) else BREAK)
        elif left is not None and left is right:
            gaps.append(UNKNOWN if is_unknown(left) else TIE)
        elif is_unknown(left) or is_unknown(right):
            gaps.append(UNKNOWN)
        else:
            gaps.append(BREAK)
    return gaps, span_at


def build_tie_break(ann, types):
    """Tie/Break/Unknown gap labels plus typed supervision spans.

    A supervision span is a run bounded by Break gaps containing only Tie
    gaps; it carries the matched span's types when the run coincides with
    a typed match and NONE_TYPE otherwise. Runs touching an Unknown gap
    yield no supervision.
    """
    del types  # the scheme itself is type-agnostic; spans carry match types
    n = len(ann.sentence)
    gaps, span_at = _extended_gaps(ann)
    typed_spans = {
        (s.start, s.end): s for s in ann.spans if UNKNOWN_TYPE not in s.types
    }
    spans = []
    run_start = 0 if gaps[0] == BREAK else None
    for pos in range(1, n + 1):
        label = gaps[pos]
        if label == TIE:
            continue
        if label == BREAK:
            if run_start is not None:
                exact = typed_spans.get((run_start, pos))
                types_here = (
                    exact.types if exact is not None else frozenset({NONE_TYPE})
                )
                spans.append(SupervisionSpan(run_start, pos, types_here))
            run_start = pos if pos < n else None
        else:  # UNKNOWN poisons the current run; next run starts at a Break
            run_start = None
    return TieBreakAnnotation(gap_labels=gaps[1:n], supervision_spans=spans)


def iobes_to_mentions(labels):
    """Decode IOBES label strings into mentions; malformed fragments are
    dropped.
    """
    from .matcher import Mention

    mentions = []
    open_start = None
    open_type = None
    for i, label in enumerate(labels):
        tag, _, etype = label.partition("-")
        if tag == "S":
            mentions.append(Mention(i, i + 1, etype))
            open_start, open_type = None, None
        elif tag == "B":
            open_start, open_type = i, etype
        elif tag == "I":
            if open_type != etype:
                open_start, open_type = None, None
        elif tag == "E":
            if open_type == etype and open_start is not None:
                mentions.append(Mention(open_start, i + 1, etype))
            open_start, open_type = None, None
        else:
            open_start, open_type = None, None
    return mentions


def mentions_to_iobes(mentions, n):
    """Render non-overlapping mentions as an IOBES label sequence."""
    labels = ["O"] * n
    for m in mentions:
        if m.end - m.start == 1:
            labels[m.start] = f"S-{m.entity_type}"
        else:
            labels[m.start] = f"B-{m.entity_type}"
            labels[m.end - 1] = f"E-{m.entity_type}"
            for i in range(m.start + 1, m.end - 1):
                labels[i] = f"I-{m.entity_type}"
    return labels


def dump_sentence(index, ann, lattice, tiebreak):
    """Plain-text debug dump: token lines with allowed labels, gap lines,
    supervision-span lines.
    """
    lines = [f"sentence\t{index}"]
    for i, token in enumerate(ann.sentence.tokens):
        lines.append(f"token\t{token.surface}\t{','.join(lattice.allowed_labels(i))}")
    for i, label in enumerate(tiebreak.gap_labels, start=1):
        lines.append(f"gap\t{i}\t{label}")
    for span in tiebreak.supervision_spans:
        lines.append(f"span\t{span.start}\t{span.end}\t{','.join(sorted(span.types))}")
    return "\n".join(lines) + "\n"
