import numpy as np
import pytest

from dictner.dictionary import NONE_TYPE, Dictionary, DictEntry
from dictner.labelgen import (
    BREAK,
    TIE,
    UNKNOWN,
    LabelVocab,
    SupervisionSpan,
    build_iobes_lattice,
    build_tie_break,
    dump_sentence,
    iobes_to_mentions,
    mentions_to_iobes,
)
from dictner.matcher import AnnotatedSentence, MatchSpan, Mention, annotate

from conftest import sent


def ann_of(sentence, spans):
    return AnnotatedSentence(sentence=sentence, spans=tuple(spans))


TYPES = ["Chemical", "Disease"]


class TestLabelVocab:
    def test_size_is_4k_plus_1(self):
        assert len(LabelVocab(TYPES)) == 9
        assert len(LabelVocab(["A"])) == 5

    def test_start_end_outside_vocab(self):
        v = LabelVocab(TYPES)
        assert v.start == 9 and v.end == 10

    def test_deterministic_order(self):
        v = LabelVocab(["Disease", "Chemical"])
        assert v.labels[:5] == ["O", "B-Chemical", "I-Chemical", "E-Chemical", "S-Chemical"]


class TestIobesLattice:
    def test_singleton_typed_span(self):
        s = sent("take indomethacin now")
        lattice = build_iobes_lattice(
            ann_of(s, [MatchSpan(1, 2, frozenset({"Chemical"}))]), TYPES
        )
        assert lattice.allowed_labels(1) == ["S-Chemical"]
        assert lattice.allowed_labels(0) == ["O"]
        assert lattice.allowed_labels(2) == ["O"]

    def test_unknown_span_allows_all_nine(self):
        s = sent("of prostaglandin synthesis it")
        lattice = build_iobes_lattice(
            ann_of(s, [MatchSpan(1, 3, frozenset({"Unknown"}))]), TYPES
        )
        assert len(lattice.allowed_labels(1)) == 9
        assert len(lattice.allowed_labels(2)) == 9

    def test_multitoken_typed_span_positions(self):
        s = sent("severe nephrotic syndrome relapse")
        lattice = build_iobes_lattice(
            ann_of(s, [MatchSpan(1, 3, frozenset({"Disease"}))]), TYPES
        )
        assert lattice.allowed_labels(1) == ["B-Disease"]
        assert lattice.allowed_labels(2) == ["E-Disease"]

    def test_multi_type_span_unions_labels(self):
        s = sent("lead exposure")
        lattice = build_iobes_lattice(
            ann_of(s, [MatchSpan(0, 1, frozenset({"Chemical", "Disease"}))]), TYPES
        )
        assert lattice.allowed_labels(0) == ["S-Chemical", "S-Disease"]

    def test_fully_typed_sentence_single_path_round_trip(self):
        s = sent("aspirin cured nephrotic syndrome")
        spans = [
            MatchSpan(0, 1, frozenset({"Chemical"})),
            MatchSpan(2, 4, frozenset({"Disease"})),
        ]
        lattice = build_iobes_lattice(ann_of(s, spans), TYPES)
        assert (lattice.allowed.sum(axis=1) == 1).all()
        path = [lattice.vocab.label(j) for j in lattice.allowed.argmax(axis=1)]
        mentions = iobes_to_mentions(path)
        assert mentions == [Mention(0, 1, "Chemical"), Mention(2, 4, "Disease")]


class TestTieBreak:
    def test_tie_inside_matched_entity(self):
        s = sent("great ceramic unibody design")
        tb = build_tie_break(
            ann_of(s, [MatchSpan(1, 3, frozenset({"AspectTerm"}))]), ["AspectTerm"]
        )
        # gaps: great-ceramic, ceramic-unibody, unibody-design
        assert tb.gap_labels == [BREAK, TIE, BREAK]

    def test_unknown_gaps_around_phrase(self):
        s = sent("laptop with 8GB RAM inside")
        tb = build_tie_break(
            ann_of(s, [MatchSpan(2, 4, frozenset({"Unknown"}))]), ["AspectTerm"]
        )
        # gaps: laptop-with, with-8GB, 8GB-RAM, RAM-inside
        assert tb.gap_labels == [BREAK, UNKNOWN, UNKNOWN, UNKNOWN]

    def test_matched_unigram_breaks_both_sides(self):
        s = sent("new keyboard works")
        tb = build_tie_break(
            ann_of(s, [MatchSpan(1, 2, frozenset({"AspectTerm"}))]), ["AspectTerm"]
        )
        assert tb.gap_labels == [BREAK, BREAK]

    def test_supervision_spans_with_none_type(self):
        s = sent("new keyboard works")
        tb = build_tie_break(
            ann_of(s, [MatchSpan(1, 2, frozenset({"AspectTerm"}))]), ["AspectTerm"]
        )
        assert tb.supervision_spans == [
            SupervisionSpan(0, 1, frozenset({NONE_TYPE})),
            SupervisionSpan(1, 2, frozenset({"AspectTerm"})),
            SupervisionSpan(2, 3, frozenset({NONE_TYPE})),
        ]

    def test_unknown_adjacent_runs_excluded(self):
        s = sent("laptop with 8GB RAM inside")
        tb = build_tie_break(
            ann_of(s, [MatchSpan(2, 4, frozenset({"Unknown"}))]), []
        )
        # "with" touches the Unknown gap, as do "8GB RAM" and "inside"
        assert tb.supervision_spans == [SupervisionSpan(0, 1, frozenset({NONE_TYPE}))]

    def test_unknown_at_sentence_edge_excludes_edge_run(self):
        s = sent("8GB RAM works fine")
        tb = build_tie_break(ann_of(s, [MatchSpan(0, 2, frozenset({"Unknown"}))]), [])
        assert tb.gap_labels == [UNKNOWN, UNKNOWN, BREAK]
        assert tb.supervision_spans == [SupervisionSpan(3, 4, frozenset({NONE_TYPE}))]

    def test_fully_typed_sentence_has_no_unknown_gaps(self):
        s = sent("aspirin cured nephrotic syndrome")
        spans = [
            MatchSpan(0, 1, frozenset({"Chemical"})),
            MatchSpan(2, 4, frozenset({"Disease"})),
        ]
        tb = build_tie_break(ann_of(s, spans), TYPES)
        assert UNKNOWN not in tb.gap_labels

    def test_boundary_shift_changes_at_most_two_gaps(self):
        s = sent("a b c d e f g")
        base = build_tie_break(ann_of(s, [MatchSpan(2, 5, frozenset({"T"}))]), ["T"])
        for shifted_span in (MatchSpan(2, 4, frozenset({"T"})), MatchSpan(3, 5, frozenset({"T"}))):
            shifted = build_tie_break(ann_of(s, [shifted_span]), ["T"])
            diff = sum(
                1 for x, y in zip(base.gap_labels, shifted.gap_labels) if x != y
            )
            assert diff <= 2


class TestMentionCodec:
    def test_singleton(self):
        assert iobes_to_mentions(["S-Chemical"]) == [Mention(0, 1, "Chemical")]

    def test_begin_end_pair(self):
        assert iobes_to_mentions(["B-Disease", "E-Disease"]) == [Mention(0, 2, "Disease")]

    def test_type_mismatch_dropped(self):
        assert iobes_to_mentions(["B-Disease", "E-Chemical"]) == []

    def test_unclosed_dropped(self):
        assert iobes_to_mentions(["B-Disease", "I-Disease"]) == []

    def test_render_round_trip(self):
        mentions = [Mention(0, 1, "Chemical"), Mention(2, 5, "Disease")]
        labels = mentions_to_iobes(mentions, 6)
        assert labels == ["S-Chemical", "O", "B-Disease", "I-Disease", "E-Disease", "O"]
        assert iobes_to_mentions(labels) == mentions


class TestDump:
    def test_fig_style_dump(self, fig_dictionary, fig_sentence):
        ann = annotate(fig_sentence, fig_dictionary)
        lattice = build_iobes_lattice(ann, fig_dictionary.types())
        tb = build_tie_break(ann, fig_dictionary.types())
        text = dump_sentence(1, ann, lattice, tb)
        lines = text.splitlines()
        assert lines[0] == "sentence\t1"
        assert lines[1] == "token\tThus\tO"
        chem_line = [l for l in lines if l.startswith("token\tindomethacin")]
        assert chem_line == ["token\tindomethacin\tS-Chemical"]
        unknown_lines = [l for l in lines if l.startswith("token\tprostaglandin")]
        assert unknown_lines[0].count(",") == 8  # nine labels
