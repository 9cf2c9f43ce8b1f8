import pytest

from dictner.dictionary import (
    ScoredPhrase,
    merge_phrases,
    parse_dictionary,
    parse_dictionary_lines,
    serialize_dictionary,
    tailor,
)
from dictner.errors import MalformedLine

from conftest import corpus_of


class TestParse:
    def test_single_entry_no_synonyms(self):
        d = parse_dictionary_lines(["Chemical\tindomethacin"])
        assert len(d.entries) == 1
        entry = d.entries[0]
        assert entry.entity_type == "Chemical"
        assert entry.canonical == ("indomethacin",)
        assert entry.synonyms == ()

    def test_multiword_canonical_and_synonym(self):
        d = parse_dictionary_lines(["Disease\tnephrotic syndrome\tnephrosis"])
        assert d.entries[0].canonical == ("nephrotic", "syndrome")
        assert d.entries[0].synonyms == (("nephrosis",),)

    def test_no_tab_is_malformed(self):
        with pytest.raises(MalformedLine):
            parse_dictionary_lines(["Chemical indomethacin"])

    def test_reserved_type_rejected(self):
        with pytest.raises(MalformedLine):
            parse_dictionary_lines(["Unknown\tfoo"])
        with pytest.raises(MalformedLine):
            parse_dictionary_lines(["None\tfoo"])

    def test_case_folding_and_dedup(self):
        d = parse_dictionary_lines(["Chemical\tAspirin", "Chemical\taspirin"])
        assert len(d.entries) == 1
        assert d.entries[0].canonical == ("aspirin",)

    def test_file_round_trip(self, tmp_path):
        text = "Chemical\taspirin\nDisease\tnephrotic syndrome\tnephrosis\n"
        p = tmp_path / "d.tsv"
        p.write_text(text)
        d = parse_dictionary(p)
        assert serialize_dictionary(d) == text


class TestTailor:
    def test_absent_canonical_removes_aliases_too(self):
        d = parse_dictionary_lines(["Person\twednesday addams\twednesday"])
        corpus = corpus_of("on wednesday we met")
        kept = tailor(d, corpus)
        assert kept.entries == []

    def test_present_canonical_keeps_synonyms(self):
        d = parse_dictionary_lines(["Person\twednesday addams\twednesday"])
        corpus = corpus_of("wednesday addams arrived on wednesday")
        kept = tailor(d, corpus)
        assert len(kept.entries) == 1
        assert kept.entries[0].synonyms == (("wednesday",),)

    def test_empty_corpus_drops_everything(self):
        d = parse_dictionary_lines(["Chemical\taspirin"])
        corpus = corpus_of("nothing here")
        corpus.sentences = []
        assert tailor(d, corpus).entries == []

    def test_subset_and_idempotent(self):
        d = parse_dictionary_lines(
            ["Chemical\taspirin", "Disease\tgout", "Chemical\tzinc oxide"]
        )
        corpus = corpus_of("aspirin helps with gout", "zinc alone")
        once = tailor(d, corpus)
        assert set(e.canonical for e in once.entries) <= set(
            e.canonical for e in d.entries
        )
        twice = tailor(once, corpus)
        assert twice.entries == once.entries

    def test_unknown_phrases_untouched(self):
        d = parse_dictionary_lines(["Chemical\taspirin"])
        d.unknown_phrases.append(("quality", "phrase"))
        kept = tailor(d, corpus_of("no match here"))
        assert kept.unknown_phrases == [("quality", "phrase")]


class TestMergePhrases:
    def test_multiword_above_threshold_added(self, fig_dictionary):
        out = merge_phrases(
            fig_dictionary, [ScoredPhrase(("prostaglandin", "receptor"), 0.7)]
        )
        assert ("prostaglandin", "receptor") in out.unknown_phrases

    def test_single_word_below_single_threshold_rejected(self, fig_dictionary):
        out = merge_phrases(fig_dictionary, [ScoredPhrase(("laptop",), 0.8)])
        assert ("laptop",) not in out.unknown_phrases

    def test_single_word_above_threshold_added(self, fig_dictionary):
        out = merge_phrases(fig_dictionary, [ScoredPhrase(("laptop",), 0.95)])
        assert ("laptop",) in out.unknown_phrases

    def test_typed_surface_dominates(self, fig_dictionary):
        out = merge_phrases(fig_dictionary, [ScoredPhrase(("indomethacin",), 0.95)])
        assert ("indomethacin",) not in out.unknown_phrases

    def test_typed_entries_never_removed(self, fig_dictionary):
        out = merge_phrases(fig_dictionary, [ScoredPhrase(("anything", "else"), 0.9)])
        assert out.entries == fig_dictionary.entries

    def test_monotone_in_thresholds(self, fig_dictionary):
        phrases = [
            ScoredPhrase(("a", "b"), 0.4),
            ScoredPhrase(("c", "d"), 0.6),
            ScoredPhrase(("e",), 0.85),
        ]
        strict = merge_phrases(fig_dictionary, phrases, 0.5, 0.9)
        loose = merge_phrases(fig_dictionary, phrases, 0.3, 0.8)
        assert len(loose.unknown_phrases) >= len(strict.unknown_phrases)

    def test_score_range_validated(self):
        with pytest.raises(ValueError):
            ScoredPhrase(("x",), 1.5)
