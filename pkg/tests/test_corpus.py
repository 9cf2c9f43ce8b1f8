import numpy as np
import pytest
from hypothesis import given, strategies as st

from dictner.corpus import (
    dump_embeddings,
    load_corpus,
    load_embeddings,
    tokenize,
)
from dictner.errors import AllLinesEmpty, DimensionMismatch, EmptyLine, IoError


class TestTokenize:
    def test_whitespace_split(self):
        assert tokenize("Thus , by inhibition").surfaces == (
            "Thus",
            ",",
            "by",
            "inhibition",
        )

    def test_trailing_punctuation_detached(self):
        assert tokenize("8GB RAM.").surfaces == ("8GB", "RAM", ".")

    def test_leading_and_trailing(self):
        assert tokenize("(aspirin).").surfaces == ("(", "aspirin", ")", ".")

    def test_internal_punctuation_kept(self):
        assert tokenize("up-regulated genes").surfaces == ("up-regulated", "genes")

    def test_all_punct_token(self):
        assert tokenize("...").surfaces == (".", ".", ".")

    def test_empty_line_raises(self):
        with pytest.raises(EmptyLine):
            tokenize("")
        with pytest.raises(EmptyLine):
            tokenize("   ")

    def test_normalized_is_casefold(self):
        s = tokenize("RAM Disk")
        assert s.normalized == ("ram", "disk")

    @given(st.text(alphabet=st.characters(min_codepoint=33, max_codepoint=126), min_size=1))
    def test_idempotent_on_rejoined_output(self, text):
        try:
            first = tokenize(text)
        except EmptyLine:
            return
        again = tokenize(" ".join(first.surfaces))
        assert again.surfaces == first.surfaces


class TestLoadCorpus:
    def test_two_lines(self, tmp_path):
        p = tmp_path / "c.txt"
        p.write_text("a b\nc d\n")
        corpus = load_corpus(p)
        assert len(corpus) == 2

    def test_blank_middle_line_skipped(self, tmp_path):
        p = tmp_path / "c.txt"
        p.write_text("a b\n\nc d\n")
        assert len(load_corpus(p)) == 2

    def test_missing_file(self, tmp_path):
        with pytest.raises(IoError):
            load_corpus(tmp_path / "missing.txt")

    def test_all_blank(self, tmp_path):
        p = tmp_path / "c.txt"
        p.write_text("\n \n")
        with pytest.raises(AllLinesEmpty):
            load_corpus(p)


class TestLoadEmbeddings:
    def test_basic_entry(self, tmp_path):
        p = tmp_path / "e.txt"
        p.write_text("cat 0.1 0.2\n")
        table = load_embeddings(p, 2)
        assert np.allclose(table.vectors["cat"], [0.1, 0.2])

    def test_unk_is_mean(self, tmp_path):
        p = tmp_path / "e.txt"
        p.write_text("cat 0.1 0.2\ndog 0.3 0.6\n")
        table = load_embeddings(p, 2)
        assert np.allclose(table.unk_vector, [0.2, 0.4])

    def test_dimension_mismatch(self, tmp_path):
        p = tmp_path / "e.txt"
        p.write_text("cat 0.1 0.2 0.3\n")
        with pytest.raises(DimensionMismatch):
            load_embeddings(p, 2)

    def test_case_folded_and_first_wins(self, tmp_path):
        p = tmp_path / "e.txt"
        p.write_text("Cat 1 2\ncat 3 4\n")
        table = load_embeddings(p, 2)
        assert np.allclose(table.vectors["cat"], [1, 2])
        assert len(table.vectors) == 1

    def test_round_trip(self, tmp_path, rng):
        p = tmp_path / "e.txt"
        words = [f"w{i}" for i in range(5)]
        lines = [
            w + " " + " ".join(repr(float(v)) for v in rng.standard_normal(3))
            for w in words
        ]
        p.write_text("\n".join(lines) + "\n")
        table = load_embeddings(p, 3)
        q = tmp_path / "e2.txt"
        q.write_text(dump_embeddings(table))
        table2 = load_embeddings(q, 3)
        assert table.vectors.keys() == table2.vectors.keys()
        for w in words:
            assert np.array_equal(table.vectors[w], table2.vectors[w])
        assert np.array_equal(table.unk_vector, table2.unk_vector)
