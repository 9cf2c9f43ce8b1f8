import numpy as np
import pytest

from dictner.corpus import Corpus, tokenize
from dictner.dictionary import Dictionary, DictEntry


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def sent(text):
    return tokenize(text)


def corpus_of(*lines):
    return Corpus(sentences=[tokenize(line) for line in lines], source_path="<mem>")


@pytest.fixture
def fig_dictionary():
    """Two-type dictionary in the style of the biomedical running example:
    one Chemical entry, one Disease entry with a synonym, plus an
    unknown-typed quality phrase.
    """
    return Dictionary(
        entries=[
            DictEntry("Chemical", ("indomethacin",)),
            DictEntry("Disease", ("nephrotic", "syndrome"), (("nephrosis",),)),
        ],
        unknown_phrases=[("prostaglandin", "synthesis")],
    )


@pytest.fixture
def fig_sentence():
    return sent("Thus , by inhibition of prostaglandin synthesis it affects indomethacin .")
