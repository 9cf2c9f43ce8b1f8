"""Tab-separated token/label files: one token per line, blank line between
sentences, trailing newline.
"""

from .corpus import Sentence, Token
from .errors import IoError, MalformedLine
from .labelgen import iobes_to_mentions


def write_conll(path, sentences, labels_per_sentence):
    lines = []
    for sentence, labels in zip(sentences, labels_per_sentence):
        for token, label in zip(sentence.tokens, labels):
            lines.append(f"{token.surface}\t{label}")
        lines.append("")
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("\n".join(lines) + ("\n" if lines else ""))
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from exc


def read_conll(path):
    """Returns (sentences, labels_per_sentence)."""
    try:
        with open(path, encoding="utf-8") as fh:
            raw = fh.read()
    except OSError as exc:
        raise IoError(f"cannot read {path}: {exc}") from exc
    sentences = []
    labels = []
    cur_tokens = []
    cur_labels = []
    for lineno, line in enumerate(raw.splitlines(), start=1):
        if not line.strip():
            if cur_tokens:
                sentences.append(Sentence(tokens=tuple(cur_tokens)))
                labels.append(cur_labels)
                cur_tokens, cur_labels = [], []
            continue
        fields = line.split("\t")
        if len(fields) != 2:
            raise MalformedLine(lineno, "expected token<TAB>label")
        cur_tokens.append(Token.make(fields[0]))
        cur_labels.append(fields[1])
    if cur_tokens:
        sentences.append(Sentence(tokens=tuple(cur_tokens)))
        labels.append(cur_labels)
    return sentences, labels


def read_gold(path):
    """Returns list of (Sentence, gold mentions) from a labeled file."""
    sentences, labels = read_conll(path)
    return [(s, iobes_to_mentions(labs)) for s, labs in zip(sentences, labels)]
