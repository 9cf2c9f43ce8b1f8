"""Command-line surface.

Subcommands: tailor, label, train, predict, eval, baseline. Options come
from a `key = value` config file (# comments allowed) with repeatable
--set key=value overrides. Exit codes: 0 success, 1 usage/config error,
2 data error.
"""

import argparse
import dataclasses
import sys

from . import conll, labelgen, matcher, trainer
from .checkpoint import load_checkpoint, save_checkpoint
from .corpus import load_corpus, load_embeddings
from .dictionary import load_phrases, merge_phrases, parse_dictionary, serialize_dictionary, tailor
from .errors import AllLinesEmpty, ConfigError, DataError, IoError
from .labelgen import build_iobes_lattice, build_tie_break, mentions_to_iobes
from .matcher import DictionaryMatcher
from .neural.layers import embed
from .trainer import TrainConfig, evaluate


@dataclasses.dataclass
class RunConfig:
    corpus: str = ""
    dictionary: str = ""
    phrases: str = ""
    embeddings: str = ""
    dev: str = ""
    test: str = ""
    gold: str = ""
    checkpoint: str = ""
    output: str = ""
    log: str = ""
    embed_dim: int = 50
    max_sentences: int = 0  # 0 = no subsampling
    tailor: bool = False
    multi_threshold: float = 0.5
    single_threshold: float = 0.9
    train: TrainConfig = dataclasses.field(default_factory=TrainConfig)
    explicit: set = dataclasses.field(default_factory=set)


_TRAIN_FIELDS = {f.name: f.type for f in dataclasses.fields(TrainConfig)}
_RUN_FIELDS = {
    f.name: f.type
    for f in dataclasses.fields(RunConfig)
    if f.name not in ("train", "explicit")
}


def _parse_bool(raw):
    low = raw.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"expected a boolean, got {raw!r}")


def _assign(cfg, key, raw):
    raw = raw.strip()
    if key in _RUN_FIELDS:
        target, name, ftype = cfg, key, _RUN_FIELDS[key]
    elif key in _TRAIN_FIELDS:
        target, name, ftype = cfg.train, key, _TRAIN_FIELDS[key]
    else:
        raise ConfigError(f"unknown config key {key!r}")
    try:
        if ftype in (bool, "bool"):
            value = _parse_bool(raw)
        elif ftype in (int, "int"):
            value = int(raw)
        elif ftype in (float, "float"):
            value = float(raw)
        else:
            value = raw
    except ValueError as exc:
        raise ConfigError(f"bad value for {key}: {raw!r}") from exc
    setattr(target, name, value)
    cfg.explicit.add(key)


def load_config(path=None, overrides=()):
    cfg = RunConfig()
    if path:
        try:
            with open(path, encoding="utf-8") as fh:
                lines = fh.read().splitlines()
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        for lineno, line in enumerate(lines, start=1):
            body = line.split("#", 1)[0].strip()
            if not body:
                continue
            if "=" not in body:
                raise ConfigError(f"{path}:{lineno}: expected key = value")
            key, _, raw = body.partition("=")
            _assign(cfg, key.strip(), raw)
    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"--set expects key=value, got {item!r}")
        key, _, raw = item.partition("=")
        _assign(cfg, key.strip(), raw)
    return cfg


def _require(cfg, *keys):
    for key in keys:
        if not getattr(cfg, key):
            raise ConfigError(f"config key {key!r} is required for this command")


def _load_pipeline_corpus(cfg):
    corpus = load_corpus(cfg.corpus)
    if cfg.max_sentences > 0:
        corpus.sentences = corpus.sentences[: cfg.max_sentences]
    return corpus


def _prepare_dictionary(cfg, corpus):
    dictionary = parse_dictionary(cfg.dictionary)
    if cfg.tailor:
        dictionary = tailor(dictionary, corpus)
    if cfg.phrases:
        dictionary = merge_phrases(
            dictionary,
            load_phrases(cfg.phrases),
            multi_threshold=cfg.multi_threshold,
            single_threshold=cfg.single_threshold,
        )
    return dictionary


def cmd_tailor(args):
    dictionary = parse_dictionary(args.dict)
    corpus = load_corpus(args.corpus)
    kept = tailor(dictionary, corpus)
    removed = len(dictionary.entries) - len(kept.entries)
    try:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(serialize_dictionary(kept))
    except OSError as exc:
        raise IoError(f"cannot write {args.out}: {exc}") from exc
    print(f"retained {len(kept.entries)} removed {removed}")
    if not kept.entries:
        print("warning: tailored dictionary is empty", file=sys.stderr)
    return 0


def cmd_label(args):
    cfg = load_config(args.config, args.set)
    _require(cfg, "corpus", "dictionary", "output")
    corpus = _load_pipeline_corpus(cfg)
    dictionary = _prepare_dictionary(cfg, corpus)
    types = dictionary.types()
    dm = DictionaryMatcher(dictionary)
    chunks = []
    for index, sentence in enumerate(corpus.sentences, start=1):
        ann = dm.annotate(sentence)
        lattice = build_iobes_lattice(ann, types)
        tiebreak = build_tie_break(ann, types)
        chunks.append(labelgen.dump_sentence(index, ann, lattice, tiebreak))
    with open(cfg.output, "w", encoding="utf-8") as fh:
        fh.write("\n".join(chunks))
    print(f"labeled {len(corpus.sentences)} sentences -> {cfg.output}")
    return 0


def cmd_train(args):
    cfg = load_config(args.config, args.set)
    _require(cfg, "corpus", "dictionary", "embeddings", "dev", "checkpoint")
    corpus = _load_pipeline_corpus(cfg)
    dictionary = _prepare_dictionary(cfg, corpus)
    types = dictionary.types()
    table = load_embeddings(cfg.embeddings, cfg.embed_dim)
    dev = conll.read_gold(cfg.dev)
    dm = DictionaryMatcher(dictionary)
    annotations = [dm.annotate(s) for s in corpus.sentences]
    if cfg.train.model_kind == "fuzzy":
        supervision = [build_iobes_lattice(a, types) for a in annotations]
    else:
        supervision = [build_tie_break(a, types) for a in annotations]
    outcome = trainer.train(
        corpus, supervision, annotations, dev, cfg.train, table, types
    )
    save_checkpoint(cfg.checkpoint, outcome.model)
    if cfg.log:
        with open(cfg.log, "w", encoding="utf-8") as fh:
            fh.write("\n".join(outcome.log_lines) + "\n")
    print(
        f"trained {cfg.train.model_kind} for {len(outcome.history)} epochs; "
        f"best dev F1 {outcome.best_f1:.4f} at epoch {outcome.best_epoch}"
    )
    return 0


def cmd_predict(args):
    cfg = load_config(args.config, args.set)
    _require(cfg, "checkpoint", "embeddings", "test", "output")
    expected = cfg.train.model_kind if "model_kind" in cfg.explicit else None
    model = load_checkpoint(cfg.checkpoint, expected_kind=expected)
    table = load_embeddings(cfg.embeddings, model.embed_dim)
    try:
        corpus = load_corpus(cfg.test)
        sentences = corpus.sentences
    except AllLinesEmpty:
        sentences = []
    labels = []
    for sentence in sentences:
        x = embed(sentence, table)
        mentions = trainer.decode_model(model, x, cfg.train)
        labels.append(mentions_to_iobes(mentions, len(sentence)))
    conll.write_conll(cfg.output, sentences, labels)
    print(f"predicted {len(sentences)} sentences -> {cfg.output}")
    return 0


def cmd_eval(args):
    pred_sentences, pred_labels = conll.read_conll(args.pred)
    gold_sentences, gold_labels = conll.read_conll(args.gold)
    pred = [labelgen.iobes_to_mentions(labs) for labs in pred_labels]
    gold = [labelgen.iobes_to_mentions(labs) for labs in gold_labels]
    result = evaluate(pred, gold)
    print(
        f"{100 * result.precision:.2f}/{100 * result.recall:.2f}/"
        f"{100 * result.f1:.2f}"
    )
    return 0


def cmd_baseline(args):
    cfg = load_config(args.config, args.set)
    _require(cfg, "dictionary", "test", "output")
    test = load_corpus(cfg.test)
    if cfg.tailor:
        _require(cfg, "corpus")
        training = _load_pipeline_corpus(cfg)
        dictionary = tailor(parse_dictionary(cfg.dictionary), training)
    else:
        dictionary = parse_dictionary(cfg.dictionary)
    tagged = matcher.baseline_tag(test, dictionary)
    labels = [
        mentions_to_iobes(mentions, len(sentence))
        for sentence, mentions in zip(test.sentences, tagged)
    ]
    conll.write_conll(cfg.output, test.sentences, labels)
    if cfg.gold:
        gold = [m for _, m in conll.read_gold(cfg.gold)]
        result = evaluate(tagged, gold)
        print(
            f"{100 * result.precision:.2f}/{100 * result.recall:.2f}/"
            f"{100 * result.f1:.2f}"
        )
    else:
        print(f"tagged {len(test.sentences)} sentences -> {cfg.output}")
    return 0


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise ConfigError(message)


def build_parser():
    parser = _Parser(prog="dictner", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("tailor", help="drop entries whose canonical never occurs")
    p.add_argument("--dict", required=True)
    p.add_argument("--corpus", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_tailor)

    for name, func, help_text in (
        ("label", cmd_label, "dump distant supervision for both schemes"),
        ("train", cmd_train, "train a tagger on distant supervision"),
        ("predict", cmd_predict, "decode a corpus with a trained checkpoint"),
        ("baseline", cmd_baseline, "dictionary-match tagger with majority voting"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", default=None)
        p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE")
        p.set_defaults(func=func)

    p = sub.add_parser("eval", help="micro P/R/F1 of one labeled file vs another")
    p.add_argument("--pred", required=True)
    p.add_argument("--gold", required=True)
    p.set_defaults(func=cmd_eval)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except DataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
