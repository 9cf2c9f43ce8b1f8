"""Model checkpoints: a versioned text container.

Values are written as C99 hex float literals, so serialization round-trips
float64 exactly and files are byte-identical across runs given identical
parameters.
"""

import numpy as np

from .errors import CheckpointModelKindMismatch, IoError, MalformedLine
from .fuzzycrf import FuzzyCrf
from .spantag import SpanTagger

_MAGIC = "dictner-checkpoint"
_VERSION = "1"


def save_checkpoint(path, model):
    lines = [f"{_MAGIC} {_VERSION}"]
    lines.append(f"kind\t{model.kind}")
    types = model.vocab.types if model.kind == "fuzzy" else model.types
    lines.append("types\t" + "\t".join(types))
    lines.append(f"embed_dim\t{model.embed_dim}")
    lines.append(f"hidden_dim\t{model.hidden_dim}")
    if model.kind == "fuzzy":
        lines.append(f"structural_mask\t{int(model.structural_mask)}")
    else:
        lines.append(f"break_bias\t{int(model.break_bias)}")
    for name, tensor in model.store.items():
        shape = " ".join(str(d) for d in tensor.data.shape)
        lines.append(f"param\t{name}\t{shape}")
        lines.append(" ".join(v.hex() for v in tensor.data.reshape(-1).tolist()))
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("\n".join(lines) + "\n")
    except OSError as exc:
        raise IoError(f"cannot write checkpoint {path}: {exc}") from exc


def load_checkpoint(path, expected_kind=None):
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise IoError(f"cannot read checkpoint {path}: {exc}") from exc
    if not lines or lines[0] != f"{_MAGIC} {_VERSION}":
        raise MalformedLine(1, "not a checkpoint file")
    header = {}
    params = {}
    i = 1
    while i < len(lines):
        fields = lines[i].split("\t")
        if fields[0] == "param":
            name = fields[1]
            shape = tuple(int(d) for d in fields[2].split()) if fields[2] else ()
            values = np.array(
                [float.fromhex(v) for v in lines[i + 1].split()], dtype=np.float64
            )
            params[name] = values.reshape(shape)
            i += 2
        else:
            header[fields[0]] = fields[1:]
            i += 1
    kind = header["kind"][0]
    if expected_kind is not None and expected_kind != kind:
        raise CheckpointModelKindMismatch(
            f"checkpoint holds a {kind!r} model, config asks for {expected_kind!r}"
        )
    types = [t for t in header["types"] if t]
    embed_dim = int(header["embed_dim"][0])
    hidden_dim = int(header["hidden_dim"][0])
    rng = np.random.default_rng(0)
    if kind == "fuzzy":
        model = FuzzyCrf(
            types,
            embed_dim,
            hidden_dim,
            rng,
            structural_mask=bool(int(header["structural_mask"][0])),
        )
    elif kind == "spantag":
        model = SpanTagger(
            types,
            embed_dim,
            hidden_dim,
            rng,
            break_bias=bool(int(header["break_bias"][0])),
        )
    else:
        raise MalformedLine(2, f"unknown model kind {kind!r}")
    model.store.load_state(params)
    return model
