"""Training loop: SGD with momentum, global-norm gradient clipping,
plateau-driven learning-rate decay, early stopping on dev micro-F1.
"""

import copy
from dataclasses import dataclass, field

import numpy as np

from .errors import NonFiniteGradient, LengthMismatch, SupervisionEmpty
from .fuzzycrf import FuzzyCrf
from .neural.layers import embed
from .spantag import SpanTagger


@dataclass
class TrainConfig:
    model_kind: str = "spantag"  # or "fuzzy"
    hidden_dim: int = 50
    batch_size: int = 10
    momentum: float = 0.9
    initial_lr: float = 0.05
    lr_shrink: float = 0.4  # lr multiplies by (1 - lr_shrink) on plateau
    patience_rounds: int = 5
    grad_clip: float = 5.0
    dropout: float = 0.5
    max_epochs: int = 50
    seed: int = 7
    lr_floor: float = 1e-4
    break_threshold: float = 0.5
    structural_mask: bool = False
    break_bias: bool = True


@dataclass
class EvalResult:
    precision: float
    recall: float
    f1: float
    true_positive: int
    predicted: int
    gold: int


@dataclass
class TrainOutcome:
    model: object
    best_state: dict
    best_f1: float
    best_epoch: int
    history: list = field(default_factory=list)
    log_lines: list = field(default_factory=list)


class SgdMomentum:
    """Velocity update after global-norm clipping; grads zeroed per step."""

    def __init__(self, store, momentum=0.9, clip=5.0):
        self.store = store
        self.momentum = momentum
        self.clip = clip
        self.velocity = {name: np.zeros_like(t.data) for name, t in store.items()}

    def step(self, lr):
        sq = 0.0
        for _, t in self.store.items():
            g = t.grad
            if not np.all(np.isfinite(g)):
                raise NonFiniteGradient("non-finite gradient encountered")
            sq += float((g * g).sum())
        norm = np.sqrt(sq)
        scale = self.clip / norm if norm > self.clip else 1.0
        for name, t in self.store.items():
            v = self.velocity[name]
            v *= self.momentum
            v += t.grad * scale
            t.data -= lr * v
            t.grad[...] = 0.0
        return norm


def lr_schedule(history, lr, cfg):
    """Shrink lr when the best dev F1 so far did not occur in the last
    patience_rounds entries (ties count as achieved).
    """
    if len(history) <= cfg.patience_rounds:
        return lr
    recent = max(history[-cfg.patience_rounds :])
    if recent < max(history):
        return lr * (1.0 - cfg.lr_shrink)
    return lr


def evaluate(pred, gold):
    """Micro-averaged P/R/F1; a prediction counts iff (start, end, type)
    all match a gold mention of the same sentence.
    """
    if len(pred) != len(gold):
        raise LengthMismatch(f"{len(pred)} predicted vs {len(gold)} gold sentences")
    tp = 0
    n_pred = 0
    n_gold = 0
    for p_mentions, g_mentions in zip(pred, gold):
        p_set = set(p_mentions)
        g_set = set(g_mentions)
        tp += len(p_set & g_set)
        n_pred += len(p_set)
        n_gold += len(g_set)
    precision = tp / n_pred if n_pred else 0.0
    recall = tp / n_gold if n_gold else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return EvalResult(precision, recall, f1, tp, n_pred, n_gold)


def build_model(cfg, types, embed_dim, rng):
    if cfg.model_kind == "fuzzy":
        return FuzzyCrf(
            types, embed_dim, cfg.hidden_dim, rng, structural_mask=cfg.structural_mask
        )
    if cfg.model_kind == "spantag":
        return SpanTagger(
            types, embed_dim, cfg.hidden_dim, rng, break_bias=cfg.break_bias
        )
    raise ValueError(f"unknown model kind {cfg.model_kind!r}")


def decode_model(model, x, cfg):
    if model.kind == "spantag":
        return model.decode(x, break_threshold=cfg.break_threshold)
    return model.decode(x)


def _supervision_is_empty(annotations):
    return all(len(ann.spans) == 0 for ann in annotations)


def train(corpus, supervision, annotations, dev, cfg, table, types):
    """Train cfg.model_kind on distant supervision.

    supervision: per-sentence IobesLattice or TieBreakAnnotation aligned
    with corpus.sentences; annotations: the AnnotatedSentences they came
    from (used only for the emptiness check); dev: list of
    (Sentence, gold mentions) pairs used for early stopping.
    """
    if _supervision_is_empty(annotations):
        raise SupervisionEmpty("dictionary matched nothing in the training corpus")
    rng = np.random.default_rng(cfg.seed)
    model = build_model(cfg, types, table.dimension, rng)
    optimizer = SgdMomentum(model.store, momentum=cfg.momentum, clip=cfg.grad_clip)

    xs = [embed(s, table) for s in corpus.sentences]
    dev_xs = [embed(s, table) for s, _ in dev]
    dev_gold = [mentions for _, mentions in dev]

    lr = cfg.initial_lr
    history = []
    log_lines = ["epoch,train_loss,dev_p,dev_r,dev_f1,lr"]
    best_f1 = -1.0
    best_epoch = 0
    best_state = model.store.state_arrays()
    n = len(corpus.sentences)
    for epoch in range(1, cfg.max_epochs + 1):
        order = rng.permutation(n)
        total_loss = 0.0
        for lo in range(0, n, cfg.batch_size):
            batch = order[lo : lo + cfg.batch_size]
            scale = 1.0 / len(batch)
            for si in batch:
                loss = model.loss(
                    xs[si], supervision[si], dropout=cfg.dropout, rng=rng
                )
                total_loss += loss.item()
                if loss._backward_fn is not None:
                    loss.backward(grad=scale)
            optimizer.step(lr)
        result = evaluate(
            [decode_model(model, x, cfg) for x in dev_xs], dev_gold
        )
        history.append(result.f1)
        log_lines.append(
            f"{epoch},{total_loss / n!r},{result.precision!r},"
            f"{result.recall!r},{result.f1!r},{lr!r}"
        )
        if result.f1 > best_f1:
            best_f1 = result.f1
            best_epoch = epoch
            best_state = model.store.state_arrays()
        lr = lr_schedule(history, lr, cfg)
        if lr < cfg.lr_floor:
            break
    model.store.load_state(best_state)
    return TrainOutcome(
        model=model,
        best_state=copy.deepcopy(best_state),
        best_f1=best_f1,
        best_epoch=best_epoch,
        history=history,
        log_lines=log_lines,
    )
