"""Span model over Tie/Break gap supervision.

Two heads share the BiLSTM encoder: a sigmoid gap classifier deciding
Break vs Tie between adjacent tokens, and a softmax span typer over the
user types plus None. Unknown gaps and spans adjacent to them contribute
no loss and exactly zero gradient (they are skipped structurally, never
masked arithmetically).

Inference needs no sequence-level dynamic program: thresholded gap
probabilities split the sentence into candidate spans, each typed by an
independent argmax.
"""

import numpy as np

from .dictionary import NONE_TYPE
from .errors import EmptyAllowedSet
from .labelgen import BREAK, UNKNOWN
from .matcher import Mention
from .neural import BiLstm, ParamStore
from .neural.autograd import (
    Tensor,
    add,
    as_tensor,
    concat,
    log,
    log_softmax,
    matmul,
    mul,
    sigmoid,
    stable_sigmoid,
    take,
    tsum,
)
from .neural.layers import glorot_uniform


def gap_features(hidden):
    """u_i rows: BiLSTM outputs at tokens i-1 and i concatenated, one row
    per internal gap, width 4h.
    """
    n = hidden.data.shape[0]
    return concat([take(hidden, slice(0, n - 1)), take(hidden, slice(1, n))], axis=1)


def span_feature(hidden, start, end):
    """v row for a candidate span: outputs at its first and last token."""
    return concat([take(hidden, start), take(hidden, end - 1)], axis=0)


def break_probability(u, w, bias=None):
    """sigma(w . u (+ b)) per gap; u may be one row or a matrix of rows."""
    z = matmul(u, w)
    if bias is not None:
        z = add(z, bias)
    return sigmoid(z)


def span_loss(gap_labels, probs):
    """Logistic loss over supervised gaps: -log p for Break, -log(1-p) for
    Tie. Unknown gaps are excluded from the sum entirely, so they receive
    exactly zero gradient.
    """
    probs = as_tensor(probs)
    idx = [i for i, lab in enumerate(gap_labels) if lab != UNKNOWN]
    if not idx:
        return Tensor(0.0)
    is_break = np.array([1.0 if gap_labels[i] == BREAK else 0.0 for i in idx])
    p = take(probs, np.array(idx, dtype=np.intp))
    terms = mul(log(p), -is_break) + mul(log(1.0 - p), is_break - 1.0)
    return tsum(terms)


def type_logits(v, type_weights):
    """Per-type scores t_j . v over the full type list (None included)."""
    return matmul(type_weights, v)


def type_distribution(v, type_weights):
    """Softmax over all types; sums to one."""
    from .neural.autograd import exp

    return exp(log_softmax(type_logits(v, type_weights)))


def soft_target(v, type_weights, allowed_indices, num_types):
    """Constant target: softmax restricted to the supervision type set,
    zero elsewhere. No gradient flows through it.
    """
    if len(allowed_indices) == 0:
        raise EmptyAllowedSet("span supervision with no allowed types")
    vd = v.data if isinstance(v, Tensor) else np.asarray(v)
    wd = type_weights.data if isinstance(type_weights, Tensor) else np.asarray(type_weights)
    logits = wd @ vd
    out = np.zeros(num_types)
    sub = logits[list(allowed_indices)]
    sub = np.exp(sub - sub.max())
    out[list(allowed_indices)] = sub / sub.sum()
    return out


def type_loss(v, type_weights, allowed_indices, target=None):
    """Cross entropy between the restricted-softmax target and the full
    type distribution.

    The target is a constant: gradients never flow through it. By default
    it is recomputed from the current weights (the per-step objective); a
    precomputed target can be supplied to hold it fixed, which is what a
    finite-difference check of this loss must do.
    """
    num_types = (
        type_weights.data.shape[0]
        if isinstance(type_weights, Tensor)
        else np.asarray(type_weights).shape[0]
    )
    if target is None:
        target = soft_target(v, type_weights, allowed_indices, num_types)
    log_p = log_softmax(type_logits(v, type_weights))
    return mul(tsum(mul(log_p, target)), -1.0)


class SpanTagger:
    kind = "spantag"

    def __init__(self, types, embed_dim, hidden_dim, rng, break_bias=True):
        self.types = sorted(set(types))
        self.type_list = self.types + [NONE_TYPE]
        self.embed_dim = embed_dim
        self.hidden_dim = hidden_dim
        self.break_bias = break_bias
        self.store = ParamStore()
        self.bilstm = BiLstm(self.store, rng, embed_dim, hidden_dim)
        width = 4 * hidden_dim
        self.w_break = self.store.add(
            "break.w", glorot_uniform(rng, (width,), width, 1)
        )
        self.b_break = self.store.add("break.b", np.zeros(())) if break_bias else None
        self.t_weights = self.store.add(
            "type.w",
            glorot_uniform(rng, (len(self.type_list), width), width, len(self.type_list)),
        )

    def type_index(self, name):
        return self.type_list.index(name)

    def hidden(self, x, dropout=0.0, rng=None):
        return self.bilstm(x, dropout=dropout, rng=rng)

    def gap_probabilities(self, hidden):
        if hidden.data.shape[0] < 2:
            return Tensor(np.zeros(0))
        return break_probability(gap_features(hidden), self.w_break, self.b_break)

    def loss(self, x, annotation, dropout=0.0, rng=None, type_targets=None):
        """L_span over supervised gaps plus L_type over supervision spans.

        type_targets optionally pins the soft targets (see type_loss).
        """
        hidden = self.hidden(x, dropout=dropout, rng=rng)
        total = None
        if len(annotation.gap_labels) > 0:
            probs = self.gap_probabilities(hidden)
            total = span_loss(annotation.gap_labels, probs)
        for j, span in enumerate(annotation.supervision_spans):
            v = span_feature(hidden, span.start, span.end)
            allowed = sorted(self.type_index(t) for t in span.types)
            target = None if type_targets is None else type_targets[j]
            piece = type_loss(v, self.t_weights, allowed, target=target)
            total = piece if total is None else add(total, piece)
        return Tensor(0.0) if total is None else total

    def frozen_type_targets(self, x, annotation):
        """Soft targets evaluated at the current parameters (no dropout)."""
        hidden = self.hidden(x)
        out = []
        for span in annotation.supervision_spans:
            v = span_feature(hidden, span.start, span.end)
            allowed = sorted(self.type_index(t) for t in span.types)
            out.append(
                soft_target(v, self.t_weights, allowed, len(self.type_list))
            )
        return out

    def decode(self, x, break_threshold=0.5):
        """Threshold gap probabilities into breaks, type each span, drop
        None spans. Linear in sentence length.
        """
        hidden = self.bilstm(x)
        hd = hidden.data
        n = hd.shape[0]
        if n == 0:
            return []
        if n > 1:
            u = np.concatenate([hd[:-1], hd[1:]], axis=1)
            z = u @ self.w_break.data
            if self.b_break is not None:
                z = z + self.b_break.data
            breaks = stable_sigmoid(z) >= break_threshold
        else:
            breaks = np.zeros(0, dtype=bool)
        boundaries = [0] + [i + 1 for i, b in enumerate(breaks) if b] + [n]
        mentions = []
        wd = self.t_weights.data
        for a, b in zip(boundaries[:-1], boundaries[1:]):
            v = np.concatenate([hd[a], hd[b - 1]])
            logits = wd @ v
            best = int(np.argmax(logits))
            etype = self.type_list[best]
            if etype != NONE_TYPE:
                mentions.append(Mention(a, b, etype))
        return mentions
