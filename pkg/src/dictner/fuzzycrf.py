"""CRF head over the IOBES label vocabulary with lattice-constrained
marginal likelihood.

The loss is log Z(all sequences) - log Z(lattice-consistent sequences),
both computed by the forward algorithm in log space. With singleton
allowed sets the second term collapses to the score of the unique path and
the loss equals a conventional CRF negative log-likelihood.
"""

import numpy as np

from .errors import EmptyLatticePosition, LabelOutOfRange
from .labelgen import LabelVocab, iobes_to_mentions
from .neural import BiLstm, Linear, ParamStore, dropout_rows
from .neural import kernels as K
from .neural.autograd import Tensor, _accumulate, _node, as_tensor


def emissions(hidden, weights, bias):
    """Per-token label scores: hidden (n, 2h) @ weights (2h, k) + bias."""
    from .neural.autograd import add, matmul

    return add(matmul(hidden, weights), bias)


def sequence_score(emission_scores, trans, labels):
    """Score of one label sequence including start/end transitions."""
    P = emission_scores.data if isinstance(emission_scores, Tensor) else np.asarray(emission_scores)
    phi = trans.data if isinstance(trans, Tensor) else np.asarray(trans)
    n, k = P.shape
    start, end = k, k + 1
    labels = list(labels)
    if len(labels) != n:
        raise LabelOutOfRange(f"sequence length {len(labels)} != {n}")
    for y in labels:
        if not 0 <= y < k:
            raise LabelOutOfRange(f"label index {y} outside [0, {k})")
    score = phi[start, labels[0]]
    for i in range(n - 1):
        score += phi[labels[i], labels[i + 1]]
    score += phi[labels[n - 1], end]
    for i in range(n):
        score += P[i, labels[i]]
    return float(score)


def log_partition(emission_scores, trans, lattice=None, trans_allow=None):
    """log sum over sequences of exp(score); differentiable in both the
    emission matrix and the transition matrix.

    With a lattice, the sum runs over sequences consistent with the
    per-position allowed sets; without one it runs over all k^n sequences.
    """
    P = as_tensor(emission_scores)
    phi = as_tensor(trans)
    allow = None
    if lattice is not None:
        allow = lattice.allowed if hasattr(lattice, "allowed") else np.asarray(lattice)
        if allow.shape != P.data.shape:
            raise EmptyLatticePosition(
                f"lattice shape {allow.shape} != emissions {P.data.shape}"
            )
        if not allow.any(axis=1).all():
            raise EmptyLatticePosition("a position allows no labels")
    log_z, alpha = K.crf_forward(P.data, phi.data, allow, trans_allow)
    if not np.isfinite(log_z):
        raise EmptyLatticePosition("no feasible path through the lattice")

    def backward(g):
        d_emis, d_trans = K.crf_backward_grads(
            P.data, phi.data, allow, trans_allow, alpha, log_z
        )
        _accumulate(P, float(g) * d_emis)
        _accumulate(phi, float(g) * d_trans)

    return _node(np.float64(log_z), (P, phi), backward)


def fuzzy_nll(emission_scores, trans, lattice, trans_allow=None):
    """Negative log of the lattice-consistent probability mass; >= 0."""
    full = log_partition(emission_scores, trans, None, trans_allow)
    constrained = log_partition(emission_scores, trans, lattice, trans_allow)
    return full - constrained


def viterbi(emission_scores, trans, trans_allow=None):
    """Best label sequence under sequence_score; ties prefer the smaller
    label index at the latest differing position.
    """
    P = emission_scores.data if isinstance(emission_scores, Tensor) else np.asarray(emission_scores)
    phi = trans.data if isinstance(trans, Tensor) else np.asarray(trans)
    score, path = K.viterbi(P, phi, trans_allow)
    return score, [int(i) for i in path]


def iobes_transition_mask(vocab):
    """Structural IOBES grammar over (k+2)^2 transitions: B/I must chain to
    I/E of the same type, entities must close before O/start of the next.
    """
    size = len(vocab) + 2
    mask = np.zeros((size, size), dtype=bool)
    openers = [vocab.o_index] + [
        vocab.index(f"{tag}-{t}") for t in vocab.types for tag in ("B", "S")
    ]
    closers = [vocab.o_index] + [
        vocab.index(f"{tag}-{t}") for t in vocab.types for tag in ("E", "S")
    ]
    for src in closers:
        for dst in openers:
            mask[src, dst] = True
        mask[src, vocab.end] = True
    for t in vocab.types:
        b, i, e = (vocab.index(f"{tag}-{t}") for tag in ("B", "I", "E"))
        mask[b, i] = mask[b, e] = True
        mask[i, i] = mask[i, e] = True
    for dst in openers:
        mask[vocab.start, dst] = True
    return mask


class FuzzyCrf:
    """BiLSTM encoder + linear emissions + transition matrix."""

    kind = "fuzzy"

    def __init__(self, types, embed_dim, hidden_dim, rng, structural_mask=False):
        self.vocab = LabelVocab(types)
        self.embed_dim = embed_dim
        self.hidden_dim = hidden_dim
        self.structural_mask = structural_mask
        self.store = ParamStore()
        self.bilstm = BiLstm(self.store, rng, embed_dim, hidden_dim)
        self.head = Linear(self.store, rng, 2 * hidden_dim, len(self.vocab), prefix="emit")
        k2 = len(self.vocab) + 2
        self.phi = self.store.add(
            "phi", rng.uniform(-0.1, 0.1, size=(k2, k2))
        )
        self.trans_allow = iobes_transition_mask(self.vocab) if structural_mask else None

    def emission_scores(self, x, dropout=0.0, rng=None):
        hidden = self.bilstm(x, dropout=dropout, rng=rng)
        return self.head(hidden)

    def loss(self, x, lattice, dropout=0.0, rng=None):
        P = self.emission_scores(x, dropout=dropout, rng=rng)
        return fuzzy_nll(P, self.phi, lattice, self.trans_allow)

    def decode(self, x):
        P = self.emission_scores(x)
        _, path = viterbi(P, self.phi, self.trans_allow)
        labels = [self.vocab.label(i) for i in path]
        return iobes_to_mentions(labels)
