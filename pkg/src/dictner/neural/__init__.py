"""Differentiable kernel: tensors with gradients, embedding lookup,
BiLSTM, linear heads, dropout. Hot loops run in the compiled kernel
backend when available (see dictner.neural.kernels).
"""

from .autograd import Tensor, as_tensor
from .layers import BiLstm, Linear, ParamStore, bilstm_forward, dropout_rows, embed

__all__ = [
    "Tensor",
    "as_tensor",
    "BiLstm",
    "Linear",
    "ParamStore",
    "bilstm_forward",
    "dropout_rows",
    "embed",
]
