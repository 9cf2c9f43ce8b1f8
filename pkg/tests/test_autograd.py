import math

import numpy as np
import pytest

from dictner.errors import BackwardWithoutForward
from dictner.neural.autograd import (
    Tensor,
    add,
    concat,
    exp,
    log,
    log_softmax,
    matmul,
    mul,
    sigmoid,
    take,
    tanh,
    tsum,
)
from dictner.neural.gradcheck import max_relative_error, numeric_gradient


def check_op(build_loss, *tensors, tol=1e-6):
    for t in tensors:
        t.zero_grad()
    loss = build_loss()
    loss.backward()
    for t in tensors:
        numeric = numeric_gradient(lambda: build_loss().data, t, eps=1e-6)
        assert max_relative_error(t.grad, numeric) < tol


class TestOpGradients:
    def test_add_broadcast(self, rng):
        a = Tensor(rng.standard_normal((3, 4)), requires_grad=True)
        b = Tensor(rng.standard_normal(4), requires_grad=True)
        check_op(lambda: tsum(add(a, b)), a, b)

    def test_mul_broadcast(self, rng):
        a = Tensor(rng.standard_normal((3, 4)), requires_grad=True)
        b = Tensor(rng.standard_normal((1, 4)), requires_grad=True)
        check_op(lambda: tsum(mul(a, b)), a, b)

    def test_matmul_2d_2d(self, rng):
        a = Tensor(rng.standard_normal((3, 4)), requires_grad=True)
        b = Tensor(rng.standard_normal((4, 2)), requires_grad=True)
        check_op(lambda: tsum(matmul(a, b)), a, b)

    def test_matmul_2d_1d(self, rng):
        a = Tensor(rng.standard_normal((3, 4)), requires_grad=True)
        b = Tensor(rng.standard_normal(4), requires_grad=True)
        check_op(lambda: tsum(matmul(a, b)), a, b)

    def test_matmul_1d_1d(self, rng):
        a = Tensor(rng.standard_normal(4), requires_grad=True)
        b = Tensor(rng.standard_normal(4), requires_grad=True)
        check_op(lambda: matmul(a, b), a, b)

    def test_unary_chain(self, rng):
        a = Tensor(rng.uniform(0.5, 2.0, size=5), requires_grad=True)
        check_op(lambda: tsum(log(exp(tanh(a)))), a)

    def test_sigmoid(self, rng):
        a = Tensor(rng.standard_normal(6), requires_grad=True)
        check_op(lambda: tsum(sigmoid(a)), a)

    def test_concat_axis1(self, rng):
        a = Tensor(rng.standard_normal((3, 2)), requires_grad=True)
        b = Tensor(rng.standard_normal((3, 5)), requires_grad=True)
        check_op(lambda: tsum(mul(concat([a, b], axis=1), 1.5)), a, b)

    def test_take_int_array_scatter_adds(self, rng):
        a = Tensor(rng.standard_normal(5), requires_grad=True)
        idx = np.array([0, 2, 2, 4])
        check_op(lambda: tsum(take(a, idx)), a)
        a.zero_grad()
        tsum(take(a, idx)).backward()
        assert np.array_equal(a.grad, [1.0, 0.0, 2.0, 0.0, 1.0])

    def test_take_slice(self, rng):
        a = Tensor(rng.standard_normal((4, 3)), requires_grad=True)
        check_op(lambda: tsum(take(a, slice(1, 3))), a)

    def test_log_softmax(self, rng):
        a = Tensor(rng.standard_normal(5), requires_grad=True)
        w = rng.standard_normal(5)
        check_op(lambda: tsum(mul(log_softmax(a), w)), a)
        assert math.isclose(float(np.exp(log_softmax(a).data).sum()), 1.0, abs_tol=1e-12)

    def test_operator_sugar(self, rng):
        a = Tensor(rng.standard_normal(4), requires_grad=True)
        b = Tensor(rng.standard_normal(4), requires_grad=True)
        check_op(lambda: ((a * b) - (1.0 - a) + (-b)).sum(), a, b)


class TestBackwardContract:
    def test_sum_of_parameter_gives_ones(self):
        a = Tensor(np.zeros((2, 3)), requires_grad=True)
        tsum(a).backward()
        assert np.array_equal(a.grad, np.ones((2, 3)))

    def test_zero_weighted_sum_gives_zero(self):
        a = Tensor(np.ones(4), requires_grad=True)
        tsum(mul(a, 0.0)).backward()
        assert np.array_equal(a.grad, np.zeros(4))

    def test_accumulates_without_zeroing(self):
        a = Tensor(np.ones(3), requires_grad=True)
        tsum(a).backward()
        tsum(a).backward()
        assert np.array_equal(a.grad, 2 * np.ones(3))

    def test_backward_without_forward_raises(self):
        a = Tensor(np.zeros(()), requires_grad=True)
        with pytest.raises(BackwardWithoutForward):
            a.backward()

    def test_backward_requires_scalar(self):
        a = Tensor(np.ones(3), requires_grad=True)
        with pytest.raises(ValueError):
            mul(a, 2.0).backward()

    def test_diamond_graph_accumulates_once_per_path(self):
        a = Tensor(np.array(3.0), requires_grad=True)
        b = mul(a, 2.0)
        loss = add(b, b)  # d/da = 4
        loss.backward()
        assert a.grad == pytest.approx(4.0)

    def test_seeded_backward_scales(self):
        a = Tensor(np.ones(3), requires_grad=True)
        tsum(a).backward(grad=0.5)
        assert np.allclose(a.grad, 0.5)


class TestDeterminism:
    def test_same_seed_same_values(self):
        from dictner.neural import BiLstm, ParamStore

        outs = []
        for _ in range(2):
            rng = np.random.default_rng(99)
            store = ParamStore()
            layer = BiLstm(store, rng, input_dim=4, hidden_dim=3)
            x = Tensor(np.random.default_rng(1).standard_normal((5, 4)))
            outs.append(layer(x).data)
        assert np.array_equal(outs[0], outs[1])
