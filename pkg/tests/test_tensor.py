"""The autodiff engine: op-level gradients and guards."""

import numpy as np
import pytest

from satguide.neural import tensor as T


def fd_grad(fn, x: np.ndarray, h=1e-6):
    g = np.zeros_like(x)
    flat = x.reshape(-1)
    gf = g.reshape(-1)
    for i in range(flat.size):
        orig = flat[i]
        flat[i] = orig + h
        up = fn()
        flat[i] = orig - h
        dn = fn()
        flat[i] = orig
        gf[i] = (up - dn) / (2 * h)
    return g


def check_op(build, shape, seed=0, atol=1e-6):
    rng = np.random.default_rng(seed)
    x = T.parameter(rng.uniform(-1, 1, shape))
    out = build(x)
    loss = T.mean(T.mul(out, out))
    loss.backward()
    analytic = x.grad.copy()

    def loss_value():
        out = build(x)
        return T.mean(T.mul(out, out)).item()

    numeric = fd_grad(loss_value, x.data)
    np.testing.assert_allclose(analytic, numeric, rtol=1e-4, atol=atol)


class TestOps:
    def test_add_broadcast(self):
        b = T.parameter(np.array([0.5, -0.3]))
        check_op(lambda x: T.add(x, b), (3, 2))

    def test_mul(self):
        other = T.constant(np.arange(6).reshape(3, 2) * 0.1)
        check_op(lambda x: T.mul(x, other), (3, 2))

    def test_matmul_2d(self):
        w = T.constant(np.random.default_rng(1).uniform(-1, 1, (4, 3)))
        check_op(lambda x: T.matmul(x, w), (2, 4))

    def test_matmul_weight_grad(self):
        x = T.constant(np.random.default_rng(2).uniform(-1, 1, (5, 4)))
        check_op(lambda w: T.matmul(x, w), (4, 3))

    def test_matmul_batched(self):
        w = T.constant(np.random.default_rng(3).uniform(-1, 1, (4, 3)))
        check_op(lambda x: T.matmul(x, w), (2, 5, 4))

    def test_relu_tanh_sigmoid(self):
        check_op(T.relu, (4, 3), seed=4)
        check_op(T.tanh, (4, 3), seed=5)
        check_op(T.sigmoid, (4, 3), seed=6)

    def test_shift_time(self):
        check_op(lambda x: T.shift_time(x, 2), (5, 3))
        check_op(lambda x: T.shift_time(x, -2), (5, 3))
        check_op(lambda x: T.shift_time(x, 1), (2, 5, 3))

    def test_shift_values(self):
        x = T.constant(np.arange(5, dtype=float).reshape(5, 1))
        assert T.shift_time(x, 1).data.reshape(-1).tolist() == [0, 0, 1, 2, 3]
        assert T.shift_time(x, -2).data.reshape(-1).tolist() == [2, 3, 4, 0, 0]
        assert T.shift_time(x, 7).data.reshape(-1).tolist() == [0] * 5

    def test_concat_narrow_stack_reshape(self):
        other = T.constant(np.ones((3, 2)))
        check_op(lambda x: T.concat([x, other], axis=-1), (3, 2))
        check_op(lambda x: T.narrow(x, 1, 3), (2, 4))
        check_op(lambda x: T.reshape(x, (6,)), (2, 3))

    def test_stack_grads(self):
        a = T.parameter(np.array([1.0, 2.0]))
        b = T.parameter(np.array([3.0, 4.0]))
        out = T.stack([a, b])
        T.mean(out).backward()
        np.testing.assert_allclose(a.grad, [0.25, 0.25])

    def test_embedding_scatter(self):
        table = T.parameter(np.random.default_rng(7).uniform(-1, 1, (6, 3)))
        out = T.embedding(table, [1, 1, 4])
        T.mean(out).backward()
        assert table.grad[1].sum() != 0
        assert np.allclose(table.grad[2], 0)
        # row 1 used twice: double the scatter of row 4
        np.testing.assert_allclose(table.grad[1], 2 * table.grad[4])

    def test_max_time_2d(self):
        check_op(lambda x: T.max_time(x), (6, 3), seed=8)

    def test_max_time_batched_lengths(self):
        x = T.parameter(np.random.default_rng(9).uniform(-1, 1, (2, 5, 3)))
        out = T.max_time(x, [3, 5])
        # row 0 must ignore positions 3,4
        expect0 = x.data[0, :3].max(axis=0)
        np.testing.assert_allclose(out.data[0], expect0)

    def test_max_time_zero_length(self):
        x = T.constant(np.ones((1, 4, 2)))
        out = T.max_time(x, [0])
        np.testing.assert_allclose(out.data, 0.0)

    def test_kernel_slice(self):
        w = T.parameter(np.random.default_rng(10).uniform(-1, 1, (3, 4, 2)))
        out = T.kernel_slice(w, 1)
        T.mean(out).backward()
        assert np.allclose(w.grad[0], 0) and not np.allclose(w.grad[1], 0)

    def test_bce_with_logits(self):
        z = T.parameter(np.array([0.0, 2.0, -1.0]))
        y = np.array([1.0, 0.0, 1.0])
        loss = T.bce_with_logits(z, y)
        loss.backward()
        sig = 1 / (1 + np.exp(-z.data))
        np.testing.assert_allclose(z.grad, (sig - y) / 3, rtol=1e-12)
        # analytic value at z=0, y=1 contributes ln 2 / 3
        assert loss.item() > 0


class TestEngine:
    def test_nan_rejected(self):
        with pytest.raises(FloatingPointError):
            T.Tensor(np.array([1.0, np.nan]))

    def test_inf_rejected_from_op(self):
        x = T.constant(np.array([1e308]))
        with np.errstate(over="ignore"):
            with pytest.raises(FloatingPointError):
                T.add(x, x)

    def test_no_grad_blocks_graph(self):
        x = T.parameter(np.ones(3))
        with T.no_grad():
            out = T.mul(x, x)
        assert out._backward is None and not out.requires_grad

    def test_backward_needs_scalar(self):
        x = T.parameter(np.ones(3))
        with pytest.raises(ValueError):
            T.mul(x, x).backward()

    def test_grad_accumulates_on_reuse(self):
        x = T.parameter(np.array([2.0]))
        out = T.add(T.mul(x, x), x)  # x^2 + x -> grad 2x+1 = 5
        T.mean(out).backward()
        np.testing.assert_allclose(x.grad, [5.0])
