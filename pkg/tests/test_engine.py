import numpy as np
import pytest
from helpers import FD_REL_TOL, gradcheck

from adforge import engine as eg
from adforge.errors import ContractError, DimensionError


def test_relu_values():
    out = eg.relu(eg.Value([[-1.0, 0.0, 2.0]]))
    assert np.array_equal(out.data, [[0.0, 0.0, 2.0]])


def test_leaky_relu_values():
    out = eg.leaky_relu(eg.Value([[-1.0]]), slope=0.01)
    assert np.allclose(out.data, [[-0.01]])


def test_matmul_shape():
    a = eg.Value(np.ones((2, 3)))
    b = eg.Value(np.ones((3, 4)))
    assert eg.matmul(a, b).data.shape == (2, 4)


def test_matmul_shape_mismatch():
    with pytest.raises(DimensionError):
        eg.matmul(eg.Value(np.ones((2, 3))), eg.Value(np.ones((4, 2))))


def test_backward_square_sum():
    x = eg.Value([[1.0, 2.0, 3.0]])
    root = eg.vsum(eg.mul(x, x))
    eg.backward(root)
    assert np.allclose(x.grad, [[2.0, 4.0, 6.0]])


def test_backward_sigmoid_at_zero():
    x = eg.Value([[0.0]])
    eg.backward(eg.sigmoid(x))
    assert np.allclose(x.grad, [[0.25]])


def test_backward_requires_scalar_root():
    x = eg.Value(np.ones((2, 2)))
    with pytest.raises(ContractError):
        eg.backward(eg.mul(x, x))


def test_unreachable_parameter_keeps_zero_grad():
    x = eg.Value([[1.0, 2.0]])
    unused = eg.Value([[5.0]], name="unused")
    eg.zero_grads([x, unused])
    eg.backward(eg.vsum(eg.mul(x, x)))
    assert np.array_equal(unused.grad, [[0.0]])
    assert np.all(np.isfinite(x.grad))


def test_log_clamped_at_floor():
    x = eg.Value([[0.0, 1e-20]])
    out = eg.log(x)
    assert np.allclose(out.data, np.log(1e-12))
    eg.backward(eg.vsum(out))
    assert np.all(np.isfinite(x.grad))


@pytest.mark.parametrize(
    "op",
    [
        lambda x: eg.tanh(x),
        lambda x: eg.relu(x),
        lambda x: eg.leaky_relu(x, 0.01),
        lambda x: eg.sigmoid(x),
        lambda x: eg.exp(x),
        lambda x: eg.log(eg.add(eg.mul(x, x), 0.5)),
        lambda x: eg.softplus(x),
        lambda x: eg.absolute(x),
        lambda x: eg.pow_const(eg.add(eg.mul(x, x), 1.0), -1.0),
        lambda x: eg.pow_const(x, 3.0),
        lambda x: eg.vsum(x, axis=1, keepdims=True),
        lambda x: eg.vmean(x, axis=0, keepdims=True),
        lambda x: eg.dropout(x, 0.0, None, False),
        lambda x: eg.reshape(x, (x.data.size, 1)),
    ],
)
def test_primitive_gradients_match_finite_differences(op):
    rng = np.random.default_rng(1234)
    x = eg.Value(rng.normal(size=(3, 4)))
    w = rng.normal(size=op(x).data.shape)

    def build():
        return eg.vsum(eg.mul(op(x), w))

    assert gradcheck(build, [x]) < FD_REL_TOL


def test_matmul_gradients_all_arities():
    rng = np.random.default_rng(7)
    cases = [
        ((2, 3), (3, 4)),
        ((2, 3, 4), (4, 5)),
        ((2, 3, 4), (2, 4, 5)),
    ]
    for sa, sb in cases:
        a = eg.Value(rng.normal(size=sa))
        b = eg.Value(rng.normal(size=sb))
        w = rng.normal(size=np.matmul(a.data, b.data).shape)

        def build():
            return eg.vsum(eg.mul(eg.matmul(a, b), w))

        assert gradcheck(build, [a, b]) < FD_REL_TOL


def test_concat_slice_take_token_grads():
    rng = np.random.default_rng(11)
    a = eg.Value(rng.normal(size=(2, 3, 4)))
    b = eg.Value(rng.normal(size=(2, 1, 4)))
    w = rng.normal(size=(2, 4))

    def build():
        cat = eg.concat([b, a], axis=1)
        tok = eg.take_token(cat, 0)
        sl = eg.slice_last(tok, 1, 3)
        return eg.vsum(eg.mul(sl, w[:, 1:3]))

    assert gradcheck(build, [a, b]) < FD_REL_TOL


def test_broadcast_add_grad():
    rng = np.random.default_rng(3)
    x = eg.Value(rng.normal(size=(4, 3)))
    bias = eg.Value(rng.normal(size=(1, 3)))
    w = rng.normal(size=(4, 3))

    def build():
        return eg.vsum(eg.mul(eg.add(x, bias), w))

    assert gradcheck(build, [x, bias]) < FD_REL_TOL


def test_softmax_rows_sum_to_one_and_grad():
    rng = np.random.default_rng(5)
    x = eg.Value(rng.normal(size=(3, 6)))
    sm = eg.softmax_last(x)
    assert np.allclose(sm.data.sum(axis=-1), 1.0, atol=1e-9)
    w = rng.normal(size=(3, 6))

    def build():
        return eg.vsum(eg.mul(eg.softmax_last(x), w))

    assert gradcheck(build, [x]) < FD_REL_TOL


def test_layer_norm_grad():
    rng = np.random.default_rng(9)
    x = eg.Value(rng.normal(size=(4, 6)))
    g = eg.Value(rng.normal(size=(1, 6)))
    b = eg.Value(rng.normal(size=(1, 6)))
    w = rng.normal(size=(4, 6))

    def build():
        return eg.vsum(eg.mul(eg.layer_norm(x, g, b), w))

    assert gradcheck(build, [x, g, b]) < FD_REL_TOL


def test_dropout_eval_is_identity():
    x = eg.Value(np.ones((5, 5)))
    assert eg.dropout(x, 0.3, np.random.default_rng(0), train=False) is x


def test_dropout_train_preserves_expectation():
    rng = np.random.default_rng(0)
    x = eg.Value(np.ones((200, 200)))
    out = eg.dropout(x, 0.3, rng, train=True)
    assert abs(out.data.mean() - 1.0) < 0.02
    kept = out.data[out.data > 0]
    assert np.allclose(kept, 1.0 / 0.7)


def test_forward_determinism():
    rng1 = np.random.default_rng(42)
    rng2 = np.random.default_rng(42)

    def run(rng):
        x = eg.Value(np.linspace(-1, 1, 12).reshape(3, 4))
        h = eg.tanh(eg.affine(x, np.eye(4), np.zeros((1, 4))))
        d = eg.dropout(h, 0.5, rng, train=True)
        out = eg.vmean(d)
        eg.backward(out)
        return out.data.copy(), x.grad.copy() if x.grad is not None else None

    o1, _ = run(rng1)
    o2, _ = run(rng2)
    assert np.array_equal(o1, o2)
