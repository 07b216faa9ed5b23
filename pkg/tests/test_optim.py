import numpy as np
import pytest

from adforge.engine import Value
from adforge.errors import ConfigurationError, NumericError
from adforge.optim import Optimizer


def _param(value, grad):
    p = Value(np.array([[value]]), name="p")
    p.grad = np.array([[grad]])
    return p


def test_sgd_step():
    p = _param(1.0, 2.0)
    Optimizer("sgd", learning_rate=0.1).step([p])
    assert np.allclose(p.data, 0.8)


def test_adam_first_step_magnitude():
    # bias correction makes the first step's magnitude ~ lr * sign(grad)
    for g in (3.0, -0.5, 1e-3):
        p = _param(1.0, g)
        Optimizer("adam", learning_rate=0.001).step([p])
        assert np.isclose(1.0 - p.data[0, 0], 0.001 * np.sign(g), atol=1e-6)


def test_zero_grad_is_fixed_point():
    for kind in ("sgd", "adam", "rmsprop"):
        p = _param(0.7, 0.0)
        opt = Optimizer(kind, learning_rate=0.1)
        for _ in range(3):
            p.grad = np.array([[0.0]])
            opt.step([p])
        assert np.allclose(p.data, 0.7)


def test_decoupled_weight_decay_applied_before_gradient():
    p = _param(1.0, 0.0)
    Optimizer("sgd", learning_rate=0.1, weight_decay=0.5).step([p])
    assert np.allclose(p.data, 1.0 - 0.1 * 0.5 * 1.0)


def test_rmsprop_first_step():
    # v = (1-rho) g^2, update = lr*g/(sqrt(v)+eps)
    p = _param(0.0, 2.0)
    Optimizer("rmsprop", learning_rate=0.01).step([p])
    expected = -0.01 * 2.0 / (np.sqrt(0.01 * 4.0) + 1e-8)
    assert np.allclose(p.data, expected)


def test_nan_gradient_raises_with_parameter_name():
    p = _param(1.0, np.nan)
    with pytest.raises(NumericError, match="p"):
        Optimizer("sgd", learning_rate=0.1).step([p])


def test_unknown_kind_rejected():
    with pytest.raises(ConfigurationError):
        Optimizer("adagrad", learning_rate=0.1)


def test_step_counter_increments():
    p = _param(1.0, 1.0)
    opt = Optimizer("adam", learning_rate=0.001)
    for expected in (1, 2, 3):
        p.grad = np.array([[1.0]])
        opt.step([p])
        assert opt.step_count == expected
