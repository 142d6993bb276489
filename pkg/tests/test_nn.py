"""Tests for the layer vocabulary, losses, SGD and the EPIF container."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from epifuse.errors import DataFormatError, DivergenceError, ShapeError
from epifuse.nn import (
    Conv2d,
    Dense,
    Flatten,
    Network,
    Parameter,
    Pool2d,
    ReLU,
    loss_and_grad,
    read_container,
    sgd_step,
    write_container,
)

from oracles import (
    conv2d_reference,
    dense_reference,
    finite_difference_gradients,
    max_relative_error,
)


class _Probe:
    """Duck-typed Parameter so finite differences can walk a layer input."""

    def __init__(self, value):
        self.value = value


class TestConv2d:
    def test_one_by_one_identity(self, rng):
        layer = Conv2d((1, 1), 1, 1, rng)
        layer.weights.value[...] = 1.0
        layer.bias.value[...] = 0.0
        x = rng.standard_normal((4, 5, 1))
        assert np.allclose(layer.forward(x), x, atol=1e-15)

    def test_zero_input_gives_bias(self, rng):
        layer = Conv2d((2, 2), 1, 3, rng)
        layer.bias.value[...] = [0.5, -1.0, 2.0]
        out = layer.forward(np.zeros((4, 4, 1)))
        for f, b in enumerate([0.5, -1.0, 2.0]):
            assert np.allclose(out[:, :, f], b)

    def test_matches_loop_reference(self, rng):
        layer = Conv2d((2, 2), 1, 1, rng)
        x = rng.standard_normal((4, 4, 1))
        expect = conv2d_reference(x, layer.weights.value, layer.bias.value)
        assert np.abs(layer.forward(x) - expect).max() < 1e-12

    def test_multichannel_matches_reference(self, rng):
        layer = Conv2d((3, 2), 4, 5, rng)
        x = rng.standard_normal((6, 7, 4))
        expect = conv2d_reference(x, layer.weights.value, layer.bias.value)
        assert np.abs(layer.forward(x) - expect).max() < 1e-12

    def test_kernel_too_large_rejected(self, rng):
        layer = Conv2d((5, 5), 1, 1, rng)
        with pytest.raises(ShapeError):
            layer.forward(np.zeros((4, 8, 1)))

    def test_same_padding_preserves_shape(self, rng):
        layer = Conv2d((5, 5), 1, 3, rng, padding="same")
        out = layer.forward(rng.standard_normal((7, 13, 1)))
        assert out.shape == (7, 13, 3)

    def test_linearity_in_input(self, rng):
        layer = Conv2d((3, 3), 2, 4, rng)
        layer.bias.value[...] = 0.0
        x, y = rng.standard_normal((2, 6, 6, 2))
        a, b = 1.7, -0.3
        lhs = layer.forward(a * x + b * y)
        rhs = a * layer.forward(x) + b * layer.forward(y)
        assert np.abs(lhs - rhs).max() < 1e-10


class TestPool2d:
    def test_constant_input_both_modes(self):
        x = np.full((4, 6, 2), 3.25)
        for mode in ("max", "average"):
            out = Pool2d(mode).forward(x)
            assert out.shape == (2, 3, 2)
            assert np.all(out == 3.25)

    def test_single_block(self):
        x = np.array([[1.0, 2.0], [3.0, 4.0]]).reshape(2, 2, 1)
        assert Pool2d("max").forward(x)[0, 0, 0] == 4.0
        assert Pool2d("average").forward(x)[0, 0, 0] == 2.5

    def test_odd_edge_dropped(self, rng):
        out = Pool2d("max").forward(rng.standard_normal((5, 5, 3)))
        assert out.shape == (2, 2, 3)

    def test_too_small_rejected(self):
        with pytest.raises(ShapeError):
            Pool2d("max").forward(np.zeros((1, 4, 1)))


class TestDense:
    def test_identity_weights(self, rng):
        layer = Dense(4, 4, rng)
        layer.weights.value[...] = np.eye(4)
        layer.bias.value[...] = 0.0
        x = rng.standard_normal(4)
        assert np.allclose(layer.forward(x), x)

    def test_zero_weights_give_bias(self, rng):
        layer = Dense(3, 2, rng)
        layer.weights.value[...] = 0.0
        layer.bias.value[...] = [5.0, -2.0]
        assert np.allclose(layer.forward(rng.standard_normal(3)), [5.0, -2.0])

    def test_matches_dot_reference(self, rng):
        layer = Dense(3, 2, rng)
        x = rng.standard_normal(3)
        expect = dense_reference(x, layer.weights.value, layer.bias.value)
        assert np.abs(layer.forward(x) - expect).max() < 1e-12

    def test_shape_mismatch(self, rng):
        with pytest.raises(ShapeError):
            Dense(3, 2, rng).forward(np.zeros(4))

    def test_linearity(self, rng):
        layer = Dense(5, 3, rng)
        layer.bias.value[...] = 0.0
        x, y = rng.standard_normal((2, 5))
        lhs = layer.forward(2.0 * x - 0.5 * y)
        rhs = 2.0 * layer.forward(x) - 0.5 * layer.forward(y)
        assert np.abs(lhs - rhs).max() < 1e-10


class TestReLU:
    def test_examples(self):
        out = ReLU().forward(np.array([-1.0, 0.0, 2.0]))
        assert np.array_equal(out, [0.0, 0.0, 2.0])
        assert np.all(ReLU().forward(-np.ones(5)) == 0.0)

    @given(st.lists(st.floats(-1e6, 1e6), min_size=1, max_size=50))
    @settings(max_examples=50, deadline=None)
    def test_idempotent(self, values):
        x = np.array(values)
        once = ReLU().forward(x)
        assert np.array_equal(ReLU().forward(once), once)


class TestLoss:
    def test_identical_zero(self):
        for kind in ("mse", "mae"):
            value, grad = loss_and_grad(np.array([1.0, 2.0]), np.array([1.0, 2.0]), kind)
            assert value == 0.0
            assert np.all(grad == 0.0)

    def test_hand_values(self):
        p, t = np.array([1.0, 3.0]), np.array([2.0, 1.0])
        assert loss_and_grad(p, t, "mae")[0] == pytest.approx(1.5)
        assert loss_and_grad(p, t, "mse")[0] == pytest.approx(2.5)

    @given(st.floats(-100, 100), st.integers(0, 2**32 - 1))
    @settings(max_examples=30, deadline=None)
    def test_homogeneity(self, c, seed):
        r = np.random.default_rng(seed).standard_normal(6)
        base_mae = loss_and_grad(r, np.zeros(6), "mae")[0]
        base_mse = loss_and_grad(r, np.zeros(6), "mse")[0]
        assert loss_and_grad(c * r, np.zeros(6), "mae")[0] == pytest.approx(abs(c) * base_mae)
        assert loss_and_grad(c * r, np.zeros(6), "mse")[0] == pytest.approx(c * c * base_mse)

    def test_shape_mismatch(self):
        with pytest.raises(ShapeError):
            loss_and_grad(np.zeros(2), np.zeros(3))

    def test_mae_subgradient_zero_at_zero(self):
        _, grad = loss_and_grad(np.array([1.0]), np.array([1.0]), "mae")
        assert grad[0] == 0.0


class TestSgd:
    def test_zero_lr_no_change(self):
        p = Parameter(np.array([1.0, 2.0]))
        p.grad[...] = [10.0, -5.0]
        sgd_step([p], 0.0)
        assert np.array_equal(p.value, [1.0, 2.0])

    def test_arithmetic(self):
        p = Parameter(np.array([1.0]))
        p.grad[...] = 0.5
        sgd_step([p], 0.1)
        assert p.value[0] == pytest.approx(0.95)
        assert p.grad[0] == 0.0

    def test_nonfinite_gradient_rejected(self):
        p = Parameter(np.array([1.0]))
        p.grad[...] = np.nan
        with pytest.raises(DivergenceError):
            sgd_step([p], 0.1)

    def test_converges_on_convex_quadratic(self, rng):
        # f(w) = ||A w - b||^2 has minimizer solve(A'A, A'b)
        a = rng.standard_normal((6, 3)) + np.eye(6, 3)
        b = rng.standard_normal(6)
        target = np.linalg.solve(a.T @ a, a.T @ b)
        w = Parameter(np.zeros(3))
        for _ in range(4000):
            r = a @ w.value - b
            w.grad[...] = 2.0 * a.T @ r
            sgd_step([w], 0.02)
        assert np.abs(w.value - target).max() < 1e-6


class TestBackward:
    def test_dense_closed_form(self, rng):
        layer = Dense(3, 1, rng)
        net = Network([layer])
        x = rng.standard_normal(3)
        y = np.array([0.7])
        pred = net.forward(x)
        _, grad = loss_and_grad(pred, y, "mse")
        net.backward(grad)
        expect = 2.0 * (pred[0] - y[0]) * x
        assert np.allclose(layer.weights.grad[:, 0], expect, atol=1e-12)
        assert layer.bias.grad[0] == pytest.approx(2.0 * (pred[0] - y[0]))

    def test_zero_loss_gradient_zeroes_params(self, rng):
        net = Network([Dense(4, 3, rng), ReLU(), Dense(3, 2, rng)])
        net.forward(rng.standard_normal(4))
        net.backward(np.zeros(2))
        assert all(np.all(p.grad == 0.0) for p in net.parameters())

    def test_backward_without_forward_raises(self, rng):
        with pytest.raises(ShapeError):
            Network([Dense(2, 2, rng)]).backward(np.zeros(2))

    def _gradcheck(self, net, x, y, seed_label=""):
        def loss():
            return loss_and_grad(net.forward(x), y, "mse")[0]

        pred = net.forward(x)
        _, grad = loss_and_grad(pred, y, "mse")
        net.zero_grad()
        net.backward(grad)
        params = net.parameters()
        analytic = [p.grad.copy() for p in params]
        numeric = finite_difference_gradients(params, loss)
        err = max_relative_error(analytic, numeric)
        assert err < 1e-4, f"gradient mismatch {err:.2e} {seed_label}"

    @pytest.mark.parametrize("seed", range(5))
    def test_conv_pool_dense_net_matches_finite_differences(self, seed):
        rng = np.random.default_rng(seed)
        net = Network(
            [
                Conv2d((3, 3), 1, 2, rng),
                ReLU(),
                Pool2d("max"),
                Conv2d((2, 2), 2, 3, rng, padding="same"),
                ReLU(),
                Pool2d("average"),
                Flatten(),
                Dense(3, 4, rng),
                ReLU(),
                Dense(4, 2, rng),
            ]
        )
        x = rng.standard_normal((8, 6, 1))
        y = rng.standard_normal(2)
        self._gradcheck(net, x, y, f"seed={seed}")

    def test_input_gradient_matches_finite_differences(self, rng):
        net = Network([Conv2d((2, 2), 1, 2, rng), ReLU(), Flatten(), Dense(18, 1, rng)])
        x = rng.standard_normal((4, 4, 1))
        y = np.array([0.3])

        pred = net.forward(x)
        _, grad = loss_and_grad(pred, y, "mse")
        gx = net.backward(grad)

        probe = _Probe(x)
        numeric = finite_difference_gradients(
            [probe], lambda: loss_and_grad(net.forward(probe.value), y, "mse")[0]
        )[0]
        assert max_relative_error([gx], [numeric]) < 1e-4


class TestDeterminism:
    def test_same_seed_bitwise_identical(self):
        results = []
        for _ in range(2):
            rng = np.random.default_rng(77)
            net = Network(
                [Conv2d((3, 3), 1, 2, rng), ReLU(), Pool2d("max"), Flatten(), Dense(8, 2, rng)]
            )
            x = np.random.default_rng(5).standard_normal((6, 6, 1))
            out = net.forward(x)
            _, grad = loss_and_grad(out, np.zeros(2), "mse")
            net.backward(grad)
            results.append((out.tobytes(), b"".join(p.grad.tobytes() for p in net.parameters())))
        assert results[0] == results[1]


class TestContainer:
    def test_roundtrip(self, tmp_path, rng):
        path = tmp_path / "weights.epif"
        arrays = [("w", rng.standard_normal((3, 4))), ("b", rng.standard_normal(4))]
        write_container(path, {"kind": "model", "note": "test"}, arrays)
        manifest, loaded = read_container(path)
        assert manifest["kind"] == "model"
        assert [e["name"] for e in manifest["entries"]] == ["w", "b"]
        for name, arr in arrays:
            assert np.array_equal(loaded[name], arr)

    def test_bad_magic(self, tmp_path):
        path = tmp_path / "junk.epif"
        path.write_bytes(b"NOPE" + b"\x00" * 16)
        with pytest.raises(DataFormatError):
            read_container(path)
