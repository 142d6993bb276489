"""Minimal layer vocabulary with hand-written backpropagation.

Everything is float64 and single-example: a layer maps one (H, W, C) image
or one flat vector forward, caches what its backward pass needs, and
``backward`` both returns the gradient w.r.t. the layer input and accumulates
into its parameters' ``grad`` buffers. Mini-batching is gradient accumulation
in the training loop.
"""

import hashlib

import numpy as np

from .. import kernels
from ..errors import ShapeError


def as_f64(x, name="array"):
    arr = np.asarray(x, dtype=np.float64)
    if not np.all(np.isfinite(arr)):
        raise ShapeError(f"{name} contains non-finite entries")
    return arr


class Parameter:
    """A learnable tensor paired with its gradient accumulator."""

    def __init__(self, value, learnable=True, name=""):
        self.value = np.array(value, dtype=np.float64)
        self.grad = np.zeros_like(self.value)
        self.learnable = learnable
        self.name = name

    @property
    def shape(self):
        return self.value.shape

    def zero_grad(self):
        self.grad[...] = 0.0


def glorot_uniform(rng, shape, fan_in, fan_out):
    """Uniform init in +/- sqrt(6 / (fan_in + fan_out))."""
    limit = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-limit, limit, size=shape)


class Layer:
    def parameters(self):
        return []

    def forward(self, x):
        raise NotImplementedError

    def backward(self, grad):
        raise NotImplementedError

    def spec(self):
        """Serializable description of the layer (kind + hyperparameters)."""
        raise NotImplementedError


class Conv2d(Layer):
    """Valid (or zero-padded "same") cross-correlation, stride 1.

    Input (H, W, C_in) -> output (H', W', filters). In valid mode a kernel
    larger than the input is a configuration error.
    """

    def __init__(self, kernel, in_channels, filters, rng, padding="valid"):
        k1, k2 = int(kernel[0]), int(kernel[1])
        if k1 < 1 or k2 < 1 or filters < 1:
            raise ShapeError(f"conv2d: bad kernel {kernel} or filters {filters}")
        if padding not in ("valid", "same"):
            raise ShapeError(f"conv2d: unknown padding {padding!r}")
        self.kernel = (k1, k2)
        self.in_channels = int(in_channels)
        self.filters = int(filters)
        self.padding = padding
        fan_in = k1 * k2 * in_channels
        fan_out = k1 * k2 * filters
        self.weights = Parameter(
            glorot_uniform(rng, (k1, k2, in_channels, filters), fan_in, fan_out), name="conv_w"
        )
        self.bias = Parameter(np.zeros(filters), name="conv_b")
        self._x = None

    def parameters(self):
        return [self.weights, self.bias]

    def _pad_widths(self):
        k1, k2 = self.kernel
        return ((k1 - 1) // 2, k1 - 1 - (k1 - 1) // 2), ((k2 - 1) // 2, k2 - 1 - (k2 - 1) // 2)

    def forward(self, x):
        if x.ndim != 3 or x.shape[2] != self.in_channels:
            raise ShapeError(
                f"conv2d expected (H, W, {self.in_channels}) input, got {x.shape}"
            )
        k1, k2 = self.kernel
        if self.padding == "same":
            (pt, pb), (pl, pr) = self._pad_widths()
            x = np.pad(x, ((pt, pb), (pl, pr), (0, 0)))
        if k1 > x.shape[0] or k2 > x.shape[1]:
            raise ShapeError(
                f"conv2d kernel {self.kernel} exceeds input dims {x.shape[:2]}"
            )
        self._x = x
        return kernels.conv2d_forward(x, self.weights.value, self.bias.value)

    def backward(self, grad):
        if self._x is None:
            raise ShapeError("conv2d backward called without a cached forward pass")
        gx, gw, gb = kernels.conv2d_backward(self._x, self.weights.value, grad)
        self.weights.grad += gw
        self.bias.grad += gb
        if self.padding == "same":
            (pt, pb), (pl, pr) = self._pad_widths()
            gx = gx[pt : gx.shape[0] - pb, pl : gx.shape[1] - pr]
        return gx

    def spec(self):
        return {
            "kind": "conv2d",
            "kernel": list(self.kernel),
            "in_channels": self.in_channels,
            "filters": self.filters,
            "padding": self.padding,
        }


class Pool2d(Layer):
    """2x2 non-overlapping pooling; a trailing odd row/column is dropped."""

    def __init__(self, mode="max"):
        if mode not in ("max", "average"):
            raise ShapeError(f"pool2d: unknown mode {mode!r}")
        self.mode = mode
        self._shape = None
        self._arg = None

    def forward(self, x):
        if x.ndim != 3 or x.shape[0] < 2 or x.shape[1] < 2:
            raise ShapeError(f"pool2d needs spatial dims >= 2, got {x.shape}")
        self._shape = x.shape
        if self.mode == "max":
            out, self._arg = kernels.maxpool2d_forward(x)
            return out
        return kernels.avgpool2d_forward(x)

    def backward(self, grad):
        h, w, _ = self._shape
        if self.mode == "max":
            return kernels.maxpool2d_backward(self._arg, grad, h, w)
        return kernels.avgpool2d_backward(grad, h, w)

    def spec(self):
        return {"kind": "pool2d", "pool": [2, 2], "mode": self.mode}


class Dense(Layer):
    """Fully connected: flat input (n,) -> x @ W + b with W of shape (n, k)."""

    def __init__(self, in_dim, out_dim, rng):
        self.in_dim = int(in_dim)
        self.out_dim = int(out_dim)
        self.weights = Parameter(
            glorot_uniform(rng, (in_dim, out_dim), in_dim, out_dim), name="dense_w"
        )
        self.bias = Parameter(np.zeros(out_dim), name="dense_b")
        self._x = None

    def parameters(self):
        return [self.weights, self.bias]

    def forward(self, x):
        if x.ndim != 1 or x.shape[0] != self.in_dim:
            raise ShapeError(f"dense expected ({self.in_dim},) input, got {x.shape}")
        self._x = x
        return x @ self.weights.value + self.bias.value

    def backward(self, grad):
        self.weights.grad += np.outer(self._x, grad)
        self.bias.grad += grad
        return self.weights.value @ grad

    def spec(self):
        return {"kind": "dense", "in_dim": self.in_dim, "out_dim": self.out_dim}


class ReLU(Layer):
    def __init__(self):
        self._mask = None

    def forward(self, x):
        self._mask = x > 0
        return np.where(self._mask, x, 0.0)

    def backward(self, grad):
        return np.where(self._mask, grad, 0.0)

    def spec(self):
        return {"kind": "relu"}


class Flatten(Layer):
    def __init__(self):
        self._shape = None

    def forward(self, x):
        self._shape = x.shape
        return x.reshape(-1)

    def backward(self, grad):
        return grad.reshape(self._shape)

    def spec(self):
        return {"kind": "flatten"}


class Network:
    """An ordered layer stack with shared forward/backward plumbing."""

    def __init__(self, layers):
        self.layers = list(layers)
        self._ran_forward = False

    def parameters(self):
        params = []
        for layer in self.layers:
            params.extend(layer.parameters())
        return params

    def forward(self, x):
        for layer in self.layers:
            x = layer.forward(x)
        self._ran_forward = True
        return x

    def backward(self, grad):
        if not self._ran_forward:
            raise ShapeError("backward called without a cached forward pass")
        for layer in reversed(self.layers):
            grad = layer.backward(grad)
        return grad

    def zero_grad(self):
        for p in self.parameters():
            p.zero_grad()

    def fingerprint(self):
        """SHA-256 over all parameter bytes; used by freeze-contract tests."""
        h = hashlib.sha256()
        for p in self.parameters():
            h.update(p.value.tobytes())
        return h.hexdigest()

    def output_shape(self, input_shape):
        """Dry-run the stack on zeros to get the output shape (raises on misfit)."""
        return self.forward(np.zeros(input_shape)).shape
