"""Scalar losses with gradients w.r.t. the prediction."""

import numpy as np

from ..errors import ShapeError


def loss_and_grad(prediction, target, kind="mse"):
    """Return (value, d value / d prediction).

    mse = mean((p - t)^2); mae = mean(|p - t|) with the subgradient at zero
    residual taken as 0.
    """
    p = np.asarray(prediction, dtype=np.float64)
    t = np.asarray(target, dtype=np.float64)
    if p.shape != t.shape:
        raise ShapeError(f"loss: prediction {p.shape} vs target {t.shape}")
    r = p - t
    n = r.size
    if kind == "mse":
        return float(np.mean(r * r)), 2.0 * r / n
    if kind == "mae":
        return float(np.mean(np.abs(r))), np.sign(r) / n
    raise ShapeError(f"loss: unknown kind {kind!r}")
