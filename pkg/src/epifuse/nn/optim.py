"""Plain stochastic gradient descent."""

import numpy as np

from ..errors import DivergenceError


def sgd_step(params, learning_rate):
    """value <- value - lr * grad for each learnable parameter, then zero grads.

    A non-finite gradient is treated as a training-divergence signal.
    """
    if learning_rate < 0:
        raise DivergenceError(f"negative learning rate {learning_rate}")
    for p in params:
        if not p.learnable:
            p.zero_grad()
            continue
        if not np.all(np.isfinite(p.grad)):
            raise DivergenceError(f"non-finite gradient in parameter {p.name or p.shape}")
        p.value -= learning_rate * p.grad
        p.zero_grad()
