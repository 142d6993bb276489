from .layers import (
    Conv2d,
    Dense,
    Flatten,
    Layer,
    Network,
    Parameter,
    Pool2d,
    ReLU,
    as_f64,
    glorot_uniform,
)
from .losses import loss_and_grad
from .optim import sgd_step
from .serialize import read_container, write_container

__all__ = [
    "Conv2d",
    "Dense",
    "Flatten",
    "Layer",
    "Network",
    "Parameter",
    "Pool2d",
    "ReLU",
    "as_f64",
    "glorot_uniform",
    "loss_and_grad",
    "read_container",
    "sgd_step",
    "write_container",
]
