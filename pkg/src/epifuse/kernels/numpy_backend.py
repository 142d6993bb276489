"""Pure-numpy implementations of the hot kernels.

Convolutions go through im2col views + tensordot so the heavy lifting lands
in BLAS; pooling uses reshape tricks. Every function here has a loop-for-loop
twin in :mod:`epifuse.kernels.numba_backend` computing the same quantities.
"""

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view


def conv2d_forward(x, w, b):
    """Valid cross-correlation: out[i,j,l] = b[l] + sum x[i+a,j+c,ch]*w[a,c,ch,l]."""
    k1, k2, _, _ = w.shape
    patches = sliding_window_view(x, (k1, k2), axis=(0, 1))  # (Ho, Wo, C, k1, k2)
    out = np.tensordot(patches, w, axes=([3, 4, 2], [0, 1, 2]))
    out += b
    return out


def conv2d_backward(x, w, gout):
    """Gradients of conv2d_forward w.r.t. input, weights and bias."""
    k1, k2, _, _ = w.shape
    ho, wo, _ = gout.shape

    gb = gout.sum(axis=(0, 1))

    # gw[a,c,ch,l] = sum_{i,j} x[i+a, j+c, ch] * gout[i,j,l]
    xpatches = sliding_window_view(x, (ho, wo), axis=(0, 1))  # (k1, k2, C, Ho, Wo)
    gw = np.tensordot(xpatches, gout, axes=([3, 4], [0, 1]))

    # gx: full correlation of gout with the spatially flipped kernel.
    gpad = np.pad(gout, ((k1 - 1, k1 - 1), (k2 - 1, k2 - 1), (0, 0)))
    gpatches = sliding_window_view(gpad, (k1, k2), axis=(0, 1))  # (H, W, L, k1, k2)
    wflip = w[::-1, ::-1]
    gx = np.tensordot(gpatches, wflip, axes=([3, 4, 2], [0, 1, 3]))
    return gx, gw, gb


def _blocks(x):
    h2, w2 = x.shape[0] // 2, x.shape[1] // 2
    x = x[: 2 * h2, : 2 * w2]
    # (h2, w2, C, 4) with block cells in row-major order
    return x.reshape(h2, 2, w2, 2, -1).transpose(0, 2, 4, 1, 3).reshape(h2, w2, x.shape[2], 4)


def maxpool2d_forward(x):
    """2x2 max pooling. Returns (out, argmax) with argmax in {0..3} per block."""
    blocks = _blocks(x)
    arg = blocks.argmax(axis=3).astype(np.int64)  # first max wins ties
    out = np.take_along_axis(blocks, arg[..., None], axis=3)[..., 0]
    return out, arg


def maxpool2d_backward(arg, gout, h, w):
    blocks = np.zeros(arg.shape + (4,))
    np.put_along_axis(blocks, arg[..., None], gout[..., None], axis=3)
    return _unblock(blocks, h, w)


def avgpool2d_forward(x):
    return _blocks(x).mean(axis=3)


def avgpool2d_backward(gout, h, w):
    blocks = np.repeat(gout[..., None] * 0.25, 4, axis=3)
    return _unblock(blocks, h, w)


def _unblock(blocks, h, w):
    h2, w2, c, _ = blocks.shape
    gx = np.zeros((h, w, c))
    inner = blocks.reshape(h2, w2, c, 2, 2).transpose(0, 3, 1, 4, 2).reshape(2 * h2, 2 * w2, c)
    gx[: 2 * h2, : 2 * w2] = inner
    return gx


def infection_pressure(src, dst, infectious, n):
    """Per-node count of infectious neighbours, given a directed edge list."""
    if len(src) == 0:
        return np.zeros(n)
    return np.bincount(dst, weights=infectious[src], minlength=n)
