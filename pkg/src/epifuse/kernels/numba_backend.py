"""Numba-compiled twins of the numpy kernels.

All kernels are single-threaded on purpose: the package guarantees
bit-reproducible runs, and parallel reductions would reorder float sums.
"""

import numpy as np
from numba import njit


@njit(cache=True)
def conv2d_forward(x, w, b):
    h, wd, c = x.shape
    k1, k2, _, l = w.shape
    ho, wo = h - k1 + 1, wd - k2 + 1
    out = np.empty((ho, wo, l))
    for i in range(ho):
        for j in range(wo):
            for f in range(l):
                acc = b[f]
                for a in range(k1):
                    for bb in range(k2):
                        for ch in range(c):
                            acc += x[i + a, j + bb, ch] * w[a, bb, ch, f]
                out[i, j, f] = acc
    return out


@njit(cache=True)
def conv2d_backward(x, w, gout):
    k1, k2, c, l = w.shape
    ho, wo, _ = gout.shape
    gx = np.zeros(x.shape)
    gw = np.zeros(w.shape)
    gb = np.zeros(l)
    for i in range(ho):
        for j in range(wo):
            for f in range(l):
                g = gout[i, j, f]
                gb[f] += g
                for a in range(k1):
                    for bb in range(k2):
                        for ch in range(c):
                            gw[a, bb, ch, f] += x[i + a, j + bb, ch] * g
                            gx[i + a, j + bb, ch] += w[a, bb, ch, f] * g
    return gx, gw, gb


@njit(cache=True)
def maxpool2d_forward(x):
    h2, w2, c = x.shape[0] // 2, x.shape[1] // 2, x.shape[2]
    out = np.empty((h2, w2, c))
    arg = np.empty((h2, w2, c), dtype=np.int64)
    for i in range(h2):
        for j in range(w2):
            for ch in range(c):
                best = x[2 * i, 2 * j, ch]
                k = 0
                for a in range(2):
                    for b in range(2):
                        v = x[2 * i + a, 2 * j + b, ch]
                        if v > best:
                            best = v
                            k = 2 * a + b
                out[i, j, ch] = best
                arg[i, j, ch] = k
    return out, arg


@njit(cache=True)
def maxpool2d_backward(arg, gout, h, w):
    h2, w2, c = gout.shape
    gx = np.zeros((h, w, c))
    for i in range(h2):
        for j in range(w2):
            for ch in range(c):
                k = arg[i, j, ch]
                gx[2 * i + k // 2, 2 * j + k % 2, ch] = gout[i, j, ch]
    return gx


@njit(cache=True)
def avgpool2d_forward(x):
    h2, w2, c = x.shape[0] // 2, x.shape[1] // 2, x.shape[2]
    out = np.empty((h2, w2, c))
    for i in range(h2):
        for j in range(w2):
            for ch in range(c):
                acc = 0.0
                for a in range(2):
                    for b in range(2):
                        acc += x[2 * i + a, 2 * j + b, ch]
                out[i, j, ch] = acc / 4.0
    return out


@njit(cache=True)
def avgpool2d_backward(gout, h, w):
    h2, w2, c = gout.shape
    gx = np.zeros((h, w, c))
    for i in range(h2):
        for j in range(w2):
            for ch in range(c):
                g = gout[i, j, ch] * 0.25
                for a in range(2):
                    for b in range(2):
                        gx[2 * i + a, 2 * j + b, ch] = g
    return gx


@njit(cache=True)
def infection_pressure(src, dst, infectious, n):
    counts = np.zeros(n)
    for e in range(len(src)):
        counts[dst[e]] += infectious[src[e]]
    return counts
