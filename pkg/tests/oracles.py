"""Independent reference implementations used to freeze expected test values.

Everything here is deliberately slow and literal (quadruple loops, explicit
sums, textbook covariance filter) so it cannot share a bug with the library
paths it checks.
"""

import numpy as np


def conv2d_reference(x, w, b):
    """Literal quadruple-loop valid cross-correlation."""
    h, wd, c = x.shape
    k1, k2, _, l = w.shape
    out = np.zeros((h - k1 + 1, wd - k2 + 1, l))
    for i in range(out.shape[0]):
        for j in range(out.shape[1]):
            for f in range(l):
                acc = b[f]
                for a in range(k1):
                    for bb in range(k2):
                        for ch in range(c):
                            acc += x[i + a, j + bb, ch] * w[a, bb, ch, f]
                out[i, j, f] = acc
    return out


def dense_reference(x, w, b):
    out = np.zeros(w.shape[1])
    for k in range(w.shape[1]):
        acc = b[k]
        for i in range(w.shape[0]):
            acc += x[i] * w[i, k]
        out[k] = acc
    return out


def fuse_reference(a, b, alpha, beta, gamma, delta):
    """Direct-summation fused maps: c_k = (sum_i alpha[k,i] a_i + gamma_k)
    elementwise-times (sum_j beta[k,j] b_j + delta_k)."""
    d = a.shape[0]
    k_out = alpha.shape[0]
    out = np.zeros((d, k_out))
    for k in range(k_out):
        left = np.full(d, gamma[k])
        for i in range(alpha.shape[1]):
            left = left + alpha[k, i] * a[:, i]
        right = np.full(d, delta[k])
        for j in range(beta.shape[1]):
            right = right + beta[k, j] * b[:, j]
        out[:, k] = left * right
    return out


def finite_difference_gradients(params, loss_fn, h=1e-5):
    """Central finite differences of a scalar loss over Parameter objects."""
    grads = []
    for p in params:
        g = np.zeros_like(p.value)
        flat = p.value.reshape(-1)
        gflat = g.reshape(-1)
        for idx in range(flat.size):
            orig = flat[idx]
            flat[idx] = orig + h
            up = loss_fn()
            flat[idx] = orig - h
            down = loss_fn()
            flat[idx] = orig
            gflat[idx] = (up - down) / (2.0 * h)
        grads.append(g)
    return grads


def max_relative_error(analytic, numeric):
    """Scale-free gradient-check metric: ||a - b||_inf / max(||a||_inf, ||b||_inf).

    Returns 0 when both gradients vanish.
    """
    worst = 0.0
    for a, b in zip(analytic, numeric):
        scale = max(np.abs(a).max(initial=0.0), np.abs(b).max(initial=0.0))
        if scale == 0.0:
            continue
        worst = max(worst, np.abs(a - b).max() / scale)
    return worst


def sample_covariance(members):
    """Textbook (m-1)-normalized covariance of row-stacked members."""
    m = members.shape[0]
    mean = members.mean(axis=0)
    cov = np.zeros((members.shape[1], members.shape[1]))
    for i in range(m):
        d = members[i] - mean
        cov += np.outer(d, d)
    return cov / (m - 1)


def exact_kalman_filter(f_mat, h_mat, r_mat, x0, p0, observations, q_mat=None):
    """Closed-form linear-Gaussian Kalman filter.

    Returns (analysis means, per-step gains). Forecast model
    x_{k+1} = F x_k (+ N(0, Q)); observation y = H x + N(0, R).
    """
    n = x0.shape[0]
    if q_mat is None:
        q_mat = np.zeros((n, n))
    x = x0.copy()
    p = p0.copy()
    means, gains = [], []
    for y in observations:
        s = h_mat @ p @ h_mat.T + r_mat
        k = p @ h_mat.T @ np.linalg.inv(s)
        x = x + k @ (y - h_mat @ x)
        p = (np.eye(n) - k @ h_mat) @ p
        means.append(x.copy())
        gains.append(k.copy())
        x = f_mat @ x
        p = f_mat @ p @ f_mat.T + q_mat
    return np.array(means), gains
