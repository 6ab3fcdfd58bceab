"""Pure-numpy implementations of the hot numeric kernels.

These are the fallback used when the compiled extension is unavailable (or
when FAIRDBG_PURE_PYTHON=1). The compiled module in ``_fast.pyx`` mirrors
this interface exactly.
"""

import numpy as np

BACKEND = "python"


def sigmoid(z):
    out = np.empty_like(z, dtype=float)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def logreg_loss(X, y, w, b, l2):
    """L2-regularized mean log-loss. y in {0,1}."""
    z = X @ w + b
    # log(1+exp(-z)) computed stably
    loss = np.mean(np.logaddexp(0.0, z) - y * z)
    return float(loss + l2 * np.dot(w, w))


def logreg_grad(X, y, w, b, l2):
    """Gradient of logreg_loss w.r.t. (w, b)."""
    n = X.shape[0]
    p = sigmoid(X @ w + b)
    gw = X.T @ (p - y) / n + 2.0 * l2 * w
    gb = float(np.mean(p - y))
    return gw, gb


def linsvm_loss(X, y, w, b, lam):
    """lam*||w||^2 + mean hinge loss. y in {-1,+1}."""
    margins = y * (X @ w + b)
    hinge = np.maximum(0.0, 1.0 - margins)
    return float(lam * np.dot(w, w) + np.mean(hinge))


def linsvm_grad(X, y, w, b, lam):
    """Subgradient of linsvm_loss w.r.t. (w, b)."""
    n = X.shape[0]
    margins = y * (X @ w + b)
    active = (margins < 1.0).astype(float)
    coef = active * y
    gw = 2.0 * lam * w - X.T @ coef / n
    gb = float(-np.mean(coef))
    return gw, gb


def gini_split_scan(x, y):
    """Best binary split of one feature column by Gini impurity decrease.

    x: feature values (n,), y: 0/1 labels (n,). Returns
    (threshold, impurity_decrease); decrease <= 0 means no useful split.
    Candidate thresholds are midpoints between distinct sorted values; ties
    resolve to the lowest threshold.
    """
    n = x.shape[0]
    order = np.argsort(x, kind="stable")
    xs = x[order]
    ys = y[order]
    pos = np.cumsum(ys)
    total_pos = pos[-1]
    p_parent = total_pos / n
    gini_parent = 2.0 * p_parent * (1.0 - p_parent)

    idx = np.arange(1, n)
    valid = xs[1:] > xs[:-1]
    if not valid.any():
        return 0.0, -1.0
    nl = idx[valid].astype(float)
    nr = n - nl
    pl = pos[:-1][valid] / nl
    pr = (total_pos - pos[:-1][valid]) / nr
    weighted = (nl * 2.0 * pl * (1.0 - pl) + nr * 2.0 * pr * (1.0 - pr)) / n
    gains = gini_parent - weighted
    best = int(np.argmax(gains))
    i = idx[valid][best]
    threshold = 0.5 * (xs[i - 1] + xs[i])
    return float(threshold), float(gains[best])
