# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the hot numeric kernels (see py_kernels.py)."""

import numpy as np

cimport numpy as cnp
from libc.math cimport exp, log1p, fmax

BACKEND = "cython"


def sigmoid(cnp.ndarray[cnp.float64_t, ndim=1] z):
    cdef Py_ssize_t i, n = z.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty(n)
    cdef double v, e
    for i in range(n):
        v = z[i]
        if v >= 0:
            out[i] = 1.0 / (1.0 + exp(-v))
        else:
            e = exp(v)
            out[i] = e / (1.0 + e)
    return out


def logreg_loss(cnp.ndarray[cnp.float64_t, ndim=2] X,
                cnp.ndarray[cnp.float64_t, ndim=1] y,
                cnp.ndarray[cnp.float64_t, ndim=1] w,
                double b, double l2):
    cdef Py_ssize_t i, j, n = X.shape[0], d = X.shape[1]
    cdef double z, loss = 0.0, reg = 0.0
    for i in range(n):
        z = b
        for j in range(d):
            z += X[i, j] * w[j]
        if z > 0:
            loss += z + log1p(exp(-z)) - y[i] * z
        else:
            loss += log1p(exp(z)) - y[i] * z
    for j in range(d):
        reg += w[j] * w[j]
    return loss / n + l2 * reg


def logreg_grad(cnp.ndarray[cnp.float64_t, ndim=2] X,
                cnp.ndarray[cnp.float64_t, ndim=1] y,
                cnp.ndarray[cnp.float64_t, ndim=1] w,
                double b, double l2):
    cdef Py_ssize_t i, j, n = X.shape[0], d = X.shape[1]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] gw = np.zeros(d)
    cdef double z, p, r, gb = 0.0
    for i in range(n):
        z = b
        for j in range(d):
            z += X[i, j] * w[j]
        if z >= 0:
            p = 1.0 / (1.0 + exp(-z))
        else:
            p = exp(z) / (1.0 + exp(z))
        r = p - y[i]
        gb += r
        for j in range(d):
            gw[j] += X[i, j] * r
    for j in range(d):
        gw[j] = gw[j] / n + 2.0 * l2 * w[j]
    return gw, gb / n


def linsvm_loss(cnp.ndarray[cnp.float64_t, ndim=2] X,
                cnp.ndarray[cnp.float64_t, ndim=1] y,
                cnp.ndarray[cnp.float64_t, ndim=1] w,
                double b, double lam):
    cdef Py_ssize_t i, j, n = X.shape[0], d = X.shape[1]
    cdef double z, loss = 0.0, reg = 0.0
    for i in range(n):
        z = b
        for j in range(d):
            z += X[i, j] * w[j]
        loss += fmax(0.0, 1.0 - y[i] * z)
    for j in range(d):
        reg += w[j] * w[j]
    return lam * reg + loss / n


def linsvm_grad(cnp.ndarray[cnp.float64_t, ndim=2] X,
                cnp.ndarray[cnp.float64_t, ndim=1] y,
                cnp.ndarray[cnp.float64_t, ndim=1] w,
                double b, double lam):
    cdef Py_ssize_t i, j, n = X.shape[0], d = X.shape[1]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] gw = np.zeros(d)
    cdef double z, c, gb = 0.0
    for i in range(n):
        z = b
        for j in range(d):
            z += X[i, j] * w[j]
        if y[i] * z < 1.0:
            c = y[i]
            gb -= c
            for j in range(d):
                gw[j] -= X[i, j] * c
    for j in range(d):
        gw[j] = gw[j] / n + 2.0 * lam * w[j]
    return gw, gb / n


def gini_split_scan(cnp.ndarray[cnp.float64_t, ndim=1] x,
                    cnp.ndarray[cnp.float64_t, ndim=1] y):
    cdef Py_ssize_t n = x.shape[0]
    cdef cnp.ndarray[cnp.int64_t, ndim=1] order = np.argsort(x, kind="stable")
    cdef Py_ssize_t i, k
    cdef double total_pos = 0.0, left_pos = 0.0
    cdef double p_parent, gini_parent, nl, nr, pl, pr, weighted, gain
    cdef double best_gain = -1.0, best_threshold = 0.0
    for i in range(n):
        total_pos += y[order[i]]
    p_parent = total_pos / n
    gini_parent = 2.0 * p_parent * (1.0 - p_parent)
    for i in range(n - 1):
        k = order[i]
        left_pos += y[k]
        if x[order[i + 1]] <= x[k]:
            continue
        nl = i + 1.0
        nr = n - nl
        pl = left_pos / nl
        pr = (total_pos - left_pos) / nr
        weighted = (nl * 2.0 * pl * (1.0 - pl) + nr * 2.0 * pr * (1.0 - pr)) / n
        gain = gini_parent - weighted
        if gain > best_gain:
            best_gain = gain
            best_threshold = 0.5 * (x[k] + x[order[i + 1]])
    if best_gain < 0.0:
        return 0.0, -1.0
    return best_threshold, best_gain
