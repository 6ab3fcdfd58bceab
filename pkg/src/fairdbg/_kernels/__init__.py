"""Numeric kernel backend selection.

The compiled Cython extension is preferred; the numpy implementation is the
fallback. Set FAIRDBG_PURE_PYTHON=1 to force the fallback (used by the
benchmark and the backend-agreement tests).
"""

import os

from . import py_kernels

if os.environ.get("FAIRDBG_PURE_PYTHON") == "1":
    _impl = py_kernels
else:
    try:
        from . import _fast as _impl
    except ImportError:
        _impl = py_kernels

BACKEND = _impl.BACKEND

sigmoid = _impl.sigmoid
logreg_loss = _impl.logreg_loss
logreg_grad = _impl.logreg_grad
linsvm_loss = _impl.linsvm_loss
linsvm_grad = _impl.linsvm_grad
gini_split_scan = _impl.gini_split_scan
