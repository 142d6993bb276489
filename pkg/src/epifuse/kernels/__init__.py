"""Hot numeric kernels with a numba fast path and a pure-numpy fallback.

The backend is picked once at import time from the ``EPIFUSE_NUMBA``
environment variable:

* ``"1"`` - require the numba backend (ImportError if numba is missing),
* ``"0"`` - force the pure-numpy fallback,
* unset / anything else - numba if it imports, numpy otherwise.

``benchmarks/bench_kernels.py`` times the two backends against each other.
"""

import os

from . import numpy_backend

_choice = os.environ.get("EPIFUSE_NUMBA", "auto").strip().lower()

if _choice == "0":
    _impl = numpy_backend
    BACKEND = "numpy"
else:
    try:
        from . import numba_backend as _impl

        BACKEND = "numba"
    except ImportError:
        if _choice == "1":
            raise
        _impl = numpy_backend
        BACKEND = "numpy"

conv2d_forward = _impl.conv2d_forward
conv2d_backward = _impl.conv2d_backward
maxpool2d_forward = _impl.maxpool2d_forward
maxpool2d_backward = _impl.maxpool2d_backward
avgpool2d_forward = _impl.avgpool2d_forward
avgpool2d_backward = _impl.avgpool2d_backward
infection_pressure = _impl.infection_pressure
