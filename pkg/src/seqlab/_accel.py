"""Backend selection for the hot kernels.

Set ``SEQLAB_DISABLE_NUMBA=1`` to force the pure-numpy code paths (useful for
debugging and for benchmarking the compiled kernels against a baseline).
"""

import os

_FLAG = os.environ.get("SEQLAB_DISABLE_NUMBA", "").strip().lower()

try:
    import numba
except ImportError:  # pragma: no cover - numba is a hard dependency in practice
    numba = None

USE_NUMBA = numba is not None and _FLAG not in ("1", "true", "yes", "on")

if USE_NUMBA and "NUMBA_THREADING_LAYER" not in os.environ:
    # the system TBB is often too old and numba warns on every parallel launch
    numba.config.THREADING_LAYER_PRIORITY = ["omp", "workqueue", "tbb"]


def backend_name() -> str:
    return "numba" if USE_NUMBA else "numpy"


def set_threads(threads):
    """Cap kernel parallelism; ``None`` leaves numba's default in place."""
    if threads is None or not USE_NUMBA:
        return
    threads = max(1, min(int(threads), numba.config.NUMBA_NUM_THREADS))
    numba.set_num_threads(threads)
