"""Backend selection for the hot numeric kernels.

The environment variable ``CRAFTSYNTH_BACKEND`` picks the implementation:

* ``numba`` (default when numba imports cleanly) -- kernels are compiled
  with ``@numba.njit``.
* ``numpy`` -- pure-numpy fallback, bit-compatible with the numba path.

``benchmarks/bench_kernels.py`` times both paths on the same inputs.
"""

import os

_requested = os.environ.get("CRAFTSYNTH_BACKEND", "").strip().lower()

if _requested not in ("", "numba", "numpy"):
    raise ValueError(
        f"CRAFTSYNTH_BACKEND must be 'numba' or 'numpy', got {_requested!r}"
    )

NUMBA_AVAILABLE = False
if _requested != "numpy":
    try:
        import numba  # noqa: F401

        NUMBA_AVAILABLE = True
    except ImportError:
        if _requested == "numba":
            raise

USE_NUMBA = NUMBA_AVAILABLE and _requested != "numpy"


def maybe_njit(*args, **kwargs):
    """``numba.njit`` when the numba backend is active, identity otherwise."""
    if USE_NUMBA:
        import numba

        return numba.njit(*args, **kwargs)

    def passthrough(fn):
        return fn

    if args and callable(args[0]):
        return args[0]
    return passthrough
