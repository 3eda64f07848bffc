"""Selects the LP pivot kernel: numba-compiled or pure numpy.

The same two-phase simplex exists in two builds.  ``LINREGIONS_NUMBA=0``
forces the vectorized numpy path; any other value (or an unset variable)
tries numba first and falls back silently when numba is not importable.
The flag is read once at import time, so benchmarks that compare the two
paths must set it before importing the package (see benchmarks/).
"""

import os

_flag = os.environ.get("LINREGIONS_NUMBA", "1")

if _flag == "0":
    HAVE_NUMBA = False
else:
    try:
        import numba  # noqa: F401

        HAVE_NUMBA = True
    except ImportError:
        HAVE_NUMBA = False

if HAVE_NUMBA:
    from ._simplex_numba import solve_lp
else:
    from ._simplex_numpy import solve_lp

BACKEND = "numba" if HAVE_NUMBA else "numpy"

__all__ = ["solve_lp", "BACKEND", "HAVE_NUMBA"]
