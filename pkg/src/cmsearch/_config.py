"""Package-wide tolerances and backend selection."""

import os

#: Absolute tolerance for probability sums and value equality checks.
TOL = 1e-9

#: Slopes closer than this are merged into one linear piece.
SLOPE_MERGE_TOL = 1e-12

#: Set ``CMSEARCH_NO_NUMBA=1`` to force the pure-numpy kernels.
NO_NUMBA_ENV = "CMSEARCH_NO_NUMBA"


def numba_disabled() -> bool:
    return os.environ.get(NO_NUMBA_ENV, "").strip().lower() in ("1", "true", "yes", "on")


class SizeLimitError(RuntimeError):
    """A configured enumeration or support budget was exceeded."""


class PolicyMismatchError(ValueError):
    """A policy references an action or decision illegal for its MSP."""
