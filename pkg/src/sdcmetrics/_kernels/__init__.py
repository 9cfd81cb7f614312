"""Hot kernels: compiled when the extension was built, numpy otherwise.

Set ``SDCMETRICS_PURE_PYTHON=1`` to force the numpy versions.
"""
import os

from . import _fallback

BACKEND = "python"

if os.environ.get("SDCMETRICS_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _ckernels as _impl

        BACKEND = "cython"
    except ImportError:  # extension not built
        _impl = _fallback
else:
    _impl = _fallback

average_ranks = _impl.average_ranks
mdav_labels = _impl.mdav_labels

__all__ = ["BACKEND", "average_ranks", "mdav_labels"]
