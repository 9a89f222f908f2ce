"""Backend selection for the batched numeric kernels.

The compiled extension is used when it was built; otherwise, or when the
environment variable ``SPHERETANGENTS_PURE`` is set to a non-empty value
other than ``0``, the numpy implementation is used.
"""
import os

from . import _kernels_py

BACKEND = "python"
_impl = _kernels_py

if os.environ.get("SPHERETANGENTS_PURE", "0") in ("", "0"):
    try:
        from . import _kernels as _impl  # type: ignore[no-redef]
        BACKEND = "cython"
    except ImportError:  # extension not built
        _impl = _kernels_py

quadratic_forms = _impl.quadratic_forms
meet_forms = _impl.meet_forms
clip_lines = _impl.clip_lines
match_nearest = _impl.match_nearest

__all__ = ["BACKEND", "quadratic_forms", "meet_forms", "clip_lines", "match_nearest"]
