"""Hot-kernel backend selection.

The compiled extension is preferred; the numpy reference implementation is
the fallback.  Set SPECSHAPE_NO_EXT=1 to force the fallback (used by the
benchmark and the backend-equivalence tests).
"""

import os

from . import _ref

if os.environ.get("SPECSHAPE_NO_EXT"):
    _impl = _ref
else:
    try:
        from . import _fast as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = _ref

BACKEND = _impl.BACKEND
qam16_map = _impl.qam16_map
qam16_bit_errors = _impl.qam16_bit_errors
qam16_bit_errors_per_bin = _impl.qam16_bit_errors_per_bin
render_gauss_pairs = _impl.render_gauss_pairs
render_rects = _impl.render_rects


def backend_name() -> str:
    """Name of the kernel implementation in use ('cython' or 'numpy')."""
    return BACKEND
