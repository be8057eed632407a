"""Backend selection for the hot evolution kernels.

Prefers the compiled extension; falls back to the numpy implementation
when the extension is missing or IKEMO_PURE_PYTHON is set.  Both
backends share one calling convention (pre-drawn uniforms in, arrays
out), so everything above this module is backend-agnostic.
"""

from __future__ import annotations

import os

if os.environ.get("IKEMO_PURE_PYTHON"):
    from ikemo import _kernels_py as _impl
else:
    try:
        from ikemo import _kernels_c as _impl  # type: ignore[attr-defined]
    except ImportError:
        from ikemo import _kernels_py as _impl

BACKEND: str = _impl.BACKEND
nondominated_ranks = _impl.nondominated_ranks
crowding_from_orders = _impl.crowding_from_orders
sbx_pairs = _impl.sbx_pairs
polynomial_mutation = _impl.polynomial_mutation

__all__ = [
    "BACKEND",
    "nondominated_ranks",
    "crowding_from_orders",
    "sbx_pairs",
    "polynomial_mutation",
]
