"""Kernel dispatch: compiled extension when available, pure Python otherwise.

Set ``CPGEO_PURE_PYTHON=1`` to force the pure backend (used by the benchmark
and the kernel-equivalence tests).
"""

from __future__ import annotations

import os

if os.environ.get("CPGEO_PURE_PYTHON"):
    from cpgeo import _poly_pure as _impl
else:
    try:
        from cpgeo import _poly_speed as _impl  # type: ignore[no-redef]
    except ImportError:
        from cpgeo import _poly_pure as _impl  # type: ignore[no-redef]

KERNEL_BACKEND: str = _impl.BACKEND

poly_add = _impl.poly_add
poly_neg = _impl.poly_neg
poly_scale = _impl.poly_scale
poly_mul = _impl.poly_mul
