"""Kernel backend selection: compiled extension if built, numpy fallback otherwise."""

from __future__ import annotations

try:
    from . import _kernels_cy as _impl
except ImportError:  # extension not built; fall back to vectorized numpy
    from . import _kernels_py as _impl

BACKEND = _impl.BACKEND
search_bit_teps = _impl.search_bit_teps
search_byte_teps = _impl.search_byte_teps


def get_backend(name: str):
    """Explicit backend module, for benchmarks and equivalence tests."""
    if name == "python":
        from . import _kernels_py

        return _kernels_py
    if name == "cython":
        from . import _kernels_cy

        return _kernels_cy
    raise ValueError(f"unknown backend {name!r}")
