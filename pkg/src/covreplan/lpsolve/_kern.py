"""Kernel selection: compiled extension if built, numpy fallback otherwise."""

try:
    from ._kernels import IS_COMPILED, btran_etas, ftran_etas  # noqa: F401
except ImportError:  # pragma: no cover - depends on build environment
    from ._kernels_py import IS_COMPILED, btran_etas, ftran_etas  # noqa: F401
