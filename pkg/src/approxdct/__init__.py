"""Multiplierless 16-point DCT approximation: kernels, fast algorithm,
spectral error analysis and a block-compression harness."""

from .transforms import (
    TransformSpec,
    apply_forward,
    apply_inverse,
    build_bas2010,
    build_exact_dct,
    build_proposed,
    build_wht,
    get_transform,
)

__all__ = [
    "TransformSpec",
    "apply_forward",
    "apply_inverse",
    "build_bas2010",
    "build_exact_dct",
    "build_proposed",
    "build_wht",
    "get_transform",
]
