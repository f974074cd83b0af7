"""Frequency-domain error of a DCT approximation, row by row.

Each matrix row is read as a 16-tap FIR filter. The error energy of row m is
the integral over [0, pi] of the squared magnitude of the difference between
the exact and approximate transfer functions.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .transforms import N, TransformSpec, build_exact_dct

QUAD_ABS_TOL = 1e-8
DEFAULT_GRID = 1024


class RowMismatch(ValueError):
    pass


class QuadratureFailure(ArithmeticError):
    pass


@dataclass(frozen=True, eq=False)
class RowFilter:
    coefficients: np.ndarray
    m: int

    @classmethod
    def from_spec(cls, spec: TransformSpec, m: int) -> "RowFilter":
        return cls(spec.matrix[m].copy(), m)


def transfer_function(row: RowFilter, omega):
    """DTFT ``sum_n h[n] exp(-j n omega)``; ``omega`` may be an array."""
    w = np.asarray(omega, dtype=np.float64)
    n = np.arange(len(row.coefficients))
    h = np.exp(-1j * np.multiply.outer(w, n)) @ row.coefficients
    return complex(h) if w.ndim == 0 else h


def distance_curve(approx_row: RowFilter, dct_row: RowFilter, grid) -> np.ndarray:
    if approx_row.m != dct_row.m:
        raise RowMismatch(f"row {approx_row.m} compared with DCT row {dct_row.m}")
    diff = transfer_function(dct_row, grid) - transfer_function(approx_row, grid)
    return np.abs(diff) ** 2


def error_energy(approx: TransformSpec, m: int, reference: TransformSpec | None = None,
                 abs_tol: float = QUAD_ABS_TOL) -> float:
    """Integral of the row-m distance curve over [0, pi] by adaptive quadrature."""
    if not 0 <= m < N:
        raise IndexError(f"row index {m} outside 0..{N - 1}")
    ref = reference or build_exact_dct()
    a_row, c_row = RowFilter.from_spec(approx, m), RowFilter.from_spec(ref, m)

    def integrand(w):
        return float(distance_curve(a_row, c_row, w))

    result = integrate.quad(
        integrand, 0.0, np.pi, epsabs=abs_tol, epsrel=0.0, limit=200, full_output=1
    )
    value, err = result[:2]
    # QUADPACK appends a message only when it did not converge
    if len(result) > 3 or err > abs_tol:
        raise QuadratureFailure(f"row {m}: error estimate {err:.3g}")
    return max(value, 0.0)


def parseval_energy(approx: TransformSpec, m: int,
                    reference: TransformSpec | None = None) -> float:
    """Closed form ``pi * |c_m - a_m|^2`` of the same integral."""
    ref = reference or build_exact_dct()
    d = ref.matrix[m] - approx.matrix[m]
    return float(np.pi * d @ d)


@dataclass(frozen=True, eq=False)
class SpectralReport:
    name: str
    energies: np.ndarray  # (16,)
    grid: np.ndarray  # (grid_size,)
    curves: np.ndarray  # (16, grid_size), D_m sampled on grid

    @property
    def total(self) -> float:
        return float(self.energies.sum())


def full_report(approx: TransformSpec, grid_size: int = DEFAULT_GRID,
                reference: TransformSpec | None = None) -> SpectralReport:
    if grid_size < 2:
        raise ValueError("grid_size must be at least 2")
    ref = reference or build_exact_dct()
    grid = np.linspace(0.0, np.pi, grid_size)
    energies = np.array([error_energy(approx, m, ref) for m in range(N)])
    curves = np.array([
        distance_curve(RowFilter.from_spec(approx, m), RowFilter.from_spec(ref, m), grid)
        for m in range(N)
    ])
    return SpectralReport(approx.name, energies, grid, curves)
