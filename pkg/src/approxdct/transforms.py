"""16-point transform kernels and their scaling diagonals.

Every transform is stored as a kernel matrix plus a diagonal scaling vector,
so the orthonormal matrix is ``diag(scaling) @ kernel``. Integer kernels are
kept as ``int8`` and multiplied in ``int64`` so that ``kernel @ x`` is exact.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np
from scipy.linalg import hadamard

N = 16

# Orthogonality tolerance for transforms built from closed forms.
ORTHO_TOL = 1e-12
# Looser bound for user-supplied matrices whose scaling is given as decimals.
TRANSPOSE_INVERSE_TOL = 1e-8

BAS_MATRIX_ENV = "APPROXDCT_BAS_MATRIX"

PROPOSED_KERNEL = (
    (1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1),
    (1, 1, 1, 1, 1, 0, 1, 1, -1, -1, 0, -1, -1, -1, -1, -1),
    (1, 1, 1, 0, 0, -1, -1, -1, -1, -1, -1, 0, 0, 1, 1, 1),
    (1, 1, 1, 0, -1, -1, -1, -1, 1, 1, 1, 1, 0, -1, -1, -1),
    (1, 1, -1, -1, -1, -1, 1, 1, 1, 1, -1, -1, -1, -1, 1, 1),
    (1, 1, -1, -1, -1, 1, 1, 0, 0, -1, -1, 1, 1, 1, -1, -1),
    (1, 0, -1, -1, 1, 1, 0, -1, -1, 0, 1, 1, -1, -1, 0, 1),
    (1, 0, -1, 1, 1, 1, -1, -1, 1, 1, -1, -1, -1, 1, 0, -1),
    (1, -1, -1, 1, 1, -1, -1, 1, 1, -1, -1, 1, 1, -1, -1, 1),
    (1, -1, -1, 1, -1, -1, 0, 1, -1, 0, 1, 1, -1, 1, 1, -1),
    (1, -1, 0, 1, -1, 0, 1, -1, -1, 1, 0, -1, 1, 0, -1, 1),
    (0, -1, 1, 1, -1, 1, 1, -1, 1, -1, -1, 1, -1, -1, 1, 0),
    (1, -1, 1, -1, -1, 1, -1, 1, 1, -1, 1, -1, -1, 1, -1, 1),
    (1, -1, 1, -1, 0, 1, -1, 1, -1, 1, -1, 0, 1, -1, 1, -1),
    (0, -1, 1, -1, 1, -1, 1, 0, 0, 1, -1, 1, -1, 1, -1, 0),
    (1, -1, 0, -1, 1, -1, 1, -1, 1, -1, 1, -1, 1, 0, 1, -1),
)

TRANSFORM_NAMES = ("proposed", "dct", "wht", "bas2010")


class ComparatorUnavailable(LookupError):
    """The external BAS-2010 matrix file is missing or unreadable."""


class NotInvertibleAsTranspose(ValueError):
    """The scaled matrix is not orthogonal, so its transpose is no inverse."""


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class TransformSpec:
    """A named 16x16 transform ``diag(scaling) @ kernel``."""

    name: str
    kernel: np.ndarray
    scaling: np.ndarray
    metadata: frozenset[str] = field(default_factory=frozenset)

    def __post_init__(self):
        kernel = np.asarray(self.kernel)
        scaling = np.asarray(self.scaling, dtype=np.float64)
        if kernel.shape != (N, N):
            raise ValueError(f"kernel must be {N}x{N}, got {kernel.shape}")
        if scaling.shape != (N,):
            raise ValueError(f"scaling must have {N} entries, got {scaling.shape}")
        if np.any(scaling <= 0):
            raise ValueError("scaling entries must be positive")
        object.__setattr__(self, "kernel", _frozen(kernel))
        object.__setattr__(self, "scaling", _frozen(scaling))
        object.__setattr__(self, "metadata", frozenset(self.metadata))

    @property
    def is_integer(self) -> bool:
        return np.issubdtype(self.kernel.dtype, np.integer)

    @property
    def matrix(self) -> np.ndarray:
        """The scaled matrix, i.e. the actual approximate DCT."""
        return self.scaling[:, None] * self.kernel.astype(np.float64)

    def orthogonality_error(self) -> float:
        a = self.matrix
        return float(np.abs(a @ a.T - np.eye(N)).max())

    def is_orthogonal(self, tol: float = TRANSPOSE_INVERSE_TOL) -> bool:
        return self.orthogonality_error() < tol


def row_norm_scaling(kernel: np.ndarray) -> np.ndarray:
    """Scaling that normalises every row of ``kernel`` to unit length."""
    k = np.asarray(kernel, dtype=np.int64)
    return 1.0 / np.sqrt((k * k).sum(axis=1))


def build_proposed() -> TransformSpec:
    kernel = np.array(PROPOSED_KERNEL, dtype=np.int8)
    return TransformSpec("proposed", kernel, row_norm_scaling(kernel))


def build_exact_dct() -> TransformSpec:
    """Orthonormal DCT-II evaluated from its closed form in double precision."""
    k = np.arange(N)[:, None]
    n = np.arange(N)[None, :]
    c = np.sqrt(2.0 / N) * np.cos(np.pi * (2 * n + 1) * k / (2 * N))
    c[0] /= np.sqrt(2.0)
    return TransformSpec("dct", c, np.ones(N))


def sign_changes(row) -> int:
    return int(np.count_nonzero(np.diff(np.sign(row))))


def build_wht(ordering: str = "natural") -> TransformSpec:
    """16-point Walsh-Hadamard transform with scaling 1/4.

    ``ordering="natural"`` keeps the Sylvester (Hadamard) row order, which is
    the order that reproduces the published WHT error energies. ``"sequency"``
    sorts rows by number of sign changes.
    """
    h = hadamard(N).astype(np.int8)
    if ordering == "sequency":
        h = h[np.argsort([sign_changes(r) for r in h], kind="stable")]
    elif ordering != "natural":
        raise ValueError(f"unknown WHT ordering {ordering!r}")
    meta = {"sequency"} if ordering == "sequency" else set()
    return TransformSpec("wht", h, np.full(N, 0.25), frozenset(meta))


def parse_matrix_file(text: str) -> tuple[np.ndarray, np.ndarray]:
    """Parse 16 kernel rows followed by one row of 16 scaling values.

    Kernel tokens are integers; fractions such as ``1/2`` are also accepted,
    in which case the kernel is returned as float64.
    """
    rows = [line.split() for line in text.splitlines()]
    rows = [r for r in rows if r and not r[0].startswith("#")]
    if len(rows) != N + 1 or any(len(r) != N for r in rows):
        raise ValueError(
            f"expected {N} kernel rows and 1 scaling row of {N} values each"
        )
    entries = [[Fraction(tok) for tok in r] for r in rows[:N]]
    if all(v.denominator == 1 for r in entries for v in r):
        kernel = np.array([[int(v) for v in r] for r in entries], dtype=np.int64)
        if np.abs(kernel).max() > 127:
            raise ValueError("integer kernel entries must fit in 8 bits")
        kernel = kernel.astype(np.int8)
    else:
        kernel = np.array([[float(v) for v in r] for r in entries])
    scaling = np.array([float(tok) for tok in rows[N]])
    return kernel, scaling


def resolve_bas_path(path: str | os.PathLike | None = None) -> Path | None:
    if path is not None:
        return Path(path)
    env = os.environ.get(BAS_MATRIX_ENV)
    return Path(env) if env else None


def build_bas2010(path: str | os.PathLike | None = None) -> TransformSpec:
    """Load the BAS-2010 comparator from a transcribed matrix file.

    The matrix is not shipped with the package. ``path`` falls back to the
    ``APPROXDCT_BAS_MATRIX`` environment variable.
    """
    p = resolve_bas_path(path)
    if p is None:
        raise ComparatorUnavailable(
            f"no BAS-2010 matrix given (use --bas-matrix or ${BAS_MATRIX_ENV})"
        )
    try:
        text = p.read_text()
    except OSError as exc:
        raise ComparatorUnavailable(f"{p}: {exc.strerror or exc}") from exc
    try:
        kernel, scaling = parse_matrix_file(text)
        return TransformSpec(
            "bas2010", kernel, scaling, frozenset({"comparator-external"})
        )
    except ValueError as exc:
        raise ComparatorUnavailable(f"{p}: {exc}") from exc


def get_transform(name: str, bas_path=None) -> TransformSpec:
    if name == "proposed":
        return build_proposed()
    if name == "dct":
        return build_exact_dct()
    if name == "wht":
        return build_wht()
    if name == "bas2010":
        return build_bas2010(bas_path)
    raise ValueError(f"unknown transform {name!r}; choose from {TRANSFORM_NAMES}")


def kernel_times(spec: TransformSpec, x: np.ndarray) -> np.ndarray:
    """``kernel @ x``, exact in int64 when both operands are integral."""
    x = np.asarray(x)
    if spec.is_integer and np.issubdtype(x.dtype, np.integer):
        return spec.kernel.astype(np.int64) @ x.astype(np.int64)
    return spec.kernel.astype(np.float64) @ x.astype(np.float64)


def apply_forward(spec: TransformSpec, x) -> np.ndarray:
    x = np.asarray(x)
    if x.shape[0] != N:
        raise ValueError(f"expected {N} samples along axis 0, got {x.shape}")
    y = kernel_times(spec, x)
    scale = spec.scaling.reshape((N,) + (1,) * (x.ndim - 1))
    return scale * y


def apply_inverse(spec: TransformSpec, y) -> np.ndarray:
    if not spec.is_orthogonal():
        raise NotInvertibleAsTranspose(
            f"{spec.name}: |A A^T - I| = {spec.orthogonality_error():.3g}"
        )
    y = np.asarray(y, dtype=np.float64)
    if y.shape[0] != N:
        raise ValueError(f"expected {N} coefficients along axis 0, got {y.shape}")
    return spec.matrix.T @ y
