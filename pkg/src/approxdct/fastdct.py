"""Fast integer algorithm for the proposed 16-point transform.

The kernel factors as

    T = P . diag(B2, B2bar, E, O) . diag(B4, I12) . diag(B8, I8) . B16

with the odd block realised as ``O = M . (I4 (x) B2) + S``. Stages operate on
lists whose entries are Python ints or equally shaped integer numpy arrays, so
one code path serves single vectors and batches. Every addition and
subtraction goes through an :class:`_Ops` instance that counts it.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .transforms import N, PROPOSED_KERNEL

E_BLOCK = (
    (0, 1, 1, 1),
    (-1, -1, 0, 1),
    (1, 0, -1, 1),
    (-1, 1, -1, 0),
)

O_BLOCK = (
    (1, 1, 0, 1, 1, 1, 1, 1),
    (-1, -1, -1, -1, 0, 1, 1, 1),
    (0, 1, 1, -1, -1, -1, 1, 1),
    (-1, -1, 1, 1, 1, -1, 0, 1),
    (1, 0, -1, -1, 1, -1, -1, 1),
    (-1, 1, 1, -1, 1, 1, -1, 0),
    (1, -1, 1, 0, -1, 1, -1, 1),
    (-1, 1, -1, 1, -1, 0, -1, 1),
)

# Left factor of O' = M . (I4 (x) B2).
M_FACTOR = (
    (1, 0, 0, 0, 1, 0, 1, 0),
    (-1, 0, -1, 0, 0, 0, 1, 0),
    (0, 0, 0, 1, -1, 0, 1, 0),
    (-1, 0, 1, 0, 0, 1, 0, 0),
    (0, 0, -1, 0, 0, 1, 0, -1),
    (0, -1, 0, 1, 1, 0, 0, 0),
    (0, 1, 0, 0, 0, -1, 0, -1),
    (0, -1, 0, -1, 0, 0, 0, -1),
)

B2_FLIPPED = ((1, 1), (-1, 1))

# Column j of P is e_{PERMUTATION_COLUMNS[j]} (1-based).
PERMUTATION_COLUMNS = (1, 9, 5, 13, 3, 7, 11, 15, 2, 4, 6, 8, 10, 12, 14, 16)


class ArithmeticOverflow(OverflowError):
    pass


class FactorizationInconsistent(ValueError):
    pass


@dataclass(frozen=True)
class OpCounts:
    additions: int = 0
    multiplications: int = 0
    shifts: int = 0
    negations: int = 0


class _Ops:
    """Counting add/sub/neg with a signed accumulator range check."""

    def __init__(self, bits: int | None):
        self.additions = 0
        self.negations = 0
        self.limit = None if bits is None else 1 << (bits - 1)

    def _check(self, v):
        if self.limit is None:
            return v
        lo, hi = np.min(v), np.max(v)
        if lo < -self.limit or hi >= self.limit:
            raise ArithmeticOverflow(
                f"value range [{lo}, {hi}] exceeds {self.limit.bit_length()}-bit signed"
            )
        return v

    def add(self, a, b):
        self.additions += 1
        return self._check(a + b)

    def sub(self, a, b):
        self.additions += 1
        return self._check(a - b)

    def neg(self, a):
        self.negations += 1
        return self._check(-a)

    def counts(self) -> OpCounts:
        return OpCounts(additions=self.additions, negations=self.negations)


def signed_sum(terms, ops: _Ops):
    """Sum of ``(sign, value)`` pairs using only add/sub (and one negation if
    every sign is negative)."""
    if not terms:
        return 0
    pos = [v for s, v in terms if s > 0]
    neg = [v for s, v in terms if s < 0]
    if pos:
        acc, pos = pos[0], pos[1:]
    else:
        acc = neg[0]
        for v in neg[1:]:
            acc = ops.add(acc, v)
        return ops.neg(acc)
    for v in pos:
        acc = ops.add(acc, v)
    for v in neg:
        acc = ops.sub(acc, v)
    return acc


def _check_ternary(m: np.ndarray, what: str):
    if not np.isin(m, (-1, 0, 1)).all():
        raise ValueError(f"{what}: entries must lie in {{-1, 0, 1}}")


def _butterfly_matrix(n: int) -> np.ndarray:
    h = n // 2
    eye = np.eye(h, dtype=np.int64)
    rev = np.fliplr(eye)
    return np.block([[eye, rev], [rev, -eye]])


class Stage:
    """A linear map on integer vectors built from additions only."""

    size: int
    label: str

    def matrix(self) -> np.ndarray:
        raise NotImplementedError

    def apply(self, x: list, ops: _Ops, trace=None) -> list:
        raise NotImplementedError

    def signals(self) -> list[tuple[str, np.ndarray]]:
        """Named intermediate signals as matrices on the stage input; the
        last entry is the stage output."""
        return [(self.label, self.matrix())]


@dataclass(frozen=True)
class Butterfly(Stage):
    size: int
    label: str = ""

    def __post_init__(self):
        if self.size < 2 or self.size % 2:
            raise ValueError("butterfly size must be even")
        if not self.label:
            object.__setattr__(self, "label", f"B{self.size}")

    def matrix(self):
        return _butterfly_matrix(self.size)

    def apply(self, x, ops, trace=None):
        n, h = self.size, self.size // 2
        top = [ops.add(x[i], x[n - 1 - i]) for i in range(h)]
        bottom = [ops.sub(x[h - 1 - i], x[h + i]) for i in range(h)]
        return top + bottom


@dataclass(frozen=True)
class Identity(Stage):
    size: int
    label: str = "I"

    def matrix(self):
        return np.eye(self.size, dtype=np.int64)

    def apply(self, x, ops, trace=None):
        return list(x)


@dataclass(frozen=True, eq=False)
class SparseMatrix(Stage):
    """Dense storage of a {-1, 0, 1} matrix, evaluated row by row."""

    entries: tuple
    label: str = ""

    def __post_init__(self):
        m = np.array(self.entries, dtype=np.int64)
        _check_ternary(m, self.label or "sparse stage")

    @property
    def size(self):
        return len(self.entries)

    def matrix(self):
        return np.array(self.entries, dtype=np.int64)

    def apply(self, x, ops, trace=None):
        return [
            signed_sum([(c, x[j]) for j, c in enumerate(row) if c], ops)
            for row in self.entries
        ]


@dataclass(frozen=True)
class KroneckerButterfly(Stage):
    """``I_copies (x) B2``: a 2-point butterfly on consecutive pairs."""

    copies: int
    label: str = ""

    def __post_init__(self):
        if not self.label:
            object.__setattr__(self, "label", f"I{self.copies}xB2")

    @property
    def size(self):
        return 2 * self.copies

    def matrix(self):
        return np.kron(np.eye(self.copies, dtype=np.int64), _butterfly_matrix(2))

    def apply(self, x, ops, trace=None):
        out = []
        for k in range(self.copies):
            a, b = x[2 * k], x[2 * k + 1]
            out += [ops.add(a, b), ops.sub(a, b)]
        return out


@dataclass(frozen=True)
class Permutation(Stage):
    """Output ``sigma[j]`` receives input ``j``; no arithmetic."""

    sigma: tuple
    label: str = "P"

    def __post_init__(self):
        if sorted(self.sigma) != list(range(len(self.sigma))):
            raise ValueError("permutation must be a bijection")

    @property
    def size(self):
        return len(self.sigma)

    def matrix(self):
        p = np.zeros((self.size, self.size), dtype=np.int64)
        p[list(self.sigma), range(self.size)] = 1
        return p

    def apply(self, x, ops, trace=None):
        out = [None] * self.size
        for j, s in enumerate(self.sigma):
            out[s] = x[j]
        return out


@dataclass(frozen=True)
class BlockDiag(Stage):
    blocks: tuple
    label: str = "blockdiag"

    @property
    def size(self):
        return sum(b.size for b in self.blocks)

    def matrix(self):
        m = np.zeros((self.size, self.size), dtype=np.int64)
        k = 0
        for b in self.blocks:
            m[k : k + b.size, k : k + b.size] = b.matrix()
            k += b.size
        return m

    def apply(self, x, ops, trace=None):
        out, k = [], 0
        for b in self.blocks:
            out += b.apply(x[k : k + b.size], ops, trace)
            k += b.size
        return out

    def signals(self):
        found, k = [], 0
        for b in self.blocks:
            for lab, m in b.signals()[:-1]:
                full = np.zeros((m.shape[0], self.size), dtype=np.int64)
                full[:, k : k + b.size] = m
                found.append((lab, full))
            k += b.size
        return found + [(self.label, self.matrix())]


@dataclass(frozen=True)
class Corrected(Stage):
    """``main(u) + S u`` where ``S`` has at most one nonzero per row."""

    main: tuple
    correction: tuple
    label: str = ""

    def __post_init__(self):
        s = np.array(self.correction, dtype=np.int64)
        _check_ternary(s, "correction")
        if (np.count_nonzero(s, axis=1) > 1).any():
            raise ValueError("correction must have at most one nonzero per row")

    @property
    def size(self):
        return self.main[0].size

    def _main_matrix(self):
        m = np.eye(self.size, dtype=np.int64)
        for st in self.main:
            m = st.matrix() @ m
        return m

    def matrix(self):
        return self._main_matrix() + np.array(self.correction, dtype=np.int64)

    def apply(self, x, ops, trace=None):
        y = list(x)
        for st in self.main:
            y = st.apply(y, ops, trace)
            if trace is not None:
                trace.append((st.label, y))
        out = []
        for i, row in enumerate(self.correction):
            nz = [(c, j) for j, c in enumerate(row) if c]
            if not nz:
                out.append(y[i])
                continue
            c, j = nz[0]
            out.append(ops.add(y[i], x[j]) if c > 0 else ops.sub(y[i], x[j]))
        return out

    def signals(self):
        found, m = [], np.eye(self.size, dtype=np.int64)
        for st in self.main:
            for lab, sm in st.signals():
                found.append((lab, sm @ m))
            m = st.matrix() @ m
        return found + [(self.label, self.matrix())]


def derive_S() -> np.ndarray:
    """``S = O - M . (I4 (x) B2)``, checked to be a signed selection matrix."""
    o = np.array(O_BLOCK, dtype=np.int64)
    prime = np.array(M_FACTOR, dtype=np.int64) @ KroneckerButterfly(4).matrix()
    s = o - prime
    per_row = np.count_nonzero(s, axis=1)
    if (per_row > 1).any() or not np.isin(s, (-1, 0, 1)).all():
        raise FactorizationInconsistent(f"derived S is not a signed selection:\n{s}")
    return s


@dataclass(frozen=True)
class FactorizedTransform:
    stages: tuple
    addition_count: int = field(default=0)

    @property
    def size(self) -> int:
        return self.stages[0].size

    def matrix(self) -> np.ndarray:
        m = np.eye(self.size, dtype=np.int64)
        for st in self.stages:
            m = st.matrix() @ m
        return m

    def apply(self, x: list, ops: _Ops, trace=None) -> list:
        y = list(x)
        for st in self.stages:
            y = st.apply(y, ops, trace)
            if trace is not None:
                trace.append((st.label, y))
        return y

    def signals(self) -> list[tuple[str, np.ndarray]]:
        """All intermediate signals as matrices on the transform input."""
        found, m = [], np.eye(self.size, dtype=np.int64)
        for st in self.stages:
            for lab, sm in st.signals():
                found.append((lab, sm @ m))
            m = st.matrix() @ m
        return found


def build_factorization() -> FactorizedTransform:
    s = derive_S()
    odd = Corrected(
        main=(KroneckerButterfly(4, "odd:I4xB2"), SparseMatrix(M_FACTOR, "odd:M")),
        correction=tuple(map(tuple, s.tolist())),
        label="odd:O",
    )
    sigma = tuple(c - 1 for c in PERMUTATION_COLUMNS)
    stages = (
        Butterfly(16),
        BlockDiag((Butterfly(8), Identity(8)), "diag(B8,I8)"),
        BlockDiag((Butterfly(4), Identity(12)), "diag(B4,I12)"),
        BlockDiag(
            (
                Butterfly(2),
                SparseMatrix(B2_FLIPPED, "B2bar"),
                SparseMatrix(E_BLOCK, "E"),
                odd,
            ),
            "diag(B2,B2bar,E,O)",
        ),
        Permutation(sigma),
    )
    ft = FactorizedTransform(stages)
    ops = _Ops(bits=None)
    ft.apply(list(range(N)), ops)
    return FactorizedTransform(stages, ops.additions)


_FACTORIZATION: FactorizedTransform | None = None


def default_factorization() -> FactorizedTransform:
    global _FACTORIZATION
    if _FACTORIZATION is None:
        _FACTORIZATION = build_factorization()
    return _FACTORIZATION


def _as_int_rows(x) -> list:
    a = np.asarray(x)
    if a.shape[0] != N:
        raise ValueError(f"expected {N} samples along axis 0, got {a.shape}")
    if not np.issubdtype(a.dtype, np.integer):
        raise TypeError("integer input required")
    if a.ndim == 1:
        return [int(v) for v in a]
    return [row.astype(np.int64) for row in a]


def fast_forward(x, *, acc_bits: int | None = 32, return_counts: bool = False,
                 factorization: FactorizedTransform | None = None):
    """``T @ x`` through the 72-addition stage pipeline.

    ``x`` may be a length-16 vector or a ``(16, batch)`` array; operation
    counts are per vector either way.
    """
    ft = factorization or default_factorization()
    ops = _Ops(acc_bits)
    rows = _as_int_rows(x)
    ops._check(np.asarray(x))
    y = np.array(ft.apply(rows, ops), dtype=np.int64)
    return (y, ops.counts()) if return_counts else y


def direct_forward(x, *, acc_bits: int | None = 32, return_counts: bool = False,
                   kernel=PROPOSED_KERNEL):
    """``T @ x`` as 16 independent signed row sums (208 additions)."""
    ops = _Ops(acc_bits)
    rows = _as_int_rows(x)
    y = [signed_sum([(c, rows[j]) for j, c in enumerate(r) if c], ops) for r in kernel]
    y = np.array(y, dtype=np.int64)
    return (y, ops.counts()) if return_counts else y


def trace_forward(x, factorization: FactorizedTransform | None = None):
    """Run the pipeline and return ``[(label, values), ...]`` for every
    intermediate signal, in the order of :meth:`FactorizedTransform.signals`."""
    ft = factorization or default_factorization()
    trace = []
    ft.apply(_as_int_rows(x), _Ops(None), trace)
    return [(lab, np.array(v, dtype=np.int64)) for lab, v in trace]


def signed_bits(lo: int, hi: int) -> int:
    """Smallest two's-complement width holding every value in [lo, hi]."""
    b = 1
    while lo < -(1 << (b - 1)) or hi > (1 << (b - 1)) - 1:
        b += 1
    return b


@dataclass(frozen=True)
class SignalBound:
    label: str
    min_value: int
    max_value: int
    bits: int
    witness: tuple  # input attaining the larger of |min|, |max|

    @property
    def max_magnitude(self) -> int:
        return max(-self.min_value, self.max_value)


@dataclass(frozen=True)
class BitGrowthReport:
    input_width: int
    signed_input: bool
    input_range: tuple[int, int]
    stages: tuple[SignalBound, ...]
    output_1d: SignalBound
    output_2d: SignalBound  # witness is a flattened 16x16 block


def _bound(label, coeffs: np.ndarray, lo: int, hi: int) -> SignalBound:
    """Exact extremes of ``coeffs @ x`` over the box ``lo <= x <= hi``."""
    pos = np.where(coeffs > 0, coeffs, 0)
    neg = np.where(coeffs < 0, coeffs, 0)
    row_max = pos.sum(axis=1) * hi + neg.sum(axis=1) * lo
    row_min = pos.sum(axis=1) * lo + neg.sum(axis=1) * hi
    mx, mn = int(row_max.max()), int(row_min.min())
    if mx >= -mn:
        r = int(row_max.argmax())
        w = np.where(coeffs[r] > 0, hi, lo)
    else:
        r = int(row_min.argmin())
        w = np.where(coeffs[r] > 0, lo, hi)
    # zero coefficients: pick the value that keeps the witness in range
    w = np.where(coeffs[r] == 0, 0 if lo <= 0 <= hi else lo, w)
    return SignalBound(label, mn, mx, signed_bits(mn, mx), tuple(int(v) for v in w))


def analyze_bit_growth(width: int, signed: bool = False,
                       factorization: FactorizedTransform | None = None
                       ) -> BitGrowthReport:
    """Worst-case magnitudes of every pipeline signal for ``width``-bit inputs.

    ``signed=False`` takes inputs in ``[0, 2**width - 1]`` (pixel data);
    ``signed=True`` uses ``[-2**(width-1), 2**(width-1) - 1]``.
    """
    if width not in (4, 8, 12, 16):
        warnings.warn(f"input width {width} outside the studied set {{4, 8, 12, 16}}")
    if width < 1:
        raise ValueError("width must be positive")
    if signed:
        lo, hi = -(1 << (width - 1)), (1 << (width - 1)) - 1
    else:
        lo, hi = 0, (1 << width) - 1
    ft = factorization or default_factorization()
    stages = tuple(_bound(lab, m, lo, hi) for lab, m in ft.signals())
    t = ft.matrix()
    out_1d = _bound("output", t, lo, hi)
    # 2-D output (k, l) has coefficient block outer(T_k, T_l) on the input block.
    coeffs_2d = np.einsum("ki,lj->klij", t, t).reshape(N * N, N * N)
    out_2d = _bound("output-2d", coeffs_2d, lo, hi)
    return BitGrowthReport(width, signed, (lo, hi), stages, out_1d, out_2d)
