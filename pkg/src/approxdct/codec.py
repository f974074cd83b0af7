"""16x16 block transform coding with zig-zag coefficient retention.

Images are split into non-overlapping 16x16 blocks, each block is mapped to
``A K A^T``, all but the first ``r`` coefficients in zig-zag order are set to
zero, and the inverse ``A^T Y A`` reconstructs the block. Quality is scored
with MSE, PSNR and the universal quality index (UQI).
"""

from __future__ import annotations

import csv
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .imageio import ImagePlane
from .transforms import N, TransformSpec

BLOCK = N
NUM_COEFFS = BLOCK * BLOCK
PEAK = 255
UQI_WINDOW = 8
DEFAULT_R_VALUES = tuple(range(2, NUM_COEFFS + 1, 2))


class BadGeometry(ValueError):
    pass


@lru_cache(maxsize=None)
def zigzag_order(n: int = BLOCK) -> tuple[tuple[int, int], ...]:
    """JPEG zig-zag scan generalised to ``n x n`` blocks.

    Anti-diagonal ``d`` is walked with increasing column when ``d`` is even
    and increasing row when ``d`` is odd.
    """
    order = []
    for d in range(2 * n - 1):
        rows = range(max(0, d - n + 1), min(d, n - 1) + 1)
        if d % 2 == 0:
            rows = reversed(rows)
        order.extend((i, d - i) for i in rows)
    return tuple(order)


@lru_cache(maxsize=None)
def zigzag_rank(n: int = BLOCK) -> np.ndarray:
    """``rank[i, j]`` is the scan position of coefficient ``(i, j)``."""
    rank = np.empty((n, n), dtype=np.int64)
    for pos, (i, j) in enumerate(zigzag_order(n)):
        rank[i, j] = pos
    rank.setflags(write=False)
    return rank


@dataclass(frozen=True)
class RetentionPolicy:
    r: int

    def __post_init__(self):
        if not 1 <= self.r <= NUM_COEFFS:
            raise ValueError(f"r must lie in [1, {NUM_COEFFS}], got {self.r}")

    def mask(self) -> np.ndarray:
        return zigzag_rank() < self.r


def _policy(policy) -> RetentionPolicy:
    return policy if isinstance(policy, RetentionPolicy) else RetentionPolicy(int(policy))


def transform_block(spec: TransformSpec, block) -> np.ndarray:
    """``A K A^T`` for one block or a stack of shape ``(..., 16, 16)``.

    Integer kernels with integer blocks evaluate ``T K T^T`` exactly in int64
    before the scaling diagonal is applied on both sides.
    """
    k = np.asarray(block)
    d = spec.scaling
    if spec.is_integer and np.issubdtype(k.dtype, np.integer):
        t = spec.kernel.astype(np.int64)
        inner = t @ k.astype(np.int64) @ t.T
        return d[:, None] * inner.astype(np.float64) * d[None, :]
    a = spec.matrix
    return a @ k.astype(np.float64) @ a.T


def inverse_block(spec: TransformSpec, coeffs) -> np.ndarray:
    a = spec.matrix
    return a.T @ np.asarray(coeffs, dtype=np.float64) @ a


def compress_block(spec: TransformSpec, block, policy) -> np.ndarray:
    """Real-valued reconstruction after keeping ``policy.r`` coefficients."""
    mask = _policy(policy).mask()
    return inverse_block(spec, transform_block(spec, block) * mask)


def _samples(image) -> np.ndarray:
    return image.samples if isinstance(image, ImagePlane) else np.asarray(image)


def to_blocks(samples: np.ndarray) -> np.ndarray:
    h, w = samples.shape
    if h % BLOCK or w % BLOCK:
        raise BadGeometry(f"{w}x{h} image is not divisible into {BLOCK}x{BLOCK} blocks")
    return (samples.reshape(h // BLOCK, BLOCK, w // BLOCK, BLOCK)
            .swapaxes(1, 2))


def from_blocks(blocks: np.ndarray) -> np.ndarray:
    bh, bw = blocks.shape[:2]
    return blocks.swapaxes(1, 2).reshape(bh * BLOCK, bw * BLOCK)


def round_half_away(x: np.ndarray) -> np.ndarray:
    return np.sign(x) * np.floor(np.abs(x) + 0.5)


def quantize_pixels(x: np.ndarray, peak: int = PEAK) -> np.ndarray:
    return np.clip(round_half_away(x), 0, peak).astype(np.uint8)


def image_coefficients(spec: TransformSpec, image) -> np.ndarray:
    """Transform every block; shape ``(rows, cols, 16, 16)``."""
    return transform_block(spec, to_blocks(_samples(image)))


def reconstruct(spec: TransformSpec, coeffs: np.ndarray, policy) -> np.ndarray:
    """Real-valued image from block coefficients truncated to ``policy.r``."""
    return from_blocks(inverse_block(spec, coeffs * _policy(policy).mask()))


def compress_image(spec: TransformSpec, image: ImagePlane, policy) -> ImagePlane:
    coeffs = image_coefficients(spec, image)
    return ImagePlane(quantize_pixels(reconstruct(spec, coeffs, policy)))


def difference_image(original, compressed, scale: int = 2) -> ImagePlane:
    """``scale * |original - compressed|`` clamped to the 8-bit range."""
    a, b = _samples(original), _samples(compressed)
    _same_shape(a, b)
    d = scale * np.abs(a.astype(np.int64) - b.astype(np.int64))
    return ImagePlane(np.clip(d, 0, PEAK))


def _same_shape(a: np.ndarray, b: np.ndarray):
    if a.shape != b.shape:
        raise BadGeometry(f"image shapes differ: {a.shape} vs {b.shape}")


def mse(original, reconstructed) -> float:
    a = _samples(original).astype(np.float64)
    b = _samples(reconstructed).astype(np.float64)
    _same_shape(a, b)
    return float(np.mean((a - b) ** 2))


def psnr_from_mse(err: float, peak: int = PEAK) -> float:
    return math.inf if err == 0 else 10.0 * math.log10(peak * peak / err)


def psnr(original, reconstructed, peak: int = PEAK) -> float:
    return psnr_from_mse(mse(original, reconstructed), peak)


def _window_sums(a: np.ndarray, size: int) -> np.ndarray:
    c = np.zeros((a.shape[0] + 1, a.shape[1] + 1), dtype=np.int64)
    c[1:, 1:] = a.cumsum(0).cumsum(1)
    return c[size:, size:] - c[:-size, size:] - c[size:, :-size] + c[:-size, :-size]


def uqi(original, reconstructed, window: int = UQI_WINDOW) -> float:
    """Universal quality index averaged over all ``window x window`` positions.

    Window statistics are formed from exact integer sums; the sample-count
    normalisation cancels in the ratio. A window whose two denominator
    factors both vanish scores 1 (both windows are all zero). A window where
    only one factor vanishes is left out of the average.
    """
    x = _samples(original).astype(np.int64)
    y = _samples(reconstructed).astype(np.int64)
    _same_shape(x, y)
    if min(x.shape) < window:
        raise BadGeometry(f"image {x.shape} smaller than the {window}x{window} window")
    n = window * window
    sx, sy = _window_sums(x, window), _window_sums(y, window)
    sxx, syy = _window_sums(x * x, window), _window_sums(y * y, window)
    sxy = _window_sums(x * y, window)
    contrast = (n * sxx - sx * sx) + (n * syy - sy * sy)
    luminance = sx * sx + sy * sy
    cov = n * sxy - sx * sy
    both = (contrast == 0) & (luminance == 0)
    ok = (contrast != 0) & (luminance != 0)
    q = np.zeros(contrast.shape)
    num = 4.0 * cov[ok].astype(np.float64) * sx[ok] * sy[ok]
    q[ok] = num / (contrast[ok].astype(np.float64) * luminance[ok].astype(np.float64))
    q[both] = 1.0
    counted = ok | both
    if not counted.any():
        return 1.0 if np.array_equal(x, y) else math.nan
    return float(q[counted].mean())


@dataclass(frozen=True)
class QualityRecord:
    transform: str
    r: int
    image: str
    psnr_db: float
    mse: float
    uqi: float


@dataclass(frozen=True)
class AverageRecord:
    transform: str
    r: int
    avg_psnr_db: float
    avg_mse: float
    avg_uqi: float
    psnr_diff_vs_dct_db: float | None
    mse_diff_vs_dct: float | None
    uqi_diff_vs_dct: float | None


@dataclass(frozen=True)
class QualityReport:
    records: tuple[QualityRecord, ...]
    averages: tuple[AverageRecord, ...]

    def average(self, transform: str, r: int) -> AverageRecord:
        for a in self.averages:
            if a.transform == transform and a.r == r:
                return a
        raise KeyError((transform, r))


def _evaluate_image(args) -> list[QualityRecord]:
    specs, name, image, r_values, with_uqi = args
    out = []
    for spec in specs:
        coeffs = image_coefficients(spec, image)
        for r in r_values:
            rec = quantize_pixels(reconstruct(spec, coeffs, r))
            err = mse(image, rec)
            q = uqi(image, rec) if with_uqi else math.nan
            out.append(QualityRecord(spec.name, r, name, psnr_from_mse(err), err, q))
    return out


def _diff(a: float, b: float) -> float:
    # both lossless: PSNR inf - inf would be nan
    return 0.0 if a == b else a - b


def sweep(specs, corpus, r_values=DEFAULT_R_VALUES, jobs: int = 1,
          with_uqi: bool = True) -> QualityReport:
    """Evaluate every (transform, r, image) combination.

    ``corpus`` is a sequence of ``(name, ImagePlane)``. Images are independent
    work units; with ``jobs > 1`` they run in worker processes, and results
    are gathered and averaged in corpus order so the output does not depend
    on scheduling.
    """
    corpus = list(corpus)
    if not corpus:
        raise ValueError("empty corpus")
    specs = list(specs)
    r_values = [_policy(r).r for r in r_values]
    tasks = [(specs, name, img, r_values, with_uqi) for name, img in corpus]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            per_image = list(pool.map(_evaluate_image, tasks))
    else:
        per_image = [_evaluate_image(t) for t in tasks]

    records = tuple(rec for recs in per_image for rec in recs)
    table: dict[tuple[str, int], list[QualityRecord]] = {}
    for rec in records:
        table.setdefault((rec.transform, rec.r), []).append(rec)

    means = {}
    for key, recs in table.items():
        k = len(recs)
        means[key] = (
            sum(r.psnr_db for r in recs) / k,
            sum(r.mse for r in recs) / k,
            sum(r.uqi for r in recs) / k,
        )
    averages = []
    for spec in specs:
        for r in r_values:
            p, m, u = means[(spec.name, r)]
            ref = means.get(("dct", r))
            diffs = (None, None, None) if ref is None else (
                _diff(p, ref[0]), _diff(m, ref[1]), _diff(u, ref[2]))
            averages.append(AverageRecord(spec.name, r, p, m, u, *diffs))
    return QualityReport(records, tuple(averages))


def _fmt(v) -> str:
    return "" if v is None else repr(float(v)) if isinstance(v, float) else str(v)


RECORD_HEADER = ("transform", "r", "image", "psnr_db", "mse", "uqi")
AVERAGE_HEADER = ("transform", "r", "avg_psnr_db", "avg_mse", "avg_uqi",
                  "psnr_diff_vs_dct_db", "mse_diff_vs_dct", "uqi_diff_vs_dct")


def write_report_csv(report: QualityReport, records_path: str | os.PathLike,
                     averages_path: str | os.PathLike) -> None:
    with open(records_path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(RECORD_HEADER)
        for rec in report.records:
            w.writerow([_fmt(getattr(rec, f)) for f in RECORD_HEADER])
    with open(averages_path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(AVERAGE_HEADER)
        for a in report.averages:
            w.writerow([_fmt(getattr(a, f)) for f in AVERAGE_HEADER])
