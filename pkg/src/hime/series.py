"""Time series container, prefix statistics and z-normalized distances.

Regions use one-based inclusive coordinates. The prefix arrays carry a
leading zero so that the sum over ``[p, q]`` is ``prefix[q] - prefix[p - 1]``.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

# widest float the platform offers; 80-bit extended on x86-64
PREFIX_DTYPE = np.longdouble

FLAT_EPS = 1e-10


@dataclass(frozen=True, slots=True, order=True)
class Region:
    """Subsequence ``[start, end]`` of a series, one-based and inclusive."""

    start: int
    end: int

    def __post_init__(self):
        if self.start < 1 or self.end < self.start + 1:
            raise ValueError(f"invalid region [{self.start}, {self.end}]: need 1 <= start < end")

    @property
    def length(self) -> int:
        return self.end - self.start + 1

    def overlaps(self, other: Region) -> bool:
        return self.start <= other.end and other.start <= self.end

    def contains(self, other: Region) -> bool:
        return self.start <= other.start and other.end <= self.end

    def truncated(self, length: int) -> Region:
        return Region(self.start, self.start + length - 1)


@dataclass(frozen=True, eq=False)
class TimeSeries:
    values: np.ndarray
    prefix_sum: np.ndarray = field(repr=False)
    prefix_sq: np.ndarray = field(repr=False)

    def __len__(self) -> int:
        return len(self.values)

    def window(self, r: Region) -> np.ndarray:
        return self.values[r.start - 1 : r.end]

    def check_region(self, r: Region) -> None:
        if r.end > len(self.values):
            raise ValueError(f"region [{r.start}, {r.end}] exceeds series length {len(self.values)}")


def build_series(values: Sequence[float] | np.ndarray) -> TimeSeries:
    """Wrap raw values and precompute running sums of values and squares.

    Raises ``ValueError`` on empty input or the first non-finite value.
    """
    arr = np.array(values, dtype=np.float64).ravel()
    if arr.size == 0:
        raise ValueError("empty series")
    bad = np.flatnonzero(~np.isfinite(arr))
    if bad.size:
        i = int(bad[0])
        raise ValueError(f"non-finite value {float(arr[i])} at position {i + 1} (one-based)")
    arr.setflags(write=False)
    ext = arr.astype(PREFIX_DTYPE)
    prefix_sum = np.zeros(arr.size + 1, dtype=PREFIX_DTYPE)
    prefix_sq = np.zeros(arr.size + 1, dtype=PREFIX_DTYPE)
    np.cumsum(ext, out=prefix_sum[1:])
    np.cumsum(ext * ext, out=prefix_sq[1:])
    prefix_sum.setflags(write=False)
    prefix_sq.setflags(write=False)
    return TimeSeries(arr, prefix_sum, prefix_sq)


def is_flat(mu: float, sigma: float) -> bool:
    return sigma < FLAT_EPS * (1.0 + abs(mu))


def region_stats(series: TimeSeries, r: Region) -> tuple[float, float]:
    """Mean and sample standard deviation of ``r`` from the prefix arrays."""
    series.check_region(r)
    n = r.length
    ex = series.prefix_sum[r.end] - series.prefix_sum[r.start - 1]
    exx = series.prefix_sq[r.end] - series.prefix_sq[r.start - 1]
    mu = ex / n
    var = (exx - ex * ex / n) / (n - 1)
    return float(mu), math.sqrt(max(float(var), 0.0))


def znormalize(values: Sequence[float] | np.ndarray) -> np.ndarray:
    """Shift to mean 0 and scale to sample stdev 1; flat input maps to zeros."""
    x = np.asarray(values, dtype=np.float64)
    if x.size < 2:
        raise ValueError("z-normalization needs at least two points")
    mu = x.mean()
    sigma = x.std(ddof=1)
    if is_flat(mu, sigma):
        return np.zeros_like(x)
    return (x - mu) / sigma


def euclidean(a: Sequence[float] | np.ndarray, b: Sequence[float] | np.ndarray) -> float:
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError(f"length mismatch: {a.shape} vs {b.shape}")
    d = a - b
    return math.sqrt(float(np.dot(d, d)))


def motif_distance(a: Sequence[float] | np.ndarray, b: Sequence[float] | np.ndarray) -> float:
    """Euclidean distance between the z-normalized versions of ``a`` and ``b``."""
    return euclidean(znormalize(a), znormalize(b))


def _parse_line(line: str) -> str | None:
    line = line.strip()
    if not line or line.startswith("#"):
        return None
    return line.split(",", 1)[0].strip()


def read_series(path: str | os.PathLike) -> TimeSeries:
    """Load one value per line (first column of a CSV).

    Blank lines and ``#`` comments are skipped. The file is read twice so the
    value buffer is allocated once at its final size.
    """
    count = 0
    with open(path) as fh:
        for line in fh:
            if _parse_line(line) is not None:
                count += 1
    buf = np.empty(count, dtype=np.float64)
    i = 0
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            tok = _parse_line(line)
            if tok is None:
                continue
            try:
                buf[i] = float(tok)
            except ValueError:
                raise ValueError(f"{path}:{lineno}: not a number: {tok!r}") from None
            i += 1
    return build_series(buf)
