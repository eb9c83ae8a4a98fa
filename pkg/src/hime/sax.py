"""PAA / SAX codecs and their lower-bounding distances."""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from statistics import NormalDist
from typing import Sequence

import numpy as np

from hime.series import Region, TimeSeries, is_flat, znormalize

MIN_ALPHABET = 2
MAX_ALPHABET = 20


@dataclass(frozen=True, eq=False)
class PaaVector:
    coeffs: np.ndarray
    source_length: int

    @property
    def w(self) -> int:
        return len(self.coeffs)


@dataclass(frozen=True, slots=True)
class SaxWord:
    symbols: tuple[int, ...]
    alphabet_size: int

    def __post_init__(self):
        if not MIN_ALPHABET <= self.alphabet_size <= MAX_ALPHABET:
            raise ValueError(f"alphabet size {self.alphabet_size} outside [2, 20]")
        if any(not 0 <= s < self.alphabet_size for s in self.symbols):
            raise ValueError(f"symbol out of range for alphabet {self.alphabet_size}: {self.symbols}")

    def __str__(self) -> str:
        return "".join(chr(ord("a") + s) for s in self.symbols)

    @property
    def w(self) -> int:
        return len(self.symbols)

    @classmethod
    def parse(cls, text: str, alphabet_size: int) -> SaxWord:
        return cls(tuple(ord(ch) - ord("a") for ch in text), alphabet_size)


def _check_alphabet(a: int) -> None:
    if not MIN_ALPHABET <= a <= MAX_ALPHABET:
        raise ValueError(f"alphabet size {a} outside [{MIN_ALPHABET}, {MAX_ALPHABET}]")


@lru_cache(maxsize=None)
def breakpoints(a: int) -> tuple[float, ...]:
    """Cut points splitting N(0, 1) into ``a`` equiprobable cells."""
    _check_alphabet(a)
    nd = NormalDist()
    # reduce i/a first so equal quantiles at different a are bit-identical
    return tuple(0.0 if Fraction(i, a) == Fraction(1, 2) else nd.inv_cdf(float(Fraction(i, a)))
                 for i in range(1, a))


def segment_bounds(n: int, w: int) -> list[int]:
    """Offsets ``b_0 = 0 < b_1 < ... < b_w = n`` with ``b_i = round(i * n / w)``."""
    return [(2 * i * n + w) // (2 * w) for i in range(w + 1)]


def paa(values: Sequence[float] | np.ndarray, w: int, boundaries: str = "fractional") -> PaaVector:
    """Segment means of ``values`` (callers z-normalize first).

    ``boundaries="fractional"`` weights a point split between two segments by
    its overlap with each; ``"rounded"`` snaps segment edges to the nearest
    point, which is the scheme :func:`fast_paa` uses.
    """
    x = np.asarray(values, dtype=np.float64)
    n = len(x)
    if w < 1 or n < w:
        raise ValueError(f"cannot reduce {n} points to {w} segments")
    if boundaries == "fractional":
        coeffs = np.repeat(x, w).reshape(w, n).mean(axis=1)
    elif boundaries == "rounded":
        b = segment_bounds(n, w)
        coeffs = np.array([x[b[i] : b[i + 1]].mean() for i in range(w)])
    else:
        raise ValueError(f"unknown boundary scheme {boundaries!r}")
    return PaaVector(coeffs, n)


def fast_paa(series: TimeSeries, r: Region, w: int) -> PaaVector:
    """PAA of the z-normalized region in O(w) prefix-array lookups."""
    series.check_region(r)
    n = r.length
    if n < w:
        raise ValueError(f"region of length {n} shorter than {w} segments")
    return PaaVector(np.array(_fast_paa_coeffs(series.prefix_sum, series.prefix_sq, r.start, r.end, w)), n)


def _fast_paa_coeffs(msum, msq, p: int, q: int, w: int) -> list[float]:
    n = q - p + 1
    base = p - 1
    ex = msum[q] - msum[base]
    exx = msq[q] - msq[base]
    mu = float(ex / n)
    var = float((exx - ex * ex / n) / (n - 1))
    sigma = math.sqrt(var) if var > 0.0 else 0.0
    if is_flat(mu, sigma):
        return [0.0] * w
    out = []
    prev_b = 0
    prev = msum[base]
    for i in range(1, w + 1):
        b = (2 * i * n + w) // (2 * w)
        cur = msum[base + b]
        out.append((float(cur - prev) / (b - prev_b) - mu) / sigma)
        prev, prev_b = cur, b
    return out


def sax_symbols(msum, msq, p: int, q: int, w: int, bps: Sequence[float]) -> tuple[int, ...]:
    """Symbols of ``[p, q]`` straight from prefix arrays; the discovery hot path."""
    return tuple(bisect_right(bps, c) for c in _fast_paa_coeffs(msum, msq, p, q, w))


def to_sax(p: PaaVector | Sequence[float], a: int) -> SaxWord:
    """Quantize each coefficient; a value equal to a breakpoint takes the upper cell."""
    _check_alphabet(a)
    bp = breakpoints(a)
    coeffs = p.coeffs if isinstance(p, PaaVector) else p
    return SaxWord(tuple(bisect_right(bp, float(c)) for c in coeffs), a)


def fast_sax(series: TimeSeries, r: Region, w: int, a: int) -> SaxWord:
    """SAX word of a region without touching its points."""
    _check_alphabet(a)
    series.check_region(r)
    if r.length < w:
        raise ValueError(f"region of length {r.length} shorter than {w} segments")
    return SaxWord(sax_symbols(series.prefix_sum, series.prefix_sq, r.start, r.end, w, breakpoints(a)), a)


@lru_cache(maxsize=None)
def _multires_table(a_max: int) -> tuple[tuple[float, ...], tuple[tuple[int, ...], ...]]:
    edges = sorted({b for a in range(2, a_max + 1) for b in breakpoints(a)})
    lows = [-math.inf] + edges
    symbols = tuple(
        tuple(bisect_right(breakpoints(a), lo) for a in range(2, a_max + 1)) for lo in lows
    )
    return tuple(edges), symbols


def multi_res_sax(p: PaaVector | Sequence[float], a_max: int) -> dict[int, SaxWord]:
    """Words at every alphabet size ``2..a_max`` from one lookup per coefficient.

    All breakpoints up to ``a_max`` are merged into one sorted list; each
    interval between consecutive breakpoints stores its symbol at every
    resolution.
    """
    _check_alphabet(a_max)
    edges, table = _multires_table(a_max)
    coeffs = p.coeffs if isinstance(p, PaaVector) else p
    rows = [table[bisect_right(edges, float(c))] for c in coeffs]
    return {a: SaxWord(tuple(row[a - 2] for row in rows), a) for a in range(2, a_max + 1)}


def paa_lb_dist(p1: PaaVector, p2: PaaVector, n: int | None = None) -> float:
    if p1.w != p2.w:
        raise ValueError(f"PAA sizes differ: {p1.w} vs {p2.w}")
    if n is None:
        n = p1.source_length
    if p1.source_length != p2.source_length or n != p1.source_length:
        raise ValueError("PAA vectors summarize different lengths")
    d = np.asarray(p1.coeffs) - np.asarray(p2.coeffs)
    return math.sqrt(n / p1.w) * math.sqrt(float(np.dot(d, d)))


@lru_cache(maxsize=None)
def cell_distances(a: int) -> np.ndarray:
    """``a x a`` table of MINDIST cell distances; adjacent cells are 0 apart."""
    bp = breakpoints(a)
    table = np.zeros((a, a))
    for r in range(a):
        for c in range(a):
            if abs(r - c) > 1:
                table[r, c] = bp[max(r, c) - 1] - bp[min(r, c)]
    table.setflags(write=False)
    return table


def mindist(w1: SaxWord, w2: SaxWord, n: int) -> float:
    if w1.alphabet_size != w2.alphabet_size or w1.w != w2.w:
        raise ValueError("words differ in alphabet or length")
    if n < w1.w:
        raise ValueError(f"original length {n} shorter than word length {w1.w}")
    cells = cell_distances(w1.alphabet_size)
    total = sum(cells[r, c] ** 2 for r, c in zip(w1.symbols, w2.symbols))
    return math.sqrt(n / w1.w) * math.sqrt(float(total))


def naive_sax(values: Sequence[float] | np.ndarray, w: int, a: int, boundaries: str = "rounded") -> SaxWord:
    """Direct z-normalize, PAA, quantize pipeline over raw values."""
    return to_sax(paa(znormalize(values), w, boundaries), a)
