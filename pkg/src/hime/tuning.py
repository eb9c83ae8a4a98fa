"""Alphabet-size selection from sampled lower-bound tightness."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from hime.sax import MAX_ALPHABET, MIN_ALPHABET, mindist, multi_res_sax, paa, to_sax
from hime.series import TimeSeries, euclidean, znormalize

DEGENERATE_DIST = 1e-12


@dataclass
class TuningConfig:
    target: float = 0.5
    a_max: int = MAX_ALPHABET
    delta: float = 0.01
    warmup: int = 100
    max_samples: int = 100_000


@dataclass
class TuningResult:
    alphabet: int
    mean_alphabet: float
    samples: int
    mean_tightness: float


def tightness(s1, s2, w: int, a: int) -> float:
    """MINDIST of the two SAX words over the true z-normalized distance.

    Pairs at (numerically) zero distance carry no information and count as
    perfectly tight.
    """
    z1, z2 = znormalize(s1), znormalize(s2)
    if len(z1) != len(z2) or len(z1) < w:
        raise ValueError("tightness needs two equal-length sequences of at least w points")
    d = euclidean(z1, z2)
    if d < DEGENERATE_DIST:
        return 1.0
    return mindist(to_sax(paa(z1, w), a), to_sax(paa(z2, w), a), len(z1)) / d


def _tightness_by_alphabet(z1: np.ndarray, z2: np.ndarray, w: int, a_max: int):
    d = euclidean(z1, z2)
    if d < DEGENERATE_DIST:
        return lambda a: 1.0
    n = len(z1)
    words1 = multi_res_sax(paa(z1, w), a_max)
    words2 = multi_res_sax(paa(z2, w), a_max)
    return lambda a: mindist(words1[a], words2[a], n) / d


def binary_search_resolution(s1, s2, w: int, a_max: int = MAX_ALPHABET, target: float = 0.5) -> int:
    """Smallest alphabet whose tightness reaches ``target``, assuming it grows with ``a``.

    Returns ``a_max`` when even the finest alphabet stays below the target.
    """
    z1, z2 = znormalize(s1), znormalize(s2)
    if len(z1) != len(z2) or len(z1) < w:
        raise ValueError("need two equal-length sequences of at least w points")
    t = _tightness_by_alphabet(z1, z2, w, a_max)
    lo, hi = MIN_ALPHABET, a_max
    while lo < hi:
        mid = (lo + hi) // 2
        if t(mid) >= target:
            hi = mid
        else:
            lo = mid + 1
    return lo


def _sample_pair(rng: np.random.Generator, n_windows: int) -> tuple[int, int]:
    while True:
        i, j = rng.integers(0, n_windows, size=2)
        if i != j:
            return int(i), int(j)


def select_alphabet(
    series: TimeSeries, l: int, w: int, seed: int = 0, config: TuningConfig | None = None
) -> TuningResult:
    """Average the per-pair resolution over random window pairs until it settles.

    The running mean is tested for convergence only after ``warmup`` samples;
    sampling always stops at ``max_samples``.
    """
    cfg = config or TuningConfig()
    x = series.values
    n_windows = len(x) - l + 1
    if len(x) < 2 * l:
        raise ValueError(f"series of length {len(x)} is shorter than twice the window length {l}")
    rng = np.random.default_rng(seed)
    mean = 0.0
    pairs = []
    for k in range(1, cfg.max_samples + 1):
        i, j = _sample_pair(rng, n_windows)
        pairs.append((i, j))
        a_k = binary_search_resolution(x[i : i + l], x[j : j + l], w, cfg.a_max, cfg.target)
        old = mean
        mean += (a_k - mean) / k
        if k >= cfg.warmup and abs(mean - old) < cfg.delta:
            break
    alphabet = min(max(int(math.floor(mean + 0.5)), MIN_ALPHABET), cfg.a_max)
    mean_t = float(np.mean([tightness(x[i : i + l], x[j : j + l], w, alphabet) for i, j in pairs]))
    return TuningResult(alphabet, mean, len(pairs), mean_t)

