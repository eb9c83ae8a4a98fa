"""Hierarchical variable-length motif enumeration.

Each kept base window is merged with its forward neighbour and hashed by its
SAX word and a geometric length bucket. A hit against an earlier, disjoint
region of similar length makes the two regions instances of a candidate
motif; both are then grown one forward step at a time and probed again
until a probe misses. Short candidates whose instances were grown into a
longer candidate are dropped on the way, and a post-processing pass keeps
only candidates whose best disjoint pair is within the motif threshold.
"""

from __future__ import annotations

import logging
import math
import time
from bisect import bisect_left, bisect_right, insort
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.signal import fftconvolve

from hime.graph import InductionGraph, build_graph
from hime.sax import MAX_ALPHABET, MIN_ALPHABET, SaxWord, breakpoints, sax_symbols
from hime.series import Region, TimeSeries, is_flat, motif_distance

log = logging.getLogger(__name__)

Key = tuple[tuple[int, ...], int]


@dataclass
class HimeConfig:
    min_length: int = 300
    paa_size: int = 6
    alphabet: int | str = "auto"
    threshold_factor: float = 0.02
    length_ratio: float = 1.2
    numerosity_reduction: bool = True
    seed: int = 0
    # overrides the linear threshold when set
    threshold_fn: Callable[[int], float] | None = None
    # candidates with more instances only have their matched pairs checked
    max_pair_instances: int = 24
    # consecutive failed extensions (misses or overlapping hits) a growing chain survives
    chain_skips: int = 3

    def __post_init__(self):
        if self.min_length < 64:
            raise ValueError(f"min_length must be >= 64, got {self.min_length}")
        if not 2 <= self.paa_size <= 32:
            raise ValueError(f"paa_size must lie in [2, 32], got {self.paa_size}")
        if self.alphabet != "auto":
            if isinstance(self.alphabet, bool) or not isinstance(self.alphabet, int):
                raise ValueError(f"alphabet must be an int or 'auto', got {self.alphabet!r}")
            if not MIN_ALPHABET <= self.alphabet <= MAX_ALPHABET:
                raise ValueError(f"alphabet must lie in [2, 20], got {self.alphabet}")
        if self.threshold_factor <= 0:
            raise ValueError("threshold_factor must be positive")
        if self.length_ratio <= 1:
            raise ValueError("length_ratio must exceed 1")
        if self.chain_skips < 0:
            raise ValueError("chain_skips must be non-negative")

    def threshold(self, length: int) -> float:
        if self.threshold_fn is not None:
            return float(self.threshold_fn(length))
        return self.threshold_factor * length


def length_bucket(length: int, ratio: float) -> int:
    return math.floor(math.log(length) / math.log(ratio))


def similar_lengths(l1: int, l2: int, ratio: float) -> bool:
    return max(l1, l2) <= ratio * min(l1, l2)


@dataclass
class TableEntry:
    start: int
    end: int
    # index into the kept-window list of the window the region ends on
    end_node: int
    parent: Key | None = None

    @property
    def region(self) -> Region:
        return Region(self.start, self.end)


class VLSaxTable:
    """One recorded region per (word, length bucket).

    Lengths are similar when their ratio is at most ``ratio``; a probe
    therefore looks at the own bucket and both neighbours.
    """

    def __init__(self, ratio: float = 1.2):
        self.ratio = ratio
        self._log_ratio = math.log(ratio)
        self.entries: dict[Key, TableEntry] = {}

    def __len__(self) -> int:
        return len(self.entries)

    def __contains__(self, key: Key) -> bool:
        return key in self.entries

    def bucket(self, length: int) -> int:
        return math.floor(math.log(length) / self._log_ratio)

    def probe(self, word: tuple[int, ...], length: int) -> tuple[Key, TableEntry] | None:
        b = math.floor(math.log(length) / self._log_ratio)
        entries = self.entries
        hit = entries.get((word, b))
        if hit is not None:
            return (word, b), hit
        for nb in (b - 1, b + 1):
            hit = entries.get((word, nb))
            if hit is not None:
                n2 = hit.end - hit.start + 1
                if max(n2, length) <= self.ratio * min(n2, length):
                    return (word, nb), hit
        return None

    def put(self, word: tuple[int, ...], length: int, entry: TableEntry) -> Key:
        key = (word, self.bucket(length))
        self.entries[key] = entry
        return key

    def get(self, key: Key) -> TableEntry | None:
        return self.entries.get(key)

    def remove(self, key: Key) -> None:
        self.entries.pop(key, None)


def table_probe(t: VLSaxTable, word: SaxWord | tuple[int, ...], length: int) -> Region | None:
    symbols = word.symbols if isinstance(word, SaxWord) else word
    found = t.probe(symbols, length)
    return None if found is None else found[1].region


@dataclass
class MotifCandidate:
    word: tuple[int, ...]
    bucket: int
    # start -> end, keeping the longest region seen per start
    instances: dict[int, int] = field(default_factory=dict)
    pairs: list[tuple[int, int]] = field(default_factory=list)
    _starts: list[int] = field(default_factory=list, repr=False)
    _max_len: int = field(default=0, repr=False)

    def add(self, start: int, end: int) -> None:
        old = self.instances.get(start)
        if old is None:
            insort(self._starts, start)
        elif old >= end:
            return
        self.instances[start] = end
        self._max_len = max(self._max_len, end - start + 1)

    def regions(self) -> list[Region]:
        return [Region(s, e) for s, e in sorted(self.instances.items())]

    def covered_by(self, other: MotifCandidate) -> bool:
        """Every instance lies inside some instance of ``other``."""
        inst, starts = other.instances, other._starts
        for s, e in self.instances.items():
            if inst.get(s, 0) >= e:
                continue
            # only instances starting within max_len of e can reach it
            lo = bisect_left(starts, e - other._max_len + 1)
            hi = bisect_right(starts, s)
            if not any(inst[os] >= e for os in starts[lo:hi]):
                return False
        return True


@dataclass
class DiscoveryResult:
    candidates: dict[Key, MotifCandidate]
    graph: InductionGraph
    alphabet: int
    probes: int = 0
    matches: int = 0
    removed: int = 0
    seconds: float = 0.0


def remove_covered(table: VLSaxTable, motifs: dict[Key, MotifCandidate], child: Key | None,
                   parent: Key) -> bool:
    """Drop ``child`` from the table and motif set when ``parent`` covers it."""
    if child is None or child == parent:
        return False
    c = motifs.get(child)
    p = motifs.get(parent)
    if c is None or p is None or not c.covered_by(p):
        return False
    del motifs[child]
    table.remove(child)
    return True


def merge(node: Region, fwd: Region | None) -> Region:
    """Span from the start of ``node`` to the end of ``fwd``.

    ``fwd=None`` marks the end of the forward chain and raises ``StopIteration``.
    """
    if fwd is None:
        raise StopIteration("no forward node")
    return Region(node.start, max(node.end, fwd.end))


def resolve_alphabet(series: TimeSeries, cfg: HimeConfig) -> int:
    if cfg.alphabet != "auto":
        return int(cfg.alphabet)
    from hime.tuning import select_alphabet

    return select_alphabet(series, cfg.min_length, cfg.paa_size, cfg.seed).alphabet


def discover(series: TimeSeries, cfg: HimeConfig, alphabet: int | None = None,
             graph: InductionGraph | None = None) -> DiscoveryResult:
    """Run the enumeration and return the raw candidate set."""
    t0 = time.perf_counter()
    l, w = cfg.min_length, cfg.paa_size
    if len(series) < 2 * l:
        raise ValueError(f"series of length {len(series)} is shorter than twice the minimum length {l}")
    a = alphabet if alphabet is not None else resolve_alphabet(series, cfg)
    if graph is None:
        r_l = cfg.threshold(l) if cfg.numerosity_reduction else 0.0
        graph = build_graph(series, l, r_l)
    starts = graph.retained.tolist()
    n_nodes = len(starts)
    bps = breakpoints(a)
    msum = list(series.prefix_sum)
    msq = list(series.prefix_sq)

    table = VLSaxTable(cfg.length_ratio)
    probe = table.probe
    entries = table.entries
    log_ratio = math.log(cfg.length_ratio)
    motifs: dict[Key, MotifCandidate] = {}
    # (start, end node) regions already grown, so each region is extended once
    expanded: set[tuple[int, int]] = set()
    probes = matches = removed = 0
    max_skips = cfg.chain_skips

    for i in range(n_nodes - 1):
        stack = [(starts[i], i + 1, None, 0)]
        while stack:
            s, e, parent, skips = stack.pop()
            q = starts[e] + l - 1
            n = q - s + 1
            word = sax_symbols(msum, msq, s, q, w, bps)
            probes += 1
            found = probe(word, n)
            # a miss, or an overlapping (trivial) hit, records the region and ends a seed; a
            # chain already growing tolerates a few in a row, since the kept windows of two
            # copies rarely line up exactly
            if found is None or (found[1].start <= q and s <= found[1].end):
                entries[(word, math.floor(math.log(n) / log_ratio))] = TableEntry(s, q, e, parent)
                if parent is not None and skips < max_skips and e + 1 < n_nodes and (s, e) not in expanded:
                    expanded.add((s, e))
                    stack.append((s, e + 1, parent, skips + 1))
                continue
            key, hit = found
            matches += 1
            graph._append_motif(s, q)
            cand = motifs.get(key)
            if cand is None:
                cand = motifs[key] = MotifCandidate(key[0], key[1])
            cand.add(s, q)
            cand.add(hit.start, hit.end)
            cand.pairs.append((s, hit.start))
            for child in (parent, hit.parent):
                if remove_covered(table, motifs, child, key):
                    removed += 1
            # hit first so the arriving region's extension is probed first
            for rs, re_ in ((hit.start, hit.end_node), (s, e)):
                if re_ + 1 < n_nodes and (rs, re_) not in expanded:
                    expanded.add((rs, re_))
                    stack.append((rs, re_ + 1, key, 0))

    res = DiscoveryResult(motifs, graph, a, probes, matches, removed, time.perf_counter() - t0)
    log.info("discover: %d nodes, %d probes, %d matches, %d candidates, %.1fs",
             n_nodes, probes, matches, len(motifs), res.seconds)
    return res


@dataclass
class Motif:
    word: str
    length: int
    first: Region
    second: Region
    distance: float
    threshold: float
    instances: list[Region] = field(default_factory=list)

    @property
    def pair(self) -> tuple[Region, Region]:
        return self.first, self.second

    def to_dict(self) -> dict:
        return {
            "word": self.word,
            "length": self.length,
            "start1": self.first.start,
            "start2": self.second.start,
            "distance": self.distance,
            "threshold": self.threshold,
            "instances": [r.start for r in self.instances],
        }


def _window_stats(series: TimeSeries, s: int, n: int) -> tuple[float, float]:
    ex = series.prefix_sum[s - 1 + n] - series.prefix_sum[s - 1]
    exx = series.prefix_sq[s - 1 + n] - series.prefix_sq[s - 1]
    var = float((exx - ex * ex / n) / (n - 1))
    return float(ex / n), math.sqrt(var) if var > 0.0 else 0.0


def _screen_distance(series: TimeSeries, s1: int, s2: int, n: int) -> float:
    """Z-normalized distance from one dot product and prefix statistics."""
    x = series.values
    mu1, sd1 = _window_stats(series, s1, n)
    mu2, sd2 = _window_stats(series, s2, n)
    f1, f2 = is_flat(mu1, sd1), is_flat(mu2, sd2)
    if f1 or f2:
        return 0.0 if f1 and f2 else math.sqrt(n - 1)
    dot = float(np.dot(x[s1 - 1 : s1 - 1 + n], x[s2 - 1 : s2 - 1 + n]))
    rho = (dot - n * mu1 * mu2) / ((n - 1) * sd1 * sd2)
    return math.sqrt(max(2.0 * (n - 1) * (1.0 - rho), 0.0))


def _candidate_pairs(cand: MotifCandidate, cap: int):
    regions = sorted(cand.instances.items())
    if len(regions) <= cap:
        return [(regions[i], regions[j]) for i in range(len(regions)) for j in range(i + 1, len(regions))]
    seen = sorted(set(cand.pairs))
    if len(seen) > cap * cap:
        seen = seen[:: math.ceil(len(seen) / (cap * cap))]
    return [((s1, cand.instances[s1]), (s2, cand.instances[s2])) for s1, s2 in seen]


def _best_pair(series: TimeSeries, cand: MotifCandidate, cfg: HimeConfig):
    x = series.values
    scored = []
    for (s1, e1), (s2, e2) in _candidate_pairs(cand, cfg.max_pair_instances):
        if s1 > s2:
            (s1, e1), (s2, e2) = (s2, e2), (s1, e1)
        if e1 >= s2:
            continue
        n = min(e1 - s1 + 1, e2 - s2 + 1)
        r = cfg.threshold(n)
        d = _screen_distance(series, s1, s2, n)
        # loose margin; the winner is re-checked exactly below
        if d <= r * (1.0 + 1e-9) + 1e-9:
            scored.append((d / r, -n, s1, s2))
    scored.sort()
    for _, neg_n, s1, s2 in scored:
        n = -neg_n
        d = motif_distance(x[s1 - 1 : s1 - 1 + n], x[s2 - 1 : s2 - 1 + n])
        r = cfg.threshold(n)
        if d <= r:
            return n, s1, s2, d, r
    return None


def _drop_covered(motifs: list[Motif]) -> list[Motif]:
    if not motifs:
        return motifs
    s1 = np.array([m.first.start for m in motifs])
    e1 = np.array([m.first.end for m in motifs])
    s2 = np.array([m.second.start for m in motifs])
    e2 = np.array([m.second.end for m in motifs])
    length = np.array([m.length for m in motifs])
    keep = []
    for m in motifs:
        longer = length > m.length
        ok = []
        for r in (m.first, m.second):
            ok.append(((s1 <= r.start) & (r.end <= e1)) | ((s2 <= r.start) & (r.end <= e2)))
        if not np.any(longer & ok[0] & ok[1]):
            keep.append(m)
    return keep


def post_process(raw: DiscoveryResult | dict[Key, MotifCandidate], series: TimeSeries,
                 cfg: HimeConfig, alphabet: int | None = None) -> list[Motif]:
    """Keep candidates with a disjoint pair inside the threshold, then drop covered ones."""
    if isinstance(raw, DiscoveryResult):
        candidates, alphabet = raw.candidates, raw.alphabet
    else:
        candidates = raw
    out = []
    for cand in candidates.values():
        best = _best_pair(series, cand, cfg)
        if best is None:
            continue
        n, s1, s2, d, r = best
        word = "".join(chr(ord("a") + c) for c in cand.word)
        first, second = Region(s1, s1 + n - 1), Region(s2, s2 + n - 1)
        out.append(Motif(word, n, first, second, d, r, [first, second]))
    out = _drop_covered(out)
    out.sort(key=lambda m: (m.first.start, m.second.start, m.length))
    return out


def find_motifs(series: TimeSeries, cfg: HimeConfig, alphabet: int | None = None) -> list[Motif]:
    return post_process(discover(series, cfg, alphabet), series, cfg)


def motif_density(n: int, motifs: list[Motif]) -> np.ndarray:
    """Number of reported instances covering each of ``n`` points."""
    diff = np.zeros(n + 1, dtype=np.int64)
    for m in motifs:
        for r in m.instances or [m.first, m.second]:
            diff[r.start - 1] += 1
            diff[r.end] -= 1
    return np.cumsum(diff[:-1])


def distance_profile(series: TimeSeries, query: np.ndarray) -> np.ndarray:
    """Z-normalized distance from ``query`` to every window of its length (MASS)."""
    m = len(query)
    x = series.values
    n_win = len(x) - m + 1
    zq = query - query.mean()
    sq = zq.std(ddof=1)
    q_flat = is_flat(float(query.mean()), float(sq))
    msum, msq = series.prefix_sum, series.prefix_sq
    ex = msum[m:] - msum[:n_win]
    exx = msq[m:] - msq[:n_win]
    mu = (ex / m).astype(np.float64)
    sig = np.sqrt(np.maximum(((exx - ex * ex / m) / (m - 1)).astype(np.float64), 0.0))
    flat = sig < 1e-10 * (1.0 + np.abs(mu))
    if q_flat:
        return np.where(flat, 0.0, math.sqrt(m - 1))
    zq = zq / sq
    dots = fftconvolve(x, zq[::-1], mode="valid")
    d2 = 2.0 * (m - 1) - 2.0 * dots / np.where(flat, 1.0, sig)
    d2 = np.where(flat, m - 1, d2)
    return np.sqrt(np.maximum(d2, 0.0))


def retrieve_instances(series: TimeSeries, seed: Region, radius: float) -> list[Region]:
    """Disjoint windows within ``radius`` of ``seed``, picked closest first."""
    if radius < 0:
        raise ValueError("radius must be non-negative")
    series.check_region(seed)
    m = seed.length
    x = series.values
    query = x[seed.start - 1 : seed.end]
    prof = distance_profile(series, query)
    # FFT dot products are only approximate; confirm shortlisted windows directly
    slack = 1e-6 * math.sqrt(m) * (1.0 + radius)
    cand = np.flatnonzero(prof <= radius + slack)
    exact = {seed.start - 1: 0.0}
    for j in cand.tolist():
        if j not in exact:
            d = motif_distance(query, x[j : j + m])
            if d <= radius:
                exact[j] = d
    order = sorted(exact.items(), key=lambda kv: (kv[1], kv[0]))
    chosen: list[int] = []
    taken = np.zeros(len(prof), dtype=bool)
    for j, _ in order:
        if taken[j]:
            continue
        chosen.append(j)
        taken[max(0, j - m + 1) : j + m] = True
    return [Region(j + 1, j + m) for j in sorted(chosen)]
