"""Numerosity reduction over minimum-length windows and the induction graph.

Base nodes are identified by their one-based window start ``s``; node ``s``
covers ``[s, s + l - 1]``. ``next`` steps by one point, ``forward`` jumps to
the next window kept by numerosity reduction. Only the kept starts are stored;
every edge is derived from them.
"""

from __future__ import annotations

import math
from array import array
from dataclasses import dataclass, field

import numpy as np

from hime.series import FLAT_EPS, Region, TimeSeries

NR_PAA_SIZE = 32

_CHUNK = 1 << 15


def window_paa_matrix(series: TimeSeries, l: int, w: int = NR_PAA_SIZE) -> np.ndarray:
    """Z-normalized PAA (rounded segment edges) of every length-``l`` window.

    Row ``k`` belongs to the window starting at ``k + 1``. Values match
    :func:`hime.sax.fast_paa` for the same window.
    """
    from hime.sax import segment_bounds

    n_win = len(series) - l + 1
    if n_win < 1:
        raise ValueError(f"series of length {len(series)} has no window of length {l}")
    bounds = np.array(segment_bounds(l, w))
    counts = np.diff(bounds).astype(np.float64)
    msum, msq = series.prefix_sum, series.prefix_sq
    out = np.empty((n_win, w))
    for lo in range(0, n_win, _CHUNK):
        base = np.arange(lo, min(lo + _CHUNK, n_win))
        ex = msum[base + l] - msum[base]
        exx = msq[base + l] - msq[base]
        mu = (ex / l).astype(np.float64)
        var = ((exx - ex * ex / l) / (l - 1)).astype(np.float64)
        sigma = np.sqrt(np.maximum(var, 0.0))
        edges = msum[base[:, None] + bounds[None, :]]
        seg = np.diff(edges, axis=1).astype(np.float64) / counts
        flat = sigma < FLAT_EPS * (1.0 + np.abs(mu))
        safe = np.where(flat, 1.0, sigma)
        block = (seg - mu[:, None]) / safe[:, None]
        block[flat] = 0.0
        out[lo : lo + len(base)] = block
    return out


def numerosity_reduce(series: TimeSeries, l: int, r_l: float) -> np.ndarray:
    """Starts of the windows kept by lower-bound numerosity reduction.

    The first window is always kept. A later window is kept when its PAA
    lower-bound distance to the most recently kept window reaches ``2 * r_l``.
    """
    if l < NR_PAA_SIZE:
        raise ValueError(f"minimum length {l} is below the reduction PAA size {NR_PAA_SIZE}")
    if r_l < 0:
        raise ValueError("threshold must be non-negative")
    n_win = len(series) - l + 1
    if n_win < 1:
        raise ValueError(f"series of length {len(series)} has no window of length {l}")
    if r_l == 0:
        return np.arange(1, n_win + 1)
    P = window_paa_matrix(series, l)
    scale = math.sqrt(l / NR_PAA_SIZE)
    limit = 2.0 * r_l
    kept = [0]
    cur = 0
    while True:
        j = cur + 1
        step = 64
        nxt = -1
        while j < n_win:
            blk = P[j : j + step] - P[cur]
            dist = scale * np.sqrt(np.einsum("ij,ij->i", blk, blk))
            hits = np.flatnonzero(dist >= limit)
            if hits.size:
                nxt = j + int(hits[0])
                break
            j += step
            step = min(step * 2, 8192)
        if nxt < 0:
            break
        kept.append(nxt)
        cur = nxt
    return np.array(kept) + 1


@dataclass(frozen=True, slots=True)
class MotifNode:
    """Node spanning a merged region; its outgoing edges copy the end window's."""

    region: Region
    next: int | None
    forward: int | None
    prev: int | None
    backward: int | None


@dataclass
class InductionGraph:
    l: int
    n_windows: int
    retained: np.ndarray
    _motif_starts: array = field(default_factory=lambda: array("q"), repr=False)
    _motif_ends: array = field(default_factory=lambda: array("q"), repr=False)

    @classmethod
    def from_retained(cls, retained, l: int, series_length: int) -> InductionGraph:
        kept = np.asarray(retained, dtype=np.int64)
        n_windows = series_length - l + 1
        if kept.size == 0 or kept[0] != 1:
            raise ValueError("the first window must be retained")
        if np.any(np.diff(kept) <= 0) or kept[-1] > n_windows:
            raise ValueError("retained starts must be strictly increasing window starts")
        return cls(l, n_windows, kept)

    def _check(self, s: int) -> None:
        if not 1 <= s <= self.n_windows:
            raise IndexError(f"no window starts at {s}")

    def node_region(self, s: int) -> Region:
        self._check(s)
        return Region(s, s + self.l - 1)

    def is_retained(self, s: int) -> bool:
        i = np.searchsorted(self.retained, s)
        return bool(i < len(self.retained) and self.retained[i] == s)

    def next(self, s: int) -> int | None:
        self._check(s)
        return s + 1 if s < self.n_windows else None

    def prev(self, s: int) -> int | None:
        self._check(s)
        return s - 1 if s > 1 else None

    def forward(self, s: int) -> int | None:
        self._check(s)
        i = np.searchsorted(self.retained, s, side="right")
        return int(self.retained[i]) if i < len(self.retained) else None

    def backward(self, s: int) -> int | None:
        self._check(s)
        i = np.searchsorted(self.retained, s, side="left")
        return int(self.retained[i - 1]) if i > 0 else None

    def insert_motif_node(self, r: Region) -> MotifNode:
        """Add a node for a merged region ending on a base window.

        The region must start on a base window and reach at least the end of
        that window's forward node. Base-layer edges are left untouched.
        """
        start_node = r.start
        end_node = r.end - self.l + 1
        if not 1 <= start_node <= self.n_windows or not 1 <= end_node <= self.n_windows:
            raise ValueError(f"region [{r.start}, {r.end}] is outside the series")
        fwd = self.forward(start_node)
        if fwd is None or end_node < fwd:
            raise ValueError(f"region [{r.start}, {r.end}] does not reach the forward node of {start_node}")
        self._motif_starts.append(r.start)
        self._motif_ends.append(r.end)
        return self.motif_node(len(self._motif_starts) - 1)

    def _append_motif(self, start: int, end: int) -> None:
        self._motif_starts.append(start)
        self._motif_ends.append(end)

    def motif_node(self, k: int) -> MotifNode:
        start, end = self._motif_starts[k], self._motif_ends[k]
        end_node = end - self.l + 1
        return MotifNode(
            Region(start, end),
            next=self.next(end_node),
            forward=self.forward(end_node),
            prev=self.prev(start),
            backward=self.backward(start),
        )

    @property
    def n_motif_nodes(self) -> int:
        return len(self._motif_starts)

    def dump(self) -> str:
        lines = []
        for i, s in enumerate(self.retained):
            fwd = self.retained[i + 1] if i + 1 < len(self.retained) else "none"
            lines.append(f"start={s} forward={fwd}")
        return "\n".join(lines)


def build_graph(series: TimeSeries, l: int, r_l: float) -> InductionGraph:
    return InductionGraph.from_retained(numerosity_reduce(series, l, r_l), l, len(series))
