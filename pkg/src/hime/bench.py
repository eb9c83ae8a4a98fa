"""Synthetic benchmarks: random walks with planted motifs, scoring, exact oracle."""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from hime.enumeration import HimeConfig, Motif, discover, post_process, similar_lengths
from hime.series import Region, TimeSeries, build_series, motif_distance, znormalize

ORACLE_MAX_N = 50_000


def random_walk(n: int, seed: int) -> TimeSeries:
    """Cumulative sum of i.i.d. standard normal steps."""
    if n < 1:
        raise ValueError("random walk needs n >= 1")
    rng = np.random.default_rng(seed)
    return build_series(np.cumsum(rng.standard_normal(n)))


@dataclass
class PlantSpec:
    length: int
    instances: int = 10
    noise: float = 0.05
    amplitude: tuple[float, float] = (0.0, 5.0)
    frequency: tuple[float, float] = (-2.0, 2.0)
    phase: tuple[float, float] = (-math.pi, math.pi)
    mean: tuple[float, float] = (-5.0, 5.0)
    std: tuple[float, float] = (0.5, 2.0)

    def __post_init__(self):
        if self.instances < 2:
            raise ValueError("a motif needs at least two instances")
        if self.length < 2:
            raise ValueError("motif length must be at least 2")
        if self.noise < 0:
            raise ValueError("noise fraction must be non-negative")


@dataclass
class GroundTruth:
    motifs: list[list[Region]]

    def to_csv(self) -> str:
        rows = ["motif_id,start,end"]
        for k, regions in enumerate(self.motifs):
            rows.extend(f"{k},{r.start},{r.end}" for r in regions)
        return "\n".join(rows) + "\n"


def sinusoid_shape(spec: PlantSpec, rng: np.random.Generator) -> np.ndarray:
    """Sum of five random sinusoids sampled at x = 1..length."""
    x = np.arange(1, spec.length + 1, dtype=np.float64)
    amp = rng.uniform(*spec.amplitude, size=5)
    freq = rng.uniform(*spec.frequency, size=5)
    phase = rng.uniform(*spec.phase, size=5)
    return (amp[:, None] * np.sin(freq[:, None] * x[None, :] + phase[:, None])).sum(axis=0)


def _make_instances(spec: PlantSpec, rng: np.random.Generator, limit: float) -> list[np.ndarray]:
    shape = sinusoid_shape(spec, rng)
    span = float(shape.max() - shape.min())
    out = []
    for _ in range(spec.instances):
        noisy = shape + rng.uniform(-1.0, 1.0, size=spec.length) * spec.noise * span
        out.append(znormalize(noisy) * rng.uniform(*spec.std) + rng.uniform(*spec.mean))
    if span == 0.0 or _max_pair_distance(out) > limit:
        return []
    return out


def _max_pair_distance(instances: list[np.ndarray]) -> float:
    z = np.array([znormalize(v) for v in instances])
    sq = (z * z).sum(axis=1)
    d2 = sq[:, None] + sq[None, :] - 2.0 * z @ z.T
    return float(np.sqrt(max(d2.max(), 0.0)))


def plant_motifs(base: TimeSeries, specs: list[PlantSpec], seed: int,
                 threshold_factor: float = 0.02, max_retries: int = 50) -> tuple[TimeSeries, GroundTruth]:
    """Splice noisy copies of random sinusoid-sum shapes into ``base``.

    Copies are placed at random disjoint positions. Inside a copy the series
    follows the copy's increments; outside it follows the base increments, so
    both splice points stay continuous and the copy starts at the local base
    level. Shapes whose noisy copies would not qualify as motifs under
    ``threshold_factor`` are redrawn.
    """
    n = len(base)
    total = sum(s.length * s.instances for s in specs)
    if total >= n / 2:
        raise ValueError(f"planted length {total} must stay below half the series length {n}")
    rng = np.random.default_rng(seed)
    shapes = []
    for spec in specs:
        for _ in range(max_retries):
            inst = _make_instances(spec, rng, threshold_factor * spec.length)
            if inst:
                break
        else:
            raise ValueError(f"could not draw a qualifying motif of length {spec.length}")
        shapes.append(inst)

    order = sorted(((spec.length, k, j) for k, spec in enumerate(specs) for j in range(spec.instances)),
                   reverse=True)
    taken = np.zeros(n, dtype=bool)
    regions: list[list[Region | None]] = [[None] * s.instances for s in specs]
    for length, k, j in order:
        for _ in range(10_000):
            s = int(rng.integers(1, n - length))  # zero-based start, keep first point untouched
            if not taken[s : s + length].any():
                taken[s : s + length] = True
                regions[k][j] = Region(s + 1, s + length)
                break
        else:
            raise ValueError(f"could not place instance {j} of motif {k} without overlap")

    steps = np.diff(base.values)
    for k, inst in enumerate(shapes):
        for j, values in enumerate(inst):
            r = regions[k][j]
            steps[r.start - 1 : r.end - 1] = np.diff(values)
    out = np.concatenate([[base.values[0]], base.values[0] + np.cumsum(steps)])
    return build_series(out), GroundTruth([list(rs) for rs in regions])


def overlap_rate(found: Region, truth: Region) -> float:
    """Interval Jaccard index of two regions."""
    inter = min(found.end, truth.end) - max(found.start, truth.start) + 1
    if inter <= 0:
        return 0.0
    union = max(found.end, truth.end) - min(found.start, truth.start) + 1
    return inter / union


def pair_overlap(pair: tuple[Region, Region], truth: list[Region]) -> float:
    """Best mean overlap of a found pair with two distinct ground-truth instances."""
    o = np.array([[overlap_rate(r, t) for t in truth] for r in pair])
    best = 0.0
    for a in range(len(truth)):
        for b in range(len(truth)):
            if a != b:
                best = max(best, (o[0, a] + o[1, b]) / 2.0)
    return float(best)


@dataclass
class PairMotif:
    length: int
    first: Region
    second: Region
    distance: float


def brute_force_pair_motif(series: TimeSeries, lengths, l: int | None = None) -> dict[int, PairMotif]:
    """Exact closest disjoint pair of z-normalized windows for each length.

    Every pair of windows is scored; dot products are carried along the
    diagonals of the pair matrix so each length costs O(N^2). The winning
    distance is recomputed directly.
    """
    x = series.values
    if len(x) > ORACLE_MAX_N:
        raise ValueError(f"oracle is limited to {ORACLE_MAX_N} points, got {len(x)}")
    x = x - x.mean()
    out = {}
    for L in lengths:
        if l is not None and L < l:
            raise ValueError(f"length {L} below minimum length {l}")
        out[L] = _closest_pair(x, int(L), series)
    return out


def _closest_pair(x: np.ndarray, L: int, series: TimeSeries) -> PairMotif:
    n_win = len(x) - L + 1
    if n_win <= L:
        raise ValueError(f"series too short for two disjoint windows of length {L}")
    win = np.lib.stride_tricks.sliding_window_view(x, L)
    mu = win.mean(axis=1)
    sig = win.std(axis=1, ddof=1)
    flat = sig < 1e-10 * (1.0 + np.abs(mu))
    safe = np.where(flat, 1.0, sig)
    qt = win @ x[:L]  # dot products of window 0 with every window
    best = (math.inf, -1, -1)
    for i in range(n_win - L):
        if i > 0:
            qt[1:] = qt[:-1] - x[i - 1] * x[: n_win - 1] + x[i + L - 1] * x[L : L + n_win - 1]
            qt[0] = np.dot(win[0], win[i])
        js = slice(i + L, n_win)
        rho = (qt[js] - L * mu[i] * mu[js]) / ((L - 1) * safe[i] * safe[js])
        d2 = 2.0 * (L - 1) * (1.0 - rho)
        if flat[i]:
            d2 = np.where(flat[js], 0.0, L - 1.0)
        else:
            d2 = np.where(flat[js], L - 1.0, d2)
        j = int(np.argmin(d2))
        if d2[j] < best[0]:
            best = (float(d2[j]), i, i + L + j)
    _, i, j = best
    d = motif_distance(series.values[i : i + L], series.values[j : j + L])
    return PairMotif(L, Region(i + 1, i + L), Region(j + 1, j + L), d)


def compare_with_oracle(motifs: list[Motif], oracle: PairMotif, ratio: float) -> dict:
    """Match the oracle pair against reported motifs of similar length.

    Similar means the same length test the hash table applies (ratio at most
    ``ratio``); among those motifs the one whose pair overlaps the oracle pair
    best is compared.
    """
    same = [m for m in motifs if similar_lengths(m.length, oracle.length, ratio)]
    truth = [oracle.first, oracle.second]
    row = {"oracle_length": oracle.length, "oracle_start1": oracle.first.start,
           "oracle_start2": oracle.second.start, "oracle_distance": oracle.distance,
           "hime_length": None, "hime_start1": None, "hime_start2": None,
           "hime_distance": None, "distance_ratio": None, "overlap": 0.0}
    if not same:
        return row
    best = max(same, key=lambda m: (pair_overlap(m.pair, truth), -m.distance))
    row.update(hime_length=best.length, hime_start1=best.first.start, hime_start2=best.second.start,
               hime_distance=best.distance, overlap=pair_overlap(best.pair, truth),
               distance_ratio=best.distance / oracle.distance if oracle.distance > 0 else math.inf)
    return row


@dataclass
class BenchConfig:
    n: int = 500_000
    lengths: tuple[int, ...] = (1500, 3000, 6000)
    instances: int = 10
    noise: float = 0.05
    seed: int = 0
    hime: HimeConfig = field(default_factory=HimeConfig)


def run_planted_benchmark(cfg: BenchConfig) -> dict:
    """Plant motifs in a random walk, run discovery and score recall per motif."""
    walk_seed, plant_seed = np.random.SeedSequence(cfg.seed).generate_state(2)
    base = random_walk(cfg.n, int(walk_seed))
    specs = [PlantSpec(L, cfg.instances, cfg.noise) for L in cfg.lengths]
    series, truth = plant_motifs(base, specs, int(plant_seed), cfg.hime.threshold_factor)
    t0 = time.perf_counter()
    raw = discover(series, cfg.hime)
    motifs = post_process(raw, series, cfg.hime)
    runtime = time.perf_counter() - t0
    report = score_motifs(motifs, truth, specs)
    lengths = [m.length for m in motifs]
    report.update(
        runtime_ms=round(runtime * 1000.0, 1),
        enumeration_min=min(lengths) if lengths else None,
        enumeration_max=max(lengths) if lengths else None,
        alphabet=raw.alphabet,
        n_motifs=len(motifs),
        seed=cfg.seed,
    )
    report["_motifs"] = motifs
    report["_series"] = series
    report["_truth"] = truth
    return report


def score_motifs(motifs: list[Motif], truth: GroundTruth, specs: list[PlantSpec]) -> dict:
    rows = []
    for spec, regions in zip(specs, truth.motifs):
        best, found = 0.0, None
        for m in motifs:
            score = pair_overlap(m.pair, regions)
            if score > best:
                best, found = score, m.length
        rows.append({"planted_length": spec.length, "instances": spec.instances,
                     "best_overlap": best, "found_length": found})
    return {"motifs": rows}


def public_report(report: dict) -> dict:
    return {k: v for k, v in report.items() if not k.startswith("_")}


__all__ = [
    "BenchConfig",
    "GroundTruth",
    "PairMotif",
    "PlantSpec",
    "brute_force_pair_motif",
    "compare_with_oracle",
    "overlap_rate",
    "pair_overlap",
    "plant_motifs",
    "public_report",
    "random_walk",
    "run_planted_benchmark",
    "score_motifs",
]
