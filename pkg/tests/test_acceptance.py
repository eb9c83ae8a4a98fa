"""Acceptance criteria, each checked at its stated tolerance.

Every test records one PASS/FAIL line; the lines are repeated in the pytest
terminal summary under "acceptance criteria".
"""

import json
import math
import subprocess
import sys
import time
from pathlib import Path

import numpy as np
import pytest

from hime.bench import (BenchConfig, PlantSpec, brute_force_pair_motif, compare_with_oracle, plant_motifs,
                        random_walk, run_planted_benchmark)
from hime.enumeration import HimeConfig, discover, post_process
from hime.graph import numerosity_reduce
from hime.sax import MAX_ALPHABET, fast_sax, mindist, multi_res_sax, naive_sax, paa, paa_lb_dist, to_sax
from hime.series import Region, euclidean, motif_distance, znormalize
from hime.tuning import TuningConfig, select_alphabet

ROOT = Path(__file__).resolve().parents[1]

# (reported, failing) motif counts from each full-pipeline run, summed by criterion 6
AUDITS: list[tuple[int, int]] = []


def audit(series, motifs) -> tuple[int, int]:
    """Recompute each reported best pair from the raw values."""
    bad = 0
    for m in motifs:
        d = motif_distance(series.window(m.first), series.window(m.second))
        bad += not (d <= 0.02 * m.length and not m.first.overlaps(m.second)
                    and m.first.length == m.second.length == m.length)
    AUDITS.append((len(motifs), bad))
    return len(motifs), bad


def test_criterion_01_fast_sax_equivalence(criterion):
    walk = random_walk(100_000, 101)
    rng = np.random.default_rng(1)
    t0 = time.perf_counter()
    mismatches = 0
    for _ in range(10_000):
        w = int(rng.integers(4, 17))
        a = int(rng.integers(3, 11))
        n = int(rng.integers(max(w, 16), 2001))
        s = int(rng.integers(1, len(walk) - n + 2))
        r = Region(s, s + n - 1)
        if fast_sax(walk, r, w, a) != naive_sax(walk.window(r), w, a, boundaries="rounded"):
            mismatches += 1
    secs = time.perf_counter() - t0
    ok = criterion(1, mismatches == 0 and secs < 10, f"{mismatches} mismatches in 10000 cases, {secs:.1f}s")
    assert ok


def test_criterion_02_lower_bound_chain(criterion):
    walk = random_walk(200_000, 102).values
    rng = np.random.default_rng(2)
    t0 = time.perf_counter()
    bad = 0
    for _ in range(10_000):
        n = int(rng.integers(64, 1001))
        w = int(rng.integers(2, 17))
        a = int(rng.integers(2, MAX_ALPHABET + 1))
        i, j = rng.integers(0, len(walk) - n, size=2)
        z1, z2 = znormalize(walk[i:i + n]), znormalize(walk[j:j + n])
        p1, p2 = paa(z1, w), paa(z2, w)
        md = mindist(to_sax(p1, a), to_sax(p2, a), n)
        lb = paa_lb_dist(p1, p2)
        ed = euclidean(z1, z2)
        bad += not (md <= lb + 1e-9 and lb <= ed + 1e-9)
    secs = time.perf_counter() - t0
    ok = criterion(2, bad == 0 and secs < 10, f"{bad} violations in 10000 pairs, {secs:.1f}s")
    assert ok


def test_criterion_03_multi_resolution(criterion):
    rng = np.random.default_rng(3)
    t0 = time.perf_counter()
    bad = 0
    for _ in range(1000):
        coeffs = rng.standard_normal(int(rng.integers(2, 33))) * rng.choice([0.1, 1.0, 3.0])
        words = multi_res_sax(coeffs, MAX_ALPHABET)
        bad += any(words[a] != to_sax(coeffs, a) for a in range(2, MAX_ALPHABET + 1))
    secs = time.perf_counter() - t0
    ok = criterion(3, bad == 0 and secs < 5, f"{bad} vectors differ at some resolution of 1000, {secs:.1f}s")
    assert ok


def _bench(lengths, instances, seed):
    t0 = time.perf_counter()
    rep = run_planted_benchmark(BenchConfig(lengths=lengths, instances=instances, seed=seed))
    secs = time.perf_counter() - t0
    audit(rep["_series"], rep["_motifs"])
    return {m["planted_length"]: m["best_overlap"] for m in rep["motifs"]}, secs


@pytest.mark.slow
def test_criterion_04_planted_recall(criterion):
    lengths = (1500, 3000, 6000)
    hits = {L: 0 for L in lengths}
    worst = 0.0
    for seed in range(10):
        scores, secs = _bench(lengths, 10, seed)
        worst = max(worst, secs)
        for L in lengths:
            hits[L] += scores[L] >= 0.8
        print(f"  seed {seed}: {', '.join(f'{L}:{scores[L]:.3f}' for L in lengths)} in {secs:.0f}s")
    ok = all(h >= 8 for h in hits.values()) and worst <= 120
    detail = ", ".join(f"L={L} {hits[L]}/10" for L in lengths) + f" trials at overlap>=0.8, slowest {worst:.0f}s"
    assert criterion(4, ok, detail)


@pytest.mark.slow
def test_criterion_05_recall_vs_instances(criterion):
    t0 = time.perf_counter()
    means = {}
    for k in (3, 6, 10):
        scores = [_bench((6000,), k, seed)[0][6000] for seed in range(10)]
        means[k] = float(np.mean(scores))
        print(f"  k={k}: " + " ".join(f"{s:.2f}" for s in scores))
    secs = time.perf_counter() - t0
    ok = (means[6] >= 0.8 and means[10] >= 0.8 and means[6] > means[3] and means[10] > means[3]
          and secs <= 1800)
    detail = ", ".join(f"k={k} mean {m:.3f}" for k, m in means.items()) + f", {secs / 60:.1f} min"
    assert criterion(5, ok, detail)


def _oracle_run(seed):
    walk_seed, plant_seed = np.random.SeedSequence(seed).generate_state(2)
    series, _ = plant_motifs(random_walk(20_000, int(walk_seed)), [PlantSpec(500, 5)], int(plant_seed))
    cfg = HimeConfig()
    motifs = post_process(discover(series, cfg), series, cfg)
    exact = brute_force_pair_motif(series, [500])[500]
    row = compare_with_oracle(motifs, exact, cfg.length_ratio)
    ok = row["hime_distance"] is not None and row["distance_ratio"] <= 2.0 and row["overlap"] >= 0.5
    return series, motifs, row, ok


@pytest.mark.slow
def test_criterion_07_oracle_precision(criterion):
    t0 = time.perf_counter()
    series, motifs, row, ok = _oracle_run(0)
    secs = time.perf_counter() - t0
    audit(series, motifs)
    # how often the same check holds on other seeds, reported but not part of the verdict
    others = sum(_oracle_run(seed)[3] for seed in range(1, 10))
    ratio = "none" if row["distance_ratio"] is None else f"{row['distance_ratio']:.2f}"
    detail = (f"seed 0: distance ratio {ratio}, overlap {row['overlap']:.2f}, {secs:.1f}s; "
              f"same check holds on {others}/9 further seeds")
    assert criterion(7, ok and secs <= 60, detail)


@pytest.mark.slow
def test_criterion_08_scalability(criterion):
    t0 = time.perf_counter()
    proc = subprocess.run([sys.executable, str(ROOT / "scripts" / "scalability.py"), "--n", "1000000"],
                          capture_output=True, text=True, check=True)
    wall = time.perf_counter() - t0
    rep = json.loads(proc.stdout.strip().splitlines()[-1])
    child_mb = rep["max_rss_mb"]
    ok = rep["total_s"] <= 900 and rep["max_length"] is not None and rep["max_length"] > 4 * 300 and child_mb < 4096
    detail = (f"discover+post {rep['total_s'] / 60:.1f} min (process {wall / 60:.1f} min), "
              f"lengths [{rep['min_length']}, {rep['max_length']}], peak RSS {child_mb:.0f} MB")
    assert criterion(8, ok, detail)


def test_criterion_09_tuning(criterion):
    walk = random_walk(1_000_000, 109)
    cap = TuningConfig().max_samples
    t0 = time.perf_counter()
    runs = [select_alphabet(walk, 300, 6, seed=5) for _ in range(3)]
    secs = time.perf_counter() - t0
    same = all(r == runs[0] for r in runs)
    ok = same and 2 <= runs[0].alphabet <= 20 and runs[0].samples <= cap and secs <= 30
    detail = f"a={runs[0].alphabet} after {runs[0].samples} samples, identical x3: {same}, {secs:.1f}s"
    assert criterion(9, ok, detail)


def _replay_paa(x: np.ndarray, l: int, w: int = 32) -> np.ndarray:
    """Z-normalized PAA of every window with rounded segment edges, computed directly."""
    win = np.lib.stride_tricks.sliding_window_view(x, l)
    mu = win.mean(axis=1)
    sd = win.std(axis=1, ddof=1)
    edges = [(2 * i * l + w) // (2 * w) for i in range(w + 1)]
    seg = np.add.reduceat(win, edges[:-1], axis=1) / np.diff(edges)
    return (seg - mu[:, None]) / sd[:, None]


def test_criterion_10_nr_soundness(criterion):
    l, r_l = 300, 0.02 * 300
    t0 = time.perf_counter()
    bad = skipped = 0
    for seed in range(10):
        walk = random_walk(100_000, 1000 + seed)
        kept = numerosity_reduce(walk, l, r_l) - 1
        P = _replay_paa(walk.values, l)
        governing = np.searchsorted(kept, np.arange(len(P)), side="right") - 1
        skip = np.setdiff1d(np.arange(len(P)), kept)
        d = math.sqrt(l / 32) * np.linalg.norm(P[skip] - P[kept[governing[skip]]], axis=1)
        skipped += len(skip)
        bad += int(np.sum(d >= 2 * r_l * (1 + 1e-12)))
    secs = time.perf_counter() - t0
    ok = criterion(10, bad == 0 and secs < 60,
                   f"{bad} of {skipped} skipped windows at or beyond 2R(l), {secs:.1f}s")
    assert ok


@pytest.mark.slow
def test_criterion_06_no_false_positives(criterion):
    if not AUDITS:
        rep = run_planted_benchmark(BenchConfig(lengths=(1500,), instances=10, seed=0))
        audit(rep["_series"], rep["_motifs"])
    total = sum(t for t, _ in AUDITS)
    bad = sum(b for _, b in AUDITS)
    ok = criterion(6, total > 0 and bad == 0,
                   f"{total - bad}/{total} reported motifs re-verified over {len(AUDITS)} runs")
    assert ok
