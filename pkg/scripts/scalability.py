"""Time discovery plus post-processing on a long random walk and print a JSON summary.

    python scripts/scalability.py --n 1000000 --seed 7
"""

import argparse
import json
import resource
import time

from hime.bench import random_walk
from hime.enumeration import HimeConfig, discover, post_process


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=1_000_000)
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("--min-length", type=int, default=300)
    args = ap.parse_args()

    series = random_walk(args.n, args.seed)
    cfg = HimeConfig(min_length=args.min_length)
    t0 = time.perf_counter()
    raw = discover(series, cfg)
    t1 = time.perf_counter()
    motifs = post_process(raw, series, cfg)
    t2 = time.perf_counter()
    lengths = [m.length for m in motifs]
    print(json.dumps({
        "n": args.n,
        "seed": args.seed,
        "alphabet": raw.alphabet,
        "kept_windows": int(len(raw.graph.retained)),
        "probes": raw.probes,
        "matches": raw.matches,
        "discover_s": round(t1 - t0, 2),
        "post_process_s": round(t2 - t1, 2),
        "total_s": round(t2 - t0, 2),
        "n_motifs": len(motifs),
        "min_length": min(lengths) if lengths else None,
        "max_length": max(lengths) if lengths else None,
        "max_rss_mb": round(resource.getrusage(resource.RUSAGE_SELF).ru_maxrss / 1024, 1),
    }))


if __name__ == "__main__":
    main()
