"""Compare discovery against the exact pair motif on small planted series.

    python scripts/oracle_precision.py --seeds 20
"""

import argparse
import json

import numpy as np

from hime.bench import PlantSpec, brute_force_pair_motif, compare_with_oracle, plant_motifs, random_walk
from hime.enumeration import HimeConfig, discover, post_process


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=20_000)
    ap.add_argument("--length", type=int, default=500)
    ap.add_argument("--instances", type=int, default=5)
    ap.add_argument("--seeds", type=int, default=20)
    ap.add_argument("--alpha", default="auto")
    args = ap.parse_args()
    alpha = args.alpha if args.alpha == "auto" else int(args.alpha)

    passed = 0
    for seed in range(args.seeds):
        walk_seed, plant_seed = np.random.SeedSequence(seed).generate_state(2)
        series, _ = plant_motifs(random_walk(args.n, int(walk_seed)),
                                 [PlantSpec(args.length, args.instances)], int(plant_seed))
        cfg = HimeConfig(alphabet=alpha)
        raw = discover(series, cfg)
        motifs = post_process(raw, series, cfg)
        row = compare_with_oracle(motifs, brute_force_pair_motif(series, [args.length])[args.length],
                                  cfg.length_ratio)
        ok = row["hime_distance"] is not None and row["distance_ratio"] <= 2 and row["overlap"] >= 0.5
        passed += ok
        print(json.dumps({"seed": seed, "alphabet": raw.alphabet, "n_motifs": len(motifs), "pass": ok, **row}),
              flush=True)
    print(json.dumps({"passed": passed, "seeds": args.seeds}))


if __name__ == "__main__":
    main()
