"""Command-line front end: discover, tune, bench, oracle."""

from __future__ import annotations

import argparse
import csv
import dataclasses
import hashlib
import io
import json
import logging
import sys
import time
from pathlib import Path

import numpy as np

from hime import __version__
from hime.bench import (BenchConfig, brute_force_pair_motif, compare_with_oracle, public_report,
                        run_planted_benchmark)
from hime.enumeration import (HimeConfig, Motif, discover, motif_density, post_process,
                              resolve_alphabet, retrieve_instances)
from hime.series import TimeSeries, read_series
from hime.tuning import select_alphabet

log = logging.getLogger("hime")


def _alpha(text: str) -> int | str:
    if text == "auto":
        return "auto"
    try:
        return int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer or 'auto', got {text!r}") from None


def _int_list(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _add_hime_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--min-length", type=int, default=300, help="minimum motif length l")
    p.add_argument("--paa", type=int, default=6, help="PAA size w")
    p.add_argument("--alpha", type=_alpha, default="auto", help="alphabet size or 'auto'")
    p.add_argument("--threshold-factor", type=float, default=0.02, help="c in R(L) = c*L")
    p.add_argument("--length-ratio", type=float, default=1.2, help="similar-length ratio")
    p.add_argument("--no-nr", action="store_true", help="disable numerosity reduction")


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output-dir", type=Path, default=Path("."))
    p.add_argument("--format", choices=("json", "csv", "both"), default="both")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hime", description=__doc__)
    parser.add_argument("--version", action="version", version=f"hime {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("discover", help="find variable-length motifs in a series")
    p.add_argument("--input", type=Path, required=True)
    _add_hime_flags(p)
    _add_common(p)
    p.add_argument("--retrieve", action="store_true", help="retrieve all instances of each motif")
    p.add_argument("--density", action="store_true", help="write the motif density curve")

    p = sub.add_parser("tune", help="select the alphabet size")
    p.add_argument("--input", type=Path, required=True)
    p.add_argument("--min-length", type=int, default=300)
    p.add_argument("--paa", type=int, default=6)
    _add_common(p)

    p = sub.add_parser("bench", help="planted-motif recall benchmark")
    p.add_argument("--n", type=int, default=500_000, help="random walk length")
    p.add_argument("--lengths", type=_int_list, default=[1500, 3000, 6000])
    p.add_argument("--instances", type=int, default=10)
    p.add_argument("--noise", type=float, default=0.05)
    _add_hime_flags(p)
    _add_common(p)

    p = sub.add_parser("oracle", help="compare discovery against the exact pair motif")
    p.add_argument("--input", type=Path, required=True)
    p.add_argument("--lengths", type=_int_list, default=None, help="lengths to check (default: l)")
    _add_hime_flags(p)
    _add_common(p)
    return parser


def _hime_config(args) -> HimeConfig:
    return HimeConfig(min_length=args.min_length, paa_size=args.paa, alphabet=args.alpha,
                      threshold_factor=args.threshold_factor, length_ratio=args.length_ratio,
                      numerosity_reduction=not args.no_nr, seed=args.seed)


def _digest(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def _config_dict(cfg) -> dict:
    out = dataclasses.asdict(cfg)
    out.pop("threshold_fn", None)
    if "hime" in out:
        out["hime"].pop("threshold_fn", None)
    return out


def _write(path: Path, text: str) -> Path:
    path.write_text(text)
    log.info("wrote %s", path)
    return path


def _write_json(path: Path, obj) -> Path:
    return _write(path, json.dumps(obj, indent=2, sort_keys=True) + "\n")


def _motifs_csv(motifs: list[Motif]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["word", "length", "start1", "start2", "distance", "threshold"])
    for m in motifs:
        w.writerow([m.word, m.length, m.first.start, m.second.start, repr(m.distance), repr(m.threshold)])
    return buf.getvalue()


def _write_motifs(out: Path, motifs: list[Motif], fmt: str, stem: str = "motifs") -> list[Path]:
    files = []
    if fmt in ("json", "both"):
        files.append(_write_json(out / f"{stem}.json", [m.to_dict() for m in motifs]))
    if fmt in ("csv", "both"):
        files.append(_write(out / f"{stem}.csv", _motifs_csv(motifs)))
    return files


def _manifest(out: Path, command: str, config: dict, seed: int, t0: float,
              input_path: Path | None = None, **extra) -> Path:
    man = {
        "command": command,
        "argv": sys.argv[1:],
        "config": config,
        "input": str(input_path) if input_path else None,
        "input_sha256": _digest(input_path) if input_path else None,
        "seed": seed,
        "version": __version__,
        "wall_time_s": round(time.perf_counter() - t0, 3),
    }
    man.update(extra)
    return _write_json(out / f"{command}_manifest.json", man)


def _load(path: Path) -> TimeSeries:
    if not path.is_file():
        raise OSError(f"cannot read input file {path}")
    return read_series(path)


def cmd_discover(args) -> int:
    t0 = time.perf_counter()
    cfg = _hime_config(args)
    series = _load(args.input)
    alphabet = resolve_alphabet(series, cfg)
    raw = discover(series, cfg, alphabet)
    motifs = post_process(raw, series, cfg)
    if args.retrieve:
        for m in motifs:
            m.instances = retrieve_instances(series, m.first, m.threshold)
    _write_motifs(args.output_dir, motifs, args.format)
    if args.density:
        dens = motif_density(len(series), motifs)
        lines = ["index,count"] + [f"{i},{c}" for i, c in enumerate(dens.tolist(), 1)]
        _write(args.output_dir / "density.csv", "\n".join(lines) + "\n")
    lengths = [m.length for m in motifs]
    _manifest(args.output_dir, "discover", _config_dict(cfg), args.seed, t0, args.input,
              alphabet=alphabet, n_points=len(series), n_motifs=len(motifs),
              enumeration_range=[min(lengths), max(lengths)] if lengths else None)
    print(f"{len(motifs)} motifs, alphabet {alphabet}, lengths "
          f"{f'{min(lengths)}..{max(lengths)}' if lengths else 'none'}")
    return 0


def cmd_tune(args) -> int:
    t0 = time.perf_counter()
    series = _load(args.input)
    res = select_alphabet(series, args.min_length, args.paa, args.seed)
    report = dataclasses.asdict(res)
    if args.format in ("json", "both"):
        _write_json(args.output_dir / "tune.json", report)
    if args.format in ("csv", "both"):
        _write(args.output_dir / "tune.csv",
               "alphabet,mean_alphabet,samples,mean_tightness\n"
               f"{res.alphabet},{res.mean_alphabet!r},{res.samples},{res.mean_tightness!r}\n")
    _manifest(args.output_dir, "tune", {"min_length": args.min_length, "paa_size": args.paa},
              args.seed, t0, args.input)
    print(f"a={res.alphabet} mean={res.mean_alphabet:.4f} samples={res.samples} "
          f"tightness={res.mean_tightness:.4f}")
    return 0


def cmd_bench(args) -> int:
    t0 = time.perf_counter()
    cfg = BenchConfig(n=args.n, lengths=tuple(args.lengths), instances=args.instances,
                      noise=args.noise, seed=args.seed, hime=_hime_config(args))
    report = run_planted_benchmark(cfg)
    _write_json(args.output_dir / "bench.json", public_report(report))
    _write(args.output_dir / "ground_truth.csv", report["_truth"].to_csv())
    _write_motifs(args.output_dir, report["_motifs"], args.format)
    _manifest(args.output_dir, "bench", _config_dict(cfg), args.seed, t0)
    for row in report["motifs"]:
        print(f"L={row['planted_length']} k={row['instances']} overlap={row['best_overlap']:.3f} "
              f"found={row['found_length']}")
    return 0


def cmd_oracle(args) -> int:
    t0 = time.perf_counter()
    cfg = _hime_config(args)
    series = _load(args.input)
    lengths = args.lengths or [cfg.min_length]
    exact = brute_force_pair_motif(series, lengths, cfg.min_length)
    motifs = post_process(discover(series, cfg), series, cfg)
    rows = [compare_with_oracle(motifs, exact[L], cfg.length_ratio) for L in lengths]
    if args.format in ("json", "both"):
        _write_json(args.output_dir / "oracle.json", rows)
    if args.format in ("csv", "both"):
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
        _write(args.output_dir / "oracle.csv", buf.getvalue())
    _manifest(args.output_dir, "oracle", _config_dict(cfg), args.seed, t0, args.input)
    for r in rows:
        print(f"L={r['oracle_length']} oracle D={r['oracle_distance']:.4f} "
              f"hime D={r['hime_distance']} overlap={r['overlap']:.3f}")
    return 0


COMMANDS = {"discover": cmd_discover, "tune": cmd_tune, "bench": cmd_bench, "oracle": cmd_oracle}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        args.output_dir.mkdir(parents=True, exist_ok=True)
        return COMMANDS[args.command](args)
    except (ValueError, OSError) as exc:
        print(f"hime: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
