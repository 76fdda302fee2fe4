"""Cluster UCR time-series files with PSO under slope-aware and elastic distances.

Exit codes: 0 success, 1 usage error, 2 data error.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .distances import KINDS, DistanceSpec, sequence_distance
from .experiment import RunConfig, emit_outputs, run_experiment, summarize
from .pso import PsoConfig
from .series import ParseError, load_ucr, to_slope_series

EXIT_OK, EXIT_USAGE, EXIT_DATA = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _budget(text: str):
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if value.is_integer() and value >= 1:
        return int(value)
    if 0 < value < 1:
        return value
    raise argparse.ArgumentTypeError("budget must be an integer >= 2 or a fraction in (0, 1)")


def _distances(text: str) -> tuple[str, ...]:
    names = tuple(t.strip().replace("-", "_") for t in text.split(",") if t.strip())
    bad = [n for n in names if n not in KINDS]
    if bad or not names:
        raise argparse.ArgumentTypeError(
            f"unknown distance(s) {bad}; choose from {', '.join(k.replace('_', '-') for k in KINDS)}"
        )
    return names


def _add_distance_params(p):
    p.add_argument("--segment-budget", type=_budget, default=None,
                   help="points kept per series: integer count or fraction of raw length (default 20%%, clamped to [5, 256])")
    p.add_argument("--edr-eps", type=float, default=0.2)
    p.add_argument("--lcss-eps", type=float, default=0.2)
    p.add_argument("--lcss-delta", type=int, default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="slopedtw", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    c = sub.add_parser("cluster", help="repeated PSO clustering of a UCR file")
    c.add_argument("--data", type=Path, required=True)
    c.add_argument("--k", type=int, default=None, help="clusters (default: distinct labels in file)")
    c.add_argument("--distance", type=_distances, default=KINDS,
                   help="comma-separated subset of dtw-bsd,dtw-ed,edr,lcss")
    c.add_argument("--reps", type=int, default=10)
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--iters", type=int, default=500)
    c.add_argument("--swarm", type=int, default=30)
    c.add_argument("--inertia-start", type=float, default=1.2)
    c.add_argument("--inertia-end", type=float, default=0.4)
    c.add_argument("--c1", type=float, default=1.5)
    c.add_argument("--c2", type=float, default=1.5)
    c.add_argument("--w1", type=float, default=0.5)
    c.add_argument("--w2", type=float, default=0.5)
    c.add_argument("--workers", type=int, default=1, help="concurrent runs")
    _add_distance_params(c)
    c.add_argument("--out", type=Path, required=True)

    d = sub.add_parser("distance", help="distance between two one-line series files")
    d.add_argument("--a", type=Path, required=True)
    d.add_argument("--b", type=Path, required=True)
    d.add_argument("--measure", type=lambda s: _distances(s)[0], required=True)
    d.add_argument("--normalize", action="store_true", help="divide DTW cost by N + M")
    _add_distance_params(d)

    s = sub.add_parser("synth", help="write a labelled synthetic dataset in UCR format")
    s.add_argument("--kind", choices=("shapes", "slopes"), default="shapes")
    s.add_argument("--per-class", type=int, default=20)
    s.add_argument("--length", type=int, default=100)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out", type=Path, required=True)
    return parser


def _cmd_cluster(args) -> int:
    try:
        if args.k is not None and args.k < 2:
            raise ValueError(f"--k must be >= 2, got {args.k}")
        pso = PsoConfig(
            k=args.k or 2,
            swarm_size=args.swarm,
            max_iters=args.iters,
            inertia_start=args.inertia_start,
            inertia_end=args.inertia_end,
            c1=args.c1,
            c2=args.c2,
            w1=args.w1,
            w2=args.w2,
            seed=args.seed,
        )
        cfg = RunConfig(
            data_path=args.data,
            k=args.k,
            distances=args.distance,
            reps=args.reps,
            seed_base=args.seed,
            segment_budget=args.segment_budget,
            pso=pso,
            out_dir=args.out,
            edr_epsilon=args.edr_eps,
            lcss_epsilon=args.lcss_eps,
            lcss_delta=args.lcss_delta,
            workers=args.workers,
        )
        # validate distance parameters before touching the data
        for kind in cfg.distances:
            cfg.spec(kind)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc

    results = run_experiment(cfg)
    ok = [r for r in results if r.ok]
    summaries = summarize(results) if ok else []
    emit_outputs(results, summaries, args.out, config=cfg)
    for row in summaries:
        print(
            f"{row.dataset:>16} {row.distance:>8}  purity {row.mean['purity']:.4f} [{row.std['purity']:.4f}]"
            f"  jaccard {row.mean['jaccard']:.4f}  rand {row.mean['rand']:.4f}  combined {row.mean['combined']:.6g}"
        )
    failed = len(results) - len(ok)
    if failed:
        print(f"{failed} run(s) failed; see the error column of results.csv", file=sys.stderr)
    return EXIT_OK


def _single_series(path: Path, budget):
    series = load_ucr(path)
    if len(series) != 1:
        raise ParseError(f"expected exactly one series, found {len(series)}", path)
    return to_slope_series(series[0], budget)


def _cmd_distance(args) -> int:
    try:
        spec = DistanceSpec(
            args.measure,
            edr_epsilon=args.edr_eps,
            lcss_epsilon=args.lcss_eps,
            lcss_delta=args.lcss_delta,
            normalize_dtw=args.normalize,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    a = _single_series(args.a, args.segment_budget)
    b = _single_series(args.b, args.segment_budget)
    print(repr(sequence_distance(a, b, spec)))
    return EXIT_OK


def _cmd_synth(args) -> int:
    from .synthetic import shape_families, slope_families, write_ucr

    gen = shape_families if args.kind == "shapes" else slope_families
    write_ucr(gen(n_per_class=args.per_class, length=args.length, seed=args.seed), args.out)
    print(args.out)
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.WARNING - 10 * min(args.verbose, 2),
        format="%(levelname)s %(name)s: %(message)s",
    )
    handler = {"cluster": _cmd_cluster, "distance": _cmd_distance, "synth": _cmd_synth}[args.command]
    try:
        return handler(args)
    except UsageError as exc:
        print(f"slopedtw {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ParseError, FileNotFoundError, ValueError) as exc:
        print(f"slopedtw {args.command}: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except OSError as exc:
        print(f"slopedtw {args.command}: I/O error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
