"""Command-line entry point: ``burstcoord <subcommand> ...``.

Exit codes: 0 ok, 2 bad input or parameters, 3 IO failure, 4 not enough data.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import io
from .bcsbm import BcsbmParams, simulate
from .errors import FitError, IngestError, InsufficientDataError
from .heavytail import classify_network
from .pipeline import STRUCTURAL_METHODS, detect_bursty, detect_structural, edge_graph, evaluate
from .simgraph import SPARSIFIERS, TRANSFORMS
from .sweep import DEGFIT_COLUMNS, SWEEP_COLUMNS, SweepSpec, degfit_row, plot_sweep, run_sweep, summarize, write_rows

logger = logging.getLogger("burstcoord")

EXIT_OK, EXIT_INPUT, EXIT_IO, EXIT_INSUFFICIENT = 0, 2, 3, 4


def _common(seed_default=42) -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--seed", type=int, default=seed_default, help="RNG seed")
    p.add_argument("--out", type=Path, help="output path")
    p.add_argument("--quiet", action="store_true", help="only log errors")
    return p


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="burstcoord", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", parents=[_common(None)], help="run the BC-SBM generator")
    p.add_argument("config", nargs="?", type=Path, help="JSON generator parameters (defaults if omitted)")
    p.add_argument("--lambda", dest="lam", type=float, help="override the intra-community target probability")
    p.add_argument("--age-all", action="store_true", help="age every node's recency counter, not only seen ones")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("detect", parents=[_common()], help="burstiness-based community detection")
    p.add_argument("events", type=Path, help="events as JSON lines or CSV entity,domain,t")
    p.add_argument("--method", choices=["bursty"], default="bursty")
    p.add_argument("--transform", choices=TRANSFORMS, default="one_minus_ks")
    p.add_argument("--scale", type=float, default=1.0, help="scale for exp_neg_ks")
    p.add_argument("--sparsify", choices=SPARSIFIERS, default="none")
    p.add_argument("--k", type=int, help="neighbours kept by top_k")
    p.add_argument("--theta", type=float, help="weight cut-off for threshold")
    p.add_argument("--resolution", type=float, default=1.0)
    p.add_argument("--min-events", type=int, default=5)
    p.add_argument("--cross-domain-only", action="store_true")
    p.add_argument("--keep-zeros", action="store_true", help="keep zero gaps from duplicate timestamps")
    p.add_argument("--graph", type=Path, help="also write the similarity graph as CSV")
    p.set_defaults(func=cmd_detect)

    p = sub.add_parser("baseline", parents=[_common()], help="structural detection on the aggregated edge graph")
    p.add_argument("snapshots", type=Path, help="snapshots CSV t,src,dst")
    p.add_argument("--method", choices=STRUCTURAL_METHODS, default="louvain_edges")
    p.add_argument("--resolution", type=float, default=1.0)
    p.add_argument("--max-iters", type=int, default=100)
    p.set_defaults(func=cmd_baseline)

    p = sub.add_parser("evaluate", parents=[_common()], help="NMI and ARI of a partition against truth")
    p.add_argument("pred", type=Path)
    p.add_argument("truth", type=Path)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("sweep", parents=[_common(None)], help="lambda sweep over simulated networks")
    p.add_argument("spec", nargs="?", type=Path, help="JSON sweep spec (defaults if omitted)")
    p.add_argument("--plot", type=Path, help="SVG line chart of mean NMI against lambda")
    p.add_argument("--no-timestamp", action="store_true", help="omit the date from the SVG")
    p.add_argument("--degfit-out", type=Path, help="CSV of per-network degree tail classification")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("degfit", parents=[_common()], help="classify a degree distribution's tail")
    p.add_argument("input", type=Path, help="snapshots CSV or one integer degree per line")
    p.add_argument("--total", action="store_true", help="use total instead of in-degree for snapshots")
    p.add_argument("--min-unique", type=int, default=50)
    p.set_defaults(func=cmd_degfit)
    return parser


def _emit_json(obj, out):
    if out is None:
        json.dump(obj, sys.stdout, indent=2, sort_keys=True, allow_nan=False)
        sys.stdout.write("\n")
    else:
        io.write_json(obj, out)


def _require_out(args):
    if args.out is None:
        raise IngestError(f"{args.command}: --out is required")
    return args.out


def cmd_simulate(args) -> int:
    out = _require_out(args)
    params = io.read_params(args.config) if args.config else BcsbmParams()
    changes = {}
    if args.seed is not None:
        changes["seed"] = args.seed
    if args.lam is not None:
        changes["lam"] = args.lam
    if args.age_all:
        changes["age_all"] = True
    params = params.replace(**changes).validate()
    run = simulate(params)
    io.write_run(run, out)
    logger.info("wrote %d edges for %d nodes to %s", params.n * params.T, params.n, out)
    return EXIT_OK


def cmd_detect(args) -> int:
    out = _require_out(args)
    events = io.read_events(args.events)
    found = detect_bursty(
        events,
        min_events=args.min_events,
        transform=args.transform,
        scale=args.scale,
        sparsify=args.sparsify,
        k=args.k,
        theta=args.theta,
        resolution=args.resolution,
        seed=args.seed,
        cross_domain_only=args.cross_domain_only,
        keep_zeros=args.keep_zeros,
    )
    io.write_partition(found.partition, out)
    sidecar = dict(found.params)
    sidecar["omitted"] = sorted(k.label() for k in found.omitted)
    sidecar["n_communities"] = found.partition.n_communities
    io.write_json(sidecar, out.with_suffix(".json"))
    if args.graph:
        io.write_graph_csv(found.graph, args.graph)
    logger.info("%d profiles in %d communities", len(found.partition), found.partition.n_communities)
    return EXIT_OK


def cmd_baseline(args) -> int:
    out = _require_out(args)
    rows = io.read_snapshots(args.snapshots)
    if not rows:
        raise IngestError(f"{args.snapshots}: no edges")
    g = edge_graph((src, dst) for _, src, dst in rows)
    found = detect_structural(g, args.method, resolution=args.resolution, seed=args.seed, max_iters=args.max_iters)
    io.write_partition(found.partition, out)
    sidecar = dict(found.params, n_communities=found.partition.n_communities, n_edges=len(rows))
    io.write_json(sidecar, out.with_suffix(".json"))
    return EXIT_OK


def cmd_evaluate(args) -> int:
    scores = evaluate(io.read_partition(args.pred), io.read_partition(args.truth))
    _emit_json(scores, args.out)
    return EXIT_OK


def cmd_sweep(args) -> int:
    out = _require_out(args)
    spec = SweepSpec.from_dict(io.read_json(args.spec)) if args.spec else SweepSpec().validate()
    if args.seed is not None:
        spec.base_seed = args.seed
    if args.degfit_out:
        spec.degfit = True
    result = run_sweep(spec, workers=args.workers)
    write_rows(result.rows, SWEEP_COLUMNS, out)
    nulls = {}
    for cell in result.cells:
        if cell.null_nmi is not None:
            nulls.setdefault(cell.lam, []).append(cell.null_nmi)
    summary = {
        "spec": spec.to_dict(),
        "mean_nmi": [
            {"detector": det, "lambda": lam, "mean": m, "sd": sd, "count": c}
            for (det, lam), (m, sd, c) in summarize(result.rows).items()
        ],
        "null_nmi": [{"lambda": lam, "mean": float(np.mean(v)), "max": float(np.max(v))}
                     for lam, v in sorted(nulls.items())],
        "failures": len(result.failures),
    }
    io.write_json(summary, out.with_suffix(".summary.json"))
    if args.degfit_out:
        write_rows(result.degfit_rows, DEGFIT_COLUMNS, args.degfit_out)
    if args.plot:
        plot_sweep(result.rows, args.plot, timestamp=not args.no_timestamp)
    if result.failures:
        manifest = out.with_suffix(".failures.json")
        io.write_json(result.failures, manifest)
        logger.error("%d cells failed; see %s", len(result.failures), manifest)
        return EXIT_INSUFFICIENT
    return EXIT_OK


def _looks_like_snapshots(path: Path) -> bool:
    with open(path, encoding="utf-8") as fh:
        first = fh.readline().strip()
    return first.replace(" ", "") == "t,src,dst"


def cmd_degfit(args) -> int:
    if _looks_like_snapshots(args.input):
        rows = io.read_snapshots(args.input)
        nodes = sorted({v for _, s, d in rows for v in (s, d)})
        index = {v: i for i, v in enumerate(nodes)}
        ends = [index[d] for _, _, d in rows]
        if args.total:
            ends += [index[s] for _, s, _ in rows]
        degrees = np.bincount(np.asarray(ends, dtype=np.int64), minlength=len(nodes))
    else:
        degrees = io.read_degrees(args.input)
    report = classify_network(degrees, min_unique=args.min_unique)
    payload = report.to_dict()
    payload["degree"] = "total" if args.total else "in"
    payload["summary"] = {k: v for k, v in degfit_row(None, args.seed, report).items() if k not in ("lambda", "seed")}
    _emit_json(_json_safe(payload), args.out)
    return EXIT_OK


def _json_safe(obj):
    """NaN and infinities become null so the report stays strict JSON."""
    if isinstance(obj, dict):
        return {k: _json_safe(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_safe(v) for v in obj]
    if isinstance(obj, float) and not np.isfinite(obj):
        return None
    return obj


def _fail(code: int, exc: Exception) -> int:
    print(f"burstcoord: error: {exc}", file=sys.stderr)
    return code


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(format="%(levelname)s %(message)s")
    logger.setLevel(logging.ERROR if args.quiet else logging.INFO)
    try:
        return args.func(args)
    except (InsufficientDataError, FitError) as exc:
        return _fail(EXIT_INSUFFICIENT, exc)
    except ValueError as exc:
        return _fail(EXIT_INPUT, exc)
    except OSError as exc:
        return _fail(EXIT_IO, exc)


if __name__ == "__main__":
    sys.exit(main())
