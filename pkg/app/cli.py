"""Command-line front end.

Usage:
    python -m app.cli gen --model regular:3 --n 100 --seed 1 --out g.txt
    python -m app.cli balance g.txt --mode exact --out loads.json --csv loads.csv
    python -m app.cli density g.txt [--brute] [--decompose]
    python -m app.cli predict --model poisson:2 --t-grid 0:3:0.05 --rho --csv phi.csv
    python -m app.cli compare --model poisson:2 --n-grid 500,2000,5000 --replicates 10 --out cmp.json
    python -m app.cli bound --model regular:3 --n 200 --t 2 --theta 1
    python -m app.cli bound --model regular:3 --n 20 --k-grid 3,4 --r-grid 3,4,5 --mc-samples 1000 --csv x.csv

Exit codes: 0 success, 1 internal error, 2 usage or configuration error,
3 non-convergence.
"""
import argparse
import json
import logging
import sys
from contextlib import contextmanager
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
import pandas as pd

from app.core.allocator import epsilon_balance, exact_loads, is_balanced
from app.core.bounds import dense_count_table, z_delta_t_bound
from app.core.degseq_models import DegreeSequence
from app.core.densest import density_decomposition, rho_bruteforce, rho_maxflow
from app.core.experiments import ExperimentConfig, GraphModel, run_compare
from app.core.graph import load_edge_list, write_edge_list
from app.core.rde import DEFAULT_T_GRID, parse_t_grid, predicted_load_cdf, rho_of_mu
from app.services.bounds_service import dense_count_records, resolve_degrees
from app.services.experiment_service import CSV_FLOAT_FORMAT, compare_payload
from app.utils.config import settings
from app.utils.exceptions import (
    BoundError,
    ConvergenceError,
    GraphFormatError,
    InputTooLargeError,
    NotATreeError,
    SpecError,
)
from app.utils.version import describe_version

logger = logging.getLogger(__name__)

EXIT_OK, EXIT_INTERNAL, EXIT_USAGE, EXIT_NOT_CONVERGED = 0, 1, 2, 3
USAGE_ERRORS = (SpecError, GraphFormatError, BoundError, InputTooLargeError, NotATreeError, ValueError, OSError)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


@contextmanager
def _open_out(path: Optional[str]):
    if path is None or path == "-":
        yield sys.stdout
    else:
        with open(path, "w") as fh:
            yield fh


def _emit_json(payload: Dict[str, Any], path: Optional[str]) -> None:
    with _open_out(path) as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")


def _write_csv(frame: pd.DataFrame, path: Optional[str]) -> None:
    if path:
        frame.to_csv(path, index=False, float_format=CSV_FLOAT_FORMAT)


def _config(args: argparse.Namespace) -> Dict[str, Any]:
    return {k: v for k, v in vars(args).items() if k != "handler"}


def _envelope(args: argparse.Namespace, **body) -> Dict[str, Any]:
    return {"command": args.command, "config": _config(args), "version": describe_version(), **body}


def _read_graph(path: str):
    with open(path) as fh:
        return load_edge_list(fh)


def _int_list(spec: str) -> List[int]:
    return [int(x) for x in spec.split(",") if x]


def cmd_gen(args: argparse.Namespace) -> int:
    g = GraphModel.parse(args.model).sample(args.n, args.seed, m=args.m, keep_multi=args.keep_multi)
    with _open_out(args.out) as fh:
        write_edge_list(g, fh)
    logger.info(f"Wrote {g!r} from {args.model}")
    return EXIT_OK


def cmd_balance(args: argparse.Namespace) -> int:
    g = _read_graph(args.graph)
    if args.mode == "exact":
        _, allocation = exact_loads(g, tol=args.tol or settings.EXACT_TOL)
    else:
        if args.eps is None:
            raise UsageError("--mode eps needs --eps")
        allocation = epsilon_balance(g, args.eps, delta=args.delta, tol=args.tol or settings.EPS_TOL, method=args.method)
    body = allocation.to_dict()
    payload = _envelope(
        args,
        **body,
        balanced=is_balanced(allocation.graph, allocation).ok,
        max_load=float(max(body["loads"], default=0.0)),
    )
    _emit_json(payload, args.out)
    _write_csv(pd.DataFrame({"vertex": np.arange(g.n), "load": body["loads"]}), args.csv)
    return EXIT_OK


def cmd_density(args: argparse.Namespace) -> int:
    g = _read_graph(args.graph)
    result = rho_bruteforce(g) if args.brute else rho_maxflow(g)
    body = result.to_dict()
    body["rho"] = float(result.rho)
    if args.decompose:
        dec = density_decomposition(g)
        body["blocks"] = dec.to_dict()["blocks"]
        _write_csv(
            pd.DataFrame({"vertex": np.arange(g.n), "block": dec.assignment, "load": [float(x) for x in dec.loads()]}),
            args.csv,
        )
    _emit_json(_envelope(args, **body), args.out)
    return EXIT_OK


def cmd_predict(args: argparse.Namespace) -> int:
    dist = GraphModel.parse(args.model).limit
    grid = parse_t_grid(args.t_grid) if args.t_grid else DEFAULT_T_GRID
    curve = predicted_load_cdf(dist, grid, size=args.pool_size, samples=args.samples, seed=args.seed, workers=args.workers)
    body: Dict[str, Any] = {"curve": curve.to_frame().to_dict(orient="records")}
    if args.rho:
        body["rho_mu"] = rho_of_mu(dist, size=args.pool_size, tol_t=args.rho_tol, seed=args.seed, samples=args.samples)
    _emit_json(_envelope(args, **body), args.out)
    _write_csv(curve.to_frame(), args.csv)
    return EXIT_OK


def cmd_compare(args: argparse.Namespace) -> int:
    config = ExperimentConfig(
        model=args.model,
        n_grid=_int_list(args.n_grid),
        replicates=args.replicates,
        seed=args.seed,
        t_grid=(parse_t_grid(args.t_grid) if args.t_grid else DEFAULT_T_GRID).tolist(),
        pool_size=args.pool_size or settings.POOL_SIZE,
        samples=args.samples or settings.OBJECTIVE_SAMPLES,
        rho_tol=args.rho_tol or settings.RHO_TOL,
        workers=args.workers,
        keep_multi=args.keep_multi,
    )
    result = run_compare(config)
    payload = compare_payload(result)
    payload["command"] = args.command
    payload["cli"] = _config(args)
    _emit_json(payload, args.out)
    _write_csv(result.rows, args.csv)
    return EXIT_OK


def cmd_bound(args: argparse.Namespace) -> int:
    if args.degrees:
        with open(args.degrees) as fh:
            d = DegreeSequence(np.array([int(tok) for tok in fh.read().split()]))
    else:
        d = resolve_degrees(None, args.model, args.n, args.seed)
    if args.t is None and not args.k_grid:
        raise UsageError("bound needs --t, --k-grid or both")
    body: Dict[str, Any] = {}
    if args.t is not None:
        body.update(z_delta_t_bound(d, args.t, args.theta, n=args.target_n).to_dict())
    if args.k_grid:
        table = dense_count_table(
            d, _int_list(args.k_grid), _int_list(args.r_grid), args.theta, samples=args.mc_samples, seed=args.seed
        )
        body["dense_counts"] = dense_count_records(table)
        _write_csv(table, args.csv)
    _emit_json(_envelope(args, **body), args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="balanced-loads", description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--log-level", default=settings.LOG_LEVEL)
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    gen = sub.add_parser("gen", help="sample a graph and write it as an edge list")
    gen.add_argument("--model", required=True, help="poisson:<c>, regular:<d>, explicit:<p0,...>, er or er:<c>")
    gen.add_argument("--n", type=int, required=True)
    gen.add_argument("--m", type=int, default=None, help="edge count for --model er")
    gen.add_argument("--seed", type=int, default=None)
    gen.add_argument("--keep-multi", action="store_true", help="keep one copy of repeated pairings")
    gen.add_argument("--out", default=None)
    gen.set_defaults(handler=cmd_gen)

    bal = sub.add_parser("balance", help="balanced or epsilon-balanced loads")
    bal.add_argument("graph")
    bal.add_argument("--mode", choices=["eps", "exact"], default="exact")
    bal.add_argument("--eps", type=float, default=None)
    bal.add_argument("--delta", type=int, default=None, help="truncation degree for --mode eps")
    bal.add_argument("--method", choices=["newton", "jacobi"], default="newton")
    bal.add_argument("--tol", type=float, default=None)
    bal.add_argument("--out", default=None)
    bal.add_argument("--csv", default=None)
    bal.set_defaults(handler=cmd_balance)

    den = sub.add_parser("density", help="maximum subgraph density")
    den.add_argument("graph")
    den.add_argument("--brute", action="store_true")
    den.add_argument("--decompose", action="store_true")
    den.add_argument("--out", default=None)
    den.add_argument("--csv", default=None)
    den.set_defaults(handler=cmd_density)

    for name, handler, help_text in (
        ("predict", cmd_predict, "Phi curve, predicted load tail and rho(mu)"),
        ("compare", cmd_compare, "finite-n load laws against the predicted limit"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--model", required=True)
        p.add_argument("--t-grid", default=None, help="start:stop:step or a comma separated list")
        p.add_argument("--pool-size", type=int, default=None)
        p.add_argument("--samples", type=int, default=None)
        p.add_argument("--rho-tol", type=float, default=settings.RHO_TOL)
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--workers", type=int, default=settings.WORKERS)
        p.add_argument("--out", default=None)
        p.add_argument("--csv", default=None)
        p.set_defaults(handler=handler)
        if name == "predict":
            p.add_argument("--rho", action="store_true", help="also estimate rho(mu)")
        else:
            p.add_argument("--n-grid", default="500,2000,5000")
            p.add_argument("--replicates", type=int, default=10)
            p.add_argument("--keep-multi", action="store_true")

    bnd = sub.add_parser("bound", help="first-moment certificate for small dense subsets")
    src = bnd.add_mutually_exclusive_group(required=True)
    src.add_argument("--degrees", default=None, help="file of whitespace separated degrees")
    src.add_argument("--model", default=None)
    bnd.add_argument("--n", type=int, default=None)
    bnd.add_argument("--seed", type=int, default=None)
    bnd.add_argument("--t", type=float, default=None)
    bnd.add_argument("--theta", type=float, default=1.0)
    bnd.add_argument("--target-n", type=int, default=None)
    bnd.add_argument("--k-grid", default=None, help="comma separated set sizes for the dense count table")
    bnd.add_argument("--r-grid", default="1,2,3", help="comma separated internal edge thresholds")
    bnd.add_argument("--mc-samples", type=int, default=0, help="pairing samples behind the Monte Carlo columns")
    bnd.add_argument("--out", default=None)
    bnd.add_argument("--csv", default=None)
    bnd.set_defaults(handler=cmd_bound)
    return ap


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as e:
        sys.stderr.write(f"{parser.prog}: error: {e}\n")
        return EXIT_USAGE
    logging.basicConfig(level=args.log_level)
    try:
        return args.handler(args)
    except ConvergenceError as e:
        logger.error(f"{args.command} did not converge: {e}")
        return EXIT_NOT_CONVERGED
    except (UsageError,) + USAGE_ERRORS as e:
        logger.error(f"{args.command}: {e}")
        return EXIT_USAGE
    except Exception as e:
        logger.error(f"{args.command} failed: {e}", exc_info=True)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
