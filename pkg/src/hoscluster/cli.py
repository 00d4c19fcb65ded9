"""Command-line frontend: hosc <command> [options].

Commands: cluster, rotate, sweep, baseline, correlate, signs, evaluate,
graph.  Exit codes: 0 success, 2 I/O or parse failure, 3 invalid
parameters, 4 internal invariant violation.  Every command is
deterministic under --seed, and commands that write a stats JSON embed
the fully resolved configuration plus a content hash of their input.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from typing import Optional

import numpy as np

from . import dataio
from .clustering import HosParams, run_hos, sweep_delta0
from .correlation import pearson, sample_distance_triples
from .dbscan import DbscanParams, run_dbscan, sweep_eps
from .errors import (
    HosclusterError,
    IdMismatchError,
    InternalInvariantError,
    InvalidParamsError,
    InvalidValueError,
    LineError,
)
from .evaluation import (
    MeasureReport,
    adjusted_mutual_information,
    coherence_cosine,
    coherence_pmi,
    topic_majority,
)
from .octant_graph import build_reduced_graph, default_d0, threshold_graph
from .rotation import AnnealConfig, apply_rotation, centering_value, optimize_rotation
from .signlabels import sign_labels

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_PARAMS = 3
EXIT_INTERNAL = 4

logger = logging.getLogger(__name__)


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with code 2 on bad flags; route that through our own
    # exit-code scheme (invalid parameters -> 3) instead.
    def error(self, message):
        raise _UsageError(message)


def _read_config_file(path) -> dict[str, str]:
    """Flat "key = value" lines; '#' starts a comment."""
    values = {}
    with open(path, encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise InvalidParamsError(
                    f"{path}:{line_no}: expected 'key = value', got {raw.strip()!r}"
                )
            key, value = line.split("=", 1)
            values[key.strip().replace("-", "_")] = value.strip()
    return values


_BOOL_STRINGS = {"true": True, "1": True, "yes": True, "false": False, "0": False, "no": False}


def _coerce(raw: str, kind):
    if kind is bool:
        try:
            return _BOOL_STRINGS[raw.lower()]
        except KeyError:
            raise InvalidParamsError(f"bad boolean value {raw!r}")
    try:
        return kind(raw)
    except ValueError:
        raise InvalidParamsError(f"bad {kind.__name__} value {raw!r}")


class _Resolver:
    """Merge precedence: explicit flag > config file entry > default."""

    def __init__(self, args: argparse.Namespace):
        self.args = args
        self.config_file = {}
        if getattr(args, "config", None):
            self.config_file = _read_config_file(args.config)
        self.resolved: dict = {}

    def get(self, name: str, default, kind=None):
        value = getattr(self.args, name, None)
        if value is None:
            if name in self.config_file:
                kind = kind or (type(default) if default is not None else str)
                value = _coerce(self.config_file[name], kind)
            else:
                value = default
        self.resolved[name] = value
        return value


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--seed", type=int, default=None, help="root RNG seed (default 0)")
    parser.add_argument("--threads", type=int, default=None,
                        help="worker cap; the current implementation is single-threaded")
    parser.add_argument("--log-level", default=None,
                        help="logging level name (default WARNING)")
    parser.add_argument("--config", default=None,
                        help="key = value file supplying defaults; flags win")


def _add_vector_input(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("input", help="vector file to load")
    parser.add_argument("--format", choices=["csv", "embedding_text"], default=None,
                        help="input layout (default csv)")
    parser.add_argument("--id-column", default=None, help="CSV column holding point ids")
    parser.add_argument("--label-column", default=None,
                        help="CSV column to ignore as a label")


def _setup_logging(resolver: _Resolver) -> None:
    level_name = resolver.get("log_level", "WARNING")
    level = getattr(logging, str(level_name).upper(), None)
    if level is None:
        raise InvalidParamsError(f"unknown log level {level_name!r}")
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    threads = resolver.get("threads", 1, int)
    if threads < 1:
        raise InvalidParamsError("--threads must be >= 1")


def _load_points(resolver: _Resolver):
    spec = dataio.VectorFileSpec(
        path=resolver.args.input,
        format=resolver.get("format", "csv"),
        id_column=resolver.get("id_column", None, str),
        label_column=resolver.get("label_column", None, str),
    )
    resolver.resolved["input"] = resolver.args.input
    return dataio.load_vectors(spec), dataio.input_sha256(resolver.args.input)


def _hos_params(resolver: _Resolver) -> HosParams:
    seed = resolver.get("seed", 0, int)
    return HosParams(
        delta0=resolver.get("delta0", 4.0, float),
        k0=resolver.get("k0", 2, int),
        d0=resolver.get("d0", None, int),
        cardinality_mode=resolver.get("cardinality", "labels"),
        rotate=not resolver.get("no_rotate", False, bool),
        anneal=AnnealConfig(
            restarts=resolver.get("restarts", 4, int),
            steps_per_temperature=resolver.get("sa_steps", 200, int),
            seed=seed,
        ),
    )


def cmd_cluster(args: argparse.Namespace) -> int:
    resolver = _Resolver(args)
    _setup_logging(resolver)
    params = _hos_params(resolver)
    points, digest = _load_points(resolver)
    result = run_hos(points, params)
    out = resolver.get("out", None, str)
    stats_path = resolver.get("stats", None, str)
    if out:
        dataio.write_assignments(result, out)
    if stats_path:
        dataio.write_stats(result, stats_path, config=resolver.resolved, input_hash=digest)
    print(f"points: {result.stats['N_prime']}")
    print(f"occupied hyperoctants: {result.stats['N_occupied']}")
    print(f"clusters: {result.cluster_count}")
    print(f"noise points: {len(result.noise)}")
    return EXIT_OK


def cmd_baseline(args: argparse.Namespace) -> int:
    resolver = _Resolver(args)
    _setup_logging(resolver)
    eps = resolver.get("eps", None, float)
    if eps is None:
        raise InvalidParamsError("--eps is required")
    params = DbscanParams(eps=eps, min_pts=resolver.get("min_pts", 5, int))
    points, digest = _load_points(resolver)
    result = run_dbscan(points, params)
    out = resolver.get("out", None, str)
    stats_path = resolver.get("stats", None, str)
    if out:
        dataio.write_assignments(result, out)
    if stats_path:
        dataio.write_stats(result, stats_path, config=resolver.resolved, input_hash=digest)
    print(f"points: {len(points)}")
    print(f"clusters: {result.cluster_count}")
    print(f"noise points: {len(result.noise)}")
    return EXIT_OK


def cmd_rotate(args: argparse.Namespace) -> int:
    resolver = _Resolver(args)
    _setup_logging(resolver)
    points, digest = _load_points(resolver)
    plan_path = resolver.get("plan", None, str)
    if plan_path:
        plan, plan_dim = dataio.load_rotation_plan(plan_path)
        if plan_dim != points.dim:
            raise InvalidParamsError(
                f"plan dimension {plan_dim} does not match data dimension {points.dim}"
            )
        rotated = apply_rotation(plan, points)
        before, after = centering_value(points), centering_value(rotated)
        occupied_before = len(set(sign_labels(points)))
        occupied_after = len(set(sign_labels(rotated)))
    else:
        config = AnnealConfig(
            restarts=resolver.get("restarts", 4, int),
            steps_per_temperature=resolver.get("sa_steps", 200, int),
            seed=resolver.get("seed", 0, int),
        )
        plan, rotated, report = optimize_rotation(points, config)
        before, after = report.initial_centering, report.final_centering
        occupied_before = report.initial_occupied
        occupied_after = report.final_occupied
    out_plan = resolver.get("out_plan", None, str)
    out = resolver.get("out", None, str)
    if out_plan:
        dataio.save_rotation_plan(plan, points.dim, out_plan)
    if out:
        dataio.write_vectors_csv(rotated, out)
    logger.debug("input digest %s", digest)
    print(f"centering value: {before:.6f} -> {after:.6f}")
    print(f"occupied hyperoctants: {occupied_before} -> {occupied_after}")
    return EXIT_OK


def _build_grid(resolver: _Resolver) -> list[float]:
    lo = resolver.get("sweep_from", None, float)
    hi = resolver.get("sweep_to", None, float)
    steps = resolver.get("steps", None, int)
    if lo is None or hi is None or steps is None:
        raise InvalidParamsError("--from, --to and --steps are all required")
    if steps < 2:
        raise InvalidParamsError("--steps must be >= 2")
    if not hi > lo:
        raise InvalidParamsError("--to must be strictly greater than --from")
    if resolver.get("log_scale", False, bool):
        if lo <= 0:
            raise InvalidParamsError("--log-scale needs a positive --from")
        return list(np.geomspace(lo, hi, steps))
    return list(np.linspace(lo, hi, steps))


def cmd_sweep(args: argparse.Namespace) -> int:
    resolver = _Resolver(args)
    _setup_logging(resolver)
    method = resolver.get("method", None, str)
    param = resolver.get("param", None, str)
    if method not in ("hos", "dbscan"):
        raise InvalidParamsError("--method must be hos or dbscan")
    expected = {"hos": "delta0", "dbscan": "eps"}[method]
    if param is None:
        param = expected
        resolver.resolved["param"] = param
    if param != expected:
        raise InvalidParamsError(f"method {method} sweeps {expected}, not {param}")
    grid = _build_grid(resolver)
    points, digest = _load_points(resolver)
    if method == "hos":
        rows = sweep_delta0(points, _hos_params(resolver), grid)
    else:
        if grid[-1] > math.pi:
            raise InvalidParamsError("eps values must lie in (0, pi]")
        params = DbscanParams(
            eps=grid[0], min_pts=resolver.get("min_pts", 5, int)
        )
        rows = sweep_eps(points, params, grid)
    out = resolver.get("out", None, str)
    resolver.resolved["input_sha256"] = digest
    if out:
        dataio.write_sweep_csv(rows, out, config=resolver.resolved)
    for value, n_clusters, n_noise in rows:
        print(f"{param}={value:.6g} clusters={n_clusters} noise={n_noise}")
    return EXIT_OK


def cmd_correlate(args: argparse.Namespace) -> int:
    resolver = _Resolver(args)
    _setup_logging(resolver)
    n_pairs = resolver.get("pairs", 1000, int)
    seed = resolver.get("seed", 0, int)
    points, digest = _load_points(resolver)
    triples = sample_distance_triples(points, n_pairs, seed=seed)
    angular = [t[0] for t in triples]
    euclid = [t[1] for t in triples]
    lev = [t[2] for t in triples]
    r_angular = pearson(angular, lev)
    r_euclid = pearson(euclid, lev)
    out = resolver.get("out", None, str)
    resolver.resolved["input_sha256"] = digest
    if out:
        dataio.write_correlations_csv(triples, out, config=resolver.resolved)
    if math.isnan(r_angular) or math.isnan(r_euclid):
        print("warning: at least one correlation is undefined (constant sample)",
              file=sys.stderr)
    print(f"pearson r (angular vs label distance): {r_angular}")
    print(f"pearson r (euclidean vs label distance): {r_euclid}")
    return EXIT_OK


def cmd_signs(args: argparse.Namespace) -> int:
    resolver = _Resolver(args)
    _setup_logging(resolver)
    points, _ = _load_points(resolver)
    out = resolver.get("out", None, str)
    if not out:
        raise InvalidParamsError("--out is required")
    assignments_path = resolver.get("assignments", None, str)
    cluster_id = resolver.get("cluster", None, int)
    selected = None
    if assignments_path is not None:
        mapping = dataio.read_assignments(assignments_path)
        if cluster_id is None:
            raise InvalidParamsError("--cluster is required with --assignments")
        selected = [pid for pid, cid in mapping.items() if cid == cluster_id]
        if not selected:
            raise InvalidParamsError(f"cluster {cluster_id} has no points")
    dataio.write_sign_matrix(points, out, point_ids=selected)
    print(f"wrote sign matrix for {len(selected) if selected is not None else len(points)} points")
    return EXIT_OK


def cmd_graph(args: argparse.Namespace) -> int:
    resolver = _Resolver(args)
    _setup_logging(resolver)
    points, _ = _load_points(resolver)
    labels = sorted(set(sign_labels(points)))
    graph = build_reduced_graph(labels)
    d0 = resolver.get("d0", None, int)
    auto_d0 = default_d0(graph, permissive=True)
    if d0 is not None:
        graph = threshold_graph(graph, d0)
    out = resolver.get("out", None, str)
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(f"# format_version={dataio.FORMAT_VERSION}\n")
            for node in graph.nodes:
                fh.write(f"#node {node}\n")
            for i, j, w in graph.edges:
                fh.write(f"{graph.nodes[i]} {graph.nodes[j]} {w}\n")
    print(f"nodes: {len(graph.nodes)}")
    print(f"edges: {len(graph.edges)}")
    print(f"default d0 (above mean weight): {auto_d0}")
    return EXIT_OK


def cmd_evaluate(args: argparse.Namespace) -> int:
    resolver = _Resolver(args)
    _setup_logging(resolver)
    measure = resolver.get("measure", None, str)
    if measure not in ("coh-cos", "coh-pmi", "majority", "ami"):
        raise InvalidParamsError("--measure must be coh-cos, coh-pmi, majority or ami")
    top_k = resolver.get("topk", 10, int)
    stopwords_path = resolver.get("stopwords", None, str)
    stopwords = dataio.load_stopwords(stopwords_path) if stopwords_path else frozenset()
    mapping = dataio.read_assignments(args.assignments)
    corpus = dataio.load_corpus(args.corpus, stopwords=stopwords)
    missing = set(mapping) - set(corpus.by_id)
    if missing:
        raise IdMismatchError(
            f"{len(missing)} clustered ids have no corpus document "
            f"(first few: {sorted(missing)[:5]})"
        )
    result = dataio.result_from_assignments(mapping)
    resolver.resolved.update({"assignments": args.assignments, "corpus": args.corpus})

    if measure == "coh-cos":
        table_path = resolver.get("embeddings", None, str)
        if not table_path:
            raise InvalidParamsError("--embeddings is required for coh-cos")
        table = dataio.load_embedding_table(table_path)
        report = coherence_cosine(result, corpus, table, k=top_k)
    elif measure == "coh-pmi":
        report = coherence_pmi(result, corpus, k=top_k)
    elif measure == "majority":
        report = topic_majority(result, corpus).to_report()
    else:
        value = adjusted_mutual_information(
            result,
            corpus.labels_by_id(),
            noise_as_singletons=resolver.get("noise_singletons", False, bool),
        )
        report = MeasureReport(
            measure="adjusted_mutual_information",
            value=value,
            per_cluster=(),
            config={"noise_as_singletons": resolver.resolved.get("noise_singletons", False)},
        )

    out = resolver.get("out", None, str)
    if out:
        dataio.write_measure_report(report, out)
    print(json.dumps(report.to_json_dict(), sort_keys=True))
    return EXIT_OK


def _build_parser() -> _Parser:
    parser = _Parser(prog="hosc", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("cluster", help="run the hyperoctant density-walk clustering")
    _add_vector_input(p)
    _add_common(p)
    p.add_argument("--delta0", type=float, default=None, help="minimum linear density (default 4.0)")
    p.add_argument("--k0", type=int, default=None, help="minimum cluster size in points (default 2)")
    p.add_argument("--d0", type=int, default=None, help="edge-weight threshold (default: above the mean)")
    p.add_argument("--no-rotate", action="store_const", const=True, default=None,
                   help="skip the centering rotation")
    p.add_argument("--cardinality", choices=["labels", "points"], default=None,
                   help="what the density condition counts (default labels)")
    p.add_argument("--restarts", type=int, default=None, help="annealing restarts (default 4)")
    p.add_argument("--sa-steps", type=int, default=None,
                   help="annealing steps per temperature (default 200)")
    p.add_argument("--out", default=None, help="assignments CSV path")
    p.add_argument("--stats", default=None, help="stats JSON path")
    p.set_defaults(func=cmd_cluster)

    p = sub.add_parser("baseline", help="run the DBSCAN baseline")
    _add_vector_input(p)
    _add_common(p)
    p.add_argument("--eps", type=float, default=None, help="neighborhood radius in radians")
    p.add_argument("--min-pts", type=int, default=None, help="core-point threshold (default 5)")
    p.add_argument("--out", default=None, help="assignments CSV path")
    p.add_argument("--stats", default=None, help="stats JSON path")
    p.set_defaults(func=cmd_baseline)

    p = sub.add_parser("rotate", help="optimize or apply a centering rotation")
    _add_vector_input(p)
    _add_common(p)
    p.add_argument("--plan", default=None, help="apply this plan JSON instead of optimizing")
    p.add_argument("--out-plan", default=None, help="where to write the plan JSON")
    p.add_argument("--out", default=None, help="where to write the rotated vectors CSV")
    p.add_argument("--restarts", type=int, default=None)
    p.add_argument("--sa-steps", type=int, default=None)
    p.set_defaults(func=cmd_rotate)

    p = sub.add_parser("sweep", help="cluster-count curve over a parameter grid")
    _add_vector_input(p)
    _add_common(p)
    p.add_argument("--method", choices=["hos", "dbscan"], default=None)
    p.add_argument("--param", choices=["delta0", "eps"], default=None)
    p.add_argument("--from", dest="sweep_from", type=float, default=None)
    p.add_argument("--to", dest="sweep_to", type=float, default=None)
    p.add_argument("--steps", type=int, default=None)
    p.add_argument("--log-scale", action="store_const", const=True, default=None)
    p.add_argument("--k0", type=int, default=None)
    p.add_argument("--d0", type=int, default=None)
    p.add_argument("--cardinality", choices=["labels", "points"], default=None)
    p.add_argument("--no-rotate", action="store_const", const=True, default=None)
    p.add_argument("--restarts", type=int, default=None)
    p.add_argument("--sa-steps", type=int, default=None)
    p.add_argument("--min-pts", type=int, default=None)
    p.add_argument("--out", default=None, help="sweep CSV path")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("correlate", help="compare angular/euclidean/label distances")
    _add_vector_input(p)
    _add_common(p)
    p.add_argument("--pairs", type=int, default=None, help="sample size (default 1000)")
    p.add_argument("--out", default=None, help="triples CSV path")
    p.set_defaults(func=cmd_correlate)

    p = sub.add_parser("signs", help="dump the +-1 coordinate sign matrix")
    _add_vector_input(p)
    _add_common(p)
    p.add_argument("--out", default=None, help="sign matrix CSV path")
    p.add_argument("--assignments", default=None, help="restrict to one cluster of this file")
    p.add_argument("--cluster", type=int, default=None, help="cluster id to keep")
    p.set_defaults(func=cmd_signs)

    p = sub.add_parser("graph", help="dump the reduced hyperoctant graph")
    _add_vector_input(p)
    _add_common(p)
    p.add_argument("--d0", type=int, default=None, help="threshold edges above this weight")
    p.add_argument("--out", default=None, help="edge list path")
    p.set_defaults(func=cmd_graph)

    p = sub.add_parser("evaluate", help="score a clustering against a labeled corpus")
    p.add_argument("assignments", help="assignments CSV from cluster/baseline")
    p.add_argument("corpus", help="JSONL corpus with id/text/label per line")
    _add_common(p)
    p.add_argument("--measure", choices=["coh-cos", "coh-pmi", "majority", "ami"], default=None)
    p.add_argument("--embeddings", default=None, help="word-vector text file (coh-cos)")
    p.add_argument("--topk", type=int, default=None, help="top words per cluster (default 10)")
    p.add_argument("--stopwords", default=None, help="stopword list file")
    p.add_argument("--noise-singletons", action="store_const", const=True, default=None,
                   help="treat noise points as singleton clusters in AMI")
    p.add_argument("--out", default=None, help="measure report JSON path")
    p.set_defaults(func=cmd_evaluate)

    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_PARAMS
    except (InvalidParamsError, InvalidValueError) as exc:
        print(f"invalid parameters: {exc}", file=sys.stderr)
        return EXIT_PARAMS
    except InternalInvariantError as exc:
        print(f"internal invariant violated: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except (HosclusterError, OSError, LineError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
