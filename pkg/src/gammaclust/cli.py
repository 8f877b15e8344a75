"""Command-line front end: ``gammaclust <command> [options]``.

Every command writes one JSON record (command, config echo, version,
result) to stdout or ``--out``. Exit codes: 0 ok, 2 domain error, 64 usage
error, 74 I/O error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
import warnings
from pathlib import Path
from typing import Any, Optional, Sequence

import numpy as np

from . import __version__
from .errors import DisconnectedGraph, DomainError, GammaClustError
from .hardness import (
    ThreeDMInstance,
    all_instances,
    check_reduction,
    gadget_graph,
    graph_partition_25plus,
)
from .laminar import build_forest, enumerate_ball_clusters, find_partition, minimal_partition
from .metric import Clustering, MetricSpace, load_space
from .montecarlo import run_montecarlo
from .oracle import (
    PlantedSpec,
    enumerate_all_clusterings,
    enumerate_all_clusters,
    gen_cycle4,
    gen_hierarchical,
    gen_paired,
    gen_planted,
    gen_random_euclidean,
    gen_uniform,
)
from .sampler import SamplerConfig, sample_size, search_clusterings
from .verify import check_regularity, is_cluster, is_clustering, is_eps_clustering, theory_bounds

EXIT_OK = 0
EXIT_DOMAIN = 2
EXIT_USAGE = 64
EXIT_IO = 74


class UsageError(Exception):
    pass


class InputError(Exception):
    """Unreadable or malformed input file."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


# ----------------------------------------------------------------------------
# I/O

def _plain(obj: Any) -> Any:
    """JSON-ready copy: numpy scalars/arrays to Python, non-finite floats to null."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else None
    if isinstance(obj, Path):
        return str(obj)
    return obj


def dumps(obj: Any) -> str:
    # floats print via repr, the shortest string that round-trips exactly
    return json.dumps(_plain(obj), indent=2, allow_nan=False) + "\n"


def _read_json(path: str) -> Any:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as e:
        raise InputError(f"cannot read {path}: {e.strerror}") from e
    except json.JSONDecodeError as e:
        raise InputError(f"{path} is not valid JSON: {e}") from e


def read_space(path: str) -> MetricSpace:
    if path.endswith(".csv"):
        try:
            d = np.loadtxt(path, delimiter=",", ndmin=2)
        except OSError as e:
            raise InputError(f"cannot read {path}: {e}") from e
        except ValueError as e:
            raise InputError(f"{path} is not a numeric CSV matrix: {e}") from e
        return load_space(d)
    raw = _read_json(path)
    if isinstance(raw, dict) and "space" in raw and "dist" not in raw:
        raw = raw["space"]  # accept a gadget result directly
    if isinstance(raw, dict) and isinstance(raw.get("result"), dict) and "space" in raw["result"]:
        raw = raw["result"]["space"]  # or the whole gadget record
    if not isinstance(raw, dict) or "dist" not in raw:
        raise InputError(f"{path}: expected an object with a 'dist' matrix")
    space = load_space(raw["dist"], raw.get("weights"))
    if "n" in raw and int(raw["n"]) != space.n:
        raise InputError(f"{path}: n = {raw['n']} but the matrix is {space.n} x {space.n}")
    return space


def read_labels(path: str, n: int) -> Clustering:
    raw = _read_json(path)
    if isinstance(raw, dict) and "labels" in raw:
        labels = raw["labels"]
    elif isinstance(raw, list):
        labels = raw
    else:
        raise InputError(f"{path}: expected {{'k': int, 'labels': [...]}}")
    lab = np.asarray(labels, dtype=int)
    if lab.shape != (n,):
        raise DomainError(f"{path}: {lab.size} labels for a space of {n} points")
    C = Clustering.from_labels(lab)
    if isinstance(raw, dict) and "k" in raw and int(raw["k"]) != C.k:
        raise DomainError(f"{path}: k = {raw['k']} but labels name {C.k} non-empty parts")
    return C


def read_instance(args) -> ThreeDMInstance:
    if getattr(args, "instance", None):
        raw = _read_json(args.instance)
        return ThreeDMInstance.from_dict(raw.get("instance", raw))
    if args.q is None or args.triples is None:
        raise UsageError("give --instance FILE or both --q and --triples")
    triples = []
    for chunk in args.triples.split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        try:
            t = tuple(int(c) for c in chunk.split(","))
        except ValueError as e:
            raise UsageError(f"bad triple {chunk!r}") from e
        if len(t) != 3:
            raise UsageError(f"triple {chunk!r} needs three coordinates")
        triples.append(t)
    return ThreeDMInstance(args.q, tuple(triples))


def _int_list(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from e


def _write(text: str, out: Optional[str]) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    try:
        Path(out).write_text(text, encoding="utf-8")
    except OSError as e:
        raise InputError(f"cannot write {out}: {e.strerror}") from e


# ----------------------------------------------------------------------------
# commands

def cmd_gen(args):
    kind = args.kind
    labels = None
    if kind == "uniform":
        space = gen_uniform(args.n)
    elif kind == "paired":
        space = gen_paired(args.n, args.gamma_prime)
    elif kind == "cycle4":
        space = gen_cycle4()
    elif kind == "euclidean":
        space = gen_random_euclidean(args.n, args.dim, args.seed, args.blobs)
    elif kind == "hierarchical":
        space = gen_hierarchical(args.n, args.seed)
    else:  # planted
        spec = PlantedSpec(args.sizes, intra_scale=args.scale, intra_jitter=args.jitter,
                           inter_distance=args.inter, target_gamma=args.target_gamma, seed=args.seed)
        space, labels = gen_planted(spec)
        if args.labels_out:
            _write(dumps(labels.to_dict()), args.labels_out)
    # gen writes the bare space so every consumer can read it back unchanged
    return space.to_dict(), True


def cmd_verify(args):
    space = read_space(args.space)
    if args.cluster is not None:
        rep = is_cluster(space, args.cluster, args.alpha, args.gamma)
        return {"kind": "cluster", "members": sorted(set(args.cluster)), **rep.to_dict()}, False
    if args.labels is None:
        raise UsageError("verify needs --labels or --cluster")
    C = read_labels(args.labels, space.n)
    if C.has_exceptional or args.eps is not None:
        rep = is_eps_clustering(space, C, args.eps or 0.0, args.alpha, args.gamma)
        kind = "eps-clustering"
    else:
        rep = is_clustering(space, C, args.alpha, args.gamma)
        kind = "clustering"
    out = {"kind": kind, **rep.to_dict()}
    if rep.ok and kind == "clustering":
        out["regularity_violations"] = [v._asdict() for v in check_regularity(space, C, args.gamma)]
    return out, False


def _human_verdict(res: dict) -> str:
    g = res.get("achieved_gamma")
    lines = [f"{res['kind']}: {'OK' if res['ok'] else 'REJECTED'}",
             f"achieved gamma: {'inf' if g is None else g}"]
    if "achieved_alpha" in res:
        lines.append(f"mass: {res['achieved_alpha']}")
    if "masses" in res:
        lines.append("part masses: " + ", ".join(repr(m) for m in res["masses"]))
    if res.get("exceptional_mass"):
        lines.append(f"exceptional mass: {res['exceptional_mass']}")
    if res.get("witness"):
        lines.append(f"witness: {tuple(res['witness'])}")
    if res.get("regularity_violations"):
        lines.append(f"regularity violations: {len(res['regularity_violations'])}")
    return "\n".join(lines) + "\n"


def _sampler_config(args) -> SamplerConfig:
    return SamplerConfig(args.alpha, args.gamma, delta=args.delta, t=args.t, fail_prob=args.fail_prob,
                         seed=args.seed, repetitions=args.reps, eps=args.eps, m=args.m,
                         budget=args.budget)


def cmd_find(args):
    space = read_space(args.space)
    res = search_clusterings(space, _sampler_config(args))
    return res.to_dict(), False


def cmd_balls(args):
    space = read_space(args.space)
    clusters = enumerate_ball_clusters(space, args.alpha, args.gamma)
    forest = build_forest(clusters)
    return {"clusters": [c.to_dict() for c in clusters], "forest": forest.to_dict()}, False


def cmd_partition(args):
    space = read_space(args.space)
    forest = build_forest(enumerate_ball_clusters(space, args.alpha, args.gamma))
    if args.minimal:
        C = minimal_partition(space, forest, args.alpha, args.gamma)
    else:
        C = find_partition(space, forest, args.alpha, args.gamma, min_parts=args.min_parts)
    return {"exists": C is not None, "partition": C.to_dict() if C is not None else None}, False


def cmd_gadget(args):
    inst = read_instance(args)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", DisconnectedGraph)
        g = gadget_graph(inst)
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    return g.to_dict(), False


def cmd_check_reduction(args):
    if args.all_q is not None:
        reports = [check_reduction(inst) for inst in all_instances(args.all_q, args.max_triples)]
        return {
            "instances": len(reports),
            "failures": [r.to_dict() for r in reports if not r.ok],
            "with_3dm": sum(r.matching is not None for r in reports),
            "connected": sum(r.connected for r in reports),
            "ok": all(r.ok for r in reports),
        }, False
    return check_reduction(read_instance(args)).to_dict(), False


def cmd_match25(args):
    if args.graph:
        raw = _read_json(args.graph)
        n, edges = int(raw["n"]), [tuple(e) for e in raw["edges"]]
    elif args.space:
        space = read_space(args.space)
        n = space.n
        iu = np.argwhere(np.triu(np.isclose(space.dist, 1.0), 1))
        edges = [tuple(map(int, e)) for e in iu]
    else:
        raise UsageError("match25 needs --graph or --space")
    return graph_partition_25plus(n, edges, args.alpha, args.eps).to_dict(), False


def cmd_bounds(args):
    tb = theory_bounds(args.alpha, args.gamma)
    cfg = SamplerConfig(args.alpha, args.gamma, delta=args.delta, t=args.t, fail_prob=args.fail_prob)
    return {
        "min_sep": tb.min_sep,
        "log_max_count": tb.log_max_count,
        "max_count": tb.max_count,
        "overflow": tb.overflow,
        "delta": cfg.delta,
        "t": cfg.t,
        "sample_size": sample_size(cfg),
    }, False


def cmd_montecarlo(args):
    space = read_space(args.space)
    C = read_labels(args.labels, space.n)
    points = run_montecarlo(space, C, args.alpha, args.gamma, args.eps, args.m, args.trials, args.seed)
    return {"points": [p.to_dict() for p in points], "ok": all(p.ok for p in points)}, False


def cmd_oracle(args):
    space = read_space(args.space)
    if args.clusters:
        found = enumerate_all_clusters(space, args.alpha, args.gamma)
        return {"clusters": sorted(sorted(c) for c in found)}, False
    found = enumerate_all_clusterings(space, args.alpha, args.gamma)
    return {"clusterings": [C.to_dict() for C in found]}, False


# ----------------------------------------------------------------------------
# parser

def _common(p, seed=False):
    p.add_argument("--out", help="write JSON here instead of stdout")
    p.add_argument("--timing", action="store_true", help="include wall-clock seconds in the record")
    if seed:
        p.add_argument("--seed", type=int, default=0)


def _ag(p, gamma_default=None):
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--gamma", type=float, required=gamma_default is None, default=gamma_default)


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="gammaclust", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"gammaclust {__version__}")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("gen", help="generate a space")
    p.add_argument("kind", choices=["uniform", "paired", "cycle4", "planted", "euclidean", "hierarchical"])
    p.add_argument("--n", type=int, default=4)
    p.add_argument("--gamma-prime", type=float, default=4.0)
    p.add_argument("--dim", type=int, default=2)
    p.add_argument("--blobs", type=int, default=0)
    p.add_argument("--sizes", type=_int_list, default=[50, 50, 50, 50])
    p.add_argument("--scale", type=float, default=1.0)
    p.add_argument("--jitter", type=float, default=0.2)
    p.add_argument("--inter", type=float, default=None)
    p.add_argument("--target-gamma", type=float, default=2.0)
    p.add_argument("--labels-out", help="planted labels JSON path")
    _common(p, seed=True)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("verify", help="verify a cluster or clustering")
    p.add_argument("--space", required=True)
    p.add_argument("--labels")
    p.add_argument("--cluster", type=_int_list, help="comma-separated point indices")
    _ag(p)
    p.add_argument("--eps", type=float, default=None)
    p.add_argument("--json", action="store_true", help="print the JSON record instead of text")
    _common(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("find", help="all (alpha, gamma)-clusterings by sampling")
    p.add_argument("--space", required=True)
    _ag(p)
    p.add_argument("--delta", type=float, default=None)
    p.add_argument("--t", type=float, default=None)
    p.add_argument("--fail-prob", type=float, default=0.5)
    p.add_argument("--eps", type=float, default=None)
    p.add_argument("--m", type=int, default=None, help="sample size override")
    p.add_argument("--reps", type=int, default=20)
    p.add_argument("--budget", type=int, default=10 ** 8)
    _common(p, seed=True)
    p.set_defaults(func=cmd_find)

    p = sub.add_parser("balls", help="all ball clusters and their forest (gamma > 3)")
    p.add_argument("--space", required=True)
    _ag(p)
    _common(p)
    p.set_defaults(func=cmd_balls)

    p = sub.add_parser("partition", help="partition into (alpha, gamma)-clusters (gamma > 3)")
    p.add_argument("--space", required=True)
    _ag(p)
    p.add_argument("--minimal", action="store_true", help="partition into minimal clusters")
    p.add_argument("--min-parts", type=int, default=1)
    _common(p)
    p.set_defaults(func=cmd_partition)

    for name, fn, hlp in (("gadget", cmd_gadget, "3DM gadget graph and its metric"),
                          ("check-reduction", cmd_check_reduction, "check the gadget reduction")):
        p = sub.add_parser(name, help=hlp)
        p.add_argument("--instance", help='3DM JSON {"q": int, "triples": [[y,z,w], ...]}')
        p.add_argument("--q", type=int)
        p.add_argument("--triples", help='1-based triples, e.g. "1,1,1;2,2,2"')
        if name == "check-reduction":
            p.add_argument("--all-q", type=int, default=None, help="check every instance with this q")
            p.add_argument("--max-triples", type=int, default=4)
        _common(p)
        p.set_defaults(func=fn)

    p = sub.add_parser("match25", help="graph-metric clustering at gamma = 2.5 + eps")
    p.add_argument("--graph", help='JSON {"n": int, "edges": [[u, v], ...]}')
    p.add_argument("--space", help="graph metric; edges are the pairs at distance 1")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--eps", type=float, default=0.1)
    _common(p)
    p.set_defaults(func=cmd_match25)

    p = sub.add_parser("bounds", help="separation, count cap and sample size")
    _ag(p)
    p.add_argument("--delta", type=float, default=None)
    p.add_argument("--t", type=float, default=None)
    p.add_argument("--fail-prob", type=float, default=0.5)
    _common(p)
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("montecarlo", help="empirical check of the sampling bound")
    p.add_argument("--space", required=True)
    p.add_argument("--labels", required=True)
    _ag(p)
    p.add_argument("--eps", type=float, default=0.5)
    p.add_argument("--m", type=_int_list, default=[20, 50, 100])
    p.add_argument("--trials", type=int, default=2000)
    _common(p, seed=True)
    p.set_defaults(func=cmd_montecarlo)

    p = sub.add_parser("oracle", help="brute-force enumeration for small spaces")
    p.add_argument("--space", required=True)
    _ag(p)
    p.add_argument("--clusters", action="store_true", help="enumerate clusters instead of clusterings")
    _common(p)
    p.set_defaults(func=cmd_oracle)
    return ap


def _config_echo(args) -> dict:
    skip = {"func", "out", "timing", "json"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


def _error(kind: str, exc: BaseException, code: int) -> int:
    sys.stderr.write(json.dumps({"error": kind, "type": type(exc).__name__, "message": str(exc)}) + "\n")
    return code


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as e:
        return _error("usage", e, EXIT_USAGE)
    except SystemExit as e:  # --help / --version
        return int(e.code or 0)
    t0 = time.perf_counter()
    try:
        result, bare = args.func(args)
        if args.command == "verify" and not args.json:
            _write(_human_verdict(result), args.out)
            return EXIT_OK
        if bare:
            payload = result
        else:
            payload = {"command": args.command, "version": __version__, "config": _config_echo(args),
                       "result": result}
            if args.timing:
                payload["seconds"] = time.perf_counter() - t0
        _write(dumps(payload), args.out)
    except UsageError as e:
        return _error("usage", e, EXIT_USAGE)
    except InputError as e:
        return _error("io", e, EXIT_IO)
    except (GammaClustError, ValueError) as e:
        return _error("domain", e, EXIT_DOMAIN)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
