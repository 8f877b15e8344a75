"""Acceptance suite: oracle agreement, structural invariants, reduction and determinism.

Each test prints one PASS/FAIL line. Run with ``pytest -m acceptance -s``
or plain ``pytest``; the lines are printed either way.
"""

import itertools
import json
import math
import os
import subprocess
import sys
import time
import warnings

import numpy as np
import pytest

from gammaclust.hardness import all_instances, check_reduction
from gammaclust.laminar import build_forest, enumerate_ball_clusters, find_partition
from gammaclust.metric import Clustering, geq, partition_distance
from gammaclust.montecarlo import run_montecarlo
from gammaclust.oracle import (
    PlantedSpec,
    enumerate_all_clusterings,
    enumerate_all_clusters,
    gen_cycle4,
    gen_hierarchical,
    gen_paired,
    gen_planted,
    gen_random_euclidean,
    gen_uniform,
    partitions_into_clusters,
)
from gammaclust.partitions import restricted_growth_strings
from gammaclust.sampler import SamplerConfig, search_clusterings
from gammaclust.verify import check_regularity, is_cluster, is_clustering, theory_bounds

pytestmark = pytest.mark.acceptance

FIND_PARAMS = [(0.3, 1.5), (0.25, 2.0), (0.2, 3.0)]
BALL_GAMMAS = [3.1, 4.0, 10.0]


def report(capsys, num, name, ok, detail):
    with capsys.disabled():
        print(f"\n[{'PASS' if ok else 'FAIL'}] criterion {num}: {name} | {detail}")


# ----------------------------------------------------------------------------
# shared runs

@pytest.fixture(scope="module")
def find_runs():
    """Sampler versus oracle on 50 seeded Euclidean spaces."""
    t0 = time.perf_counter()
    runs = []
    for seed in range(50):
        space = gen_random_euclidean(9, 2, seed=seed, blobs=seed % 4)
        for alpha, gamma in FIND_PARAMS:
            res = search_clusterings(space, SamplerConfig(alpha, gamma, seed=seed, repetitions=20))
            oracle = enumerate_all_clusterings(space, alpha, gamma)
            runs.append((seed, alpha, gamma, space, res.clusterings, oracle))
    return runs, time.perf_counter() - t0


def _mixed_space(seed):
    n = 5 + seed % 5
    kind = seed % 3
    if kind == 0:
        return "euclidean", gen_random_euclidean(n, 2, seed=seed)
    if kind == 1:
        return "blobs", gen_random_euclidean(n, 2, seed=seed, blobs=2 + seed % 3)
    return "hierarchical", gen_hierarchical(n, seed=seed)


@pytest.fixture(scope="module")
def ball_runs():
    """Ball enumeration and partition search versus brute force on 100 spaces."""
    t0 = time.perf_counter()
    rows = []
    for seed in range(100):
        kind, space = _mixed_space(seed)
        n = space.n
        for gamma in BALL_GAMMAS:
            for alpha in (1.0 / n, 0.25):
                balls = enumerate_ball_clusters(space, alpha, gamma)
                forest = build_forest(balls)
                brute_clusters = enumerate_all_clusters(space, alpha, gamma)
                covers = partitions_into_clusters(n, brute_clusters)
                verdicts = {}
                found = {}
                for mp in (1, 2):
                    C = find_partition(space, forest, alpha, gamma, min_parts=mp)
                    found[mp] = C
                    verdicts[mp] = (C is not None and C.k >= mp,
                                    any(len(p) >= mp for p in covers))
                rows.append(dict(seed=seed, kind=kind, space=space, alpha=alpha, gamma=gamma,
                                 balls={b.members for b in balls}, brute=set(brute_clusters),
                                 covers=covers, verdicts=verdicts, found=found))
    return rows, time.perf_counter() - t0


# ----------------------------------------------------------------------------

def test_c1_sampler_matches_oracle(find_runs, capsys):
    runs, secs = find_runs
    misses = extras = 0
    nontrivial = 0
    for seed, alpha, gamma, space, got, oracle in runs:
        g, o = set(got), set(oracle)
        misses += len(o - g)
        extras += len(g - o)
        nontrivial += sum(C.k >= 2 for C in o)
    ok = misses == 0 and extras == 0 and secs < 300
    report(capsys, 1, "find equals oracle", ok,
           f"{len(runs)} runs, {nontrivial} clusterings with k>=2, misses={misses}, extras={extras}, {secs:.1f}s")
    assert ok


def test_c2_balls_and_partitions_match_brute_force(ball_runs, capsys):
    rows, secs = ball_runs
    set_diff = verdict_diff = exists = 0
    for r in rows:
        set_diff += r["balls"] != r["brute"]
        for mine, brute in r["verdicts"].values():
            verdict_diff += mine != brute
            exists += brute
    ok = set_diff == 0 and verdict_diff == 0 and secs < 120
    report(capsys, 2, "ball clusters and partition existence equal brute force", ok,
           f"{len(rows)} cases, cluster-set mismatches={set_diff}, verdict mismatches={verdict_diff}, "
           f"partitions found in {exists} verdicts, {secs:.1f}s")
    assert ok


def test_c3_regularity(find_runs, ball_runs, capsys):
    counts: list = []
    violations = 0
    tested = 0
    for _, alpha, gamma, space, got, _ in find_runs[0]:
        for C in got:
            violations += len(check_regularity(space, C, gamma, counts))
            tested += 1
    for r in ball_runs[0]:
        n = r["space"].n
        cands = {Clustering.from_parts(n, [sorted(p) for p in cover]) for cover in r["covers"]}
        cands |= {C for C in r["found"].values() if C is not None}
        for C in cands:
            if is_clustering(r["space"], C, r["alpha"], r["gamma"]).ok:
                violations += len(check_regularity(r["space"], C, r["gamma"], counts))
                tested += 1
    checks = sum(counts)
    ok = violations == 0 and checks >= 10 ** 4
    report(capsys, 3, "regularity bounds hold", ok,
           f"{tested} clusterings, {checks} inequality checks, violations={violations}")
    assert ok


def test_c4_separation_and_count(find_runs, capsys):
    worst = math.inf
    violations = over = pairs = 0
    for _, alpha, gamma, space, _, oracle in find_runs[0]:
        tb = theory_bounds(alpha, gamma)
        if len(oracle) > 0 and math.log(len(oracle)) > tb.log_max_count:
            over += 1
        for A, B in itertools.combinations(oracle, 2):
            d = partition_distance(space, A, B)
            pairs += 1
            worst = min(worst, d / tb.min_sep)
            violations += not geq(d, tb.min_sep)
    ok = violations == 0 and over == 0
    report(capsys, 4, "distinct clusterings are separated, count under cap", ok,
           f"{pairs} pairs, min distance / min_sep = {worst:.3f}, violations={violations}, cap exceeded={over}")
    assert ok


def test_c5_montecarlo(capsys):
    t0 = time.perf_counter()
    space, C = gen_planted(PlantedSpec([50, 50, 50, 50], target_gamma=2.0, seed=0))
    points = run_montecarlo(space, C, 0.2, 2.0, 0.5, [20, 50, 100], trials=2000, seed=0)
    secs = time.perf_counter() - t0
    ok = all(p.ok for p in points) and secs < 180
    detail = ", ".join(f"m={p.m}: freq {p.max_freq:.4f} vs bound {p.bound:.4f}+{p.slack:.4f}" for p in points)
    report(capsys, 5, "sampling bound holds empirically", ok, f"{detail}, {secs:.1f}s")
    assert ok


def test_c6_reduction(capsys):
    t0 = time.perf_counter()
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        reports = [check_reduction(inst) for q in (1, 2) for inst in all_instances(q, 4)]
    secs = time.perf_counter() - t0
    bad = []
    for r in reports:
        has = r.matching is not None
        chain = has == (r.isolated_partitions > 0) == (r.clusterings > 0)
        constructive = r.constructive_ok if has else True
        if not (chain and constructive and r.ok):
            bad.append(r.instance.to_dict())
    ok = not bad and secs < 300
    report(capsys, 6, "3DM iff isolated triangles iff clustering", ok,
           f"{len(reports)} instances, {sum(r.matching is not None for r in reports)} with a matching, "
           f"{sum(r.connected for r in reports)} connected, failures={len(bad)}, {secs:.1f}s")
    assert ok, bad[:3]


def test_c7_sharpness(capsys):
    fails = []
    c4 = gen_cycle4()
    if not is_cluster(c4, [0, 1], 0.5, 3.0).ok:
        fails.append("C4 pair at 3")
    if is_cluster(c4, [0, 1], 0.5, 3.01).ok:
        fails.append("C4 pair at 3.01")
    pairs = Clustering.from_parts(4, [[0, 1], [2, 3]])
    if not is_clustering(c4, pairs, 0.5, 3.0).ok or is_clustering(c4, pairs, 0.5, 3.01).ok:
        fails.append("C4 consecutive pairing")
    diag = Clustering.from_parts(4, [[0, 2], [1, 3]])
    if is_clustering(c4, diag, 0.5, 3.0).ok:
        fails.append("C4 diagonal pairing")
    # uniform metric: every partition into equal parts of size c is a
    # (c/N, c/(c-1))-clustering, and no more
    uniform_checked = 0
    for N in range(4, 9):
        space = gen_uniform(N)
        for c in range(2, N):
            if N % c:
                continue
            g = c / (c - 1)
            for lab in restricted_growth_strings(N, N // c):
                C = Clustering.from_labels(np.asarray(lab))
                if C.k != N // c or any(len(p) != c for p in C.parts()):
                    continue
                uniform_checked += 1
                if not is_clustering(space, C, c / N, g).ok or is_clustering(space, C, c / N, g * 1.001).ok:
                    fails.append(f"uniform N={N} c={c} {lab}")
    # paired space: 2^n ways to split each pair or keep it
    paired_checked = 0
    for n in range(1, 5):
        for gp in (3.5, 4.0):
            space = gen_paired(n, gp)
            alpha = 1 / (2 * n)
            for keep in itertools.product((True, False), repeat=n):
                parts = []
                for i, k in enumerate(keep):
                    parts += [[2 * i, 2 * i + 1]] if k else [[2 * i], [2 * i + 1]]
                paired_checked += 1
                if not all(is_cluster(space, p, alpha, 3.1).ok for p in parts):
                    fails.append(f"paired n={n} {keep}")
            covers = partitions_into_clusters(2 * n, enumerate_all_clusters(space, alpha, 3.1))
            if len([c for c in covers if all(len(part) <= 2 for part in c)]) != 2 ** n:
                fails.append(f"paired n={n} cover count {len(covers)}")
    ok = not fails
    report(capsys, 7, "sharpness fixtures", ok,
           f"{uniform_checked} uniform partitions, {paired_checked} pair partitions, failures={fails[:3]}")
    assert ok


# ----------------------------------------------------------------------------
# determinism through the command line

def _cli(args, threads, cwd):
    env = dict(os.environ, GAMMACLUST_THREADS=str(threads))
    p = subprocess.run([sys.executable, "-m", "gammaclust.cli", *args], env=env, cwd=cwd,
                       capture_output=True, timeout=300)
    return p.returncode, p.stdout


def test_c8_cli_determinism(tmp_path, capsys):
    d = str(tmp_path)
    setup = [
        ["gen", "euclidean", "--n", "8", "--blobs", "3", "--seed", "5", "--out", "e.json"],
        ["gen", "hierarchical", "--n", "9", "--seed", "2", "--out", "h.json"],
        ["gen", "planted", "--seed", "0", "--out", "p.json", "--labels-out", "pl.json"],
        ["gen", "cycle4", "--out", "c4.json"],
    ]
    for args in setup:
        code, _ = _cli(args, 1, d)
        assert code == 0, args
    (tmp_path / "lab.json").write_text(json.dumps({"k": 2, "labels": [0, 0, 1, 1]}))
    commands = [
        ["gen", "euclidean", "--n", "8", "--blobs", "3", "--seed", "5"],
        ["gen", "planted", "--seed", "3"],
        ["find", "--space", "e.json", "--alpha", "0.25", "--gamma", "2", "--seed", "7"],
        ["find", "--space", "p.json", "--alpha", "0.2", "--gamma", "2", "--m", "7", "--seed", "1"],
        ["oracle", "--space", "e.json", "--alpha", "0.25", "--gamma", "2"],
        ["oracle", "--space", "h.json", "--alpha", "0.2", "--gamma", "4", "--clusters"],
        ["balls", "--space", "h.json", "--alpha", "0.1", "--gamma", "4"],
        ["partition", "--space", "h.json", "--alpha", "0.1", "--gamma", "4", "--min-parts", "2"],
        ["verify", "--space", "c4.json", "--labels", "lab.json", "--alpha", "0.5", "--gamma", "3", "--json"],
        ["verify", "--space", "c4.json", "--labels", "lab.json", "--alpha", "0.5", "--gamma", "3"],
        ["gadget", "--q", "2", "--triples", "1,1,1;2,2,2;1,2,1"],
        ["check-reduction", "--all-q", "2", "--max-triples", "3"],
        ["match25", "--space", "c4.json", "--alpha", "0.5", "--eps", "0.2"],
        ["bounds", "--alpha", "0.25", "--gamma", "2"],
        ["montecarlo", "--space", "p.json", "--labels", "pl.json", "--alpha", "0.2", "--gamma", "2",
         "--trials", "500"],
    ]
    differ = []
    for args in commands:
        outs = set()
        for threads in (1, 4, 8, 1):
            code, out = _cli(args, threads, d)
            outs.add((code, out))
        if len(outs) != 1 or next(iter(outs))[0] != 0:
            differ.append(args[0])
    ok = not differ
    report(capsys, 8, "byte-identical CLI output across 1, 4, 8 threads", ok,
           f"{len(commands)} commands x 4 runs, differing={differ}")
    assert ok
