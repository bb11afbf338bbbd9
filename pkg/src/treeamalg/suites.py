"""Built-in experiment suites.

Each suite re-runs one of the library's headline checks on a fixed,
fully specified corpus and reports per-check pass/fail. Suites never
sample, so two runs with the same seed produce byte-identical reports;
the seed is still threaded through and recorded for reproducibility of
any future sampled variant.
"""

from __future__ import annotations

import hashlib
import json

from . import __version__
from .amalgam import build, builtin_spec
from .boundary import (boundary_profile, components_vs_ends,
                       disconnectedness_score, end_profile)
from .hyperbolic import ball_for, delta_growth
from .qi import check_geodesic_preservation, check_plus_vs_contracted

__all__ = ["SUITE_NAMES", "run_suite", "dumps_report"]


def _check(name, ok, **details):
    entry = {"name": name, "pass": bool(ok)}
    entry.update(details)
    return entry


def _suite_geodesic_preservation(seed):
    corpus = [["k3-singletons", 2], ["c6-pair", 2], ["z-pair", 2],
              ["free-pair", 2]]
    knobs = {"bundles": corpus}
    checks = []
    for name, depth in corpus:
        violations = check_geodesic_preservation(
            build(builtin_spec(name, depth)))
        checks.append(_check(
            f"{name} depth {depth}: within-copy geodesics survive contraction",
            not violations, violations=len(violations)))
    return knobs, checks


def _suite_psi_stability(seed):
    specs = ["z-pair", "free-pair"]
    depths = [2, 3, 4]
    knobs = {"specs": specs, "depths": depths}
    checks = []
    for name in specs:
        zero = check_plus_vs_contracted(build(builtin_spec(name, 0)))
        checks.append(_check(
            f"{name} depth 0 contraction is an isometry",
            (str(zero.gamma), str(zero.c)) == ("1", "0"),
            fit=zero.to_dict()))
        fits = [check_plus_vs_contracted(build(builtin_spec(name, d)))
                for d in depths]
        stable = len({(f.gamma, f.c, f.codensity) for f in fits}) == 1
        checks.append(_check(
            f"{name} fit identical across depths {depths}",
            stable, fits=[f.to_dict() for f in fits]))
    return knobs, checks


# (ball key, window radius, max k and t) per corpus entry; window None
# means the raw ball radius
_CVE_CORPUS = [
    ["tree-3-3", 8, 4, 2],
    ["grid", 12, 6, 3],
    ["tree-2-2", 8, 4, 2],
    ["amalgam:k3-singletons", 4, 2, 1],
    ["amalgam:z-pair", 2, 2, 1],
]


def _suite_components_vs_ends(seed):
    knobs = {"corpus": _CVE_CORPUS}
    checks = []
    for gen, radius, window, span in _CVE_CORPUS:
        ball = ball_for(gen, radius)
        for k in range(1, span + 1):
            for t in range(1, span + 1):
                rep = components_vs_ends(ball, k, t, at_radius=window)
                checks.append(_check(
                    f"{gen} r{radius} k={k} t={t}: "
                    f"{rep['ends']} ends vs {rep['coarse_clusters']} coarse",
                    rep["match"], ends=rep["ends"],
                    coarse=rep["coarse_clusters"]))
    return knobs, checks


def _suite_tree_disconnectedness(seed):
    # deep balls profiled at half radius, so escape bounds decide every pair
    trees = [["tree-3-3", 8, 4], ["tree-2-3", 8, 4], ["free2", 6, 3]]
    knobs = {"trees": trees, "control": ["grid", 12, 6]}
    checks = []
    for gen, radius, window in trees:
        ball = ball_for(gen, radius)
        profile = boundary_profile(ball, window, at_radius=window)
        score = disconnectedness_score(ball, at_radius=window)
        checks.append(_check(
            f"{gen} window {window}: full-threshold boundary is all singletons",
            profile.all_singletons, clusters=profile.count))
        checks.append(_check(
            f"{gen} window {window}: disconnectedness threshold found",
            score is not None, score=score))
    grid = ball_for("grid", 12)
    rep = components_vs_ends(grid, 3, 3, at_radius=6)
    checks.append(_check(
        "grid window 6 at half threshold: one coarse cluster per component",
        rep["clusters"] == rep["ends"] == 1, report=rep))
    return knobs, checks


def _suite_delta_growth(seed):
    grid_radii = [2, 4, 6]
    depths = [1, 2, 3, 4]
    knobs = {"grid_radii": grid_radii, "amalgam": "k3-singletons",
             "amalgam_depths": depths}
    grid = delta_growth("grid", grid_radii)
    series = [r.delta4_x2 for r in grid]
    checks = [_check(
        f"grid delta4 strictly increases over radii {grid_radii}",
        all(a < b for a, b in zip(series, series[1:])),
        delta4_x2=series)]
    amalg = delta_growth("amalgam:k3-singletons", depths)
    aseries = [r.delta4_x2 for r in amalg]
    checks.append(_check(
        f"k3-singletons delta4 stays within depth-1 value + 1",
        all(v <= aseries[0] + 2 for v in aseries), delta4_x2=aseries))
    return knobs, checks


def _suite_finite_factor_tree(seed):
    knobs = {"amalgam": ["k3-singletons", 4], "tree": ["tree-3-3", 4],
             "ks": [1, 2, 3], "window": {"at_radius": 2, "t": 1}}
    amalg = ball_for("amalgam:k3-singletons", 4)
    tree = ball_for("tree-3-3", 4)
    checks = []
    for k in (1, 2, 3):
        a = end_profile(amalg, k).count
        b = end_profile(tree, k).count
        checks.append(_check(
            f"end growth at k={k}: {a} vs {b} within factor 2",
            b <= 2 * a and a <= 2 * b, amalgam=a, tree=b))
    pa = boundary_profile(amalg, 1, at_radius=2)
    pb = boundary_profile(tree, 1, at_radius=2)
    checks.append(_check(
        f"boundary clusters at window 2, threshold 1: "
        f"{pa.count} vs {pb.count} within factor 2",
        pb.count <= 2 * pa.count and pa.count <= 2 * pb.count,
        amalgam=pa.count, tree=pb.count))
    return knobs, checks


_SUITES = {
    "lemma-geodesic-preservation": _suite_geodesic_preservation,
    "psi-qi-stability": _suite_psi_stability,
    "components-vs-ends": _suite_components_vs_ends,
    "tree-boundary-disconnectedness": _suite_tree_disconnectedness,
    "delta-growth-contrast": _suite_delta_growth,
    "finite-factor-tree-comparison": _suite_finite_factor_tree,
}

SUITE_NAMES = tuple(sorted(_SUITES))


def run_suite(name, seed=0):
    if name not in _SUITES:
        raise ValueError(
            f"unknown suite {name!r}; available: {', '.join(SUITE_NAMES)}")
    knobs, checks = _SUITES[name](seed)
    ident = {"suite": name, "seed": seed, "version": __version__,
             "knobs": knobs}
    config_hash = hashlib.sha256(
        json.dumps(ident, sort_keys=True).encode()).hexdigest()
    return {
        "schema": "suite_report/1",
        "suite": name,
        "version": __version__,
        "seed": seed,
        "knobs": knobs,
        "config_hash": config_hash,
        "checks": checks,
        "pass": all(c["pass"] for c in checks),
    }


def dumps_report(report):
    return json.dumps(report, sort_keys=True, indent=2) + "\n"
