"""Command-line orchestration: pipelines, suites, exports.

The `treeamalg` binary mirrors the library modules with subcommands
(gen, amalg, hyp, bnd, qi) and adds three orchestration verbs:

    treeamalg run --config exp.json     # pipeline from a config file
    treeamalg suite <name> [--seed N]   # one of the built-in suites
    treeamalg export --in x.json --format dot|json|table

Every produced document carries a "schema" field; run artifacts embed
the tool version, the config hash and the step knobs in a "produced_by"
block, so a report is
reproducible from its own provenance block. Identical config and seed
give byte-identical output. Set TREEAMALG_CACHE to a directory to reuse
generated balls across invocations.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import re
import sys
from dataclasses import dataclass, replace
from pathlib import Path

import jsonschema

from . import __version__
from .amalgam import (AmalgamBundle, AmalgamationSpec, build, build_plus,
                      build_swapped_map, builtin_spec)
from .ball import FiniteBall
from .boundary import (boundary_profile, classify_ray, components_vs_ends,
                       disconnectedness_score, end_profile)
from .errors import SchemaError, TreeAmalgError
from .hyperbolic import ball_for, delta_growth, delta_thin
from .qi import (check_geodesic_preservation, check_plus_vs_contracted,
                 qi_constants)
from .suites import SUITE_NAMES, dumps_report, run_suite

__all__ = ["ExperimentConfig", "run_experiment", "export", "main"]


def _dumps(doc):
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def _cached_ball(generator, radius):
    root = os.environ.get("TREEAMALG_CACHE")
    if not root:
        return ball_for(generator, radius)
    safe = re.sub(r"[^A-Za-z0-9._-]", "-", generator)
    path = Path(root) / f"{safe}-r{radius}.json"
    if path.exists():
        return FiniteBall.loads(path.read_text())
    ball = ball_for(generator, radius)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(ball.dumps())
    return ball


# -- experiment configs ----------------------------------------------------

_STEP_KINDS = ["generate", "amalgamate", "delta", "delta-growth",
               "end-profile", "boundary-profile", "components-vs-ends",
               "qi-psi", "geodesic-preservation"]

_NEEDS_INPUT = {"delta", "end-profile", "boundary-profile",
                "components-vs-ends", "qi-psi", "geodesic-preservation"}

_STEP_SCHEMA = {
    "type": "object",
    "required": ["name", "kind"],
    "properties": {
        "name": {"type": "string", "pattern": "^[A-Za-z0-9_-]+$"},
        "kind": {"enum": _STEP_KINDS},
        "expect": {"type": "object"},
    },
    "allOf": [
        {"if": {"properties": {"kind": {"const": "generate"}},
                "required": ["kind"]},
         "then": {"required": ["generator", "radius"]}},
        {"if": {"properties": {"kind": {"const": "amalgamate"}},
                "required": ["kind"]},
         "then": {"required": ["spec"]}},
        {"if": {"properties": {"kind": {"const": "amalgamate"},
                               "spec": {"type": "string"}},
                "required": ["kind", "spec"]},
         "then": {"required": ["depth"]}},
        {"if": {"properties": {"kind": {"const": "delta-growth"}},
                "required": ["kind"]},
         "then": {"required": ["generator", "radii"]}},
        {"if": {"properties": {"kind": {"enum": sorted(_NEEDS_INPUT)}},
                "required": ["kind"]},
         "then": {"required": ["input"]}},
        {"if": {"properties": {"kind": {"const": "end-profile"}},
                "required": ["kind"]},
         "then": {"required": ["ks"]}},
        {"if": {"properties": {"kind": {"const": "boundary-profile"}},
                "required": ["kind"]},
         "then": {"required": ["t"]}},
        {"if": {"properties": {"kind": {"const": "components-vs-ends"}},
                "required": ["kind"]},
         "then": {"required": ["k", "t"]}},
    ],
}

CONFIG_SCHEMA = {
    "type": "object",
    "required": ["schema", "steps"],
    "properties": {
        "schema": {"const": "experiment/1"},
        "out_dir": {"type": "string"},
        "seed": {"type": "integer", "minimum": 0},
        "steps": {"type": "array", "minItems": 1, "items": _STEP_SCHEMA},
    },
}


def _jsonschema_field(exc):
    path = ".".join(str(p) for p in exc.absolute_path)
    hit = re.search(r"'([^']+)' is a required property", exc.message)
    if hit:
        return f"{path}.{hit.group(1)}" if path else hit.group(1)
    return path or None


@dataclass(frozen=True)
class ExperimentConfig:
    """Validated pipeline description; `raw` keeps the exact input."""

    raw: dict
    steps: tuple
    out_dir: str
    seed: int

    @classmethod
    def from_dict(cls, doc):
        try:
            jsonschema.validate(doc, CONFIG_SCHEMA)
        except jsonschema.ValidationError as exc:
            raise SchemaError(exc.message,
                              field=_jsonschema_field(exc)) from exc
        seen = set()
        for i, step in enumerate(doc["steps"]):
            if step["name"] in seen:
                raise SchemaError(f"duplicate step name {step['name']!r}",
                                  field=f"steps.{i}.name")
            if step["kind"] in _NEEDS_INPUT and step["input"] not in seen:
                raise SchemaError(
                    f"step {step['name']!r} reads {step['input']!r}, which "
                    "is not an earlier step", field=f"steps.{i}.input")
            seen.add(step["name"])
        return cls(raw=doc, steps=tuple(doc["steps"]),
                   out_dir=doc.get("out_dir", "treeamalg-out"),
                   seed=doc.get("seed", 0))

    @property
    def config_hash(self):
        return hashlib.sha256(
            json.dumps(self.raw, sort_keys=True).encode()).hexdigest()


def _input_ball(obj):
    if isinstance(obj, AmalgamBundle):
        return obj.contracted if obj.contracted is not None else obj.plus_graph
    return obj


def _run_step(step, artifacts, config):
    kind = step["kind"]
    if kind == "generate":
        ball = _cached_ball(step["generator"], step["radius"])
        return ball.to_dict(), ball
    if kind == "amalgamate":
        if isinstance(step["spec"], str):
            spec = builtin_spec(step["spec"], step["depth"])
        else:
            spec = AmalgamationSpec.from_dict(step["spec"])
            if "depth" in step:
                spec = replace(spec, tree_depth=step["depth"])
        bundle = build(spec)
        return bundle.to_dict(), bundle
    source = artifacts[step["input"]]
    if kind == "delta":
        report = delta_thin(_input_ball(source),
                            mode=step.get("mode", "exhaustive"),
                            cap=step.get("cap", 60),
                            seed=step.get("seed", config.seed))
        return report.to_dict(), report
    if kind == "delta-growth":
        reports = delta_growth(step["generator"], step["radii"])
        doc = {"schema": "report_series/1",
               "items": [r.to_dict() for r in reports]}
        return doc, doc
    if kind == "end-profile":
        ball = _input_ball(source)
        doc = {"schema": "report_series/1",
               "items": [end_profile(ball, k).to_dict() for k in step["ks"]]}
        return doc, doc
    if kind == "boundary-profile":
        profile = boundary_profile(_input_ball(source), step["t"],
                                   at_radius=step.get("at_radius"))
        return profile.to_dict(), profile
    if kind == "components-vs-ends":
        doc = components_vs_ends(_input_ball(source), step["k"], step["t"],
                                 at_radius=step.get("at_radius"))
        return doc, doc
    if kind == "qi-psi":
        fit = check_plus_vs_contracted(source)
        return fit.to_dict(), fit
    if kind == "geodesic-preservation":
        violations = check_geodesic_preservation(source)
        doc = {"schema": "preservation/1", "count": len(violations),
               "violations": [[c, list(p), list(q)]
                              for c, p, q in violations]}
        return doc, doc
    raise ValueError(f"unknown step kind {kind!r}")


def run_experiment(config):
    """Execute the steps in order, writing one JSON artifact per step.

    Returns the manifest; on a step error the manifest records it and
    the artifacts produced so far are kept.
    """
    out = Path(config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    artifacts = {}
    manifest_steps = []
    expectations_ok = True
    error = None
    for step in config.steps:
        try:
            doc, obj = _run_step(step, artifacts, config)
        except Exception as exc:  # retained as an error manifest
            error = {"step": step["name"], "type": type(exc).__name__,
                     "message": str(exc)}
            break
        artifacts[step["name"]] = obj
        doc = dict(doc)
        doc["produced_by"] = {
            "version": __version__,
            "config_hash": config.config_hash,
            "seed": config.seed,
            "step": step["name"],
            "kind": step["kind"],
            "knobs": {k: v for k, v in step.items()
                      if k not in ("name", "kind", "expect")},
        }
        filename = f"{step['name']}.json"
        (out / filename).write_text(_dumps(doc))
        expected = None
        if "expect" in step:
            expected = all(doc.get(k) == v for k, v in step["expect"].items())
            expectations_ok = expectations_ok and expected
        manifest_steps.append({"name": step["name"], "kind": step["kind"],
                               "file": filename, "expected": expected})
    manifest = {
        "schema": "experiment_manifest/1",
        "version": __version__,
        "config_hash": config.config_hash,
        "seed": config.seed,
        "steps": manifest_steps,
        "error": error,
        "pass": error is None and expectations_ok,
    }
    (out / "manifest.json").write_text(_dumps(manifest))
    return manifest


# -- exports ---------------------------------------------------------------

def _bundle_dot(doc):
    bundle = AmalgamBundle.from_dict(doc)
    tree = bundle.tree
    fill = {1: "lightblue", 2: "lightyellow"}
    lines = ["graph bundle {", "  node [shape=circle, style=filled];"]
    for v, (node, fv) in enumerate(bundle.provenance):
        color = fill[tree.side[node]]
        lines.append(f'  {v} [label="{node}:{fv}", fillcolor={color}];')
    new = {tuple(sorted(e)) for e in bundle.new_edges}
    for u, v in bundle.plus_graph.edges:
        if (u, v) in new:
            lines.append(f"  {u} -- {v} [color=red, style=bold];")
        else:
            lines.append(f"  {u} -- {v};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def _strip(doc):
    doc = dict(doc)
    doc.pop("produced_by", None)
    return doc


def _table_rows(doc):
    schema = doc.get("schema", "")
    if schema == "delta_report/1":
        params = doc.get("params") or {}
        if "generator" in params:
            label = f"{params['generator']} r={params['radius']}"
        else:
            label = f"ball (n={params['n']})" if "n" in params else "ball"
        thin = doc.get("delta_thin")
        thin = "-" if thin is None else thin
        return [f"{label} | delta_thin {thin} | delta4 {doc['delta4']}"]
    if schema == "ball/1":
        return [f"ball n={doc['n']} radius={doc['radius']} "
                f"cert={doc['cert_radius']} complete={doc['complete']}"]
    if schema == "amalgam_bundle/1":
        contracted = doc.get("contracted")
        size = contracted["n"] if contracted else "-"
        return [f"bundle copies={len(doc['tree']['edges']) + 1} "
                f"plus n={doc['plus_graph']['n']} contracted n={size}"]
    if schema == "end_profile/1":
        return [f"k={doc['k']} | ends {doc['count']}"]
    if schema == "boundary_profile/1":
        return [f"t={doc['threshold']} window={doc['at_radius']} | "
                f"clusters {doc['count']}"]
    if schema == "components_vs_ends/1":
        return [f"k={doc['k']} t={doc['t']} | ends {doc['ends']} "
                f"coarse {doc['coarse_clusters']} | match {doc['match']}"]
    if schema == "qi_fit/1":
        return [f"gamma {doc['gamma']} | c {doc['c']} | "
                f"codensity {doc['codensity']}"]
    if schema == "preservation/1":
        return [f"violations {doc['count']}"]
    if schema == "suite_report/1":
        rows = [f"suite {doc['suite']} | seed {doc['seed']} | "
                f"{'PASS' if doc['pass'] else 'FAIL'}"]
        rows += [f"  {'PASS' if c['pass'] else 'FAIL'} | {c['name']}"
                 for c in doc["checks"]]
        return rows
    if schema == "experiment_manifest/1":
        rows = [f"run {doc['config_hash'][:12]} | "
                f"{'PASS' if doc['pass'] else 'FAIL'}"]
        rows += [f"  {s['name']} ({s['kind']}) -> {s['file']}"
                 for s in doc["steps"]]
        if doc.get("error"):
            rows.append(f"  ERROR at {doc['error']['step']}: "
                        f"{doc['error']['message']}")
        return rows
    if schema == "report_series/1":
        rows = []
        for item in doc["items"]:
            rows += _table_rows(item)
        return rows
    raise ValueError(f"no table rendering for schema {schema!r}")


def export(doc, fmt):
    """Render an artifact document as dot, json or table text."""
    if isinstance(doc, list):
        if fmt != "json":
            raise ValueError("list artifacts export as json only")
        if doc and all(isinstance(x, dict) and "k" in x for x in doc):
            doc = sorted(doc, key=lambda x: x["k"])
        return _dumps(doc)
    if fmt == "json":
        return _dumps(doc)
    if fmt == "table":
        return "\n".join(_table_rows(_strip(doc))) + "\n"
    if fmt == "dot":
        schema = doc.get("schema")
        if schema == "ball/1":
            return FiniteBall.from_dict(_strip(doc)).to_dot()
        if schema == "amalgam_bundle/1":
            return _bundle_dot(_strip(doc))
        raise ValueError(f"dot export needs a graph artifact, got {schema!r}")
    raise ValueError(f"unknown format {fmt!r}")


# -- argument plumbing ------------------------------------------------------

def _load(path):
    with open(path) as fh:
        return json.load(fh)


def _ball_arg(path):
    doc = _load(path)
    if doc.get("schema") == "amalgam_bundle/1":
        return _input_ball(AmalgamBundle.from_dict(doc))
    return FiniteBall.from_dict(doc)


def _bundle_arg(path):
    return AmalgamBundle.from_dict(_load(path))


def _emit(text, out):
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _ints(text):
    return [int(x) for x in str(text).split(",") if x != ""]


def _cmd_gen(args):
    if args.target == "cayley":
        ball = _cached_ball(args.name, args.radius)
    elif args.target == "tree":
        ball = _cached_ball(f"tree-{args.p1}-{args.p2}", args.depth)
    else:
        ball = _cached_ball("grid", args.radius)
    _emit(ball.dumps(), args.out)
    return 0


def _cmd_amalg(args):
    if args.target == "build":
        if args.spec:
            spec = AmalgamationSpec.from_dict(_load(args.spec))
            if args.depth is not None:
                spec = replace(spec, tree_depth=args.depth)
        else:
            if args.depth is None:
                raise ValueError("--depth is required with --name")
            spec = builtin_spec(args.name, args.depth)
        bundle = build_plus(spec) if args.plus_only else build(spec)
        _emit(_dumps(bundle.to_dict()), args.out)
        return 0
    first = _bundle_arg(args.bundle)
    second = _bundle_arg(args.bundle2) if args.bundle2 else first
    f1 = _load(args.f1) if args.f1 else list(range(first.spec.factor1.n))
    f2 = _load(args.f2) if args.f2 else list(range(first.spec.factor2.n))
    swapped = build_swapped_map(first, second, f1, f2)
    _emit(_dumps(swapped.to_dict()), args.out)
    return 0


def _cmd_hyp(args):
    if args.target == "delta":
        report = delta_thin(_ball_arg(args.infile), mode=args.mode,
                            cap=args.cap, seed=args.seed)
        _emit(_dumps(report.to_dict()), args.out)
        return 0
    reports = delta_growth(args.gen, _ints(args.radii))
    doc = {"schema": "report_series/1",
           "items": [r.to_dict() for r in reports]}
    _emit(_dumps(doc), args.out)
    return 0


def _cmd_bnd(args):
    if args.target == "ends":
        ball = _ball_arg(args.infile)
        doc = {"schema": "report_series/1",
               "items": [end_profile(ball, k).to_dict()
                         for k in _ints(args.ks)]}
    elif args.target == "profile":
        doc = boundary_profile(_ball_arg(args.infile), args.t,
                               at_radius=args.at_radius).to_dict()
    elif args.target == "classify":
        doc = classify_ray(_bundle_arg(args.bundle),
                           _ints(args.ray)).to_dict()
    elif args.target == "compare":
        doc = components_vs_ends(_ball_arg(args.infile), args.k, args.t,
                                 at_radius=args.at_radius)
    else:
        score = disconnectedness_score(_ball_arg(args.infile),
                                       at_radius=args.at_radius)
        doc = {"schema": "disconnectedness/1", "score": score}
    _emit(_dumps(doc), args.out)
    return 0


def _cmd_qi(args):
    if args.target == "fit":
        pairs = _load(args.map)
        dom = _ball_arg(args.dom)
        vertex_map = [None] * dom.n
        for item in pairs:
            u, v = int(item[0]), int(item[1])
            vertex_map[u] = v
        if any(v is None for v in vertex_map):
            missing = [u for u, v in enumerate(vertex_map) if v is None]
            raise ValueError(f"map file misses domain vertices {missing[:5]}")
        fit = qi_constants(vertex_map, dom, _ball_arg(args.cod))
        doc = fit.to_dict()
    elif args.target == "preserve":
        violations = check_geodesic_preservation(_bundle_arg(args.bundle))
        doc = {"schema": "preservation/1", "count": len(violations),
               "violations": [[c, list(p), list(q)]
                              for c, p, q in violations]}
    else:
        doc = check_plus_vs_contracted(_bundle_arg(args.bundle)).to_dict()
    _emit(_dumps(doc), args.out)
    return 0


def _cmd_run(args):
    config = ExperimentConfig.from_dict(_load(args.config))
    manifest = run_experiment(config)
    sys.stdout.write(_dumps(manifest))
    if manifest["error"] is not None:
        return 2
    return 0 if manifest["pass"] else 1


def _cmd_suite(args):
    if args.list:
        sys.stdout.write("\n".join(SUITE_NAMES) + "\n")
        return 0
    if not args.name:
        raise ValueError("suite name required (or --list)")
    report = run_suite(args.name, seed=args.seed)
    _emit(dumps_report(report), args.out)
    return 0 if report["pass"] else 1


def _cmd_export(args):
    _emit(export(_load(args.infile), args.format), args.out)
    return 0


def _parser():
    parser = argparse.ArgumentParser(
        prog="treeamalg",
        description="Finite truncations of tree amalgamations: build, "
                    "measure, compare.")
    parser.add_argument("--version", action="version",
                        version=f"treeamalg {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate a ball")
    gen_sub = gen.add_subparsers(dest="target", required=True)
    cayley = gen_sub.add_parser("cayley")
    cayley.add_argument("--name", required=True,
                        help="free2, z, z2, surface2, c2*c3, ...")
    cayley.add_argument("--radius", type=int, required=True)
    cayley.add_argument("--out")
    tree = gen_sub.add_parser("tree")
    tree.add_argument("--p1", type=int, required=True)
    tree.add_argument("--p2", type=int, required=True)
    tree.add_argument("--depth", type=int, required=True)
    tree.add_argument("--out")
    grid = gen_sub.add_parser("grid")
    grid.add_argument("--radius", type=int, required=True)
    grid.add_argument("--out")
    gen.set_defaults(func=_cmd_gen)

    amalg = sub.add_parser("amalg", help="build bundles and swap maps")
    amalg_sub = amalg.add_subparsers(dest="target", required=True)
    ab = amalg_sub.add_parser("build")
    ab.add_argument("--name", help="builtin spec name")
    ab.add_argument("--spec", help="amalgam_spec/1 JSON file")
    ab.add_argument("--depth", type=int)
    ab.add_argument("--plus-only", action="store_true")
    ab.add_argument("--out")
    am = amalg_sub.add_parser("map")
    am.add_argument("--bundle", required=True)
    am.add_argument("--bundle2")
    am.add_argument("--f1", help="JSON list: factor-1 bijection")
    am.add_argument("--f2", help="JSON list: factor-2 bijection")
    am.add_argument("--out")
    amalg.set_defaults(func=_cmd_amalg)

    hyp = sub.add_parser("hyp", help="hyperbolicity constants")
    hyp_sub = hyp.add_subparsers(dest="target", required=True)
    hd = hyp_sub.add_parser("delta")
    hd.add_argument("--in", dest="infile", required=True)
    hd.add_argument("--mode", default="exhaustive",
                    help="exhaustive or sampled:N")
    hd.add_argument("--cap", type=int, default=60)
    hd.add_argument("--seed", type=int, default=0)
    hd.add_argument("--out")
    hg = hyp_sub.add_parser("growth")
    hg.add_argument("--gen", required=True)
    hg.add_argument("--radii", required=True, help="comma separated")
    hg.add_argument("--out")
    hyp.set_defaults(func=_cmd_hyp)

    bnd = sub.add_parser("bnd", help="ends and boundary profiles")
    bnd_sub = bnd.add_subparsers(dest="target", required=True)
    be = bnd_sub.add_parser("ends")
    be.add_argument("--in", dest="infile", required=True)
    be.add_argument("--ks", required=True, help="comma separated depths")
    be.add_argument("--out")
    bp = bnd_sub.add_parser("profile")
    bp.add_argument("--in", dest="infile", required=True)
    bp.add_argument("--t", type=int, required=True)
    bp.add_argument("--at-radius", type=int, dest="at_radius")
    bp.add_argument("--out")
    bc = bnd_sub.add_parser("classify")
    bc.add_argument("--bundle", required=True)
    bc.add_argument("--ray", required=True, help="comma separated vertices")
    bc.add_argument("--out")
    bv = bnd_sub.add_parser("compare")
    bv.add_argument("--in", dest="infile", required=True)
    bv.add_argument("--k", type=int, required=True)
    bv.add_argument("--t", type=int, required=True)
    bv.add_argument("--at-radius", type=int, dest="at_radius")
    bv.add_argument("--out")
    bs = bnd_sub.add_parser("score")
    bs.add_argument("--in", dest="infile", required=True)
    bs.add_argument("--at-radius", type=int, dest="at_radius")
    bs.add_argument("--out")
    bnd.set_defaults(func=_cmd_bnd)

    qi = sub.add_parser("qi", help="quasi-isometry checks")
    qi_sub = qi.add_subparsers(dest="target", required=True)
    qf = qi_sub.add_parser("fit")
    qf.add_argument("--map", required=True,
                    help="JSON array of [domain id, codomain id]")
    qf.add_argument("--dom", required=True)
    qf.add_argument("--cod", required=True)
    qf.add_argument("--out")
    qp = qi_sub.add_parser("preserve")
    qp.add_argument("--bundle", required=True)
    qp.add_argument("--out")
    qs = qi_sub.add_parser("psi")
    qs.add_argument("--bundle", required=True)
    qs.add_argument("--out")
    qi.set_defaults(func=_cmd_qi)

    run = sub.add_parser("run", help="run a config-file pipeline")
    run.add_argument("--config", required=True)
    run.set_defaults(func=_cmd_run)

    suite = sub.add_parser("suite", help="run a built-in suite")
    suite.add_argument("name", nargs="?")
    suite.add_argument("--seed", type=int, default=0)
    suite.add_argument("--out")
    suite.add_argument("--list", action="store_true")
    suite.set_defaults(func=_cmd_suite)

    exp = sub.add_parser("export", help="render an artifact")
    exp.add_argument("--in", dest="infile", required=True)
    exp.add_argument("--format", required=True,
                     choices=["dot", "json", "table"])
    exp.add_argument("--out")
    exp.set_defaults(func=_cmd_export)
    return parser


def main(argv=None):
    args = _parser().parse_args(argv)
    try:
        return args.func(args)
    except (TreeAmalgError, ValueError, OSError) as exc:
        print(f"treeamalg: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
