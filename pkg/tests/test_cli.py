"""Config validation, pipeline runs, exports and the CLI surface."""

import json

import pytest

from treeamalg.amalgam import build, builtin_spec
from treeamalg.cli import ExperimentConfig, export, main, run_experiment
from treeamalg.errors import SchemaError
from treeamalg.hyperbolic import DeltaReport, ball_for, delta_thin
from treeamalg.suites import SUITE_NAMES, dumps_report, run_suite


def config_doc(steps, **extra):
    doc = {"schema": "experiment/1", "steps": steps}
    doc.update(extra)
    return doc


# -- config validation ------------------------------------------------------

def test_config_missing_depth_names_field():
    doc = config_doc([{"name": "a", "kind": "amalgamate", "spec": "z-pair"}])
    with pytest.raises(SchemaError) as err:
        ExperimentConfig.from_dict(doc)
    assert err.value.field == "steps.0.depth"


def test_config_missing_radius_names_field():
    doc = config_doc([{"name": "a", "kind": "generate", "generator": "z"}])
    with pytest.raises(SchemaError) as err:
        ExperimentConfig.from_dict(doc)
    assert err.value.field == "steps.0.radius"


def test_config_unknown_kind_names_field():
    doc = config_doc([{"name": "a", "kind": "frobnicate"}])
    with pytest.raises(SchemaError) as err:
        ExperimentConfig.from_dict(doc)
    assert err.value.field == "steps.0.kind"


def test_config_duplicate_step_names():
    step = {"name": "a", "kind": "generate", "generator": "z", "radius": 2}
    with pytest.raises(SchemaError) as err:
        ExperimentConfig.from_dict(config_doc([step, dict(step)]))
    assert err.value.field == "steps.1.name"


def test_config_input_must_be_earlier_step():
    doc = config_doc([
        {"name": "d", "kind": "delta", "input": "later"},
        {"name": "later", "kind": "generate", "generator": "z", "radius": 2},
    ])
    with pytest.raises(SchemaError) as err:
        ExperimentConfig.from_dict(doc)
    assert err.value.field == "steps.0.input"


def test_config_defaults_and_hash():
    doc = config_doc([{"name": "g", "kind": "generate",
                       "generator": "z", "radius": 2}])
    config = ExperimentConfig.from_dict(doc)
    assert config.out_dir == "treeamalg-out"
    assert config.seed == 0
    assert config.config_hash == ExperimentConfig.from_dict(doc).config_hash
    assert len(config.config_hash) == 64


# -- run_experiment ---------------------------------------------------------

def pipeline_doc(out_dir):
    return config_doc([
        {"name": "ball", "kind": "generate", "generator": "grid",
         "radius": 3, "expect": {"schema": "ball/1"}},
        {"name": "flat", "kind": "delta", "input": "ball",
         "expect": {"delta4": "1"}},
        {"name": "zz", "kind": "amalgamate", "spec": "z-pair", "depth": 2},
        {"name": "psi", "kind": "qi-psi", "input": "zz",
         "expect": {"gamma": "1", "c": "1"}},
        {"name": "geo", "kind": "geodesic-preservation", "input": "zz",
         "expect": {"count": 0}},
        {"name": "cve", "kind": "components-vs-ends", "input": "zz",
         "k": 1, "t": 1, "at_radius": 2, "expect": {"match": True}},
    ], out_dir=str(out_dir))


def test_run_experiment_full_pipeline(tmp_path):
    config = ExperimentConfig.from_dict(pipeline_doc(tmp_path / "out"))
    manifest = run_experiment(config)
    assert manifest["pass"] is True
    assert manifest["error"] is None
    assert all(s["expected"] in (True, None) for s in manifest["steps"])
    out = tmp_path / "out"
    assert (out / "manifest.json").exists()
    for step in manifest["steps"]:
        doc = json.loads((out / step["file"]).read_text())
        stamp = doc["produced_by"]
        assert stamp["config_hash"] == config.config_hash
        assert stamp["step"] == step["name"]
        assert stamp["kind"] == step["kind"]
        assert "expect" not in stamp["knobs"]
        assert "name" not in stamp["knobs"]


def test_run_experiment_failed_expectation(tmp_path):
    doc = config_doc([{"name": "ball", "kind": "generate", "generator": "z",
                       "radius": 3, "expect": {"n": 99}}],
                     out_dir=str(tmp_path / "out"))
    manifest = run_experiment(ExperimentConfig.from_dict(doc))
    assert manifest["pass"] is False
    assert manifest["steps"][0]["expected"] is False
    path = tmp_path / "exp.json"
    path.write_text(json.dumps(doc))
    assert main(["run", "--config", str(path)]) == 1


def test_run_experiment_error_keeps_partials(tmp_path):
    doc = config_doc([
        {"name": "ball", "kind": "generate", "generator": "z", "radius": 3},
        {"name": "bad", "kind": "amalgamate", "spec": "no-such", "depth": 1},
    ], out_dir=str(tmp_path / "out"))
    manifest = run_experiment(ExperimentConfig.from_dict(doc))
    assert manifest["pass"] is False
    assert manifest["error"]["step"] == "bad"
    assert manifest["error"]["type"] == "ValueError"
    assert "no-such" in manifest["error"]["message"]
    assert (tmp_path / "out" / "ball.json").exists()
    assert not (tmp_path / "out" / "bad.json").exists()
    path = tmp_path / "exp.json"
    path.write_text(json.dumps(doc))
    assert main(["run", "--config", str(path)]) == 2


def test_run_experiment_bytes_reproducible(tmp_path):
    config = ExperimentConfig.from_dict(pipeline_doc(tmp_path / "out"))
    run_experiment(config)
    first = {p.name: p.read_bytes()
             for p in (tmp_path / "out").iterdir()}
    run_experiment(config)
    second = {p.name: p.read_bytes()
              for p in (tmp_path / "out").iterdir()}
    assert first == second
    assert len(first) == 7  # 6 steps + manifest


# -- exports ----------------------------------------------------------------

def test_export_k2_bundle_dot_single_new_edge():
    bundle = build(builtin_spec("k2-single", 1))
    text = export(bundle.to_dict(), "dot")
    assert text.count("color=red, style=bold") == 1
    assert "lightblue" in text and "lightyellow" in text
    assert text.count(" -- ") == len(bundle.plus_graph.edges)


def test_export_ball_dot_marks_frontier():
    ball = ball_for("tree-2-2", 3)
    text = export(ball.to_dict(), "dot")
    assert "peripheries=2" in text


def test_export_delta_table_row():
    report = delta_thin(ball_for("tree-3-3", 4))
    doc = dict(report.to_dict(),
               params={"generator": "tree-3-3", "radius": 4})
    assert export(doc, "table") == "tree-3-3 r=4 | delta_thin 0 | delta4 0\n"
    bare = DeltaReport(delta_thin_x2=0, delta4_x2=0, method="exhaustive",
                       triples_checked=1, certified_fraction=1.0)
    assert export(bare.to_dict(), "table") == "ball | delta_thin 0 | delta4 0\n"


def test_export_end_profile_list_sorted_by_k():
    profiles = [{"schema": "end_profile/1", "k": 3, "count": 1},
                {"schema": "end_profile/1", "k": 1, "count": 1}]
    rendered = json.loads(export(profiles, "json"))
    assert [p["k"] for p in rendered] == [1, 3]
    with pytest.raises(ValueError):
        export(profiles, "table")


def test_export_rejects_unknown_targets():
    ball = ball_for("grid", 1)
    with pytest.raises(ValueError):
        export(ball.to_dict(), "svg")
    with pytest.raises(ValueError):
        export({"schema": "mystery/9"}, "table")
    with pytest.raises(ValueError):
        export({"schema": "qi_fit/1"}, "dot")


def test_export_table_ignores_produced_by():
    doc = dict(ball_for("grid", 1).to_dict(), produced_by={"seed": 0})
    assert export(doc, "table").startswith("ball n=")


# -- the command line -------------------------------------------------------

def test_cli_gen_amalg_map_identity(tmp_path):
    bundle_path = tmp_path / "zp.json"
    map_path = tmp_path / "map.json"
    assert main(["amalg", "build", "--name", "z-pair", "--depth", "1",
                 "--out", str(bundle_path)]) == 0
    assert main(["amalg", "map", "--bundle", str(bundle_path),
                 "--out", str(map_path)]) == 0
    doc = json.loads(map_path.read_text())
    assert doc["schema"] == "swapped_map/1"
    assert doc["vertex_map"] == list(range(len(doc["vertex_map"])))


def test_cli_qi_fit_from_map_file(tmp_path, capsys):
    ball_path = tmp_path / "grid.json"
    main(["gen", "grid", "--radius", "2", "--out", str(ball_path)])
    n = json.loads(ball_path.read_text())["n"]
    map_path = tmp_path / "map.json"
    map_path.write_text(json.dumps([[v, v] for v in range(n)]))
    assert main(["qi", "fit", "--map", str(map_path), "--dom",
                 str(ball_path), "--cod", str(ball_path)]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert (doc["gamma"], doc["c"]) == ("1", "0")

    map_path.write_text(json.dumps([[0, 0]]))
    assert main(["qi", "fit", "--map", str(map_path), "--dom",
                 str(ball_path), "--cod", str(ball_path)]) == 1
    assert "misses domain vertices" in capsys.readouterr().err


def test_cli_bnd_score(tmp_path, capsys):
    ball_path = tmp_path / "tree.json"
    main(["gen", "tree", "--p1", "3", "--p2", "3", "--depth", "8",
          "--out", str(ball_path)])
    assert main(["bnd", "score", "--in", str(ball_path),
                 "--at-radius", "4"]) == 0
    assert json.loads(capsys.readouterr().out)["score"] == 4


def test_cli_hyp_growth_series(capsys):
    assert main(["hyp", "growth", "--gen", "tree-2-2",
                 "--radii", "1,2"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["schema"] == "report_series/1"
    assert [item["params"]["radius"] for item in doc["items"]] == [1, 2]


def test_cli_suite_list_and_run(tmp_path, capsys):
    assert main(["suite", "--list"]) == 0
    assert capsys.readouterr().out.split() == list(SUITE_NAMES)
    report_path = tmp_path / "report.json"
    assert main(["suite", "delta-growth-contrast", "--out",
                 str(report_path)]) == 0
    assert json.loads(report_path.read_text())["pass"] is True
    assert main(["suite", "no-such-suite"]) == 1
    assert main(["suite"]) == 1


def test_suite_reports_bytes_reproducible():
    one = dumps_report(run_suite("delta-growth-contrast", seed=7))
    two = dumps_report(run_suite("delta-growth-contrast", seed=7))
    assert one == two
    assert json.loads(one)["seed"] == 7


def test_cli_cache_roundtrip(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("TREEAMALG_CACHE", str(tmp_path / "cache"))
    main(["gen", "cayley", "--name", "z", "--radius", "3"])
    first = capsys.readouterr().out
    cached = tmp_path / "cache" / "z-r3.json"
    assert cached.exists()
    main(["gen", "cayley", "--name", "z", "--radius", "3"])
    assert capsys.readouterr().out == first

    # second call must come from the cache, not a rebuild
    poison = ball_for("grid", 1).dumps()
    cached.write_text(poison)
    main(["gen", "cayley", "--name", "z", "--radius", "3"])
    assert capsys.readouterr().out == poison


def test_cli_errors_exit_one(tmp_path, capsys):
    assert main(["gen", "cayley", "--name", "no-such-group",
                 "--radius", "2"]) == 1
    assert "treeamalg:" in capsys.readouterr().err
    assert main(["export", "--in", str(tmp_path / "missing.json"),
                 "--format", "json"]) == 1
    assert main(["amalg", "build", "--name", "z-pair"]) == 1  # no --depth
