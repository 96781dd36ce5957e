import json
import subprocess
import sys

from subforge.cli import main


def _report(out_dir):
    with open(out_dir / "report.json", encoding="utf-8") as fh:
        return json.load(fh)


def test_run_f2(tmp_path):
    out = tmp_path / "f2"
    code = main(["run", "--preset", "f2", "--radius", "6", "--out", str(out)])
    assert code == 0
    report = _report(out)
    assert report["cone_types"]["count"] == 5
    assert report["xi"]["total_horizontal"] == 0
    assert all(report["checks"].values())


def test_run_writes_exports(tmp_path):
    out = tmp_path / "z"
    code = main(
        ["run", "--preset", "z", "--radius", "4", "--out", str(out), "--export", "dot,json"]
    )
    assert code == 0
    for name in (
        "report.json",
        "gamma.dot",
        "gamma.json",
        "xi.dot",
        "xi.json",
        "acceptor.dot",
        "acceptor.json",
        "subdivisions.dot",
        "subdivisions.json",
    ):
        assert (out / name).exists(), name
    xi = json.loads((out / "xi.json").read_text())
    assert len(xi["vertices"]) == 9
    assert len(xi["vertical_edges"]) == 8
    assert xi["horizontal_edges"] == []


def test_acceptor_export_counts(tmp_path):
    out = tmp_path / "acc"
    code = main(
        ["export", "--preset", "f2", "--radius", "4", "--what", "acceptor", "--format", "json", "--out", str(out)]
    )
    assert code == 0
    acc = json.loads((out / "acceptor.json").read_text())
    assert len(acc["states"]) == 5
    assert len(acc["transitions"]) == 16
    assert acc["all_accepting"] is True


def test_subdivisions_export_f2(tmp_path):
    out = tmp_path / "subs"
    code = main(
        ["export", "--preset", "f2", "--radius", "5", "--what", "subdivisions", "--format", "json", "--out", str(out)]
    )
    assert code == 0
    subs = json.loads((out / "subdivisions.json").read_text())
    assert len(subs["vertex_subdivisions"]) == 5
    assert len(subs["edge_subdivisions"]) == 0


def test_exit_code_on_config_error(tmp_path):
    assert main(["run", "--preset", "f2", "--radius", "0", "--out", str(tmp_path)]) == 1
    assert main(["run", "--preset", "f2", "--radius", "4", "--horizon", "9", "--out", str(tmp_path)]) == 1


def test_exit_code_on_cap(tmp_path):
    out = tmp_path / "cap"
    code = main(["run", "--preset", "f2", "--radius", "6", "--cap", "50", "--out", str(out)])
    assert code == 1
    report = _report(out)
    assert report["status"] == "aborted"
    assert sum(report["ball"]["partial_sphere_sizes"]) >= 50


def test_oracle_override_free_with_relators_errors(tmp_path):
    code = main(
        ["run", "--preset", "surface2", "--radius", "2", "--oracle", "free", "--out", str(tmp_path / "x")]
    )
    assert code == 1


def test_oracle_override_dehn_on_free_group(tmp_path):
    out = tmp_path / "dehn"
    code = main(["run", "--preset", "f2", "--radius", "4", "--oracle", "dehn", "--out", str(out)])
    assert code == 0
    assert _report(out)["presentation"]["oracle"] == "dehn"


def test_export_missing_artifact_errors(tmp_path):
    # label corruption breaks conditions 5/6, so no subdivision tables exist
    code = main(
        [
            "export", "--preset", "f2", "--radius", "5", "--corrupt-vertex-label",
            "--what", "subdivisions", "--format", "json", "--out", str(tmp_path / "m"),
        ]
    )
    assert code == 1


def test_presentation_file_input(tmp_path):
    path = tmp_path / "pres.txt"
    path.write_text("gens: a A b B\n")
    out = tmp_path / "out"
    code = main(["run", "--file", str(path), "--radius", "3", "--out", str(out)])
    assert code == 0
    assert _report(out)["presentation"]["generators"] == ["a", "A", "b", "B"]


def test_odd_relator_file_pipeline(tmp_path):
    from test_ball import ODD_RELATOR

    path = tmp_path / "odd.txt"
    path.write_text(f"gens: a A b B\nrelators: {ODD_RELATOR}\n")
    out = tmp_path / "odd-out"
    code = main(["run", "--file", str(path), "--radius", "3", "--out", str(out)])
    assert code == 0
    report = _report(out)
    assert report["presentation"]["oracle"] == "dehn"
    assert report["small_cancellation"]["satisfies_c16"]
    assert all(report["checks"].values())


def test_non_c16_file_is_operational_error(tmp_path):
    path = tmp_path / "torus.txt"
    path.write_text("gens: a A b B\nrelators: abAB\n")
    assert main(["run", "--file", str(path), "--radius", "3", "--out", str(tmp_path / "t")]) == 1


def test_missing_file_errors(tmp_path):
    assert main(["run", "--file", str(tmp_path / "nope.txt"), "--radius", "3", "--out", str(tmp_path)]) == 1


def test_cache_dir_roundtrip(tmp_path):
    cache = tmp_path / "cache"
    out1, out2 = tmp_path / "a", tmp_path / "b"
    assert main(["run", "--preset", "f2", "--radius", "4", "--cache-dir", str(cache), "--out", str(out1)]) == 0
    assert len(list(cache.iterdir())) == 1
    assert main(["run", "--preset", "f2", "--radius", "4", "--cache-dir", str(cache), "--out", str(out2)]) == 0
    r1, r2 = _report(out1), _report(out2)
    assert r1["ball"] == r2["ball"]


def test_console_entry_point(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "subforge.cli", "presets"],
        capture_output=True,
        text=True,
        check=False,
    )
    assert proc.returncode == 0
    assert "surface2" in proc.stdout


def test_report_records_config(tmp_path):
    out = tmp_path / "cfg"
    main(["run", "--preset", "z", "--radius", "5", "--seed", "7", "--out", str(out)])
    cfg = _report(out)["config"]
    assert cfg["seed"] == 7 and cfg["radius"] == 5 and cfg["preset"] == "z"
