import json
import subprocess
import sys

import pytest

from concirc.cli import ConfigError, RunConfig, main, run

MANIFEST = {
    "name": "my_minkowski",
    "dimension": 4,
    "coordinates": ["t", "x1", "x2", "x3"],
    "metric": [["-1", "0", "0", "0"], ["0", "1", "0", "0"], ["0", "0", "1", "0"], ["0", "0", "0", "1"]],
    "pi": ["0", "0", "0", "0"],
    "omega": "0",
    "sampling_box": [[-1, 1]] * 4,
}


def verify(capsys, *args):
    code = main(["verify", *args])
    out = capsys.readouterr()
    return code, out.out, out.err


class TestVerify:
    def test_de_sitter_json(self, capsys):
        code, out, _ = verify(capsys, "--manifold", "de_sitter_grw", "--dim", "4", "--suites",
                              "grw,symmetry,fluid,efe", "--k", "1", "--format", "json", "--points", "8")
        assert code == 0
        report = json.loads(out)
        assert report["schema_version"] == 1
        assert report["manifold"] == {"name": "de_sitter_grw", "dim": 4}
        efe = next(s for s in report["suites"] if s["name"] == "efe")
        vals = [c["value"] for c in efe["checks"] if c["id"] == "efe.sigma_plus_3p"]
        assert len(vals) == 8
        assert all(abs(v + 6) < 1e-9 for v in vals)
        assert report["summary"]["failed"] == 0

    def test_closed_grw_symmetry(self, capsys):
        code, out, _ = verify(capsys, "--manifold", "closed_grw", "--dim", "4", "--suites", "symmetry",
                              "--format", "json", "--points", "4")
        assert code == 0
        checks = json.loads(out)["suites"][0]["checks"]
        r0 = [c for c in checks if c["id"] == "thm.einstein.r0ric0"]
        assert r0 and all(c["mode"] == "expect_nonzero" and c["pass"] for c in r0)

    def test_unknown_manifold(self, capsys):
        code, out, err = verify(capsys, "--manifold", "nosuch")
        assert code == 2
        assert "unknown manifold" in err
        assert out == ""

    def test_report_schema(self, capsys):
        code, out, _ = verify(capsys, "--manifold", "sphere_concircular", "--suites", "general,fluid",
                              "--format", "json", "--points", "2")
        report = json.loads(out)
        assert set(report) == {"schema_version", "manifold", "config", "suites", "summary"}
        assert set(report["summary"]) == {"total", "passed", "failed", "skipped"}
        general, fluid = report["suites"]
        assert general["status"] == "run" and fluid["status"] == "skipped"
        assert report["summary"]["skipped"] == 1
        for c in general["checks"]:
            assert {"id", "paper_ref", "point", "residual", "tolerance", "mode", "pass"} <= set(c)
            assert len(c["point"]) == 3

    def test_failure_exit_code(self, capsys):
        # an absurdly small zero tolerance makes the closed-form checks fail
        code, out, _ = verify(capsys, "--manifold", "closed_grw", "--suites", "grw", "--points", "2",
                              "--tol-zero", "1e-300", "--format", "json")
        report = json.loads(out)
        assert code == 1
        assert report["summary"]["failed"] > 0

    def test_byte_identical(self, capsys):
        args = ("--manifold", "closed_grw", "--suites", "grw,fluid", "--points", "3", "--format", "json")
        _, first, _ = verify(capsys, *args)
        _, second, _ = verify(capsys, *args)
        assert first == second

    def test_seed_changes_points(self, capsys):
        base = ("--manifold", "closed_grw", "--suites", "grw", "--points", "2", "--format", "json")
        _, a, _ = verify(capsys, *base, "--seed", "1")
        _, b, _ = verify(capsys, *base, "--seed", "2")
        assert a != b

    def test_text_report(self, capsys):
        code, out, _ = verify(capsys, "--manifold", "kottler", "--points", "2")
        assert code == 0
        assert out.startswith("manifold kottler (n=4)")
        assert "[symmetry]" in out and "sym.weyl_commutator" in out
        assert "[grw] skipped" in out

    def test_out_file(self, capsys, tmp_path):
        target = tmp_path / "report.json"
        code, out, _ = verify(capsys, "--manifold", "minkowski", "--points", "2", "--format", "json",
                              "--out", str(target))
        assert code == 0 and out == ""
        assert json.loads(target.read_text())["manifold"]["name"] == "minkowski"

    def test_manifest(self, capsys, tmp_path):
        path = tmp_path / "m.json"
        path.write_text(json.dumps(MANIFEST))
        code, out, _ = verify(capsys, "--manifest", str(path), "--points", "2", "--format", "json")
        assert code == 0
        report = json.loads(out)
        assert report["manifold"]["name"] == "my_minkowski"
        assert [s["status"] for s in report["suites"]] == ["run", "skipped", "run", "skipped", "skipped", "skipped"]

    def test_bad_manifest(self, capsys, tmp_path):
        path = tmp_path / "m.json"
        path.write_text(json.dumps({**MANIFEST, "dimension": 2}))
        code, _, err = verify(capsys, "--manifest", str(path))
        assert code == 2 and err.startswith("error:")
        code, _, err = verify(capsys, "--manifest", str(tmp_path / "missing.json"))
        assert code == 2

    @pytest.mark.parametrize("args", [
        ("--manifold", "closed_grw", "--points", "0"),
        ("--manifold", "closed_grw", "--k", "0"),
        ("--manifold", "closed_grw", "--tol-zero", "1e-2"),
        ("--manifold", "closed_grw", "--suites", "grw,magic"),
        ("--manifold", "closed_grw", "--dim", "9"),
        ("--manifold", "closed_grw", "--format", "xml"),
        ("--manifold", "closed_grw", "--manifest", "x.json"),
        ("--points", "3",),
        ("--manifold", "closed_grw", "--points", "many"),
    ])
    def test_bad_flags(self, capsys, args):
        code, out, err = verify(capsys, *args)
        assert code == 2
        assert err.startswith("error:")


class TestList:
    def test_text(self, capsys):
        assert main(["list"]) == 0
        lines = capsys.readouterr().out.strip().splitlines()
        assert len(lines) == 7
        assert any(line.startswith("closed_grw") and "omega=1.0" in line for line in lines)
        assert any(line.startswith("cylinder_concircular") and "omega=0.0" in line for line in lines)

    def test_json(self, capsys):
        assert main(["list", "--format", "json"]) == 0
        rows = json.loads(capsys.readouterr().out)
        assert len(rows) == 7
        assert {"name", "dims", "suites", "omega"} <= set(rows[0])

    def test_missing_command(self, capsys):
        assert main([]) == 2


class TestRunConfig:
    def test_run_returns_code_and_text(self):
        code, text = run(RunConfig(manifold="de_sitter_grw", suites=("efe",), points=2, format="json"))
        assert code == 0
        assert json.loads(text)["config"]["suites"] == ["efe"]

    def test_needs_one_source(self):
        with pytest.raises(ConfigError):
            RunConfig()
        with pytest.raises(ConfigError):
            RunConfig(manifold="a", manifest="b")


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "concirc.cli", "list"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert "kottler" in proc.stdout
