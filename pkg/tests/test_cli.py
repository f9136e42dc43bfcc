"""
Tests for the command-line interface.
"""

import json
import math

import pytest

from qpcocycle.cli import main, merge_options, normalize_keys

HINGE = {"matrix": [[{"coeffs": [[-1, 1.0, 0.0]]}, 0], [0, 1]], "label": "hinge"}


@pytest.fixture
def identity_file(tmp_path):
    path = tmp_path / "identity.json"
    path.write_text(json.dumps({"matrix": [[1, 0], [0, 1]], "label": "identity"}), encoding="utf-8")
    return str(path)


@pytest.fixture
def hinge_file(tmp_path):
    path = tmp_path / "hinge.json"
    path.write_text(json.dumps(HINGE), encoding="utf-8")
    return str(path)


def run(capsys, *argv):
    """Run the CLI and return (exit code, stdout, stderr)."""
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_normalize_keys():
    """Dashes become underscores and lambda/E map to field names."""
    assert normalize_keys({"--eps-min": 1, "lambda": "0,1,0", "E": 2}) == {
        "eps_min": 1,
        "coupling": "0,1,0",
        "energy": 2,
    }


def test_flags_override_config_file(tmp_path):
    """Command-line values win over config file values."""
    path = tmp_path / "run.json"
    path.write_text(json.dumps({"lambda": "0,0.5,0", "eps": 0.1}), encoding="utf-8")
    merged = merge_options({"config": str(path), "eps": 0.2})
    assert merged == {"coupling": "0,0.5,0", "eps": 0.2}


class TestRegion:
    def test_almost_mathieu(self, capsys):
        """The region report for (0, 1/2, 0) carries the closed forms and the dual coupling."""
        code, out, _ = run(capsys, "region", "--lambda", "0,0.5,0")
        assert code == 0
        report = json.loads(out)
        assert report["schema_version"] == "1.0"
        assert report["command"] == "region"
        assert report["inputs"]["lambda"] == "0,0.5,0"
        outputs = report["outputs"]
        assert outputs["region"] == "I"
        assert outputs["criticality"] == "supercritical"
        assert outputs["le_on_spectrum"] == pytest.approx(math.log(2))
        assert outputs["aubry_andre_le"] == pytest.approx(math.log(2))
        assert outputs["dual"] == "0,2,0"
        assert outputs["dual_region"] == "II"
        assert "runtime_s" not in report["diagnostics"]

    def test_config_file(self, capsys, tmp_path):
        """Options load from a JSON file and --timings adds the runtime."""
        path = tmp_path / "region.json"
        path.write_text(json.dumps({"lambda": "0.5,0.2,0.2", "eps": 0.1}), encoding="utf-8")
        code, out, _ = run(capsys, "region", "--config", str(path), "--eps", "0.2", "--timings")
        assert code == 0
        report = json.loads(out)
        assert report["inputs"] == {"lambda": "0.5,0.2,0.2", "eps": 0.2}
        assert "runtime_s" in report["diagnostics"]

    def test_csv_without_rows_prints_outputs(self, capsys):
        """Without rows the CSV table is the outputs as one record."""
        code, out, _ = run(capsys, "region", "--lambda", "0,0.5,0", "--format", "csv")
        assert code == 0
        header = out.splitlines()[0].split(",")
        assert "region" in header
        assert "L_M" in header

    @pytest.mark.parametrize("coupling", ["1,2", "a,1,1", "0,0,0"])
    def test_bad_coupling(self, capsys, coupling):
        """Inadmissible couplings exit with code 2 and nothing on stdout."""
        code, out, err = run(capsys, "region", "--lambda", coupling)
        assert code == 2
        assert out == ""
        assert err.startswith("error:")

    def test_missing_config_file(self, capsys, tmp_path):
        """An absent config file is an input error."""
        code, _, err = run(capsys, "region", "--config", str(tmp_path / "absent.json"))
        assert code == 2
        assert "config file not found" in err


class TestLe:
    def test_identity_matrix_rational(self, capsys, identity_file):
        """The identity cocycle has exponent 0."""
        code, out, _ = run(capsys, "le", "--matrix", identity_file, "--beta", "1/3", "--backend", "rational")
        assert code == 0
        report = json.loads(out)
        assert report["outputs"]["le"] == pytest.approx(0.0, abs=1e-12)
        assert report["outputs"]["backend"] == "rational"
        assert report["diagnostics"]["quad_points"] == 192

    def test_iterative_rows(self, capsys, identity_file):
        """Rows list the doubling checkpoints up to n."""
        code, out, _ = run(capsys, "le", "--matrix", identity_file, "--n", "16", "--phases", "2")
        assert code == 0
        report = json.loads(out)
        assert [row["n"] for row in report["rows"]] == [1, 2, 4, 8, 16]
        assert report["outputs"]["le"] == pytest.approx(0.5 * math.log(2) / 16)

    def test_rational_backend_needs_rational_beta(self, capsys, identity_file):
        """The rational backend rejects the default golden frequency."""
        code, _, err = run(capsys, "le", "--matrix", identity_file, "--backend", "rational")
        assert code == 2
        assert "rational" in err

    def test_missing_matrix_file(self, capsys, tmp_path):
        """An absent matrix file is an input error."""
        code, _, err = run(capsys, "le", "--matrix", str(tmp_path / "none.json"))
        assert code == 2
        assert "matrix file not found" in err


class TestSweepAndAccel:
    def test_csv_table(self, capsys, hinge_file):
        """The sweep table has a header and one line per grid point."""
        code, out, _ = run(
            capsys, "sweep", "--matrix", hinge_file, "--beta", "1/3", "--backend", "rational",
            "--steps", "5", "--format", "csv",
        )
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[0] == "eps,le,omega,kink"
        assert len(lines) == 6

    def test_output_file(self, capsys, hinge_file, tmp_path):
        """With --output the table goes to the file and the report to stdout."""
        target = tmp_path / "out" / "sweep.csv"
        code, out, _ = run(
            capsys, "sweep", "--matrix", hinge_file, "--beta", "1/3", "--backend", "rational",
            "--eps-min", "-0.5", "--eps-max", "0.5", "--steps", "21",
            "--format", "csv", "--output", str(target),
        )
        assert code == 0
        assert len(target.read_text(encoding="utf-8").strip().splitlines()) == 22
        report = json.loads(out)
        assert report["outputs"]["kinks"] == pytest.approx([0.0], abs=1e-9)
        assert report["outputs"]["convex"] is True

    def test_accel_reports_kink(self, capsys, hinge_file):
        """A point next to the kink reports both one-sided slopes."""
        code, out, _ = run(
            capsys, "accel", "--matrix", hinge_file, "--beta", "1/3", "--backend", "rational",
            "--steps", "21", "--at", "0.3", "0.02",
        )
        assert code == 0
        report = json.loads(out)
        smooth, kink = report["rows"]
        assert smooth["nearest_int"] == 1
        assert smooth["at_kink"] is False
        assert kink["at_kink"] is True
        assert kink["left_slope"] == pytest.approx(0.0, abs=1e-6)
        assert kink["right_slope"] == pytest.approx(1.0, abs=1e-6)
        assert report["outputs"]["points_at_kinks"] == 1


class TestDuality:
    def test_dual_coupling(self, capsys):
        """Fractions stay exact in the dual coupling."""
        code, out, _ = run(capsys, "duality", "--lambda", "1/2,1/5,1/5")
        assert code == 0
        outputs = json.loads(out)["outputs"]
        assert outputs["dual"] == "1,5,5/2"
        assert outputs["region"] == "I"
        assert outputs["dual_region"] == "II"

    def test_check_needs_region_one(self, capsys):
        """The numeric identity check is limited to region I."""
        code, _, err = run(capsys, "duality", "--lambda", "1,0.5,0.5", "--check", "--energies", "0", "--n", "10")
        assert code == 2
        assert "region I" in err

    def test_zero_lambda2(self, capsys):
        """l2 = 0 has no dual."""
        code, _, _ = run(capsys, "duality", "--lambda", "1,0,1")
        assert code == 2


class TestVerify:
    def test_unknown_panel(self):
        """argparse rejects panels it does not know."""
        with pytest.raises(SystemExit) as info:
            main(["verify", "everything"])
        assert info.value.code == 2

    def test_missing_panel(self, capsys):
        """verify without a panel is an input error."""
        code, _, err = run(capsys, "verify")
        assert code == 2
        assert "panel" in err
