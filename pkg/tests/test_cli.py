#!/usr/bin/env python3
"""
Tests for the command-line front end
"""
import io
import json
from unittest.mock import patch

import numpy as np
import pytest

from src.cli import build_parser, run
from src.config.parameters import EXIT_NUMERIC, EXIT_OK, EXIT_VALIDATION
from src.models.schemas import MatrixModel


def run_json(argv, capsys):
    code = run(argv)
    out = capsys.readouterr().out
    return code, json.loads(out) if out.strip() else None


@pytest.fixture
def write(tmp_path):
    def _write(name, payload):
        path = tmp_path / name
        path.write_text(payload if isinstance(payload, str) else json.dumps(payload))
        return str(path)
    return _write


def gallery(capsys, family, params=None):
    argv = ["gallery", family] + (["--params", json.dumps(params)] if params else [])
    code, data = run_json(argv, capsys)
    assert code == EXIT_OK
    return data


class TestGalleryCommand:
    """Test family listing and generation"""

    @pytest.mark.unit
    def test_list_families(self, capsys):
        """Test listing with and without a kind filter"""
        code, data = run_json(["gallery"], capsys)
        assert code == EXIT_OK
        assert "stormer" in {f["name"] for f in data["families"]}
        _, maps = run_json(["gallery", "--kind", "map"], capsys)
        assert all(f["kind"] == "map" for f in maps["families"])

    @pytest.mark.unit
    def test_fixture_payload(self, capsys):
        """Test the Stormer fixture bundles the state and its witness map"""
        data = gallery(capsys, "stormer", {"mu": 2.0})
        assert data["family"] == "stormer" and data["mu"] == 2.0
        assert data["triple"]["class"] == "CLDUI"
        assert data["witness_map"]["class"] == "CDUC"

    @pytest.mark.unit
    def test_projector(self, capsys):
        """Test projector output and its required dimension"""
        code, data = run_json(["gallery", "--projector", "flip_F", "--dim", "2"], capsys)
        assert code == EXIT_OK
        assert (data["rows"], data["cols"]) == (4, 4)
        code, data = run_json(["gallery", "--projector", "flip_F"], capsys)
        assert code == EXIT_VALIDATION
        assert "--dim" in data["error"]


class TestMatrixCommands:
    """Test build, extract, check, spectrum, rank and permute"""

    @pytest.mark.unit
    def test_build_extract_round_trip(self, capsys, write):
        """Test a Werner triple survives build and extract with its class"""
        triple = gallery(capsys, "werner", {"a": 1.0, "b": 0.5, "d": 3})
        code, matrix = run_json(["build", write("t.json", triple), "--class", "LDUI"], capsys)
        assert code == EXIT_OK and matrix["rows"] == 9
        code, back = run_json(["extract", write("x.json", matrix)], capsys)
        assert code == EXIT_OK
        assert back["class"] == "LDUI"
        assert np.allclose(MatrixModel(**back["C"]).to_numpy(), MatrixModel(**triple["C"]).to_numpy())

    @pytest.mark.unit
    def test_project(self, capsys, write):
        """Test projecting a dense matrix keeps the invariant entries"""
        doc = MatrixModel.from_numpy(np.arange(16.0).reshape(4, 4)).model_dump()
        code, data = run_json(["project", write("x.json", doc), "--class", "LDUI"], capsys)
        assert code == EXIT_OK
        P = MatrixModel(**data).to_numpy()
        assert P[0, 1] == 0 and P[1, 2] == 6

    @pytest.mark.unit
    def test_check_flags(self, capsys, write):
        """Test the default PSD report and the selected tests"""
        path = write("t.json", gallery(capsys, "maximally_entangled", {"d": 3}))
        code, data = run_json(["check", path], capsys)
        assert code == EXIT_OK and set(data) == {"psd"}
        assert data["psd"]["passed"] is True
        _, data = run_json(["check", path, "--ppt", "--realignment", "--state"], capsys)
        assert data["ppt"]["passed"] is False
        assert data["realignment"]["passed"] is False
        assert data["state"] is False

    @pytest.mark.unit
    def test_check_channel_and_positivity(self, capsys, write):
        """Test map properties and the seeded positivity search"""
        path = write("m.json", gallery(capsys, "transposition", {"d": 3}))
        _, data = run_json(["check", path, "--channel"], capsys)
        assert data["channel"] is False
        assert data["map_properties"]["ccp"] is True
        _, data = run_json(["check", path, "--positivity", "--seed", "0", "--budget", "200"], capsys)
        assert data["positivity"]["necessary"]["passed"] is True
        assert data["positivity"]["falsifier"]["found"] is False
        code, data = run_json(["check", path, "--positivity"], capsys)
        assert code == EXIT_VALIDATION
        assert "--seed" in data["error"]

    @pytest.mark.unit
    def test_spectrum_rank_permute(self, capsys, write):
        """Test block-wise spectra, ranks and leg permutations"""
        path = write("m.json", gallery(capsys, "identity", {"d": 3}))
        _, data = run_json(["rank", path], capsys)
        assert data == {"class": "CLDUI", "rank": 1}
        _, data = run_json(["spectrum", path], capsys)
        eigenvalues = sorted(re for re, _ in data["eigenvalues"])
        assert eigenvalues[-1] == pytest.approx(3.0)
        assert eigenvalues[0] == pytest.approx(0.0, abs=1e-12)
        _, data = run_json(["permute", path, "--perm", "gamma"], capsys)
        assert MatrixModel(**data["C"]).to_numpy()[0, 1] == 1


class TestMapCommands:
    """Test compose, apply and kraus"""

    @pytest.mark.unit
    def test_compose_transpositions(self, capsys, write):
        """Test T o T is the identity, tagged CDUC"""
        path = write("t.json", gallery(capsys, "transposition", {"d": 2}))
        code, data = run_json(["compose", path, path], capsys)
        assert code == EXIT_OK
        assert data["class"] == "CDUC"

    @pytest.mark.unit
    def test_apply_from_stdin(self, capsys, write, monkeypatch):
        """Test the matrix argument defaults to stdin"""
        path = write("t.json", gallery(capsys, "transposition", {"d": 2}))
        Z = np.array([[1.0, 2.0], [3.0, 4.0]])
        monkeypatch.setattr("sys.stdin", io.StringIO(json.dumps(MatrixModel.from_numpy(Z).model_dump())))
        code, data = run_json(["apply", path], capsys)
        assert code == EXIT_OK
        assert np.allclose(MatrixModel(**data).to_numpy(), Z.T)

    @pytest.mark.unit
    def test_kraus(self, capsys, write):
        """Test the identity has one covariant Kraus pair"""
        path = write("m.json", gallery(capsys, "identity", {"d": 3}))
        _, data = run_json(["kraus", path], capsys)
        assert data["rank"] == 1
        assert data["covariant"] is True


class TestSeparabilityCommands:
    """Test certify, detect and validate-catalog"""

    @pytest.mark.integration
    def test_certify(self, capsys, write):
        """Test a Werner endpoint is certified with a witness"""
        path = write("t.json", gallery(capsys, "werner", {"a": 1.0, "b": -0.5, "d": 2}))
        _, data = run_json(["certify", path], capsys)
        assert data["certified"] is True
        assert data["witness"] is not None
        _, data = run_json(["certify", write("nontcp.json", gallery(capsys, "ppt_nontcp"))], capsys)
        assert data == {"certified": False}

    @pytest.mark.integration
    def test_detect_fixture_from_stdin(self, capsys, monkeypatch):
        """Test the gallery fixture pipes straight into detect"""
        fixture = gallery(capsys, "stormer", {"mu": 1.0})
        monkeypatch.setattr("sys.stdin", io.StringIO(json.dumps(fixture)))
        code, data = run_json(["detect", "--budget", "200", "--exhaustive"], capsys)
        assert code == EXIT_OK
        assert data["outcome"] == "ENTANGLED"
        assert data["certificate"] == "realignment"
        assert "input_map(3)" in data["certificates"]

    @pytest.mark.integration
    def test_detect_separable(self, capsys, write):
        """Test --triple reads the state from a file"""
        path = write("t.json", gallery(capsys, "werner", {"a": 1.0, "b": -0.5, "d": 2}))
        _, data = run_json(["detect", "--triple", path], capsys)
        assert data["outcome"] == "SEPARABLE"
        assert "witness" in data

    @pytest.mark.integration
    def test_validate_catalog(self, capsys):
        """Test the bundled catalog screens clean for d = 2, 3"""
        code, data = run_json(["validate-catalog", "--dims", "2", "3", "--budget", "200"], capsys)
        assert code == EXIT_OK
        assert data["accepted"] is True
        assert {e["id"] for e in data["entries"]} >= {"transposition(2)", "lambda(3)"}


class TestExitCodes:
    """Test error reporting and exit codes"""

    @pytest.mark.unit
    def test_help_and_usage_errors(self, capsys):
        """Test --help exits cleanly and bad usage maps to the validation code"""
        assert run(["--help"]) == EXIT_OK
        assert run(["no-such-command"]) == EXIT_VALIDATION
        assert run(["permute", "--perm", "sideways"]) == EXIT_VALIDATION
        capsys.readouterr()

    @pytest.mark.unit
    def test_validation_errors(self, capsys, write):
        """Test malformed JSON, missing files and non-state input"""
        code, data = run_json(["check", write("bad.json", "{")], capsys)
        assert code == EXIT_VALIDATION and "Malformed JSON" in data["error"]
        code, data = run_json(["check", "does-not-exist.json"], capsys)
        assert code == EXIT_VALIDATION
        path = write("t.json", gallery(capsys, "werner", {"a": 1.0, "b": 2.0, "d": 3}))
        code, data = run_json(["detect", path], capsys)
        assert code == EXIT_VALIDATION
        assert "Not a state candidate" in data["error"]

    @pytest.mark.unit
    def test_numeric_failure(self, capsys, write):
        """Test linear-algebra failures map to the numeric exit code"""
        path = write("t.json", gallery(capsys, "werner", {"a": 1.0, "b": 0.5, "d": 3}))
        with patch("src.cli.certify_tcp", side_effect=np.linalg.LinAlgError("SVD did not converge")):
            code, data = run_json(["certify", path], capsys)
        assert code == EXIT_NUMERIC
        assert "SVD" in data["error"]

    @pytest.mark.unit
    def test_plain_value_error_stays_validation(self, capsys, write):
        """Test a ValueError that is not a LinAlgError keeps the validation exit code"""
        path = write("t.json", gallery(capsys, "werner", {"a": 1.0, "b": 0.5, "d": 3}))
        with patch("src.cli.certify_tcp", side_effect=ValueError("bad triple")):
            code, data = run_json(["certify", path], capsys)
        assert code == EXIT_VALIDATION
        assert data["error"] == "bad triple"

    @pytest.mark.unit
    def test_parser_subcommands(self):
        """Test every subcommand is registered"""
        parser = build_parser()
        commands = parser._subparsers._group_actions[0].choices
        assert set(commands) == {
            "build", "extract", "project", "check", "spectrum", "rank", "permute", "compose",
            "apply", "kraus", "detect", "certify", "gallery", "validate-catalog",
        }


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
