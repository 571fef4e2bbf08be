"""Tests for JSON and CSV export."""

import hashlib
import json
from fractions import Fraction

import pandas as pd
import pytest

from dskplab import __version__
from dskplab.forests import enumerate_tree_forest, quadrangulate_aztec
from dskplab.limitshape import asymptotic_scan
from dskplab.poly import MultiPoly
from dskplab.services.export_service import (
    ExportService,
    configurations_payload,
    polynomial_payload,
)


class TestExportJson:
    """Tests for JSON documents."""

    def test_export_json(self, tmp_path):
        """Test the written document, its version stamp and digest."""
        output = tmp_path / "out" / "z.json"
        stats = ExportService().export_json({"graph": "aztec:1", "Z": "7/2"}, output)
        document = json.loads(output.read_text())
        assert document["dskp_lab_version"] == __version__
        assert document["Z"] == "7/2"
        assert stats.records == 2
        assert stats.file_size_bytes == output.stat().st_size
        assert stats.sha256 == ExportService.file_sha256(output)

    def test_identical_inputs_identical_bytes(self, tmp_path):
        """Test that key order does not change the output."""
        service = ExportService()
        first = service.export_json({"a": 1, "b": [1, 2]}, tmp_path / "first.json")
        second = service.export_json({"b": [1, 2], "a": 1}, tmp_path / "second.json")
        assert first.sha256 == second.sha256

    def test_polynomial_payload(self):
        """Test the polynomial summary."""
        x, y = MultiPoly.variable("x"), MultiPoly.variable("y")
        payload = polynomial_payload(x * y + y, "N", k=1)
        assert payload["name"] == "N"
        assert payload["k"] == 1
        assert payload["monomials"] == 2
        assert payload["degree"] == 2

    def test_configurations_payload(self):
        """Test that limit caps the listed configurations only."""
        q = quadrangulate_aztec(1)
        payload = configurations_payload(q, enumerate_tree_forest(q), limit=2)
        assert payload["count"] == 6
        assert payload["listed"] == 2
        assert len(payload["configurations"]) == 2
        assert payload["configurations"][0]["sign"] in (1, -1)


class TestExportCsv:
    """Tests for limit-shape scan CSV files."""

    def test_scan_columns(self, tmp_path):
        """Test the five scan columns in order."""
        frame = asymptotic_scan(Fraction(7, 10), 8, [-0.5, 0.0], [0.0, 0.5])
        output = tmp_path / "scan.csv"
        stats = ExportService().export_scan_csv(frame, output)
        lines = output.read_text().splitlines()
        assert lines[0] == "x,y,rho,k_rho,log_rate"
        assert len(lines) == 5
        assert stats.records == 4

    def test_zero_rho_warning(self, tmp_path):
        """Test the warning for points outside the light cone."""
        frame = asymptotic_scan(Fraction(7, 10), 8, [1.0], [1.0])
        stats = ExportService().export_scan_csv(frame, tmp_path / "scan.csv")
        assert len(stats.warnings) == 1
        assert "log_rate is -inf" in stats.warnings[0]

    def test_missing_columns(self, tmp_path):
        """Test that a frame without the scan columns is rejected."""
        with pytest.raises(ValueError, match="missing columns"):
            ExportService().export_scan_csv(pd.DataFrame({"x": [0.0]}), tmp_path / "bad.csv")


class TestFileDigest:
    """Tests for the input file digest."""

    def test_digest_matches_hashlib(self, tmp_path):
        """Test the digest of a small file."""
        path = tmp_path / "weights.json"
        path.write_bytes(b"Hello, World!")
        expected = "dffd6021bb2bd5b0af676290809ec3a53191dd81c7f70a4b28688a362182986f"
        assert ExportService.file_sha256(path) == expected

    def test_chunked_read(self, tmp_path):
        """Test that a small chunk size gives the same digest."""
        payload = bytes(range(256)) * 10
        path = tmp_path / "weights.json"
        path.write_bytes(payload)
        expected = hashlib.sha256(payload).hexdigest()
        assert ExportService.file_sha256(path, chunk_size=64) == expected

    def test_empty_file(self, tmp_path):
        """Test the digest of an empty file."""
        path = tmp_path / "empty.json"
        path.touch()
        expected = "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855"
        assert ExportService.file_sha256(path) == expected

    def test_missing_and_directory(self, tmp_path):
        """Test the errors for a missing path and a directory."""
        with pytest.raises(FileNotFoundError, match="No input file"):
            ExportService.file_sha256(tmp_path / "missing.json")
        with pytest.raises(ValueError, match="not a regular file"):
            ExportService.file_sha256(tmp_path)
