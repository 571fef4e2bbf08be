"""Service for writing experiment results to JSON and CSV files."""

import hashlib
import json
import logging
import os
import tempfile
from dataclasses import dataclass, field
from functools import partial
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional

import numpy as np
import pandas as pd

from dskplab import __version__
from dskplab.forests import Quadrangulation, TreeForestConfig
from dskplab.limitshape import SCAN_COLUMNS
from dskplab.poly import MultiPoly

logger = logging.getLogger(__name__)


@dataclass
class ExportStats:
    """Statistics from export operation."""
    output_path: str
    records: int = 0
    file_size_bytes: int = 0
    sha256: str = ""
    warnings: List[str] = field(default_factory=list)


def polynomial_payload(poly: MultiPoly, name: str = "Z", **meta: Any) -> Dict[str, Any]:
    """Monomial count, degree and canonical text of a polynomial."""
    return {
        "name": name,
        **meta,
        "monomials": len(poly),
        "degree": poly.degree() if poly else 0,
        "text": poly.to_text(),
    }


def configurations_payload(
    q: Quadrangulation, configs: List[TreeForestConfig], limit: Optional[int] = None
) -> Dict[str, Any]:
    """Tree/forest configurations with their signs; limit caps the listed ones."""
    listed = configs if limit is None else configs[:limit]
    return {
        "count": len(configs),
        "listed": len(listed),
        "quadrangulation": q.to_dict(),
        "configurations": [c.to_dict(q) for c in listed],
    }


class ExportService:
    """Service for writing results atomically; identical inputs give identical bytes."""

    def __init__(self, indent: int = 2):
        self.indent = indent

    @staticmethod
    def file_sha256(path: Path, chunk_size: int = 1 << 16) -> str:
        """Hex digest of an input file, read chunk by chunk.

        Raises:
            FileNotFoundError: If nothing exists at path
            ValueError: If path is not a regular file
        """
        if not path.is_file():
            if path.exists():
                raise ValueError(f"{path} is not a regular file")
            raise FileNotFoundError(f"No input file at {path}")
        digest = hashlib.sha256()
        with path.open("rb") as f:
            for chunk in iter(partial(f.read, chunk_size), b""):
                digest.update(chunk)
        return digest.hexdigest()

    def _write_atomic(self, output_path: Path, payload: bytes) -> None:
        output_path.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp_name = tempfile.mkstemp(
            prefix=f".{output_path.name}.", suffix=".tmp", dir=output_path.parent
        )
        try:
            with os.fdopen(fd, "wb") as f:
                f.write(payload)
            os.replace(tmp_name, output_path)
        except BaseException:
            if os.path.exists(tmp_name):
                os.unlink(tmp_name)
            raise

    def render_json(self, payload: Mapping[str, Any]) -> bytes:
        document = {"dskp_lab_version": __version__, **payload}
        return (json.dumps(document, indent=self.indent, sort_keys=True) + "\n").encode("utf-8")

    def export_json(self, payload: Mapping[str, Any], output_path: Path) -> ExportStats:
        """Write a JSON document.

        Args:
            payload: JSON-ready mapping, as produced by the to_dict methods
            output_path: Destination file, replaced atomically

        Returns:
            ExportStats with size and digest of the written file
        """
        logger.info(f"Starting export to {output_path}")
        body = self.render_json(payload)
        self._write_atomic(output_path, body)
        stats = ExportStats(
            output_path=str(output_path),
            records=len(payload),
            file_size_bytes=len(body),
            sha256=hashlib.sha256(body).hexdigest(),
        )
        logger.info(f"Wrote {stats.file_size_bytes:,} bytes to {output_path}")
        return stats

    def export_scan_csv(self, frame: pd.DataFrame, output_path: Path) -> ExportStats:
        """Write a limit-shape scan with the columns x, y, rho, k_rho, log_rate.

        Raises:
            ValueError: If a scan column is missing
        """
        missing = [c for c in SCAN_COLUMNS if c not in frame.columns]
        if missing:
            raise ValueError(f"Scan is missing columns: {', '.join(missing)}")
        logger.info(f"Starting export to {output_path}")
        body = frame[SCAN_COLUMNS].to_csv(index=False, float_format="%.12g").encode("utf-8")
        self._write_atomic(output_path, body)
        stats = ExportStats(
            output_path=str(output_path),
            records=len(frame),
            file_size_bytes=len(body),
            sha256=hashlib.sha256(body).hexdigest(),
        )
        nonfinite = int((~np.isfinite(frame["log_rate"].astype(float))).sum())
        if nonfinite:
            stats.warnings.append(f"{nonfinite} grid points have rho = 0, log_rate is -inf there")
        logger.info(f"Wrote {stats.records:,} rows to {output_path}")
        return stats
