###############################################################################
# pulsed-dnp: pulsed dynamic nuclear polarization of small 13C clusters.
# Copyright © 2026 the pulsed-dnp developers. All rights reserved.
# Portions derived from PrOMMiS IDAES connectivity, Copyright © 2024-2025
# The Regents of the University of California, et al.
# See LICENSE.md and COPYRIGHT.md for terms.
###############################################################################
"""
Result tables, JSON documents and the provenance record of a command.
"""
# stdlib
import abc
from datetime import datetime, timezone
from io import StringIO
import json
import logging
from pathlib import Path
from typing import Any, Dict, List, Optional, TextIO, Union

# third-party
import numpy as np
from pandas import DataFrame

# package
from pulsed_dnp.const import OutputFormats, RunMode
from pulsed_dnp.engine import RunResult, pair_coherence_map, pair_density_matrix
from pulsed_dnp.util import CSV_FLOAT_FORMAT, json_default
from pulsed_dnp.version import VERSION

__author__ = "pulsed-dnp developers"

_log = logging.getLogger(__name__)

PROVENANCE_FILE = "provenance.json"


class Formatter(abc.ABC):
    """Base class for formatters, which write a result in a form other tools
    can read.
    """

    def __init__(self, data: Any):
        self._data = data

    def write(self, output_file: Union[str, Path, TextIO, None]) -> Optional[str]:
        """Write the formatted output.

        Args:
            output_file: The output file. It can be a filename or file object.
                         The special value `None` means return the text as a string.

        Returns:
            If `None` was given as the *output_file*, return the text as a string.
            Otherwise, return None.
        """
        if output_file is None:
            f = self._get_output_stream(output_file)
            self._body(f)
            return self._write_return(f)
        if hasattr(output_file, "write"):
            self._body(output_file)
            return None
        with open(output_file, "w", encoding="utf-8", newline="") as f:
            self._body(f)
        return None

    @abc.abstractmethod
    def _body(self, outfile: TextIO):
        pass

    def _write_return(self, f):
        """Call this at the end of the write() methods."""
        if isinstance(f, StringIO):
            f.flush()
            return f.getvalue()
        return None

    @staticmethod
    def _get_output_stream(output_file):
        if output_file is None:
            return StringIO()
        return output_file


class CSVTable(Formatter):
    """Table as CSV with 6 significant digits."""

    def _body(self, outfile: TextIO):
        self._data.to_csv(outfile, index=False, float_format=CSV_FLOAT_FORMAT, lineterminator="\n")


class JSONDocument(Formatter):
    """Mapping as indented JSON at full precision."""

    def _body(self, outfile: TextIO):
        json.dump(self._data, outfile, indent=2, sort_keys=True, default=json_default)
        outfile.write("\n")


def complex_matrix(m: np.ndarray) -> Dict[str, list]:
    m = np.asarray(m)
    return {"real": m.real.tolist(), "imag": m.imag.tolist()}


def run_summary(label: str, result: RunResult, config_hash: str) -> Dict[str, Any]:
    """One row describing the end point of a run."""
    row = {
        "config_hash": config_hash,
        "system": label,
        "mode": result.mode.value,
        "n_nuc": result.system.n_nuc,
        "n_rep": result.n_rep,
        "f_n_mhz": result.system.f_n,
        "tau_pol_us": result.spec.tau_pol,
        "mean_a_perp_mhz": float(np.mean([n.a_perp for n in result.system.nuclei])),
        "P": result.final_total,
        "P_transfer": result.final_transfer,
    }
    for l, p in enumerate(result.final_per_spin):
        row[f"P_{l + 1}"] = float(p)
    return row


def final_state_document(label: str, result: RunResult) -> Dict[str, Any]:
    """Final polarizations plus two-spin reductions of a coherent run."""
    doc = {
        "system": label,
        "mode": result.mode.value,
        "total_polarization": result.final_total,
        "per_spin_polarization": result.final_per_spin.tolist(),
        "health": {k: result.metadata[k] for k in ("trace_error", "min_eigenvalue", "kraus_error") if k in result.metadata},
    }
    if result.mode is not RunMode.INCOHERENT and result.system.n_nuc >= 2:
        rho = result.final_density_matrix
        doc["pair_1_2"] = complex_matrix(pair_density_matrix(rho, 0, 1))
        for element in ((2, 1), (3, 0)):
            cmap = pair_coherence_map(rho, element)
            doc[f"coherence_map_{element[0] + 1}{element[1] + 1}"] = np.where(
                np.isnan(cmap), None, cmap
            ).tolist()
    return doc


class ResultBundle:
    """Artifacts of one command, traceable to the config that made them.

    Tables are written as CSV (and JSON records when JSON output is on),
    documents always as JSON, followed by `provenance.json`.
    """

    def __init__(self, directory: Union[str, Path], config, command: str):
        self.directory = Path(directory)
        self.config = config
        self.command = command
        self.config_hash = config.hash()
        self.tables: Dict[str, DataFrame] = {}
        self.documents: Dict[str, Any] = {}
        self.failures: List[Dict[str, str]] = []

    @property
    def formats(self) -> List[OutputFormats]:
        return list(self.config.output.formats)

    def add_table(self, name: str, table: DataFrame, config_hash: Optional[str] = None):
        """Register a table; a config_hash column is added in front if missing."""
        table = table.copy()
        if "config_hash" not in table.columns:
            table.insert(0, "config_hash", config_hash or self.config_hash)
        self.tables[name] = table

    def add_document(self, name: str, document: Any):
        self.documents[name] = document

    def add_failure(self, point: str, error: Exception):
        self.failures.append({"point": point, "error": f"{type(error).__name__}: {error}"})

    def provenance(self, artifacts: List[str]) -> Dict[str, Any]:
        return {
            "command": self.command,
            "config_hash": self.config_hash,
            "version": VERSION,
            "timestamp": datetime.now(timezone.utc).isoformat(),
            "seeds": {"master_seed": self.config.run.seed},
            "config": self.config.model_dump(mode="json"),
            "artifacts": artifacts,
            "failures": self.failures,
        }

    def save(self) -> List[Path]:
        """Write all artifacts and the provenance record.

        Returns:
            Paths written, provenance last
        """
        self.directory.mkdir(parents=True, exist_ok=True)
        _log.info(f"_begin_ save results dir={self.directory}")
        written = []
        for name, table in self.tables.items():
            if OutputFormats.CSV in self.formats:
                written.append(self._write(CSVTable(table), f"{name}.csv"))
            if OutputFormats.JSON in self.formats:
                records = table.astype(object).where(table.notna(), None).to_dict(orient="records")
                written.append(self._write(JSONDocument(records), f"{name}.json"))
        for name, doc in self.documents.items():
            written.append(self._write(JSONDocument(doc), f"{name}.json"))
        names = [str(p.relative_to(self.directory)) for p in written]
        written.append(self._write(JSONDocument(self.provenance(names)), PROVENANCE_FILE))
        _log.info(f"_end_ save results files={len(written)}")
        return written

    def _write(self, formatter: Formatter, name: str) -> Path:
        path = self.directory / name
        path.parent.mkdir(parents=True, exist_ok=True)
        formatter.write(path)
        return path
