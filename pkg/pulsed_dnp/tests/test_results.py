###############################################################################
# pulsed-dnp: pulsed dynamic nuclear polarization of small 13C clusters.
# Copyright © 2026 the pulsed-dnp developers. All rights reserved.
# Portions derived from PrOMMiS IDAES connectivity, Copyright © 2024-2025
# The Regents of the University of California, et al.
# See LICENSE.md and COPYRIGHT.md for terms.
###############################################################################
"""
Tests for `results` module.
"""
# stdlib
from io import StringIO
import json

# third-party
import pandas as pd
import pytest

# package
from pulsed_dnp.config import parse_config
from pulsed_dnp.const import RunMode
from pulsed_dnp.engine import run
from pulsed_dnp.model import ElectronModel, SpinSystem
from pulsed_dnp.results import (
    PROVENANCE_FILE,
    CSVTable,
    JSONDocument,
    ResultBundle,
    complex_matrix,
    final_state_document,
    run_summary,
)
from pulsed_dnp.sequences import SequenceSpec
from pulsed_dnp.version import VERSION


@pytest.fixture
def small_config(tmp_path):
    return parse_config(
        {
            "name": "small",
            "system": {"f_n_mhz": 1.0, "uniform": {"n_nuc": 2, "a_perp_mhz": 0.2}},
            "output": {"directory": str(tmp_path / "out")},
        }
    )


def _run(mode, n_nuc=2):
    system = SpinSystem.uniform(ElectronModel.spin_half(), n_nuc, 1.0, 0.2)
    return run(system, SequenceSpec.resonant(1.0), mode, 5)


@pytest.mark.unit
def test_csv_table():
    table = pd.DataFrame({"a": [1, 2], "x": [1 / 3, 2.0]})
    text = CSVTable(table).write(None)
    assert text == "a,x\n1,0.333333\n2,2\n"
    stream = StringIO()
    assert CSVTable(table).write(stream) is None
    assert stream.getvalue() == text


@pytest.mark.unit
def test_json_document(tmp_path):
    doc = {"b": 1 + 1j, "a": [1, 2]}
    text = JSONDocument(doc).write(None)
    assert json.loads(text) == {"a": [1, 2], "b": [1.0, 1.0]}
    assert text.index('"a"') < text.index('"b"')
    path = tmp_path / "doc.json"
    JSONDocument(doc).write(path)
    assert path.read_text(encoding="utf-8") == text
    stream = StringIO()
    assert JSONDocument(doc).write(stream) is None
    assert stream.getvalue() == text


@pytest.mark.unit
def test_complex_matrix():
    m = complex_matrix([[1 + 2j, 0], [0, 1]])
    assert m == {"real": [[1.0, 0.0], [0.0, 1.0]], "imag": [[2.0, 0.0], [0.0, 0.0]]}


@pytest.mark.unit
def test_run_summary():
    result = _run(RunMode.COHERENT)
    row = run_summary("uniform", result, "abc")
    assert list(row)[:3] == ["config_hash", "system", "mode"]
    assert row["mode"] == "coherent"
    assert row["n_rep"] == 5
    assert row["mean_a_perp_mhz"] == pytest.approx(0.2)
    assert row["P"] == pytest.approx(result.final_total)
    assert abs(row["P_transfer"]) == pytest.approx(row["P"])
    assert {"P_1", "P_2"} <= set(row)


@pytest.mark.unit
def test_final_state_document():
    doc = final_state_document("uniform", _run(RunMode.COHERENT, 3))
    assert len(doc["per_spin_polarization"]) == 3
    assert len(doc["pair_1_2"]["real"]) == 4
    assert doc["coherence_map_32"][0][0] is None
    assert doc["coherence_map_41"][0][1] >= 0
    assert "trace_error" in doc["health"]
    json.dumps(doc)
    doc = final_state_document("uniform", _run(RunMode.INCOHERENT))
    assert "pair_1_2" not in doc


@pytest.mark.unit
def test_bundle_save(small_config):
    bundle = ResultBundle(small_config.output.directory, small_config, "simulate")
    bundle.add_table("final", pd.DataFrame({"P": [0.5, float("nan")]}))
    bundle.add_table("other", pd.DataFrame({"config_hash": ["given"], "P": [1.0]}))
    bundle.add_document("nested/doc", {"x": 1})
    bundle.add_failure("p0", ValueError("bad"))
    paths = bundle.save()
    names = [p.name for p in paths]
    assert names == ["final.csv", "final.json", "other.csv", "other.json", "doc.json", PROVENANCE_FILE]
    final = pd.read_csv(paths[0])
    assert list(final.columns) == ["config_hash", "P"]
    assert final["config_hash"].iloc[0] == small_config.hash()
    records = json.loads(paths[1].read_text())
    assert records[1]["P"] is None
    assert pd.read_csv(paths[2])["config_hash"].iloc[0] == "given"
    prov = json.loads(paths[-1].read_text())
    assert prov["command"] == "simulate"
    assert prov["version"] == VERSION
    assert prov["config_hash"] == small_config.hash()
    assert prov["seeds"] == {"master_seed": 0}
    assert "nested/doc.json" in prov["artifacts"]
    assert prov["failures"] == [{"point": "p0", "error": "ValueError: bad"}]


@pytest.mark.unit
def test_bundle_csv_only(small_config):
    cfg = small_config.with_overrides({"output.formats": ["csv"]})
    bundle = ResultBundle(cfg.output.directory, cfg, "sweep")
    bundle.add_table("t", pd.DataFrame({"P": [1.0]}))
    assert [p.name for p in bundle.save()] == ["t.csv", PROVENANCE_FILE]
