###############################################################################
# pulsed-dnp: pulsed dynamic nuclear polarization of small 13C clusters.
# Copyright © 2026 the pulsed-dnp developers. All rights reserved.
# Portions derived from PrOMMiS IDAES connectivity, Copyright © 2024-2025
# The Regents of the University of California, et al.
# See LICENSE.md and COPYRIGHT.md for terms.
###############################################################################
"""
Tests for `cli` module.
"""
# stdlib
import json

# third-party
import pandas as pd
import pytest

# package
from pulsed_dnp import cli
from pulsed_dnp.cli import main
from pulsed_dnp.config import build_sequence, build_systems, load_config
from pulsed_dnp.const import ExitCode
from pulsed_dnp.engine import NumericalHealthError, run
from pulsed_dnp.version import VERSION


def write_config(tmp_path, **extra):
    data = {
        "name": "tiny",
        "system": {"f_n_mhz": 1.0, "uniform": {"n_nuc": 2, "a_perp_mhz": 0.2}},
        "run": {"modes": ["coherent", "incoherent"], "n_rep": 20, "jobs": 1},
        "output": {"directory": str(tmp_path / "out"), "formats": ["csv"]},
    }
    data.update(extra)
    path = tmp_path / "tiny.json"
    path.write_text(json.dumps(data))
    return str(path)


@pytest.mark.unit
def test_usage(capsys):
    assert ExitCode.OK == main(["--usage"])
    assert "cluster-gen" in capsys.readouterr().out


@pytest.mark.unit
def test_version(capsys):
    assert ExitCode.OK == main(["--version"])
    assert capsys.readouterr().out.strip() == VERSION


@pytest.mark.unit
def test_schema(capsys):
    assert ExitCode.OK == main(["--schema"])
    schema = json.loads(capsys.readouterr().out)
    assert "system" in schema["properties"]


@pytest.mark.unit
def test_list_presets(capsys):
    assert ExitCode.OK == main(["--list-presets"])
    words = capsys.readouterr().out.split()
    assert "nine_spins" in words
    assert words[words.index("uniform_sweep") + 1] == "fig2b"


@pytest.mark.unit
def test_help():
    with pytest.raises(SystemExit):
        main(["-h"])
    with pytest.raises(SystemExit):
        main(["simulate", "--help"])


@pytest.mark.unit
def test_bad_args():
    assert ExitCode.CONFIG == main([])
    # config source is required
    with pytest.raises(SystemExit):
        main(["simulate"])
    with pytest.raises(SystemExit):
        main(["simulate", "--preset", "nine_spins", "--config", "x.json"])


@pytest.mark.unit
def test_config_errors(tmp_path, capsys):
    assert ExitCode.CONFIG == main(["simulate", "--config", str(tmp_path / "missing.json")])
    bad = tmp_path / "bad.json"
    bad.write_text('{"system": {"f_n_mhz": 1.0}}')
    assert ExitCode.CONFIG == main(["simulate", "--config", str(bad)])
    assert "nuclei source" in capsys.readouterr().err
    assert ExitCode.CONFIG == main(["simulate", "--preset", "nope"])
    big = write_config(tmp_path, system={"f_n_mhz": 1.0, "uniform": {"n_nuc": 13, "a_perp_mhz": 0.1}})
    assert ExitCode.CONFIG == main(["simulate", "--config", big])
    # amplitude spectra need scans
    assert ExitCode.CONFIG == main(["amplitudes", "--config", write_config(tmp_path)])
    # cluster generation needs a cluster block
    assert ExitCode.CONFIG == main(["cluster-gen", "--config", write_config(tmp_path)])


@pytest.mark.unit
def test_simulate(tmp_path, capsys):
    out = tmp_path / "sim"
    assert ExitCode.OK == main(["-q", "simulate", "--config", write_config(tmp_path), "--out", str(out)])
    printed = capsys.readouterr().out.split()
    assert printed[-1].endswith("provenance.json")
    final = pd.read_csv(out / "final.csv")
    assert list(final["mode"]) == ["coherent", "incoherent"]
    assert list(final["system"]) == ["uniform", "uniform"]
    assert final["P"].between(0, 1).all()
    traj = pd.read_csv(out / "trajectories.csv")
    assert len(traj) == 2 * 21
    assert list(traj.columns[:3]) == ["config_hash", "system", "mode"]
    states = json.loads((out / "final_states.json").read_text())
    assert len(states) == 2
    prov = json.loads((out / "provenance.json").read_text())
    assert prov["command"] == "simulate"
    assert "final.csv" in prov["artifacts"]


@pytest.mark.unit
def test_simulate_deterministic(tmp_path):
    config = write_config(tmp_path)
    for name in ("a", "b"):
        assert ExitCode.OK == main(["-q", "simulate", "--config", config, "--out", str(tmp_path / name)])
    for table in ("final.csv", "trajectories.csv"):
        assert (tmp_path / "a" / table).read_text() == (tmp_path / "b" / table).read_text()


@pytest.mark.unit
def test_simulate_sweep_block(tmp_path):
    config = write_config(tmp_path, sweep={"grid": {"system.uniform.a_perp_mhz": [0.1, 0.3]}})
    assert ExitCode.OK == main(["-q", "simulate", "--config", config])
    final = pd.read_csv(tmp_path / "out" / "final.csv")
    assert list(final.columns[:3]) == ["config_hash", "point", "system.uniform.a_perp_mhz"]
    assert list(final["point"]) == [0, 0, 1, 1]
    assert final["config_hash"].nunique() == 2


@pytest.mark.unit
def test_numerical_error(tmp_path, monkeypatch, capsys):
    def broken(*args, **kwargs):
        raise NumericalHealthError("trace drift", 1.0, 1e-8)

    monkeypatch.setattr(cli, "run", broken)
    assert ExitCode.NUMERICAL == main(["simulate", "--config", write_config(tmp_path), "--jobs", "1"])
    assert "trace drift" in capsys.readouterr().err


@pytest.mark.unit
def test_amplitudes(tmp_path):
    config = write_config(
        tmp_path,
        scans=[
            {"name": "tau", "variable": "tau_pol_us", "start": 1.4, "stop": 1.6, "num": 5, "with_analytic": True},
            {"name": "coupling", "variable": "a_perp_mhz", "values": [0.1, 0.2]},
        ],
    )
    assert ExitCode.OK == main(["-q", "amplitudes", "--config", config])
    out = tmp_path / "out"
    tau = pd.read_csv(out / "spectrum_tau.csv")
    assert len(tau) == 5
    assert "analytic_alpha_minus" in tau.columns
    assert len(pd.read_csv(out / "spectrum_coupling.csv")) == 2
    extrema = json.loads((out / "extrema.json").read_text())
    assert set(extrema) == {"tau", "coupling"}
    assert 1.4 <= extrema["tau"]["alpha_minus"]["position"] <= 1.6


@pytest.mark.unit
def test_cluster_gen(tmp_path):
    config = write_config(
        tmp_path,
        system={"electron": "nv_effective", "b0_mt": 40.0, "cluster": {"n_configs": 2, "n_nuc": 2, "radius_nm": 1.2}},
        run={"seed": 5, "jobs": 1},
    )
    assert ExitCode.OK == main(["-q", "cluster-gen", "--config", config])
    out = tmp_path / "out"
    summary = pd.read_csv(out / "clusters_summary.csv")
    assert list(summary["index"]) == [0, 1]
    archived = json.loads((out / "clusters" / "config_0001.json").read_text())
    assert archived["master_seed"] == 5
    assert len(archived["a_perp_mhz"]) == 2
    # a different seed gives different clusters
    assert ExitCode.OK == main(["-q", "cluster-gen", "--config", config, "--seed", "6", "--out", str(tmp_path / "s6")])
    other = json.loads((tmp_path / "s6" / "clusters" / "config_0001.json").read_text())
    assert other["positions_nm"] != archived["positions_nm"]


@pytest.mark.unit
def test_sweep_resume(tmp_path, monkeypatch):
    config = write_config(tmp_path, sweep={"grid": {"system.uniform.a_perp_mhz": [0.1, 0.3]}})
    assert ExitCode.OK == main(["-q", "sweep", "--config", config])
    out = tmp_path / "out"
    points = pd.read_csv(out / "sweep_points.csv")
    assert len(points) == 4
    assert points["error"].isna().all()
    stats = pd.read_csv(out / "sweep_statistics.csv")
    assert len(stats) == 4
    expected = {"median", "q1", "q3", "histogram_peak", "fit_center", "fit_width", "mean_tilt_rad"}
    assert expected <= set(stats.columns)
    scatter = pd.read_csv(out / "scatter.csv")
    assert {"P_coherent", "P_incoherent"} <= set(scatter.columns)
    cached = list((out / "points").glob("*/uniform.json"))
    assert len(cached) == 2
    first = (out / "sweep_points.csv").read_text()

    # finished points are read back, not recomputed
    def broken(*args, **kwargs):
        raise AssertionError("recomputed a finished point")

    monkeypatch.setattr(cli, "run", broken)
    assert ExitCode.OK == main(["-q", "sweep", "--config", config])
    assert (out / "sweep_points.csv").read_text() == first


@pytest.mark.unit
def test_sweep_failure_recorded(tmp_path, monkeypatch):
    config = write_config(tmp_path, sweep={"grid": {"system.uniform.a_perp_mhz": [0.1]}})

    def broken(*args, **kwargs):
        raise NumericalHealthError("minimum eigenvalue", -1.0, 1e-8)

    monkeypatch.setattr(cli, "run", broken)
    assert ExitCode.OK == main(["-q", "sweep", "--config", config])
    out = tmp_path / "out"
    points = pd.read_csv(out / "sweep_points.csv")
    assert "NumericalHealthError" in points["error"].iloc[0]
    prov = json.loads((out / "provenance.json").read_text())
    assert len(prov["failures"]) == 1
    assert not list((out / "points").glob("*/*.json"))


@pytest.mark.unit
def test_sweep_cache_full_precision(tmp_path):
    config = write_config(tmp_path, sweep={"grid": {"system.uniform.a_perp_mhz": [0.3]}})
    assert ExitCode.OK == main(["-q", "sweep", "--config", config])
    (cached,) = (tmp_path / "out" / "points").glob("*/uniform.json")
    rows = json.loads(cached.read_text())
    cfg = load_config(config).with_overrides({"system.uniform.a_perp_mhz": 0.3})
    ((_, system, _),) = build_systems(cfg)
    spec = build_sequence(cfg, system)
    assert [r["mode"] for r in rows] == ["coherent", "incoherent"]
    for row in rows:
        assert row["P"] == run(system, spec, row["mode"], cfg.run.n_rep).final_total


@pytest.mark.component
def test_sweep_independent_of_jobs(tmp_path):
    sweep = {"grid": {"system.uniform.a_perp_mhz": [0.1, 0.2, 0.3]}}
    texts = []
    for jobs in (1, 3):
        config = write_config(tmp_path, sweep=sweep)
        out = tmp_path / f"jobs{jobs}"
        assert ExitCode.OK == main(["-q", "sweep", "--config", config, "--jobs", str(jobs), "--out", str(out)])
        texts.append({name: (out / name).read_text() for name in ("sweep_points.csv", "sweep_statistics.csv")})
    assert texts[0] == texts[1]
