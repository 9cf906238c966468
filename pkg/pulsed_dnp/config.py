###############################################################################
# pulsed-dnp: pulsed dynamic nuclear polarization of small 13C clusters.
# Copyright © 2026 the pulsed-dnp developers. All rights reserved.
# Portions derived from PrOMMiS IDAES connectivity, Copyright © 2024-2025
# The Regents of the University of California, et al.
# See LICENSE.md and COPYRIGHT.md for terms.
###############################################################################
"""
Experiment configuration: pydantic schema, presets and builders.

Configs are JSON documents. Physical quantities carry their unit in the
key name (_mhz, _us, _mt, _nm, _rad).
"""
from __future__ import annotations

# stdlib
import copy
from importlib.resources import files as imp_files
import itertools
import json
import logging
import math
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Tuple, Union

# third-party
import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

# package
from pulsed_dnp.clusters import ClusterConfig, generate_clusters
from pulsed_dnp.const import (
    ElectronKind,
    OutputFormats,
    Protocol,
    RunMode,
    ScanVariable,
    Species,
    A_PERP_CAP_MHZ,
    C13_ABUNDANCE,
    CLUSTER_RADIUS_NM,
    DIAMOND_BOND_NM,
)
from pulsed_dnp.model import (
    ElectronModel,
    ModelError,
    NuclearSpinParams,
    SpinSystem,
    larmor_from_field,
    resonance_frequency,
)
from pulsed_dnp.sequences import DisentangleSpec, SequenceSpec
from pulsed_dnp.util import config_hash

__author__ = "pulsed-dnp developers"

_log = logging.getLogger(__name__)

PRESET_PACKAGE = "pulsed_dnp.presets"

#: Short names for presets, by the figure or table they regenerate
PRESET_ALIASES = {
    "fig1c": "tau_spectrum",
    "fig2a": "coupling_spectrum",
    "fig2b": "uniform_sweep",
    "fig3": "clusters_40mt",
    "fig4": "clusters_field",
    "table1": "nine_spins",
    "tableS1": "nine_spins_disentangle",
    "figS4ab": "novel_spectra",
    "figS4c": "novel_uniform_sweep",
}


class ConfigError(Exception):
    def __init__(self, source, err):
        if isinstance(err, ValidationError):
            details = "; ".join(
                f"{'.'.join(str(p) for p in e['loc']) or '<root>'}: {e['msg']}" for e in err.errors()
            )
        else:
            details = str(err)
        super().__init__(f"Invalid configuration '{source}': {details}")


class _Block(BaseModel):
    model_config = ConfigDict(extra="forbid", use_enum_values=False)


class NucleusEntry(_Block):
    a_par_mhz: float = 0.0
    a_perp_mhz: float = Field(ge=0)
    label: str = ""


class UniformBlock(_Block):
    n_nuc: int = Field(ge=1)
    a_perp_mhz: float = Field(ge=0)
    a_par_mhz: float = 0.0


class ClusterBlock(_Block):
    n_configs: int = Field(ge=0)
    n_nuc: int = Field(ge=1)
    radius_nm: float = Field(CLUSTER_RADIUS_NM, gt=0)
    bond_length_nm: float = Field(DIAMOND_BOND_NM, gt=0)
    abundance: float = Field(C13_ABUNDANCE, ge=0, le=1)
    cap_mhz: float = Field(A_PERP_CAP_MHZ, gt=0)
    per_nucleus_filter: bool = False


class SystemBlock(_Block):
    electron: ElectronKind = ElectronKind.SPIN_HALF
    f_n_mhz: Optional[float] = Field(None, gt=0)
    b0_mt: Optional[float] = Field(None, gt=0)
    species: Species = Species.C13
    nuclei: Optional[List[NucleusEntry]] = None
    uniform: Optional[UniformBlock] = None
    cluster: Optional[ClusterBlock] = None

    @model_validator(mode="after")
    def _one_of_each(self):
        if (self.f_n_mhz is None) == (self.b0_mt is None):
            raise ValueError("give exactly one of f_n_mhz and b0_mt")
        sources = [s for s in (self.nuclei, self.uniform, self.cluster) if s is not None]
        if len(sources) != 1:
            raise ValueError("give exactly one nuclei source: nuclei, uniform or cluster")
        if self.nuclei is not None and len(self.nuclei) == 0:
            raise ValueError("nuclei list is empty")
        return self

    @property
    def larmor_mhz(self) -> float:
        if self.f_n_mhz is not None:
            return self.f_n_mhz
        return larmor_from_field(self.b0_mt, self.species)


class DisentangleBlock(_Block):
    theta_e_rad: float = math.pi
    wait_us: Optional[float] = Field(None, ge=0)


class SequenceBlock(_Block):
    protocol: Protocol = Protocol.PULSEPOL
    tau_pol_us: Union[Literal["resonant"], float] = "resonant"
    n_pol: int = Field(1, ge=1)
    f_t_mhz: Optional[float] = Field(None, gt=0)
    disentangle: Optional[DisentangleBlock] = None

    @model_validator(mode="after")
    def _positive_tau(self):
        if self.tau_pol_us != "resonant" and not self.tau_pol_us > 0:
            raise ValueError(f"tau_pol_us must be positive or 'resonant', got {self.tau_pol_us}")
        return self


class RunBlock(_Block):
    modes: List[RunMode] = Field(default_factory=lambda: [RunMode.COHERENT], min_length=1)
    n_rep: int = Field(1000, ge=1)
    seed: int = Field(0, ge=0)
    jobs: Optional[int] = Field(None, ge=1)


class ScanBlock(_Block):
    name: str = "spectrum"
    variable: ScanVariable
    values: Optional[List[float]] = None
    start: Optional[float] = None
    stop: Optional[float] = None
    num: Optional[int] = Field(None, ge=1)
    with_analytic: bool = False

    @model_validator(mode="after")
    def _grid_given(self):
        ranged = (self.start, self.stop, self.num)
        if self.values is None and None in ranged:
            raise ValueError("give values, or start, stop and num")
        if self.values is not None and any(v is not None for v in ranged):
            raise ValueError("give values or a range, not both")
        if self.values is not None and len(self.values) == 0:
            raise ValueError("scan grid is empty")
        return self

    def grid(self) -> np.ndarray:
        if self.values is not None:
            return np.asarray(self.values, dtype=float)
        return np.linspace(self.start, self.stop, self.num)


class SweepBlock(_Block):
    """Points of a sweep: the cartesian product of `grid` with `zipped` lists
    taken in lock step. Keys are dotted config paths.
    """

    grid: Dict[str, List[Any]] = Field(default_factory=dict)
    zipped: Dict[str, List[Any]] = Field(default_factory=dict)

    @model_validator(mode="after")
    def _lengths(self):
        lengths = {len(v) for v in self.zipped.values()}
        if len(lengths) > 1:
            raise ValueError("zipped lists must have equal length")
        if any(len(v) == 0 for v in itertools.chain(self.grid.values(), self.zipped.values())):
            raise ValueError("sweep grid is empty")
        return self

    def points(self) -> List[Dict[str, Any]]:
        zipped = [dict(zip(self.zipped, vals)) for vals in zip(*self.zipped.values())] or [{}]
        keys = list(self.grid)
        result = []
        for combo in itertools.product(*self.grid.values()):
            for z in zipped:
                point = dict(zip(keys, combo))
                point.update(z)
                result.append(point)
        return result


class OutputBlock(_Block):
    directory: str = "results"
    formats: List[OutputFormats] = Field(default_factory=lambda: [OutputFormats.CSV, OutputFormats.JSON])


class ExperimentConfig(_Block):
    """Complete description of a simulation, spectrum or sweep."""

    name: str = "experiment"
    description: str = ""
    system: SystemBlock
    sequence: SequenceBlock = Field(default_factory=SequenceBlock)
    run: RunBlock = Field(default_factory=RunBlock)
    scans: List[ScanBlock] = Field(default_factory=list)
    sweep: Optional[SweepBlock] = None
    output: OutputBlock = Field(default_factory=OutputBlock)

    @model_validator(mode="after")
    def _disentangle_needed(self):
        if RunMode.COHERENT_WITH_DISENTANGLE in self.run.modes and self.sequence.disentangle is None:
            raise ValueError("mode coherent_with_disentangle requires sequence.disentangle")
        return self

    def hash(self) -> str:
        """Hash of everything that affects numbers (not output location or workers)."""
        data = self.model_dump(mode="json", exclude={"output": True, "run": {"jobs"}})
        return config_hash(data)

    def with_overrides(self, overrides: Dict[str, Any]) -> "ExperimentConfig":
        """Copy with dotted-path values replaced, validated again.

        Raises:
            ConfigError: unknown path or invalid result
        """
        data = self.model_dump(mode="json")
        for path, value in overrides.items():
            target = data
            *parents, leaf = path.split(".")
            for key in parents:
                if not isinstance(target.get(key), dict):
                    if key in target and target[key] is None:
                        target[key] = {}
                    else:
                        raise ConfigError(self.name, f"unknown path '{path}'")
                target = target[key]
            target[leaf] = copy.deepcopy(value)
        try:
            return ExperimentConfig.model_validate(data)
        except ValidationError as err:
            raise ConfigError(self.name, err)

    def expand(self) -> List["ExperimentConfig"]:
        """One config per sweep point (the config itself without a sweep)."""
        if self.sweep is None:
            return [self]
        base = self.model_copy(update={"sweep": None})
        return [base.with_overrides(point) for point in self.sweep.points()]


def parse_config(data: Dict[str, Any], source: str = "<dict>") -> ExperimentConfig:
    try:
        return ExperimentConfig.model_validate(data)
    except ValidationError as err:
        raise ConfigError(source, err)


def load_config(path: Union[str, Path]) -> ExperimentConfig:
    """Read and validate a JSON config file.

    Raises:
        ConfigError: unreadable file, bad JSON or schema violation
    """
    path = Path(path)
    try:
        with path.open("r", encoding="utf-8") as f:
            data = json.load(f)
    except (OSError, json.JSONDecodeError) as err:
        raise ConfigError(path, err)
    return parse_config(data, str(path))


def list_presets() -> List[str]:
    return sorted(p.name[:-5] for p in imp_files(PRESET_PACKAGE).iterdir() if p.name.endswith(".json"))


def load_preset(name: str) -> ExperimentConfig:
    """Config committed with the package under `name` or one of its aliases.

    Raises:
        ConfigError: unknown preset
    """
    name = PRESET_ALIASES.get(name, name)
    resource = imp_files(PRESET_PACKAGE) / f"{name}.json"
    if not resource.is_file():
        raise ConfigError(name, f"unknown preset; available: {', '.join(list_presets())}")
    return parse_config(json.loads(resource.read_text(encoding="utf-8")), f"preset:{name}")


def build_clusters(cfg: ExperimentConfig) -> List[ClusterConfig]:
    block = cfg.system.cluster
    if block is None:
        return []
    return generate_clusters(
        block.n_configs,
        block.n_nuc,
        cfg.run.seed,
        b0_mt=cfg.system.b0_mt,
        radius=block.radius_nm,
        abundance=block.abundance,
        cap=block.cap_mhz,
        per_nucleus_filter=block.per_nucleus_filter,
        bond_length=block.bond_length_nm,
    )


def build_systems(cfg: ExperimentConfig) -> List[Tuple[str, SpinSystem, Optional[ClusterConfig]]]:
    """Spin systems described by the config, with a label and cluster if any.

    Raises:
        ConfigError: the values do not form a valid system
    """
    block = cfg.system
    electron = ElectronModel.from_kind(block.electron)
    try:
        f_n = block.larmor_mhz
        if block.nuclei is not None:
            nuclei = [
                NuclearSpinParams(n.a_par_mhz, n.a_perp_mhz, n.label or str(i + 1))
                for i, n in enumerate(block.nuclei)
            ]
            return [("inline", SpinSystem(electron, nuclei, f_n), None)]
        if block.uniform is not None:
            u = block.uniform
            return [("uniform", SpinSystem.uniform(electron, u.n_nuc, f_n, u.a_perp_mhz, u.a_par_mhz), None)]
        return [(f"cluster{c.index:04d}", c.to_system(electron, f_n), c) for c in build_clusters(cfg)]
    except ModelError as err:
        raise ConfigError(cfg.name, err)


def build_sequence(cfg: ExperimentConfig, system: SpinSystem) -> SequenceSpec:
    """Sequence for a system, resolving a resonant tau_pol."""
    block = cfg.sequence
    dis = None
    if block.disentangle is not None:
        dis = DisentangleSpec(block.disentangle.theta_e_rad, block.disentangle.wait_us)
    if block.tau_pol_us == "resonant":
        f_t = block.f_t_mhz or resonance_frequency(system, block.protocol)
        return SequenceSpec.resonant(f_t, protocol=block.protocol, n_pol=block.n_pol, disentangle=dis)
    return SequenceSpec(
        protocol=block.protocol,
        tau_pol=float(block.tau_pol_us),
        n_pol=block.n_pol,
        f_t=block.f_t_mhz,
        disentangle=dis,
    )
