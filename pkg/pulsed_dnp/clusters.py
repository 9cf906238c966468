###############################################################################
# pulsed-dnp: pulsed dynamic nuclear polarization of small 13C clusters.
# Copyright © 2026 the pulsed-dnp developers. All rights reserved.
# Portions derived from PrOMMiS IDAES connectivity, Copyright © 2024-2025
# The Regents of the University of California, et al.
# See LICENSE.md and COPYRIGHT.md for terms.
###############################################################################
"""
Random 13C clusters on the diamond lattice around an NV center.

Coordinates are in nm in a frame with the vacancy at the origin and the NV
axis ([111]) along z, so the field direction is (0, 0, 1).
"""
# stdlib
from dataclasses import dataclass, asdict
import json
import logging
import math
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

# third-party
import numpy as np

# package
from pulsed_dnp.const import (
    Species,
    A_PERP_CAP_MHZ,
    C13_ABUNDANCE,
    CLUSTER_RADIUS_NM,
    DIAMOND_BOND_NM,
)
from pulsed_dnp.model import (
    PHYSICAL,
    ElectronModel,
    NuclearSpinParams,
    SpinSystem,
    larmor_from_field,
)

__author__ = "pulsed-dnp developers"

_log = logging.getLogger(__name__)

NV_AXIS = (0.0, 0.0, 1.0)


class ClusterError(ValueError):
    def __init__(self, msg):
        super().__init__(f"Cluster generation: {msg}")


def lattice_constant(bond_length: float = DIAMOND_BOND_NM) -> float:
    """Cubic lattice constant from the C-C bond length, a = 4 b / sqrt(3)."""
    return 4.0 * bond_length / math.sqrt(3.0)


def nv_frame_rotation() -> np.ndarray:
    """Rotation taking crystal coordinates to the frame with [111] along z."""
    e1 = np.array([1.0, -1.0, 0.0]) / math.sqrt(2.0)
    e2 = np.array([1.0, 1.0, -2.0]) / math.sqrt(6.0)
    e3 = np.array([1.0, 1.0, 1.0]) / math.sqrt(3.0)
    return np.vstack([e1, e2, e3])


def build_lattice(radius: float = CLUSTER_RADIUS_NM, bond_length: float = DIAMOND_BOND_NM) -> np.ndarray:
    """Diamond lattice sites within `radius` of the vacancy, vacancy excluded.

    Args:
        radius: Cutoff in nm
        bond_length: C-C bond length in nm

    Returns:
        Array of shape (n_sites, 3) in the NV frame, sorted by distance then
        coordinates

    Raises:
        ClusterError: non-positive radius
    """
    if not radius > 0:
        raise ClusterError(f"radius must be positive, got {radius}")
    a = lattice_constant(bond_length)
    n = int(math.ceil(2 * radius / a)) + 2
    rng = np.arange(-n, n + 1)
    i, j, k = np.meshgrid(rng, rng, rng, indexing="ij")
    fcc = np.stack([i.ravel(), j.ravel(), k.ravel()], axis=1)
    fcc = fcc[(fcc.sum(axis=1) % 2) == 0] * (a / 2)
    sites = np.vstack([fcc, fcc + a / 4])
    dist = np.linalg.norm(sites, axis=1)
    sites = sites[(dist <= radius + 1e-9) & (dist > 1e-9)]
    sites = sites @ nv_frame_rotation().T
    # canonical order so sampling is reproducible
    rounded = np.round(sites, 9)
    order = np.lexsort((rounded[:, 2], rounded[:, 1], rounded[:, 0], np.round(np.linalg.norm(sites, axis=1), 9)))
    _log.debug(f"lattice radius={radius} sites={len(sites)}")
    return sites[order]


def make_rng(seed: Union[int, np.random.Generator, np.random.SeedSequence, None]) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def config_seed_sequence(master_seed: int, index: int) -> np.random.SeedSequence:
    """Independent stream for configuration `index` of a master seed."""
    return np.random.SeedSequence(master_seed, spawn_key=(index,))


def sample_occupation(
    sites: np.ndarray,
    seed: Union[int, np.random.Generator, np.random.SeedSequence, None],
    abundance: float = C13_ABUNDANCE,
) -> np.ndarray:
    """Independent Bernoulli occupation of each site.

    Returns:
        Occupied sites, in lattice order
    """
    if not 0 <= abundance <= 1:
        raise ClusterError(f"abundance must be in [0, 1], got {abundance}")
    draws = make_rng(seed).random(len(sites))
    return sites[draws < abundance]


def hyperfine_couplings(
    positions: np.ndarray,
    b0_direction: Sequence[float] = NV_AXIS,
    species: Union[Species, str] = Species.C13,
) -> Tuple[np.ndarray, np.ndarray]:
    """Dipolar hyperfine components for many positions.

    A_par = P (3 cos^2 - 1) / r^3 and A_perp = |3 P cos sin| / r^3, where P
    is the dipolar prefactor and the angle is taken from the field direction.

    Returns:
        (a_par, a_perp) in MHz

    Raises:
        ClusterError: a position at the origin
    """
    positions = np.atleast_2d(np.asarray(positions, dtype=float))
    b = np.asarray(b0_direction, dtype=float)
    b = b / np.linalg.norm(b)
    r = np.linalg.norm(positions, axis=1)
    if np.any(r == 0):
        raise ClusterError("position at the vacancy site")
    cos_t = positions @ b / r
    sin_t = np.sqrt(np.clip(1 - cos_t**2, 0.0, None))
    scale = PHYSICAL.mu0_h_prefactor(species) / r**3
    return scale * (3 * cos_t**2 - 1), np.abs(3 * scale * cos_t * sin_t)


def hyperfine_from_position(
    position: Sequence[float], b0_direction: Sequence[float] = NV_AXIS
) -> Tuple[float, float]:
    a_par, a_perp = hyperfine_couplings(np.asarray(position)[None, :], b0_direction)
    return float(a_par[0]), float(a_perp[0])


@dataclass(frozen=True)
class ClusterConfig:
    """Accepted cluster: the retained nuclei sorted by descending A_perp."""

    master_seed: int
    index: int
    attempts: int
    n_occupied: int
    positions: Tuple[Tuple[float, float, float], ...]
    a_par: Tuple[float, ...]
    a_perp: Tuple[float, ...]
    b0_mt: Optional[float] = None
    b0_direction: Tuple[float, float, float] = NV_AXIS

    @property
    def n_nuc(self) -> int:
        return len(self.a_perp)

    @property
    def mean_a_perp(self) -> float:
        return float(np.mean(self.a_perp))

    def to_system(self, electron: ElectronModel, f_n: Optional[float] = None) -> SpinSystem:
        """Spin system of the retained nuclei, labels 1..N in A_perp order."""
        if f_n is None:
            if self.b0_mt is None:
                raise ClusterError("no field recorded, give f_n")
            f_n = larmor_from_field(self.b0_mt)
        nuclei = tuple(
            NuclearSpinParams(a_par=p, a_perp=q, label=str(i + 1))
            for i, (p, q) in enumerate(zip(self.a_par, self.a_perp))
        )
        return SpinSystem(electron, nuclei, f_n)

    def to_dict(self) -> Dict[str, Any]:
        d = asdict(self)
        d["positions_nm"] = [list(p) for p in d.pop("positions")]
        d["a_par_mhz"] = list(d.pop("a_par"))
        d["a_perp_mhz"] = list(d.pop("a_perp"))
        d["b0_direction"] = list(d["b0_direction"])
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)

    @classmethod
    def from_dict(cls, d: Dict[str, Any]) -> "ClusterConfig":
        return cls(
            master_seed=d["master_seed"],
            index=d["index"],
            attempts=d["attempts"],
            n_occupied=d["n_occupied"],
            positions=tuple(tuple(p) for p in d["positions_nm"]),
            a_par=tuple(d["a_par_mhz"]),
            a_perp=tuple(d["a_perp_mhz"]),
            b0_mt=d.get("b0_mt"),
            b0_direction=tuple(d.get("b0_direction", NV_AXIS)),
        )

    @classmethod
    def from_json(cls, text: str) -> "ClusterConfig":
        return cls.from_dict(json.loads(text))


def select_cluster(
    positions: np.ndarray,
    a_par: np.ndarray,
    a_perp: np.ndarray,
    n_nuc: int,
    cap: float = A_PERP_CAP_MHZ,
    per_nucleus_filter: bool = False,
) -> Optional[np.ndarray]:
    """Indices of the n_nuc largest-A_perp nuclei, or None to resample.

    With the default whole-configuration rule any occupied nucleus with
    A_perp >= cap rejects the configuration. With `per_nucleus_filter`
    such nuclei are dropped instead.

    Returns:
        Indices into the inputs sorted by descending A_perp, or None if the
        configuration is rejected or has fewer than n_nuc nuclei
    """
    if n_nuc < 1:
        raise ClusterError(f"n_nuc must be >= 1, got {n_nuc}")
    a_perp = np.asarray(a_perp)
    candidates = np.arange(len(a_perp))
    over = a_perp >= cap
    if np.any(over):
        if not per_nucleus_filter:
            return None
        candidates = candidates[~over]
    if len(candidates) < n_nuc:
        return None
    # stable sort keeps lattice order among equal couplings
    order = candidates[np.argsort(-a_perp[candidates], kind="stable")]
    return order[:n_nuc]


def generate_cluster(
    sites: np.ndarray,
    n_nuc: int,
    master_seed: int,
    index: int,
    b0_mt: Optional[float] = None,
    abundance: float = C13_ABUNDANCE,
    cap: float = A_PERP_CAP_MHZ,
    per_nucleus_filter: bool = False,
    max_attempts: int = 100_000,
) -> ClusterConfig:
    """Sample from the stream of (master_seed, index) until a cluster is accepted.

    Raises:
        ClusterError: no accepted configuration within max_attempts
    """
    rng = np.random.default_rng(config_seed_sequence(master_seed, index))
    for attempt in range(1, max_attempts + 1):
        occupied = sample_occupation(sites, rng, abundance)
        if len(occupied) < n_nuc:
            continue
        a_par, a_perp = hyperfine_couplings(occupied)
        chosen = select_cluster(occupied, a_par, a_perp, n_nuc, cap, per_nucleus_filter)
        if chosen is None:
            continue
        return ClusterConfig(
            master_seed=int(master_seed),
            index=int(index),
            attempts=attempt,
            n_occupied=int(len(occupied)),
            positions=tuple(tuple(float(x) for x in occupied[i]) for i in chosen),
            a_par=tuple(float(a_par[i]) for i in chosen),
            a_perp=tuple(float(a_perp[i]) for i in chosen),
            b0_mt=b0_mt,
        )
    raise ClusterError(f"no configuration accepted in {max_attempts} attempts (index {index})")


def generate_clusters(
    n_configs: int,
    n_nuc: int,
    master_seed: int,
    b0_mt: Optional[float] = None,
    radius: float = CLUSTER_RADIUS_NM,
    abundance: float = C13_ABUNDANCE,
    cap: float = A_PERP_CAP_MHZ,
    per_nucleus_filter: bool = False,
    bond_length: float = DIAMOND_BOND_NM,
) -> List[ClusterConfig]:
    """Accepted configurations 0..n_configs-1 of a master seed."""
    if n_configs < 0:
        raise ClusterError(f"negative number of configurations {n_configs}")
    _log.info(f"_begin_ generate clusters n_configs={n_configs} n_nuc={n_nuc} seed={master_seed}")
    sites = build_lattice(radius, bond_length)
    configs = [
        generate_cluster(sites, n_nuc, master_seed, i, b0_mt, abundance, cap, per_nucleus_filter)
        for i in range(n_configs)
    ]
    if configs:
        rate = len(configs) / sum(c.attempts for c in configs)
        _log.info(f"_end_ generate clusters acceptance={rate:.3f}")
    else:
        _log.info("_end_ generate clusters (none requested)")
    return configs


def mean_tilt_angle(configs: Sequence[ClusterConfig], f_n: float) -> float:
    """arctan of the A_perp averaged over nuclei and configurations, over f_n."""
    if not configs:
        raise ClusterError("no configurations")
    mean = float(np.mean([c.mean_a_perp for c in configs]))
    return math.atan(mean / f_n)
