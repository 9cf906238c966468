###############################################################################
# pulsed-dnp: pulsed dynamic nuclear polarization of small 13C clusters.
# Copyright © 2026 the pulsed-dnp developers. All rights reserved.
# Portions derived from PrOMMiS IDAES connectivity, Copyright © 2024-2025
# The Regents of the University of California, et al.
# See LICENSE.md and COPYRIGHT.md for terms.
###############################################################################
"""
Physical description of the electron-nuclear system.

Units are MHz for frequencies, microseconds for times, mT for fields, nm
for distances and radians for angles.
"""
# stdlib
from dataclasses import dataclass, replace
import logging
import math
from typing import Tuple, Union

# third-party
import numpy as np
from scipy import constants

# package
from pulsed_dnp.const import (
    ElectronKind,
    Protocol,
    Species,
    MAX_NUCLEI,
    GAMMA_C13_MHZ_PER_T,
)
from pulsed_dnp.spinalg import RegisterLayout, I_X, I_Z, embed_single_spin

__author__ = "pulsed-dnp developers"

_log = logging.getLogger(__name__)


class ModelError(ValueError):
    def __init__(self, msg):
        super().__init__(f"Spin system: {msg}")


class ResourceLimitError(ModelError):
    def __init__(self, n_nuc: int):
        super().__init__(
            f"{n_nuc} nuclei requested, at most {MAX_NUCLEI} are supported "
            f"(dense register of dimension 2^{n_nuc + 1})"
        )


@dataclass(frozen=True)
class PhysicalConstants:
    """Gyromagnetic ratios over 2 pi, in MHz/mT, and the dipolar prefactor."""

    gamma_e: float
    gamma_c13: float
    gamma_h1: float

    @classmethod
    def codata(cls) -> "PhysicalConstants":
        per_mt = 1e-3
        return cls(
            gamma_e=abs(constants.value("electron gyromag. ratio in MHz/T")) * per_mt,
            gamma_c13=GAMMA_C13_MHZ_PER_T * per_mt,
            gamma_h1=constants.value("proton gyromag. ratio in MHz/T") * per_mt,
        )

    def gamma(self, species: Union[Species, str]) -> float:
        species = Species(species)
        return {Species.C13: self.gamma_c13, Species.H1: self.gamma_h1}[species]

    def mu0_h_prefactor(self, species: Union[Species, str] = Species.C13) -> float:
        """Dipolar coupling mu0 h gamma_e gamma_n / 4 pi in MHz nm^3."""
        # gammas in Hz/T
        ge = self.gamma_e * 1e9
        gn = self.gamma(species) * 1e9
        coupling_hz_m3 = constants.mu_0 / (4 * math.pi) * constants.h * ge * gn
        return coupling_hz_m3 * 1e27 / 1e6


PHYSICAL = PhysicalConstants.codata()


@dataclass(frozen=True)
class NuclearSpinParams:
    """Hyperfine couplings of one nucleus.

    Attributes:
        a_par: Parallel component, MHz (signed)
        a_perp: Perpendicular component, MHz (non-negative)
        label: Identifier
    """

    a_par: float
    a_perp: float
    label: str = ""

    def __post_init__(self):
        if not (math.isfinite(self.a_par) and math.isfinite(self.a_perp)):
            raise ModelError(f"non-finite hyperfine ({self.a_par}, {self.a_perp})")
        if self.a_perp < 0:
            raise ModelError(f"a_perp must be non-negative, got {self.a_perp}")


@dataclass(frozen=True)
class ElectronModel:
    """Two-level effective electron.

    Pseudo-spin index 0 is the initial (optically prepared) sector and
    index 1 the flip sector.
    """

    kind: ElectronKind
    sector_values: Tuple[float, float]

    def __post_init__(self):
        if len(self.sector_values) != 2 or self.sector_values[0] == self.sector_values[1]:
            raise ModelError(f"need two distinct sectors, got {self.sector_values}")

    @classmethod
    def spin_half(cls) -> "ElectronModel":
        return cls(ElectronKind.SPIN_HALF, (0.5, -0.5))

    @classmethod
    def nv_effective(cls) -> "ElectronModel":
        return cls(ElectronKind.NV_EFFECTIVE, (0.0, -1.0))

    @classmethod
    def from_kind(cls, kind: Union[ElectronKind, str]) -> "ElectronModel":
        kind = ElectronKind(kind)
        if kind is ElectronKind.SPIN_HALF:
            return cls.spin_half()
        return cls.nv_effective()

    @property
    def initial_sector(self) -> float:
        return self.sector_values[0]

    @property
    def flip_sector(self) -> float:
        return self.sector_values[1]

    @property
    def initial_index(self) -> int:
        return 0

    @property
    def flip_index(self) -> int:
        return 1

    def index(self, m_s: float) -> int:
        """Pseudo-spin index of a sector value.

        Raises:
            ModelError: unknown sector
        """
        for i, value in enumerate(self.sector_values):
            if math.isclose(m_s, value, abs_tol=1e-12):
                return i
        raise ModelError(f"unknown sector m_S={m_s} for {self.kind.value}")


@dataclass(frozen=True)
class SpinSystem:
    """Electron, ordered nuclei and the nuclear Larmor frequency f_n (MHz)."""

    electron: ElectronModel
    nuclei: Tuple[NuclearSpinParams, ...]
    f_n: float

    def __post_init__(self):
        object.__setattr__(self, "nuclei", tuple(self.nuclei))
        n = len(self.nuclei)
        if n < 1:
            raise ModelError("at least one nucleus is required")
        if n > MAX_NUCLEI:
            raise ResourceLimitError(n)
        if not (math.isfinite(self.f_n) and self.f_n > 0):
            raise ModelError(f"Larmor frequency must be positive, got {self.f_n}")

    @classmethod
    def uniform(
        cls,
        electron: ElectronModel,
        n_nuc: int,
        f_n: float,
        a_perp: float,
        a_par: float = 0.0,
    ) -> "SpinSystem":
        """System of identical nuclei."""
        nuclei = tuple(
            NuclearSpinParams(a_par, a_perp, label=str(i + 1)) for i in range(n_nuc)
        )
        return cls(electron, nuclei, f_n)

    def with_a_perp(self, a_perp: float) -> "SpinSystem":
        """Copy with every nucleus set to the same a_perp."""
        return replace(self, nuclei=tuple(replace(n, a_perp=a_perp) for n in self.nuclei))

    @property
    def n_nuc(self) -> int:
        return len(self.nuclei)

    @property
    def layout(self) -> RegisterLayout:
        return RegisterLayout(self.n_nuc, electron_dim=2)

    @property
    def nuclear_layout(self) -> RegisterLayout:
        return RegisterLayout(self.n_nuc, electron_dim=0)

    def sector_coefficients(self, m_s: float) -> np.ndarray:
        """Per-nucleus (x, z) field in sector m_s, shape (n_nuc, 2), MHz."""
        self.electron.index(m_s)
        return np.array(
            [(m_s * n.a_perp, -self.f_n + m_s * n.a_par) for n in self.nuclei],
            dtype=float,
        )


def sector_hamiltonian(system: SpinSystem, m_s: float) -> np.ndarray:
    """Nuclear Hamiltonian in electron sector m_s, MHz.

    Sum over nuclei of (-f_n + m_s a_par) I_z + m_s a_perp I_x.

    Raises:
        ModelError: m_s is not a sector of the electron model
    """
    layout = system.nuclear_layout
    coeffs = system.sector_coefficients(m_s)
    h = np.zeros((layout.total_dim, layout.total_dim), dtype=complex)
    for slot, (bx, bz) in enumerate(coeffs):
        h += embed_single_spin(bz * I_Z + bx * I_X, slot, layout)
    return h


def precession_frequency(f_n: float, a_par: float, a_perp: float, m_s: float) -> float:
    return math.hypot(f_n - m_s * a_par, m_s * a_perp)


def tilt_angle(f_n: float, a_perp: float, kind: Union[ElectronKind, str]) -> float:
    """Tilt of the nuclear quantization axis, arctan(A_perp/2f_n) for a
    spin-1/2 electron and arctan(A_perp/f_n) for the NV effective model.
    """
    if f_n <= 0:
        raise ModelError(f"Larmor frequency must be positive, got {f_n}")
    if ElectronKind(kind) is ElectronKind.SPIN_HALF:
        return math.atan(a_perp / (2 * f_n))
    return math.atan(a_perp / f_n)


def larmor_from_field(
    b0_mt: float,
    species: Union[Species, str] = Species.C13,
    physical: PhysicalConstants = PHYSICAL,
) -> float:
    """Nuclear Larmor frequency in MHz for a field in mT.

    Raises:
        ModelError: non-positive field
        ValueError: unknown species
    """
    if b0_mt <= 0:
        raise ModelError(f"field must be positive, got {b0_mt} mT")
    return physical.gamma(species) * b0_mt


def resonance_frequency(system: SpinSystem, protocol: Union[Protocol, str] = Protocol.PULSEPOL) -> float:
    """Target frequency for a sequence declared resonant, MHz.

    PulsePol targets the bare Larmor frequency for both electron models.
    NOVEL matches the drive to the precession frequency.
    """
    if Protocol(protocol) is Protocol.NOVEL:
        return precession_target(system)
    return system.f_n


def precession_target(system: SpinSystem) -> float:
    """Frequency at which the transition amplitudes are resonant, MHz.

    The spin-1/2 electron uses the sector-averaged precession frequency of
    the first nucleus; the NV effective model uses the bare Larmor frequency.
    """
    if system.electron.kind is ElectronKind.NV_EFFECTIVE:
        return system.f_n
    first = system.nuclei[0]
    return float(
        np.mean(
            [
                precession_frequency(system.f_n, first.a_par, first.a_perp, m)
                for m in system.electron.sector_values
            ]
        )
    )


def resonant_tau(f_t: float) -> float:
    """PulsePol interval tau_pol = 3/(2 f_t), microseconds."""
    if f_t <= 0:
        raise ModelError(f"target frequency must be positive, got {f_t}")
    return 3.0 / (2.0 * f_t)
