###############################################################################
# pulsed-dnp: pulsed dynamic nuclear polarization of small 13C clusters.
# Copyright © 2026 the pulsed-dnp developers. All rights reserved.
# Portions derived from PrOMMiS IDAES connectivity, Copyright © 2024-2025
# The Regents of the University of California, et al.
# See LICENSE.md and COPYRIGHT.md for terms.
###############################################################################
"""
Builders for PulsePol, NOVEL and the disentangling operation.

Products are written in operator order: the rightmost factor acts first.
"""
# stdlib
from dataclasses import dataclass
from functools import reduce
import logging
import math
from typing import Optional, Tuple, Union

# third-party
import numpy as np
from scipy import linalg

# package
from pulsed_dnp.const import (
    ElectronKind,
    Protocol,
    COMPLETENESS_TOL,
)
from pulsed_dnp.model import SpinSystem, ElectronModel, sector_hamiltonian
from pulsed_dnp.spinalg import (
    ELECTRON_SLOT,
    RegisterLayout,
    SIGMA_Y,
    check_unitary,
    dagger,
    embed_single_spin,
    kron_chain,
    su2_exponential,
    unitary_power,
)

__author__ = "pulsed-dnp developers"

_log = logging.getLogger(__name__)


class SequenceError(ValueError):
    def __init__(self, msg):
        super().__init__(f"Sequence: {msg}")


class ChannelCompletenessError(RuntimeError):
    def __init__(self, err: float, source: str):
        super().__init__(
            f"Kraus operators of '{source}' are not complete: "
            f"|sum K^+K - 1| = {err:.3g}"
        )
        self.error = err


@dataclass(frozen=True)
class DisentangleSpec:
    """Electron re-preparation angle and wait time (None means 2 n_pol tau_pol)."""

    theta_e: float = math.pi
    wait: Optional[float] = None


@dataclass(frozen=True)
class SequenceSpec:
    """Parameters of one polarization sequence.

    Attributes:
        protocol: PulsePol or NOVEL
        tau_pol: PulsePol interval, microseconds
        n_pol: Number of repetitions of the doubled unit
        f_t: Target frequency in MHz, defaults to 3/(2 tau_pol)
        disentangle: Optional disentangling operation
    """

    protocol: Protocol = Protocol.PULSEPOL
    tau_pol: float = 1.5
    n_pol: int = 1
    f_t: Optional[float] = None
    disentangle: Optional[DisentangleSpec] = None

    def __post_init__(self):
        object.__setattr__(self, "protocol", Protocol(self.protocol))
        if not (self.tau_pol > 0 and math.isfinite(self.tau_pol)):
            raise SequenceError(f"tau_pol must be positive, got {self.tau_pol}")
        if int(self.n_pol) != self.n_pol or self.n_pol < 1:
            raise SequenceError(f"n_pol must be a positive integer, got {self.n_pol}")
        if self.f_t is not None and not self.f_t > 0:
            raise SequenceError(f"f_t must be positive, got {self.f_t}")

    @classmethod
    def resonant(cls, f_t: float, **kwargs) -> "SequenceSpec":
        """Spec with tau_pol = 3/(2 f_t)."""
        return cls(tau_pol=3.0 / (2.0 * f_t), f_t=f_t, **kwargs)

    @property
    def target_frequency(self) -> float:
        return self.f_t if self.f_t is not None else 3.0 / (2.0 * self.tau_pol)

    @property
    def duration(self) -> float:
        """Length of the whole sequence, 2 n_pol tau_pol."""
        return 2 * self.n_pol * self.tau_pol

    @property
    def wait_time(self) -> float:
        if self.disentangle is None or self.disentangle.wait is None:
            return self.duration
        return self.disentangle.wait


@dataclass(frozen=True)
class ChannelKraus:
    """Kraus operators acting on the nuclear register."""

    operators: Tuple[np.ndarray, ...]
    source: str = ""

    def __post_init__(self):
        object.__setattr__(self, "operators", tuple(np.asarray(k) for k in self.operators))
        if not self.operators:
            raise SequenceError("channel without operators")

    @property
    def dim(self) -> int:
        return self.operators[0].shape[0]

    def completeness_error(self) -> float:
        total = sum(dagger(k) @ k for k in self.operators)
        return float(np.max(np.abs(total - np.eye(self.dim))))

    def then(self, other: "ChannelKraus") -> "ChannelKraus":
        """Channel applying self first, then other."""
        ops = tuple(b @ a for a in self.operators for b in other.operators)
        return ChannelKraus(ops, source=f"{self.source} -> {other.source}")


def electron_pulse(axis: str, angle: float, sign: int, layout: RegisterLayout) -> np.ndarray:
    """Ideal pulse exp(-i sign angle S_axis) on the electron pseudo-spin.

    Raises:
        SequenceError: unknown axis
    """
    half = 0.5 * sign * angle
    if axis == "x":
        op = su2_exponential(half, 0.0, 0.0)
    elif axis == "y":
        op = su2_exponential(0.0, half, 0.0)
    else:
        raise SequenceError(f"unknown pulse axis '{axis}'")
    return embed_single_spin(op, ELECTRON_SLOT, layout)


def sector_propagators(system: SpinSystem, duration: float) -> Tuple[np.ndarray, np.ndarray]:
    """Nuclear propagators of both electron sectors for a free evolution.

    Returns:
        (initial-sector block, flip-sector block)
    """
    if duration < 0:
        raise SequenceError(f"negative duration {duration}")
    blocks = []
    for m_s in system.electron.sector_values:
        factors = [
            su2_exponential(math.pi * duration * bx, 0.0, math.pi * duration * bz)
            for bx, bz in system.sector_coefficients(m_s)
        ]
        blocks.append(kron_chain(factors))
    return blocks[0], blocks[1]


def free_evolution(system: SpinSystem, duration: float) -> np.ndarray:
    """Joint propagator exp(-2 pi i H duration), block diagonal in the sectors."""
    return linalg.block_diag(*sector_propagators(system, duration))


def pulsepol_unit(system: SpinSystem, spec: SequenceSpec) -> np.ndarray:
    """One PulsePol unit, U_x U_t U_y^2 U_t U_x U_y U_t (U_x^+)^2 U_t U_y."""
    if spec.protocol is not Protocol.PULSEPOL:
        raise SequenceError(f"expected PulsePol, got {spec.protocol.value}")
    layout = system.layout
    u_x = electron_pulse("x", math.pi / 2, 1, layout)
    u_y = electron_pulse("y", math.pi / 2, 1, layout)
    u_xd = dagger(u_x)
    u_t = free_evolution(system, spec.tau_pol / 4)
    factors = (u_x, u_t, u_y, u_y, u_t, u_x, u_y, u_t, u_xd, u_xd, u_t, u_y)
    return reduce(np.matmul, factors)


def pulsepol_total(system: SpinSystem, spec: SequenceSpec) -> np.ndarray:
    unit = pulsepol_unit(system, spec)
    total = unitary_power(unit, 2 * spec.n_pol)
    check_unitary(total)
    return total


def novel_hamiltonian(system: SpinSystem, f_t: float) -> np.ndarray:
    """Drive f_t S_y plus the sector Hamiltonians, MHz."""
    layout = system.layout
    blocks = [sector_hamiltonian(system, m) for m in system.electron.sector_values]
    drive = f_t * embed_single_spin(SIGMA_Y / 2, ELECTRON_SLOT, layout)
    return linalg.block_diag(*blocks) + drive


def novel_total(system: SpinSystem, spec: SequenceSpec) -> np.ndarray:
    """U_x exp(-2 pi i H_NOVEL t_dur) U_x^+ with t_dur = 2 n_pol tau_pol."""
    if spec.protocol is not Protocol.NOVEL:
        raise SequenceError(f"expected NOVEL, got {spec.protocol.value}")
    h = novel_hamiltonian(system, spec.target_frequency)
    u_x = electron_pulse("x", math.pi / 2, 1, system.layout)
    total = u_x @ linalg.expm(-2j * math.pi * spec.duration * h) @ dagger(u_x)
    check_unitary(total)
    return total


def sequence_total(system: SpinSystem, spec: SequenceSpec) -> np.ndarray:
    if spec.protocol is Protocol.NOVEL:
        return novel_total(system, spec)
    return pulsepol_total(system, spec)


def sequence_channel(u: np.ndarray, electron: ElectronModel) -> ChannelKraus:
    """Kraus operators <flip|U|init> and <init|U|init> of a joint unitary.

    Raises:
        ChannelCompletenessError: blocks are not complete (slot-ordering bug)
    """
    u = np.asarray(u)
    n = u.shape[0] // 2
    blocks = {}
    for name, row in (("alpha", electron.flip_index), ("beta", electron.initial_index)):
        col = electron.initial_index
        blocks[name] = u[row * n : (row + 1) * n, col * n : (col + 1) * n]
    channel = ChannelKraus((blocks["alpha"], blocks["beta"]), source="sequence")
    err = channel.completeness_error()
    if err > COMPLETENESS_TOL:
        raise ChannelCompletenessError(err, channel.source)
    return channel


def disentangle_channel(system: SpinSystem, theta_e: float, wait: float) -> ChannelKraus:
    """Re-prepare the electron in exp(-i theta_e S_x)|init>, wait, trace it out.

    Only the sector weights cos^2(theta_e/2) and sin^2(theta_e/2) survive the
    trace, so the rotation phase does not enter. Zero-weight sectors are dropped.

    Raises:
        SequenceError: electron model is not the NV effective model
    """
    if system.electron.kind is not ElectronKind.NV_EFFECTIVE:
        raise SequenceError("disentangling requires the NV effective electron")
    w_init, w_flip = sector_propagators(system, wait)
    amplitudes = (math.cos(theta_e / 2), -1j * math.sin(theta_e / 2))
    ops = tuple(c * w for c, w in zip(amplitudes, (w_init, w_flip)) if abs(c) > 1e-15)
    return ChannelKraus(ops, source=f"disentangle(theta_e={theta_e:.4g}, wait={wait:.4g})")
