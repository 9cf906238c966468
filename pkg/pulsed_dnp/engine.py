###############################################################################
# pulsed-dnp: pulsed dynamic nuclear polarization of small 13C clusters.
# Copyright © 2026 the pulsed-dnp developers. All rights reserved.
# Portions derived from PrOMMiS IDAES connectivity, Copyright © 2024-2025
# The Regents of the University of California, et al.
# See LICENSE.md and COPYRIGHT.md for terms.
###############################################################################
"""
Polarization transfer loop.

Each repetition prepares the electron in its initial sector, applies the
sequence and traces the electron out. This is done with the Kraus
operators of the sequence on the nuclear register (coherent modes) or with
the Markov matrix of their populations (incoherent mode).
"""
# stdlib
from dataclasses import dataclass, field
import logging
import time
from typing import Any, Dict, Optional, Tuple, Union

# third-party
import numpy as np
from pandas import DataFrame

# package
from pulsed_dnp.const import RunMode, HERMITICITY_TOL, TRACE_TOL, PSD_TOL, KRAUS_TOL
from pulsed_dnp.model import SpinSystem, ElectronModel
from pulsed_dnp.sequences import (
    ChannelKraus,
    SequenceSpec,
    disentangle_channel,
    sequence_channel,
    sequence_total,
)
from pulsed_dnp.spinalg import RegisterLayout, dagger, partial_trace

__author__ = "pulsed-dnp developers"

_log = logging.getLogger(__name__)


class EngineError(ValueError):
    def __init__(self, msg):
        super().__init__(f"Engine: {msg}")


class NumericalHealthError(RuntimeError):
    def __init__(self, what: str, value: float, tol: float):
        super().__init__(f"Numerical health check failed: {what} = {value:.3g} (tolerance {tol:.1g})")
        self.what, self.value = what, value


def initial_nuclear_state(n_nuc: int) -> np.ndarray:
    """Fully mixed state I/2^n."""
    if n_nuc < 1:
        raise EngineError(f"n_nuc must be >= 1, got {n_nuc}")
    dim = 2**n_nuc
    return np.eye(dim, dtype=complex) / dim


def apply_channel(rho: np.ndarray, channel: ChannelKraus) -> np.ndarray:
    """Sum of K rho K^+ over the Kraus operators.

    Raises:
        EngineError: dimension mismatch
        NumericalHealthError: trace changed by more than the tolerance
    """
    if rho.shape != (channel.dim, channel.dim):
        raise EngineError(f"state of shape {rho.shape} for channel of dimension {channel.dim}")
    out = np.zeros_like(rho, dtype=complex)
    for k in channel.operators:
        out += k @ rho @ dagger(k)
    drift = abs(np.trace(out) - np.trace(rho))
    if drift > TRACE_TOL:
        raise NumericalHealthError("trace drift", drift, TRACE_TOL)
    return out


def decohere_diag(rho: np.ndarray) -> np.ndarray:
    return np.diag(np.diag(rho))


def incoherent_markov(channel: ChannelKraus) -> np.ndarray:
    """Population transfer matrix M[i, j] = sum_k |K_k[i, j]|^2.

    Raises:
        NumericalHealthError: columns do not sum to one
    """
    m = sum(np.abs(k) ** 2 for k in channel.operators)
    err = float(np.max(np.abs(m.sum(axis=0) - 1.0)))
    if err > KRAUS_TOL:
        raise NumericalHealthError("Markov column sum", err, KRAUS_TOL)
    return m


def joint_evolution_step(rho_n: np.ndarray, u: np.ndarray, electron: ElectronModel) -> np.ndarray:
    """One repetition done literally on the joint register.

    Prepare |init><init| (x) rho_n, evolve with U, trace out the electron.
    """
    dim = rho_n.shape[0]
    n_nuc = int(round(np.log2(dim)))
    rho_e = np.zeros((2, 2), dtype=complex)
    rho_e[electron.initial_index, electron.initial_index] = 1.0
    joint = u @ np.kron(rho_e, rho_n) @ dagger(u)
    return partial_trace(joint, RegisterLayout(n_nuc), keep=range(n_nuc))


def z_sign_table(n_nuc: int) -> np.ndarray:
    """Eigenvalues of sigma_z^(l) on the basis states, shape (n_nuc, 2^n_nuc)."""
    index = np.arange(2**n_nuc)
    bits = (index[None, :] >> (n_nuc - 1 - np.arange(n_nuc))[:, None]) & 1
    return 1.0 - 2.0 * bits


def spin_polarizations(populations: np.ndarray, n_nuc: int) -> np.ndarray:
    """Signed 2<I_z^(l)> for each nucleus from basis-state populations."""
    return z_sign_table(n_nuc) @ np.real(populations)


def density_matrix_health(rho: np.ndarray) -> Dict[str, float]:
    """Trace error, Hermiticity error and minimum eigenvalue.

    Raises:
        NumericalHealthError: any of them beyond its tolerance
    """
    health = {
        "trace_error": float(abs(np.trace(rho) - 1.0)),
        "hermiticity_error": float(np.max(np.abs(rho - dagger(rho)))),
    }
    health["min_eigenvalue"] = float(np.min(np.linalg.eigvalsh((rho + dagger(rho)) / 2)))
    if health["trace_error"] > TRACE_TOL:
        raise NumericalHealthError("trace error", health["trace_error"], TRACE_TOL)
    if health["hermiticity_error"] > HERMITICITY_TOL:
        raise NumericalHealthError("hermiticity error", health["hermiticity_error"], HERMITICITY_TOL)
    if health["min_eigenvalue"] < -PSD_TOL:
        raise NumericalHealthError("minimum eigenvalue", health["min_eigenvalue"], PSD_TOL)
    return health


@dataclass
class RunResult:
    """Trajectories of one polarization run.

    Attributes:
        signed_polarization: 2<I_z^(l)>, shape (n_rep + 1, n_nuc); row 0 is the initial state
        final_state: Nuclear density matrix, or populations in incoherent mode
        mode: Run mode
        system: Spin system
        spec: Sequence
        metadata: Timings, health checks and labels
    """

    signed_polarization: np.ndarray
    final_state: np.ndarray
    mode: RunMode
    system: SpinSystem
    spec: SequenceSpec
    metadata: Dict[str, Any] = field(default_factory=dict)

    @property
    def n_rep(self) -> int:
        return self.signed_polarization.shape[0] - 1

    @property
    def per_spin_polarization(self) -> np.ndarray:
        return np.abs(self.signed_polarization)

    @property
    def total_polarization(self) -> np.ndarray:
        return np.abs(self.signed_polarization.mean(axis=1))

    @property
    def transfer_polarization(self) -> np.ndarray:
        """Average polarization along the transfer direction (toward I_z = -1/2).

        Negative where the sequence drives the nuclei the other way.
        """
        return -self.signed_polarization.mean(axis=1)

    @property
    def final_per_spin(self) -> np.ndarray:
        return self.per_spin_polarization[-1]

    @property
    def final_total(self) -> float:
        return float(self.total_polarization[-1])

    @property
    def final_transfer(self) -> float:
        return float(self.transfer_polarization[-1])

    @property
    def final_density_matrix(self) -> np.ndarray:
        if self.final_state.ndim == 1:
            return np.diag(self.final_state).astype(complex)
        return self.final_state

    def to_frame(self) -> DataFrame:
        """Buildup trajectory, one row per repetition."""
        data = {"rep": np.arange(self.n_rep + 1), "P": self.total_polarization}
        for l in range(self.system.n_nuc):
            data[f"P_{l + 1}"] = self.per_spin_polarization[:, l]
        return DataFrame(data)


def build_channel(system: SpinSystem, spec: SequenceSpec, mode: RunMode) -> ChannelKraus:
    """Per-repetition channel for a run mode."""
    channel = sequence_channel(sequence_total(system, spec), system.electron)
    if mode is RunMode.COHERENT_WITH_DISENTANGLE:
        if spec.disentangle is None:
            raise EngineError("disentangling mode requires a disentangle spec")
        dis = disentangle_channel(system, spec.disentangle.theta_e, spec.wait_time)
        channel = channel.then(dis)
    return channel


def run(
    system: SpinSystem,
    spec: SequenceSpec,
    mode: Union[RunMode, str],
    n_rep: int,
    metadata: Optional[Dict[str, Any]] = None,
) -> RunResult:
    """Repeat the sequence n_rep times starting from the fully mixed state.

    Polarization is recorded after every complete repetition, including the
    disentangling step when present.

    Args:
        system: Spin system
        spec: Sequence
        mode: Coherent, incoherent, or coherent with disentangling
        n_rep: Number of repetitions
        metadata: Extra items copied into the result

    Returns:
        Trajectories and final state

    Raises:
        EngineError: bad arguments
        NumericalHealthError: trace drift, loss of positivity, incomplete channel
    """
    mode = RunMode(mode)
    if n_rep < 1:
        raise EngineError(f"n_rep must be >= 1, got {n_rep}")
    n = system.n_nuc
    _log.info(f"_begin_ run mode={mode.value} n_nuc={n} n_rep={n_rep}")
    t0 = time.perf_counter()
    channel = build_channel(system, spec, mode)
    kraus_error = channel.completeness_error()
    t_build = time.perf_counter() - t0

    signs = z_sign_table(n)
    signed = np.empty((n_rep + 1, n))
    if mode is RunMode.INCOHERENT:
        markov = incoherent_markov(channel)
        state = np.full(2**n, 1.0 / 2**n)
        signed[0] = signs @ state
        for k in range(1, n_rep + 1):
            state = markov @ state
            signed[k] = signs @ state
        drift = abs(state.sum() - 1.0)
        if drift > TRACE_TOL:
            raise NumericalHealthError("trace drift", drift, TRACE_TOL)
        health = {"trace_error": float(drift), "min_eigenvalue": float(state.min())}
        if health["min_eigenvalue"] < -PSD_TOL:
            raise NumericalHealthError("minimum population", health["min_eigenvalue"], PSD_TOL)
    else:
        state = initial_nuclear_state(n)
        signed[0] = signs @ np.real(np.diag(state))
        for k in range(1, n_rep + 1):
            state = apply_channel(state, channel)
            signed[k] = signs @ np.real(np.diag(state))
            if _log.isEnabledFor(logging.DEBUG) and k % 100 == 0:
                _log.debug(f"rep={k} P={abs(signed[k].mean()):.6f}")
        health = density_matrix_health(state)
    health["kraus_error"] = kraus_error

    elapsed = time.perf_counter() - t0
    meta = {"mode": mode.value, "t_build": t_build, "t_total": elapsed, **health}
    meta.update(metadata or {})
    _log.info(f"_end_ run mode={mode.value} P={abs(signed[-1].mean()):.4f} time={elapsed:.2f}s")
    return RunResult(signed, state, mode, system, spec, meta)


def pair_density_matrix(rho: np.ndarray, p: int, q: int) -> np.ndarray:
    """Reduced state of nuclei p and q (0-based), ordered (p, q).

    Raises:
        EngineError: p equals q
    """
    if p == q:
        raise EngineError(f"pair needs two different spins, got p=q={p}")
    n_nuc = int(round(np.log2(rho.shape[0])))
    pair = partial_trace(rho, RegisterLayout(n_nuc, electron_dim=0), keep=(p, q))
    if p > q:
        pair = pair.reshape(2, 2, 2, 2).transpose(1, 0, 3, 2).reshape(4, 4)
    return pair


def pair_coherence_map(rho: np.ndarray, element: Tuple[int, int] = (2, 1)) -> np.ndarray:
    """|rho_pq[element]| for every ordered pair (0-based element), NaN on the diagonal."""
    n_nuc = int(round(np.log2(rho.shape[0])))
    out = np.full((n_nuc, n_nuc), np.nan)
    for p in range(n_nuc):
        for q in range(n_nuc):
            if p != q:
                out[p, q] = abs(pair_density_matrix(rho, p, q)[element])
    return out
