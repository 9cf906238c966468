###############################################################################
# pulsed-dnp: pulsed dynamic nuclear polarization of small 13C clusters.
# Copyright © 2026 the pulsed-dnp developers. All rights reserved.
# Portions derived from PrOMMiS IDAES connectivity, Copyright © 2024-2025
# The Regents of the University of California, et al.
# See LICENSE.md and COPYRIGHT.md for terms.
###############################################################################
"""
Spin-1/2 algebra on a register of one electron slot followed by nuclear slots.

Basis ordering follows ``numpy.kron``: slot 0 is the most significant index.
For every two-level slot, index 0 is |up> (I_z = +1/2) and index 1 is |down>.
"""
# stdlib
from dataclasses import dataclass
from functools import reduce
import logging
from typing import Iterable, Mapping, Sequence, Tuple, Union

# third-party
import numpy as np
from scipy import linalg

# package
from pulsed_dnp.const import UNITARITY_TOL

__author__ = "pulsed-dnp developers"

_log = logging.getLogger(__name__)

IDENTITY2 = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
#: I_x + i I_y, raises |down> to |up>
SIGMA_PLUS = np.array([[0, 1], [0, 0]], dtype=complex)
SIGMA_MINUS = np.array([[0, 0], [1, 0]], dtype=complex)
I_X, I_Y, I_Z = SIGMA_X / 2, SIGMA_Y / 2, SIGMA_Z / 2

#: Slot key of the electron
ELECTRON_SLOT = "e"

Slot = Union[int, str]


class SpinAlgebraError(ValueError):
    def __init__(self, msg):
        super().__init__(f"Spin algebra: {msg}")


class NonUnitaryError(SpinAlgebraError):
    def __init__(self, err: float, tol: float):
        super().__init__(f"matrix is not unitary, |U U^+ - 1| = {err:.3g} > {tol:.1g}")
        self.error = err


@dataclass(frozen=True)
class RegisterLayout:
    """Ordered slots of a register: optional electron slot, then nuclei.

    Attributes:
        nuclear_count: Number of nuclear spin-1/2 slots
        electron_dim: 2 for an electron pseudo-spin slot, 0 for none
    """

    nuclear_count: int
    electron_dim: int = 2

    def __post_init__(self):
        if self.nuclear_count < 0:
            raise SpinAlgebraError(f"negative nuclear count {self.nuclear_count}")
        if self.electron_dim not in (0, 2):
            raise SpinAlgebraError("electron dimension must be 0 or 2")
        if self.nuclear_count == 0 and self.electron_dim == 0:
            raise SpinAlgebraError("empty register")

    @property
    def has_electron(self) -> bool:
        return self.electron_dim > 0

    @property
    def dims(self) -> Tuple[int, ...]:
        head = (self.electron_dim,) if self.has_electron else ()
        return head + (2,) * self.nuclear_count

    @property
    def total_dim(self) -> int:
        return int(np.prod(self.dims))

    @property
    def nuclear_dim(self) -> int:
        return 2**self.nuclear_count

    def position(self, slot: Slot) -> int:
        """Axis position of a slot in the tensor-product ordering.

        Raises:
            SpinAlgebraError: if the slot does not exist
        """
        if slot == ELECTRON_SLOT:
            if not self.has_electron:
                raise SpinAlgebraError("register has no electron slot")
            return 0
        if isinstance(slot, (int, np.integer)) and 0 <= slot < self.nuclear_count:
            return int(slot) + (1 if self.has_electron else 0)
        raise SpinAlgebraError(
            f"slot {slot!r} out of range for {self.nuclear_count} nuclei"
        )


def dagger(m: np.ndarray) -> np.ndarray:
    return np.conj(np.transpose(m))


def unitarity_error(u: np.ndarray) -> float:
    u = np.asarray(u)
    return float(np.max(np.abs(u @ dagger(u) - np.eye(u.shape[0]))))


def hermiticity_error(h: np.ndarray) -> float:
    h = np.asarray(h)
    return float(np.max(np.abs(h - dagger(h))))


def check_unitary(u: np.ndarray, tol: float = UNITARITY_TOL) -> None:
    u = np.asarray(u)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        raise SpinAlgebraError(f"expected a square matrix, got shape {u.shape}")
    err = unitarity_error(u)
    if err > tol:
        raise NonUnitaryError(err, tol)


def kron_chain(factors: Sequence[np.ndarray]) -> np.ndarray:
    """Tensor product of the factors in order (first factor is most significant).

    Raises:
        SpinAlgebraError: for an empty sequence or a non-square factor
    """
    if len(factors) == 0:
        raise SpinAlgebraError("kron_chain of an empty sequence")
    mats = [np.asarray(f, dtype=complex) for f in factors]
    for m in mats:
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise SpinAlgebraError(f"factor has shape {m.shape}, expected square")
    return reduce(np.kron, mats)


def embed_operator(ops: Mapping[Slot, np.ndarray], layout: RegisterLayout) -> np.ndarray:
    """Place 2x2 operators on the given slots, identity elsewhere.

    Args:
        ops: Mapping of slot to operator
        layout: Register layout

    Returns:
        Operator on the full register
    """
    by_position = {}
    for slot, op in ops.items():
        op = np.asarray(op, dtype=complex)
        if op.shape != (2, 2):
            raise SpinAlgebraError(f"operator on slot {slot!r} has shape {op.shape}")
        by_position[layout.position(slot)] = op
    factors = [by_position.get(i, np.eye(d, dtype=complex)) for i, d in enumerate(layout.dims)]
    return kron_chain(factors)


def embed_single_spin(op: np.ndarray, slot: Slot, layout: RegisterLayout) -> np.ndarray:
    """Place one 2x2 operator on a slot of the register."""
    return embed_operator({slot: op}, layout)


def su2_exponential(ax: float, ay: float, az: float) -> np.ndarray:
    """Closed form of exp(-i (ax sx + ay sy + az sz)) for Pauli matrices s.

    Returns:
        2x2 unitary; the identity when all coefficients are zero

    Raises:
        SpinAlgebraError: non-finite input
    """
    if not all(np.isfinite((ax, ay, az))):
        raise SpinAlgebraError(f"non-finite rotation ({ax}, {ay}, {az})")
    norm = np.sqrt(ax * ax + ay * ay + az * az)
    if norm == 0:
        return IDENTITY2.copy()
    c, s = np.cos(norm), np.sin(norm) / norm
    return np.array(
        [
            [c - 1j * s * az, -1j * s * ax - s * ay],
            [-1j * s * ax + s * ay, c + 1j * s * az],
        ],
        dtype=complex,
    )


def partial_trace(rho: np.ndarray, layout: RegisterLayout, keep: Iterable[Slot]) -> np.ndarray:
    """Trace out every slot not in `keep`.

    Kept slots stay in register order regardless of the order given.

    Args:
        rho: Operator on the full register
        layout: Register layout
        keep: Slots to keep

    Returns:
        Reduced operator

    Raises:
        SpinAlgebraError: shape does not match the layout
    """
    rho = np.asarray(rho)
    dims = layout.dims
    if rho.shape != (layout.total_dim, layout.total_dim):
        raise SpinAlgebraError(
            f"operator shape {rho.shape} does not match register dimension {layout.total_dim}"
        )
    kept = sorted({layout.position(s) for s in keep})
    n = len(dims)
    tensor = rho.reshape(dims + dims)
    current = n
    # descending, so lower axis numbers are unaffected
    for p in reversed([p for p in range(n) if p not in kept]):
        tensor = np.trace(tensor, axis1=p, axis2=p + current)
        current -= 1
    kept_dim = int(np.prod([dims[p] for p in kept])) if kept else 1
    return tensor.reshape(kept_dim, kept_dim)


def unitary_spectral(u: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Eigenphases and unitary eigenvectors of a unitary matrix.

    The complex Schur form of a normal matrix is diagonal, so the Schur
    vectors form an orthonormal eigenbasis even for degenerate spectra.

    Returns:
        (phases, V) with U = V diag(exp(i phases)) V^+

    Raises:
        NonUnitaryError: input is not unitary
    """
    check_unitary(u)
    t, z = linalg.schur(np.asarray(u, dtype=complex), output="complex")
    return np.angle(np.diag(t)), z


def unitary_power(u: np.ndarray, n: int) -> np.ndarray:
    """U**n for a non-negative integer n."""
    if n < 0:
        raise SpinAlgebraError(f"negative power {n}")
    u = np.asarray(u, dtype=complex)
    if n <= 16:
        return np.linalg.matrix_power(u, n)
    phases, v = unitary_spectral(u)
    return (v * np.exp(1j * n * phases)) @ dagger(v)
