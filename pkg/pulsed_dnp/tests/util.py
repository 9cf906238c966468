###############################################################################
# pulsed-dnp: pulsed dynamic nuclear polarization of small 13C clusters.
# Copyright © 2026 the pulsed-dnp developers. All rights reserved.
# Portions derived from PrOMMiS IDAES connectivity, Copyright © 2024-2025
# The Regents of the University of California, et al.
# See LICENSE.md and COPYRIGHT.md for terms.
###############################################################################
"""
Test utility.
"""
import numpy as np
from scipy import linalg

from pulsed_dnp.model import ElectronModel, NuclearSpinParams, SpinSystem


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-ish unitary from the QR decomposition of a complex Gaussian matrix."""
    z = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    q, r = linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_density_matrix(dim: int, rng: np.random.Generator) -> np.ndarray:
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = g @ g.conj().T
    return rho / np.trace(rho)


def random_system(n_nuc: int, electron: ElectronModel, rng: np.random.Generator, f_n: float = 1.0) -> SpinSystem:
    """Nuclei with couplings drawn from [0, 0.4) MHz (a_perp) and [-0.2, 0.2) MHz (a_par)."""
    nuclei = [
        NuclearSpinParams(a_par=float(rng.uniform(-0.2, 0.2)), a_perp=float(rng.uniform(0, 0.4)), label=str(i + 1))
        for i in range(n_nuc)
    ]
    return SpinSystem(electron, nuclei, f_n)
