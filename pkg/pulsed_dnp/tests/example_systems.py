###############################################################################
# pulsed-dnp: pulsed dynamic nuclear polarization of small 13C clusters.
# Copyright © 2026 the pulsed-dnp developers. All rights reserved.
# Portions derived from PrOMMiS IDAES connectivity, Copyright © 2024-2025
# The Regents of the University of California, et al.
# See LICENSE.md and COPYRIGHT.md for terms.
###############################################################################
"""
Nine measured 13C spins near an NV center and their published polarizations.
"""
import pytest

from pulsed_dnp.model import ElectronModel, NuclearSpinParams, SpinSystem, larmor_from_field
from pulsed_dnp.sequences import SequenceSpec

B0_MT = 40.3553
TAU_POL_US = 8 * 0.436
N_POL = 2
N_REP = 5000

#: A_perp and -A_par in kHz, numbered by descending A_perp
A_PERP_KHZ = (59.2, 13.0, 9.0, 9.0, 8.6, 7.0, 5.3, 5.0, 5.0)
MINUS_A_PAR_KHZ = (11.3, 14.1, 48.6, 14.0, 17.6, 4.7, 19.8, 9.8, 5.6)

COHERENT = (0.97, 0.82, 0.99, 0.79, 0.98, 0.61, 0.98, 0.22, 0.53)
COHERENT_AVERAGE = 0.77
INCOHERENT = (0.99, 0.97, 0.95, 0.97, 0.96, 0.97, 0.97, 0.97, 0.97)
INCOHERENT_AVERAGE = 0.97

#: Average polarization with disentangling, by electron rotation angle
DISENTANGLED_AVERAGE = {"0": 0.72, "pi/2": 0.88, "pi": 0.93}

#: Half a unit in the last printed digit of the published values
ROUNDING = 0.005

#: Spins (0-based) with the weakest anti-parallel coherence with spin 1
WEAK_PARTNERS_OF_1 = (2, 4, 6)

#: Reduced state of spins 1 and 2 after the coherent run
PAIR_1_2 = (
    (0, 0, 0, 0.02 + 0.01j),
    (0, 0.01, -0.01, -0.03),
    (0, -0.01, 0.09, -0.01),
    (0.02 - 0.01j, -0.03, -0.01, 0.90),
)


def measured_system() -> SpinSystem:
    nuclei = [
        NuclearSpinParams(a_par=-m / 1000, a_perp=p / 1000, label=str(i + 1))
        for i, (p, m) in enumerate(zip(A_PERP_KHZ, MINUS_A_PAR_KHZ))
    ]
    return SpinSystem(ElectronModel.nv_effective(), nuclei, larmor_from_field(B0_MT))


@pytest.fixture(scope="module")
def measured_spins() -> SpinSystem:
    return measured_system()


@pytest.fixture(scope="module")
def measured_sequence() -> SequenceSpec:
    return SequenceSpec(tau_pol=TAU_POL_US, n_pol=N_POL)
