###############################################################################
# pulsed-dnp: pulsed dynamic nuclear polarization of small 13C clusters.
# Copyright © 2026 the pulsed-dnp developers. All rights reserved.
# Portions derived from PrOMMiS IDAES connectivity, Copyright © 2024-2025
# The Regents of the University of California, et al.
# See LICENSE.md and COPYRIGHT.md for terms.
###############################################################################
"""
Shared constants for pulsed_dnp
"""
# stdlib
from enum import Enum

__author__ = "pulsed-dnp developers"


class ElectronKind(Enum):
    SPIN_HALF = "spin_half"
    NV_EFFECTIVE = "nv_effective"


class Protocol(Enum):
    PULSEPOL = "pulsepol"
    NOVEL = "novel"


class RunMode(Enum):
    COHERENT = "coherent"
    INCOHERENT = "incoherent"
    COHERENT_WITH_DISENTANGLE = "coherent_with_disentangle"


class Species(Enum):
    C13 = "13C"
    H1 = "1H"


class OutputFormats(Enum):
    CSV = "csv"
    JSON = "json"


class ScanVariable(Enum):
    TAU_POL = "tau_pol_us"
    A_PERP = "a_perp_mhz"
    TARGET_FREQUENCY = "f_t_mhz"


class ExitCode:
    OK = 0
    CONFIG = 2
    NUMERICAL = 3


#: Maximum deviation of U U^dagger from the identity
UNITARITY_TOL = 1e-10
#: Kraus completeness, as built
KRAUS_TOL = 1e-10
#: Kraus completeness before a channel is rejected
COMPLETENESS_TOL = 1e-8
#: Trace drift and negative eigenvalues of a density matrix
TRACE_TOL = 1e-8
PSD_TOL = 1e-8
#: Largest |rho - rho^dagger| entry accepted for a density matrix
HERMITICITY_TOL = 1e-12
#: Residual allowed when reconstructing a block from its amplitudes
RECONSTRUCTION_TOL = 1e-8

#: Dense matrices of dimension 2^(N+1) are used throughout
MAX_NUCLEI = 12

#: Natural abundance of 13C
C13_ABUNDANCE = 0.011
#: Carbon-carbon bond length in diamond, nm
DIAMOND_BOND_NM = 0.155
#: Cluster rejected if any coupling reaches this A_perp, MHz
A_PERP_CAP_MHZ = 0.1
#: Lattice cutoff radius, nm
CLUSTER_RADIUS_NM = 2.0

#: Gyromagnetic ratio of 13C over 2 pi, MHz/T
GAMMA_C13_MHZ_PER_T = 10.7084
