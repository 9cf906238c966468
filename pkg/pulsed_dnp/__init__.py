###############################################################################
# pulsed-dnp: pulsed dynamic nuclear polarization of small 13C clusters.
# Copyright © 2026 the pulsed-dnp developers. All rights reserved.
# Portions derived from PrOMMiS IDAES connectivity, Copyright © 2024-2025
# The Regents of the University of California, et al.
# See LICENSE.md and COPYRIGHT.md for terms.
###############################################################################
"""
Simulation of pulsed dynamic nuclear polarization with PulsePol and NOVEL
sequences: spin-system model, sequence unitaries, polarization engine,
transition-amplitude analysis and diamond cluster generation.
"""
from pulsed_dnp import version

__version__ = version.VERSION

from pulsed_dnp.model import ElectronModel, NuclearSpinParams, SpinSystem
from pulsed_dnp.sequences import SequenceSpec, DisentangleSpec
from pulsed_dnp.engine import run, RunResult
