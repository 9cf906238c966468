###############################################################################
# pulsed-dnp: pulsed dynamic nuclear polarization of small 13C clusters.
# Copyright © 2026 the pulsed-dnp developers. All rights reserved.
# Portions derived from PrOMMiS IDAES connectivity, Copyright © 2024-2025
# The Regents of the University of California, et al.
# See LICENSE.md and COPYRIGHT.md for terms.
###############################################################################
"""
Tests for `model` module.
"""
# stdlib
import math

# third-party
import numpy as np
import pytest

# package
from pulsed_dnp.const import ElectronKind, Protocol, Species, MAX_NUCLEI
from pulsed_dnp.model import (
    PHYSICAL,
    ElectronModel,
    ModelError,
    NuclearSpinParams,
    ResourceLimitError,
    SpinSystem,
    larmor_from_field,
    precession_frequency,
    precession_target,
    resonance_frequency,
    resonant_tau,
    sector_hamiltonian,
    tilt_angle,
)
from pulsed_dnp.spinalg import hermiticity_error


@pytest.mark.unit
def test_larmor_from_field():
    # 13C at 40 mT is about 428 kHz
    assert larmor_from_field(40.0) == pytest.approx(0.428, abs=1e-3)
    # 1 MHz protons at 23.4866 mT
    assert larmor_from_field(23.4866, Species.H1) == pytest.approx(1.0, abs=1e-4)
    assert larmor_from_field(10.0, "13C") == pytest.approx(0.107084)
    with pytest.raises(ModelError):
        larmor_from_field(0.0)
    with pytest.raises(ValueError):
        larmor_from_field(1.0, "2H")


@pytest.mark.unit
def test_dipolar_prefactor():
    # mu0/4pi * h * gamma_e * gamma_13C, about 19.9 kHz nm^3
    assert PHYSICAL.mu0_h_prefactor(Species.C13) == pytest.approx(0.01989, rel=2e-3)
    ratio = PHYSICAL.mu0_h_prefactor(Species.H1) / PHYSICAL.mu0_h_prefactor(Species.C13)
    assert ratio == pytest.approx(PHYSICAL.gamma_h1 / PHYSICAL.gamma_c13)


@pytest.mark.unit
def test_nuclear_params_validation():
    NuclearSpinParams(a_par=-0.1, a_perp=0.0)
    with pytest.raises(ModelError):
        NuclearSpinParams(a_par=0.0, a_perp=-0.1)
    with pytest.raises(ModelError):
        NuclearSpinParams(a_par=math.inf, a_perp=0.1)


@pytest.mark.unit
def test_electron_models():
    half = ElectronModel.spin_half()
    nv = ElectronModel.nv_effective()
    assert half.sector_values == (0.5, -0.5)
    assert nv.initial_sector == 0.0 and nv.flip_sector == -1.0
    assert nv.index(-1.0) == nv.flip_index == 1
    assert ElectronModel.from_kind("nv_effective") == nv
    with pytest.raises(ModelError):
        half.index(1.0)
    with pytest.raises(ModelError):
        ElectronModel(ElectronKind.SPIN_HALF, (0.5, 0.5))


@pytest.mark.unit
def test_spin_system_limits():
    electron = ElectronModel.spin_half()
    with pytest.raises(ModelError):
        SpinSystem(electron, [], 1.0)
    with pytest.raises(ResourceLimitError):
        SpinSystem.uniform(electron, MAX_NUCLEI + 1, 1.0, 0.1)
    with pytest.raises(ModelError):
        SpinSystem.uniform(electron, 2, 0.0, 0.1)
    system = SpinSystem.uniform(electron, 3, 1.0, 0.2, a_par=0.05)
    assert system.n_nuc == 3
    assert [n.label for n in system.nuclei] == ["1", "2", "3"]
    assert system.layout.total_dim == 16
    changed = system.with_a_perp(0.4)
    assert all(n.a_perp == 0.4 and n.a_par == 0.05 for n in changed.nuclei)
    assert system.nuclei[0].a_perp == 0.2


@pytest.mark.unit
def test_sector_hamiltonian():
    system = SpinSystem(
        ElectronModel.nv_effective(),
        [NuclearSpinParams(0.03, 0.05), NuclearSpinParams(-0.02, 0.01)],
        0.43,
    )
    h0 = sector_hamiltonian(system, 0.0)
    h1 = sector_hamiltonian(system, -1.0)
    assert h0.shape == (4, 4)
    assert hermiticity_error(h1) == 0.0
    # the m_S = 0 sector is free of hyperfine terms
    assert np.allclose(h0, np.diag([-0.43, 0.0, 0.0, 0.43]))
    # eigenvalues are +-f_p/2 sums
    fp = [precession_frequency(0.43, n.a_par, n.a_perp, -1.0) for n in system.nuclei]
    expected = sorted(s1 * fp[0] / 2 + s2 * fp[1] / 2 for s1 in (1, -1) for s2 in (1, -1))
    assert np.allclose(np.linalg.eigvalsh(h1), expected)
    with pytest.raises(ModelError):
        sector_hamiltonian(system, 0.5)


@pytest.mark.unit
def test_resonance_frequency():
    half = SpinSystem.uniform(ElectronModel.spin_half(), 1, 1.0, 0.3)
    assert resonance_frequency(half) == 1.0
    assert precession_target(half) == pytest.approx(math.hypot(1.0, 0.15))
    assert resonance_frequency(half, Protocol.NOVEL) == precession_target(half)
    shifted = SpinSystem.uniform(ElectronModel.spin_half(), 1, 1.0, 0.0, a_par=0.2)
    assert precession_target(shifted) == pytest.approx(1.0)
    nv = SpinSystem.uniform(ElectronModel.nv_effective(), 1, 0.43, 0.05, a_par=0.02)
    assert resonance_frequency(nv) == 0.43
    assert precession_target(nv) == 0.43
    assert resonant_tau(1.0) == 1.5
    with pytest.raises(ModelError):
        resonant_tau(0.0)


@pytest.mark.unit
def test_tilt_angle():
    assert tilt_angle(1.0, 0.3, ElectronKind.SPIN_HALF) == pytest.approx(math.atan(0.15))
    assert tilt_angle(0.428, 0.05, "nv_effective") == pytest.approx(math.atan(0.05 / 0.428))
    with pytest.raises(ModelError):
        tilt_angle(0.0, 0.1, ElectronKind.SPIN_HALF)
