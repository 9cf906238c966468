###############################################################################
# pulsed-dnp: pulsed dynamic nuclear polarization of small 13C clusters.
# Copyright © 2026 the pulsed-dnp developers. All rights reserved.
# Portions derived from PrOMMiS IDAES connectivity, Copyright © 2024-2025
# The Regents of the University of California, et al.
# See LICENSE.md and COPYRIGHT.md for terms.
###############################################################################
"""
Tests for `const` module.
"""
import pytest

from pulsed_dnp import const


@pytest.mark.unit
def test_enum_values():
    assert const.RunMode("coherent_with_disentangle") is const.RunMode.COHERENT_WITH_DISENTANGLE
    assert const.ScanVariable("f_t_mhz") is const.ScanVariable.TARGET_FREQUENCY
    assert {m.value for m in const.OutputFormats} == {"csv", "json"}
    with pytest.raises(ValueError):
        const.Protocol("cw")


@pytest.mark.unit
def test_exit_codes():
    assert (const.ExitCode.OK, const.ExitCode.CONFIG, const.ExitCode.NUMERICAL) == (0, 2, 3)
    assert const.MAX_NUCLEI == 12
