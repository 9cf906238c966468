###############################################################################
# pulsed-dnp: pulsed dynamic nuclear polarization of small 13C clusters.
# Copyright © 2026 the pulsed-dnp developers. All rights reserved.
# Portions derived from PrOMMiS IDAES connectivity, Copyright © 2024-2025
# The Regents of the University of California, et al.
# See LICENSE.md and COPYRIGHT.md for terms.
###############################################################################
import os

import pytest


PULSED_DNP_MARKERS = {
    "unit": "Quick tests of small systems, must run in < 2 s",
    "component": "Numerics-heavy tests, seconds each",
    "integration": "Long reproduction runs, minutes (set PULSED_DNP_INTEGRATION=1)",
}

INTEGRATION_ENV = "PULSED_DNP_INTEGRATION"


def pytest_configure(config: pytest.Config):
    for spec, descr in PULSED_DNP_MARKERS.items():
        config.addinivalue_line("markers", f"{spec}: {descr}")


def pytest_collection_modifyitems(config: pytest.Config, items):
    if os.environ.get(INTEGRATION_ENV) == "1":
        return
    skip = pytest.mark.skip(reason=f"set {INTEGRATION_ENV}=1 to run")
    for item in items:
        if "integration" in item.keywords:
            item.add_marker(skip)
