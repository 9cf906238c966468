###############################################################################
# pulsed-dnp: pulsed dynamic nuclear polarization of small 13C clusters.
# Copyright © 2026 the pulsed-dnp developers. All rights reserved.
# Portions derived from PrOMMiS IDAES connectivity, Copyright © 2024-2025
# The Regents of the University of California, et al.
# See LICENSE.md and COPYRIGHT.md for terms.
###############################################################################
"""
Transition amplitudes of two identical nuclei.

The electron-flip block T_alpha = <flip|U|init> and the no-flip block
T_beta = <init|U|init> of a two-nucleus sequence unitary are expanded in
symmetrized operator pairs:

    T_alpha = a+ (s+1 + s+2) + a- (s-1 + s-2)
              + a+z (s+1 sz2 + sz1 s+2) + a-z (s-1 sz2 + sz1 s-2)
    T_beta  = be 1 + bz (sz1 + sz2) + bzz sz1 sz2
              + b+- (s+1 s-2 + s-1 s+2) + b++ s+1 s+2 + b-- s-1 s-2

Closed forms in the precession phase phi and tilt angle theta are provided
for comparison with the numerics.
"""
# stdlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from functools import lru_cache
import logging
import math
from typing import Any, Dict, Iterable, Optional, Tuple, Union

# third-party
import numpy as np
from pandas import DataFrame

# package
from pulsed_dnp.const import ElectronKind, Protocol, ScanVariable, RECONSTRUCTION_TOL
from pulsed_dnp.model import (
    ElectronModel,
    SpinSystem,
    precession_target,
    tilt_angle,
)
from pulsed_dnp.sequences import SequenceSpec, sequence_total
from pulsed_dnp.spinalg import (
    RegisterLayout,
    SIGMA_MINUS,
    SIGMA_PLUS,
    SIGMA_Z,
    embed_operator,
)

__author__ = "pulsed-dnp developers"

_log = logging.getLogger(__name__)

SQRT2 = math.sqrt(2.0)


class AmplitudeError(ValueError):
    def __init__(self, msg):
        super().__init__(f"Amplitudes: {msg}")


class BasisIncompleteError(AmplitudeError):
    def __init__(self, residual: float):
        super().__init__(
            f"symmetrized operator basis does not reconstruct the blocks "
            f"(residual {residual:.3g}); nuclei not identical or model not supported"
        )
        self.residual = residual


@dataclass(frozen=True)
class TransitionAmplitudeSet:
    """Complex amplitudes; None where a source has no value for a coefficient."""

    alpha_plus: complex
    alpha_minus: complex
    alpha_plus_z: complex
    alpha_minus_z: complex
    beta_e: Optional[complex]
    beta_z: Optional[complex]
    beta_zz: Optional[complex]
    beta_pm: complex
    beta_pp: complex
    beta_mm: Optional[complex] = None
    context: Dict[str, Any] = field(default_factory=dict, compare=False)

    NAMES = (
        "alpha_minus",
        "alpha_plus",
        "alpha_plus_z",
        "alpha_minus_z",
        "beta_pm",
        "beta_pp",
        "beta_mm",
        "beta_e",
        "beta_z",
        "beta_zz",
    )

    def as_dict(self) -> Dict[str, Optional[complex]]:
        return {name: getattr(self, name) for name in self.NAMES}

    def magnitudes(self) -> Dict[str, float]:
        return {k: (abs(v) if v is not None else math.nan) for k, v in self.as_dict().items()}

    @property
    def alpha_x(self) -> complex:
        return (self.alpha_plus + self.alpha_minus) / 2

    @property
    def alpha_y(self) -> complex:
        return 1j * (self.alpha_plus - self.alpha_minus) / 2

    @property
    def alpha_xz(self) -> complex:
        return (self.alpha_plus_z + self.alpha_minus_z) / 2

    @property
    def alpha_yz(self) -> complex:
        return 1j * (self.alpha_plus_z - self.alpha_minus_z) / 2

    @property
    def beta_xx(self) -> complex:
        return (self.beta_pm + self.beta_pp) / 2

    @property
    def beta_yy(self) -> complex:
        return (self.beta_pm - self.beta_pp) / 2


def _from_cartesian(
    ax, ay, axz, ayz, bxx, byy, be=None, bz=None, bzz=None, context=None
) -> TransitionAmplitudeSet:
    return TransitionAmplitudeSet(
        alpha_plus=ax - 1j * ay,
        alpha_minus=ax + 1j * ay,
        alpha_plus_z=axz - 1j * ayz,
        alpha_minus_z=axz + 1j * ayz,
        beta_e=be,
        beta_z=bz,
        beta_zz=bzz,
        beta_pm=bxx + byy,
        beta_pp=bxx - byy,
        beta_mm=bxx - byy,
        context=context or {},
    )


@lru_cache(maxsize=1)
def _operator_basis() -> Tuple[Dict[str, np.ndarray], Dict[str, np.ndarray]]:
    layout = RegisterLayout(2, electron_dim=0)

    def pair(a, b):
        return embed_operator({0: a, 1: b}, layout)

    def single(op):
        return embed_operator({0: op}, layout) + embed_operator({1: op}, layout)

    alpha = {
        "alpha_plus": single(SIGMA_PLUS),
        "alpha_minus": single(SIGMA_MINUS),
        "alpha_plus_z": pair(SIGMA_PLUS, SIGMA_Z) + pair(SIGMA_Z, SIGMA_PLUS),
        "alpha_minus_z": pair(SIGMA_MINUS, SIGMA_Z) + pair(SIGMA_Z, SIGMA_MINUS),
    }
    beta = {
        "beta_e": np.eye(4, dtype=complex),
        "beta_z": single(SIGMA_Z),
        "beta_zz": pair(SIGMA_Z, SIGMA_Z),
        "beta_pm": pair(SIGMA_PLUS, SIGMA_MINUS) + pair(SIGMA_MINUS, SIGMA_PLUS),
        "beta_pp": pair(SIGMA_PLUS, SIGMA_PLUS),
        "beta_mm": pair(SIGMA_MINUS, SIGMA_MINUS),
    }
    return alpha, beta


def _project(block: np.ndarray, basis: Dict[str, np.ndarray]) -> Tuple[Dict[str, complex], float]:
    coeffs = {name: complex(np.vdot(op, block) / np.vdot(op, op)) for name, op in basis.items()}
    rebuilt = sum(c * basis[name] for name, c in coeffs.items())
    return coeffs, float(np.max(np.abs(rebuilt - block)))


def extract_amplitudes(u: np.ndarray, context: Optional[Dict[str, Any]] = None) -> TransitionAmplitudeSet:
    """Project the blocks of a two-nucleus joint unitary onto the operator pairs.

    Args:
        u: 8x8 unitary, electron slot first, initial sector index 0
        context: Stored on the result

    Returns:
        Amplitude set

    Raises:
        AmplitudeError: wrong dimension
        BasisIncompleteError: reconstruction residual above tolerance
    """
    u = np.asarray(u)
    if u.shape != (8, 8):
        raise AmplitudeError(f"expected an 8x8 unitary for two nuclei, got {u.shape}")
    alpha_basis, beta_basis = _operator_basis()
    alpha, res_a = _project(u[4:, :4], alpha_basis)
    beta, res_b = _project(u[:4, :4], beta_basis)
    residual = max(res_a, res_b)
    if residual > RECONSTRUCTION_TOL:
        raise BasisIncompleteError(residual)
    ctx = dict(context or {})
    ctx["residual"] = residual
    return TransitionAmplitudeSet(**alpha, **beta, context=ctx)


def phase_angle(f_p: float, tau_pol: float) -> float:
    """Precession phase per quarter interval, 2 pi f_p tau_pol / 4."""
    return 2 * math.pi * f_p * tau_pol / 4


def amplitudes_for(system: SpinSystem, spec: SequenceSpec) -> TransitionAmplitudeSet:
    """Build the sequence unitary of a two-nucleus system and extract."""
    if system.n_nuc != 2:
        raise AmplitudeError(f"two nuclei required, got {system.n_nuc}")
    first = system.nuclei[0]
    context = {
        "phi": phase_angle(precession_target(system), spec.tau_pol),
        "theta": tilt_angle(system.f_n, first.a_perp, system.electron.kind),
        "tau_pol": spec.tau_pol,
        "f_t": spec.target_frequency,
        "protocol": spec.protocol.value,
    }
    return extract_amplitudes(sequence_total(system, spec), context)


def amplitudes_at(phi: float, theta: float, n_pol: int = 1) -> TransitionAmplitudeSet:
    """Numerical PulsePol amplitudes of the spin-1/2 model at (phi, theta).

    Uses f_n = 1 MHz, A_perp = 2 f_n tan(theta), A_par = 0 and the tau_pol
    giving phase phi at the precession frequency.
    """
    f_n = 1.0
    system = SpinSystem.uniform(ElectronModel.spin_half(), 2, f_n, a_perp=2 * f_n * math.tan(theta))
    f_p = precession_target(system)
    tau = 4 * phi / (2 * math.pi * f_p)
    return amplitudes_for(system, SequenceSpec(Protocol.PULSEPOL, tau_pol=tau, n_pol=n_pol))


def analytic_amplitudes(phi: float, theta: float) -> TransitionAmplitudeSet:
    """Closed trigonometric forms of the single-unit-pair PulsePol amplitudes.

    No closed forms exist here for beta_e, beta_z, beta_zz; they are None.
    """
    c, s = math.cos(phi / 2), math.sin(phi / 2)
    C = [math.cos(k * phi) for k in range(6)]
    def S(k):
        return math.sin(k * theta)

    def Ct(k):
        return math.cos(k * theta)

    ax = (-1 + 1j) / 4096 * (
        8 * c * s**5 * (
            -((2958 + 5514 * C[1] + 4520 * C[2] + 3325 * C[3] + 1610 * C[4] + 505 * C[5]) * S(5))
            + 8 * (889 + 1596 * C[1] + 1096 * C[2] + 532 * C[3] + 175 * C[4]) * s**2 * S(7)
            - 64 * C[1] * (153 + 222 * C[1] + 73 * C[2]) * s**4 * S(9)
            + 64 * (67 + 96 * C[1] + 33 * C[2]) * s**6 * S(11)
        )
        + math.sin(phi) ** 3 * (
            4 * (302 - 398 * C[1] + 464 * C[2] - 29 * C[3] + 130 * C[4] + 43 * C[5]) * S(1)
            + (598 - 1258 * C[1] + 1592 * C[2] + 47 * C[3] + 626 * C[4] + 443 * C[5]) * S(3)
            - 1536 * s**10 * S(13)
        )
    )
    ay = (-1 - 1j) / 2048 * s**4 * (
        c**2 * (
            (-278 + 2042 * C[1] + 2984 * C[2] + 6001 * C[3] + 3182 * C[4] + 2453 * C[5]) * S(2)
            + (-1542 + 1646 * C[1] - 856 * C[2] + 4099 * C[3] + 1886 * C[4] + 2959 * C[5]) * S(4)
            - 64 * (115 + 156 * C[1] + 65 * C[2]) * s**6 * S(10)
            - 768 * (3 + 7 * C[1]) * s**8 * S(12)
        )
        + math.sin(phi) ** 2 * (
            (-2775 - 4168 * C[1] - 4812 * C[2] - 2808 * C[3] - 1821 * C[4]) * S(6)
            + 896 * s**8 * S(14)
        )
        + 4 * s**4 * (
            (4331 + 7496 * C[1] + 5116 * C[2] + 2424 * C[3] + 601 * C[4]) * S(8)
            - 64 * s**8 * S(16)
        )
    )
    axz = (
        (2 - 2j) * c * math.cos(theta) ** 4 * s**5
        * (
            18 + 61 * C[1] + 30 * C[2] + 19 * C[3]
            - 4 * (1 + 3 * C[1]) * (17 + 11 * C[1]) * Ct(2) * s**2
            - 16 * (5 + 3 * C[1]) * Ct(4) * s**4
            + 16 * Ct(6) * s**6
        )
        * math.sin(theta)
        * (C[1] * math.cos(theta) ** 2 + math.sin(theta) ** 2) ** 2
    )
    # overall sign fixed against the extracted alpha_yz, so alpha_pm_z = alpha_xz -/+ i alpha_yz
    ayz = 1j / 512 * c**2 * s**4 * (
        (1 - 1j) * (1 + 3 * C[1]) * (823 + 1408 * C[1] + 956 * C[2] + 704 * C[3] + 205 * C[4]) * S(2)
        + (4 - 4j) * (
            (1 + 3 * C[1]) * (25 + 142 * C[1] + 120 * C[2] + 146 * C[3] + 79 * C[4]) * S(4)
            - (1 + 3 * C[1]) * (326 + 659 * C[1] + 522 * C[2] + 285 * C[3]) * s**2 * S(6)
            + 32 * (64 + 121 * C[1] + 72 * C[2] + 31 * C[3]) * s**4 * S(8)
            - 8 * (233 + 356 * C[1] + 179 * C[2]) * s**6 * S(10)
            + 384 * (2 + 3 * C[1]) * s**8 * S(12)
            - 192 * s**10 * S(14)
        )
    )
    bxx = (1 - 1j) / 256 * c**2 * s**6 * (
        4 * ((481 + 128j) + 744 * C[1] + 436 * C[2] + 216 * C[3] + 43 * C[4])
        + ((653 + 256j) + 952 * C[1] + 1316 * C[2] + 648 * C[3] + 271 * C[4]) * Ct(2)
        - 2 * ((931 + 256j) + 1784 * C[1] + 700 * C[2] + 456 * C[3] - 31 * C[4]) * Ct(4)
        - ((497 + 256j) + 1176 * C[1] + 1076 * C[2] + 936 * C[3] + 155 * C[4]) * Ct(6)
        + 16 * (114 + 221 * C[1] + 126 * C[2] + 51 * C[3]) * Ct(8) * s**2
        - 16 * (115 + 188 * C[1] + 113 * C[2]) * Ct(10) * s**4
        + 384 * (3 + 5 * C[1]) * Ct(12) * s**6
        - 384 * Ct(14) * s**8
    )
    byy = (1 + 1j) / 256 * s**4 * (
        (167 - 128j) - 24 * C[1] - 340 * C[2] - 40 * C[3] + 109 * C[4]
        + 256 * c**2 * ((30 + 34 * C[1]) * Ct(2) + (9 + 5 * C[1]) * Ct(4)) * s**4
        + 1024 * c**2 * Ct(6) * s**6
        - 128 * Ct(8) * s**8
    ) * (-2 * c**2 * S(2) + s**2 * S(4)) ** 2
    return _from_cartesian(ax, ay, axz, ayz, bxx, byy, context={"phi": phi, "theta": theta, "source": "analytic"})


def series_amplitudes(phi: float, theta: float) -> TransitionAmplitudeSet:
    """Truncated expansions in theta (through third order)."""
    c, s = math.cos(phi / 2), math.sin(phi / 2)
    cos, sin = math.cos, math.sin
    t, t2, t3 = theta, theta**2, theta**3

    def first_pm(sign):
        return (
            (-4 + 4j) * t * c * s**3
            * (cos(2 * phi) + 2 * cos(4 * phi) + cos(6 * phi) - sign * (sin(2 * phi) - sin(6 * phi)))
        )

    cos_part = (
        19 * cos(3 * phi / 2) - 53 * cos(5 * phi / 2) + 38 * cos(7 * phi / 2)
        + 38 * cos(9 * phi / 2) - 29 * cos(11 * phi / 2) + 43 * cos(13 * phi / 2)
    )
    sin_part = (
        20 * sin(3 * phi / 2) - 64 * sin(5 * phi / 2) + 60 * sin(7 * phi / 2)
        - 60 * sin(9 * phi / 2) + 16 * sin(11 * phi / 2) + 28 * sin(13 * phi / 2)
    )
    third = (1 - 1j) / 3 * t3 * s**3
    alpha_plus = first_pm(+1) + third * (cos_part + sin_part)
    alpha_minus = first_pm(-1) + third * (cos_part - sin_part)

    def first_z(sign):
        return (
            -32 * (1 + 1j) * t * c**2 * s**4
            * (cos(phi) - sign * sin(phi))
            * (1 + cos(2 * phi) + sign * sin(2 * phi)) ** 2
        )

    z_cos = 8 * cos(phi / 2) + 8 * cos(3 * phi / 2) + 56 * cos(5 * phi / 2) - 38 * cos(7 * phi / 2) + 46 * cos(9 * phi / 2)
    z_sin = 36 * sin(3 * phi / 2) - 60 * sin(5 * phi / 2) + 25 * (sin(7 * phi / 2) + sin(9 * phi / 2))
    third_z = 8 * (1 + 1j) / 3 * t3 * c * cos(phi) * s**4
    alpha_plus_z = first_z(+1) + third_z * (z_cos + z_sin)
    alpha_minus_z = first_z(-1) + third_z * (z_cos - z_sin)

    Cp = [cos(k * phi) for k in range(9)]
    Sp = [sin(k * phi) for k in range(9)]
    beta_e = -Cp[4] ** 2 + 2j * t2 * (
        (1 + 6j) * Cp[1] - (2 - 4j) * Cp[2] + (1 + 2j) * Cp[3] + 8j * Cp[4]
        + (1 + 2j) * Cp[5] - (2 - 4j) * Cp[6] + (1 + 6j) * Cp[7]
    ) * s**2
    beta_z = 0.5 * (
        -1j * Sp[8] + t2 * (
            2 * Sp[1] - (3 + 1j) * Sp[2] + (2 + 4j) * Sp[3] + (1 - 6j) * Sp[4]
            - (6 - 4j) * Sp[5] + (9 + 1j) * Sp[6] - (6 + 8j) * Sp[7] + (1.5 + 6j) * Sp[8]
        )
    )
    beta_zz = -1j * t2 * (
        (4 + 4j) * Cp[1] - (6 + 1j) * Cp[2] + 4 * Cp[3] - 4 * Cp[5]
        + (6 + 1j) * Cp[6] - (4 + 4j) * Cp[7] + (1 + 3j) * (-1 + Cp[8])
    ) + Sp[4] ** 2
    beta_pm = 8 * t2 * (2 - 3j * Cp[2] - 2 * Cp[4] + 1j * Cp[6]) * s**4
    beta_pp = 8 * t2 * (Cp[2] + 2j * Cp[4] - Cp[6]) * s**4
    return TransitionAmplitudeSet(
        alpha_plus=alpha_plus,
        alpha_minus=alpha_minus,
        alpha_plus_z=alpha_plus_z,
        alpha_minus_z=alpha_minus_z,
        beta_e=beta_e,
        beta_z=beta_z,
        beta_zz=beta_zz,
        beta_pm=beta_pm,
        beta_pp=beta_pp,
        beta_mm=beta_pp,
        context={"phi": phi, "theta": theta, "source": "series"},
    )


#: Cubic coefficient of alpha_minus at resonance, as printed and with the
#: square root that makes it agree with the general series
ALPHA_MINUS_CUBIC = {"printed": 239 + 173, "corrected": 239 + 173 * SQRT2}


def resonance_limits(theta: float, alpha_minus_cubic: str = "corrected") -> TransitionAmplitudeSet:
    """Small-theta forms at phi = 3 pi / 4.

    Args:
        theta: Tilt angle, radians
        alpha_minus_cubic: "printed" or "corrected" value of the cubic
            coefficient of alpha_minus (see ALPHA_MINUS_CUBIC)
    """
    try:
        cubic = ALPHA_MINUS_CUBIC[alpha_minus_cubic]
    except KeyError:
        raise AmplitudeError(f"unknown cubic variant '{alpha_minus_cubic}'")
    t, t2, t3 = theta, theta**2, theta**3
    beta_pp = -2j * (3 + 2 * SQRT2) * t2
    return TransitionAmplitudeSet(
        alpha_plus=(-1 + 1j) / 2 * (5 + 3 * SQRT2) * t3,
        alpha_minus=2 * (1 - 1j) * (1 + SQRT2) * t - (1 - 1j) / 6 * cubic * t3,
        alpha_plus_z=-2 * (1 + 1j) * (7 + 5 * SQRT2) * t3,
        alpha_minus_z=-2 * (1 + 1j) * (5 + 3 * SQRT2) * t3,
        beta_e=-1 + (12 + 8 * SQRT2) * t2,
        beta_z=((6 + 1j) + (4 + 2j) * SQRT2) * t2,
        beta_zz=0j,
        beta_pm=(12 + 8 * SQRT2) * t2 + 0j,
        beta_pp=beta_pp,
        beta_mm=beta_pp,
        context={"phi": 3 * math.pi / 4, "theta": theta, "source": f"resonance:{alpha_minus_cubic}"},
    )


def amplitude_discrepancy(
    numeric: TransitionAmplitudeSet, reference: TransitionAmplitudeSet
) -> Dict[str, float]:
    """Difference of moduli, numeric minus reference, for coefficients both provide."""
    ref = reference.magnitudes()
    return {
        k: v - ref[k]
        for k, v in numeric.magnitudes().items()
        if not (math.isnan(v) or math.isnan(ref[k]))
    }


def _scan_point(system: SpinSystem, spec: SequenceSpec, variable: ScanVariable, value: float):
    if variable is ScanVariable.TAU_POL:
        spec = replace(spec, tau_pol=value, f_t=None)
    elif variable is ScanVariable.TARGET_FREQUENCY:
        spec = replace(spec, tau_pol=3.0 / (2.0 * value), f_t=value)
    else:
        system = system.with_a_perp(value)
        f_t = precession_target(system)
        spec = replace(spec, tau_pol=3.0 / (2.0 * f_t), f_t=f_t)
    return system, spec


def _spectrum_row(args) -> Dict[str, float]:
    system, spec, variable, value, with_analytic = args
    point_system, point_spec = _scan_point(system, spec, variable, value)
    amps = amplitudes_for(point_system, point_spec)
    row = {"scan_value": value, "phi": amps.context["phi"], "theta": amps.context["theta"]}
    row.update(amps.magnitudes())
    if with_analytic:
        ref = analytic_amplitudes(row["phi"], row["theta"]).magnitudes()
        row.update({f"analytic_{k}": v for k, v in ref.items() if not math.isnan(v)})
    return row


def amplitude_spectrum(
    system: SpinSystem,
    spec: SequenceSpec,
    variable: Union[ScanVariable, str],
    values: Iterable[float],
    jobs: int = 1,
    with_analytic: bool = False,
) -> DataFrame:
    """Amplitude moduli over a scan of tau_pol, A_perp or the target frequency.

    An A_perp scan sets every nucleus to the scanned value and keeps the
    sequence resonant at each point.

    Args:
        system: Two-nucleus template
        spec: Sequence template
        variable: What to scan
        values: Scan grid
        jobs: Worker processes; 1 evaluates in this process
        with_analytic: Add closed-form moduli (PulsePol, spin-1/2 electron, A_par = 0)

    Returns:
        One row per grid point, in grid order
    """
    variable = ScanVariable(variable)
    values = [float(v) for v in values]
    if not values:
        raise AmplitudeError("empty scan grid")
    if with_analytic and (
        spec.protocol is not Protocol.PULSEPOL or system.electron.kind is not ElectronKind.SPIN_HALF
    ):
        raise AmplitudeError("closed forms exist only for PulsePol with a spin-1/2 electron")
    tasks = [(system, spec, variable, v, with_analytic) for v in values]
    _log.info(f"_begin_ amplitude spectrum variable={variable.value} points={len(values)} jobs={jobs}")
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_spectrum_row, tasks))
    else:
        rows = [_spectrum_row(t) for t in tasks]
    _log.info(f"_end_ amplitude spectrum variable={variable.value}")
    return DataFrame(rows)


def locate_extremum(x: np.ndarray, y: np.ndarray, kind: str = "max") -> Tuple[float, float]:
    """Position of the extremum of sampled y(x), refined by a parabola.

    Returns:
        (position, grid step used as the uncertainty)
    """
    x, y = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
    if x.size < 2:
        raise AmplitudeError("need at least two points")
    i = int(np.argmax(y) if kind == "max" else np.argmin(y))
    step = float(np.max(np.abs(np.diff(x))))
    if 0 < i < x.size - 1:
        x0, x1, x2 = x[i - 1 : i + 2]
        y0, y1, y2 = y[i - 1 : i + 2]
        denom = (x0 - x1) * (x0 - x2) * (x1 - x2)
        a = (x2 * (y1 - y0) + x1 * (y0 - y2) + x0 * (y2 - y1)) / denom
        b = (x2**2 * (y0 - y1) + x1**2 * (y2 - y0) + x0**2 * (y1 - y2)) / denom
        if a != 0:
            vertex = -b / (2 * a)
            if x0 <= vertex <= x2 or x2 <= vertex <= x0:
                return float(vertex), step
    return float(x[i]), step
