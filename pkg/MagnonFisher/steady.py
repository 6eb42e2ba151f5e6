"""
Mean-field steady state of the driven cavity-cavity-magnon chain.

The stationary magnon number x = |<m>|² solves a real cubic. The cubic is solved in the
scaled variable y = x/x0, where x0 is the root without Kerr shift, so the linear and
constant coefficients are exactly 1 and -1 whatever the magnitude of the drive.
"""

import logging
import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import polynomial as P

from MagnonFisher.errors import MultistableRegime, NoSteadyState
from MagnonFisher.params import YIG_SPIN_DENSITY, SystemParams, total_spin

logger = logging.getLogger(f"MagnonFisher.{__name__}")

REAL_ROOT_TOL = 1e-8
NEGATIVE_ROOT_CLAMP = 1e-12
ADMISSIBLE_RESIDUAL = 1e-8

LOW_PHOTON_NUMBER = 100.0
HOLSTEIN_PRIMAKOFF_RATIO = 1e-2
DEFAULT_TWO_S = total_spin(250e-6, YIG_SPIN_DENSITY)


@dataclass(frozen=True)
class SteadyState:
    a1_mean: complex
    a2_mean: complex
    m_mean: complex
    m_abs2: float
    delta_eff: float

    def quadratures(self) -> np.ndarray:
        """Mean quadrature vector (Q_a1, P_a1, Q_a2, P_a2, Q_m, P_m)."""
        amplitudes = (self.a1_mean, self.a2_mean, self.m_mean)
        return math.sqrt(2.0) * np.array([part for a in amplitudes for part in (a.real, a.imag)])

    def as_dict(self) -> dict:
        return {
            "a1_mean": [self.a1_mean.real, self.a1_mean.imag],
            "a2_mean": [self.a2_mean.real, self.a2_mean.imag],
            "m_mean": [self.m_mean.real, self.m_mean.imag],
            "m_abs2": self.m_abs2,
            "delta_eff": self.delta_eff,
        }


@dataclass(frozen=True)
class LinearizationDiagnostics:
    a2_abs2: float
    m_abs2: float
    spin_ratio: float
    low_photon: bool
    holstein_primakoff: bool

    @property
    def ok(self) -> bool:
        return not (self.low_photon or self.holstein_primakoff)


def _chain_coefficients(params: SystemParams) -> tuple[complex, complex, complex]:
    A1 = complex(params.gamma_a1, params.delta_a1)
    chi = A1 * complex(params.gamma_a2, params.delta_a2) + params.J**2
    G = params.g**2 * A1 / chi
    return A1, chi, G


def _back_substitute(params: SystemParams, x: float, E: float, A1: complex, chi: complex, G: complex) -> SteadyState:
    K = params.K
    Q = complex(params.gamma_m + G.real, params.delta_m + 2.0 * K * x + K + G.imag)
    m = -1j * params.g * E * A1 / (Q * chi)
    a2 = (E - 1j * params.g * m) * A1 / chi
    a1 = -1j * params.J * a2 / A1
    m_abs2 = abs(m) ** 2
    return SteadyState(
        a1_mean=complex(a1),
        a2_mean=complex(a2),
        m_mean=complex(m),
        m_abs2=m_abs2,
        delta_eff=params.delta_m + 4.0 * K * m_abs2,
    )


def steady_residual(params: SystemParams, ss: SteadyState) -> float:
    """Largest relative residual of the three stationary mean-field equations."""
    a1, a2, m = ss.a1_mean, ss.a2_mean, ss.m_mean
    E = params.E_l
    A1 = complex(params.gamma_a1, params.delta_a1)
    A2 = complex(params.gamma_a2, params.delta_a2)
    Am = complex(params.gamma_m, params.delta_m + params.K + 2.0 * params.K * abs(m) ** 2)
    terms = (
        (-A1 * a1, -1j * params.J * a2),
        (-A2 * a2, -1j * params.J * a1, -1j * params.g * m, E),
        (-Am * m, -1j * params.g * a2),
    )
    worst = 0.0
    for equation in terms:
        scale = sum(abs(t) for t in equation)
        if scale > 0:
            worst = max(worst, abs(sum(equation)) / scale)
    return worst


def _real_roots(coefficients: list[float]) -> list[float]:
    roots = P.polyroots(coefficients)
    deriv = P.polyder(coefficients)
    real = []
    for root in roots:
        if abs(root.imag) > REAL_ROOT_TOL * (1.0 + abs(root.real)):
            continue
        y = root.real
        slope = P.polyval(y, deriv)
        if slope != 0:
            y -= P.polyval(y, coefficients) / slope
        real.append(float(y))
    return sorted(real)


def solve_steady(params: SystemParams) -> SteadyState:
    """
    Solve the stationary mean-field equations.

    Raises:
        MultistableRegime: more than one admissible magnon number.
        NoSteadyState: no admissible magnon number.
    """
    E = params.E_l
    A1, chi, G = _chain_coefficients(params)
    if chi == 0:
        raise NoSteadyState("cavity chain has a vanishing response denominator")
    b = params.delta_m + params.K + G.imag
    c = params.gamma_m + G.real
    R = params.g**2 * E**2 * abs(A1) ** 2 / abs(chi) ** 2
    if R == 0:
        return _back_substitute(params, 0.0, E, A1, chi, G)
    if b * b + c * c == 0:
        raise NoSteadyState("magnon response denominator vanishes at zero occupation")

    x0 = R / (b * b + c * c)
    K = params.K
    coefficients = [-1.0, 1.0, 4.0 * K * b * x0 * x0 / R, 4.0 * K * K * x0**3 / R]
    candidates = _real_roots(coefficients)
    logger.debug(f"cubic scaled by x0={x0:.6e}: real candidates {candidates}")

    admissible = []
    for y in candidates:
        if y < -NEGATIVE_ROOT_CLAMP:
            continue
        x = max(y, 0.0) * x0
        ss = _back_substitute(params, x, E, A1, chi, G)
        residual = steady_residual(params, ss)
        if residual <= ADMISSIBLE_RESIDUAL:
            admissible.append(ss)
        else:
            logger.debug(f"rejecting root x={x:.6e} with residual {residual:.3e}")

    if not admissible:
        raise NoSteadyState(f"no admissible root among {candidates}")
    if len(admissible) > 1:
        raise MultistableRegime([ss.m_abs2 for ss in admissible])
    return admissible[0]


def linearization_check(ss: SteadyState, two_s: float = DEFAULT_TWO_S) -> LinearizationDiagnostics:
    """
    Check that the linearized fluctuation picture is self-consistent.

    The cavity flag is raised when |<a2>|² is below 100. The magnon flag is raised when the
    magnon number is below 100 or when it exceeds 1% of 2S.
    """
    a2_abs2 = abs(ss.a2_mean) ** 2
    ratio = ss.m_abs2 / two_s
    diagnostics = LinearizationDiagnostics(
        a2_abs2=a2_abs2,
        m_abs2=ss.m_abs2,
        spin_ratio=ratio,
        low_photon=a2_abs2 < LOW_PHOTON_NUMBER,
        holstein_primakoff=ss.m_abs2 < LOW_PHOTON_NUMBER or ratio > HOLSTEIN_PRIMAKOFF_RATIO,
    )
    if diagnostics.low_photon:
        logger.warning(f"|<a2>|^2 = {a2_abs2:.3e}: linearization around the mean field is questionable")
    if diagnostics.holstein_primakoff:
        logger.warning(f"|<m>|^2 = {ss.m_abs2:.3e} ({ratio:.3e} of 2S): low-lying excitation picture is questionable")
    return diagnostics
