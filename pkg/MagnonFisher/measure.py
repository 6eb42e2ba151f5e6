"""
Classical Fisher information of single-mode Gaussian measurements on the steady state.
"""

import itertools
import logging
import math
from dataclasses import dataclass
from enum import StrEnum

import numpy as np
from scipy.optimize import minimize

from MagnonFisher.dynamics import GaussianState, Mode, Quadrature
from MagnonFisher.errors import DomainError, SingularAleph
from MagnonFisher.fisher import Sensitivity

logger = logging.getLogger(f"MagnonFisher.{__name__}")

R_MAX = 12.0
SEED_THETAS = tuple(k * math.pi / 4 for k in range(4))
SEED_SQUEEZINGS = (-9.0, -3.0, 3.0, 9.0)
SIMPLEX_TOL = 1e-8
ALEPH_GUARD = 1e-14


class MeasurementKind(StrEnum):
    HOMODYNE_Q = "hom-q"
    HOMODYNE_P = "hom-p"
    HETERODYNE = "het"
    GENERAL = "general"


@dataclass(frozen=True)
class MeasurementSpec:
    """
    A single-mode Gaussian measurement.

    ``theta`` and ``r`` only matter for the general kind, whose covariance is
    R(θ) diag(e^(-2r), e^(2r)) R(θ)ᵀ, so r → +∞ at θ = 0 is homodyne on Q.
    """

    kind: MeasurementKind
    theta: float = 0.0
    r: float = 0.0

    @classmethod
    def homodyne_q(cls) -> "MeasurementSpec":
        return cls(MeasurementKind.HOMODYNE_Q)

    @classmethod
    def homodyne_p(cls) -> "MeasurementSpec":
        return cls(MeasurementKind.HOMODYNE_P, theta=math.pi / 2)

    @classmethod
    def heterodyne(cls) -> "MeasurementSpec":
        return cls(MeasurementKind.HETERODYNE)

    @classmethod
    def general(cls, theta: float, r: float) -> "MeasurementSpec":
        return cls(MeasurementKind.GENERAL, theta=theta % math.pi, r=r)

    def as_dict(self) -> dict:
        return {"kind": str(self.kind), "theta": self.theta, "r": self.r}


def rotation(theta: float) -> np.ndarray:
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, -s], [s, c]])


def measurement_covariance(spec: MeasurementSpec, r_max: float = R_MAX) -> np.ndarray:
    """
    σ_M of the measurement. Homodyne kinds return their finite-squeezing stand-in at ``r_max``.
    """
    match spec.kind:
        case MeasurementKind.HETERODYNE:
            return np.eye(2)
        case MeasurementKind.HOMODYNE_Q:
            theta, r = 0.0, r_max
        case MeasurementKind.HOMODYNE_P:
            theta, r = math.pi / 2, r_max
        case _:
            theta, r = spec.theta, spec.r
    R = rotation(theta)
    return R @ np.diag([math.exp(-2 * r), math.exp(2 * r)]) @ R.T


def _squeezed_cfi(sigma: np.ndarray, d_sigma: np.ndarray, d_mean: np.ndarray, theta: float, r: float) -> float:
    """
    CFI for σ_M = R(θ) diag(e^(-2r), e^(2r)) R(θ)ᵀ, evaluated in the frame where σ_M is diagonal.

    σ + σ_M is inverted through the Schur complement of its large-variance entry, which
    stays accurate when e^(2|r|) swamps the state covariance.
    """
    if r < 0:
        theta, r = theta + math.pi / 2, -r
    R = rotation(theta)
    s = R.T @ sigma @ R
    ds = R.T @ d_sigma @ R
    dm = R.T @ d_mean
    small = s[0, 0] + math.exp(-2 * r)
    large = s[1, 1] + math.exp(2 * r)
    ratio = s[0, 1] / large
    schur = small - s[0, 1] * ratio
    if not schur > 0:
        raise DomainError(f"sigma + sigma_M is not positive definite (Schur complement {schur!r})")
    inv_small = 1.0 / schur
    inverse = np.array(
        [
            [inv_small, -ratio * inv_small],
            [-ratio * inv_small, 1.0 / large + ratio * ratio * inv_small],
        ]
    )
    inverse_d = inverse @ ds
    F = dm @ inverse @ dm + 0.5 * np.trace(inverse_d @ inverse_d)
    return max(float(F), 0.0)


def cfi_homodyne(state: GaussianState, sens: Sensitivity, k: Quadrature | int) -> float:
    """F = [2V_kk (∂d_k)² + (∂V_kk)²] / (2V_kk²) for homodyne detection of quadrature k."""
    i = Quadrature(k).position
    v = state.cov[i, i]
    if not v > 0:
        raise DomainError(f"variance of quadrature {Quadrature(k).name} must be positive, got {v!r}")
    dd, dv = sens.d_mean[i], sens.d_cov[i, i]
    return float((2 * v * dd**2 + dv**2) / (2 * v**2))


def cfi_heterodyne(state: GaussianState, sens: Sensitivity, mode: Mode | str) -> float:
    L = state.local(mode)
    aleph = L + np.eye(2)
    if abs(np.linalg.det(aleph)) <= ALEPH_GUARD * np.linalg.norm(aleph) ** 2:
        raise SingularAleph(f"L + 1 of mode {mode} is singular")
    d_mean, d_cov = sens.local(mode)
    return _squeezed_cfi(L, d_cov, d_mean, 0.0, 0.0)


def _quadrature_of(mode: Mode | str, spec: MeasurementSpec) -> Quadrature:
    offset = 0 if spec.kind == MeasurementKind.HOMODYNE_Q else 1
    return Quadrature(2 * Mode(mode).position + offset + 1)


def cfi_gaussian(state: GaussianState, sens: Sensitivity, mode: Mode | str, spec: MeasurementSpec) -> float:
    """F = ∂dᵀ(σ + σ_M)⁻¹∂d + ½Tr[((σ + σ_M)⁻¹∂σ)²] for the reduced state of ``mode``."""
    if spec.kind in (MeasurementKind.HOMODYNE_Q, MeasurementKind.HOMODYNE_P):
        return cfi_homodyne(state, sens, _quadrature_of(mode, spec))
    if spec.kind == MeasurementKind.HETERODYNE:
        return cfi_heterodyne(state, sens, mode)
    d_mean, d_cov = sens.local(mode)
    return _squeezed_cfi(state.local(mode), d_cov, d_mean, spec.theta, spec.r)


@dataclass(frozen=True)
class OptimalMeasurement:
    F_ogm: float
    spec: MeasurementSpec
    at_boundary: bool

    def as_dict(self) -> dict:
        return {"F_ogm": self.F_ogm, "at_boundary": self.at_boundary, **self.spec.as_dict()}


def optimal_gaussian(
    state: GaussianState,
    sens: Sensitivity,
    mode: Mode | str,
    r_max: float = R_MAX,
) -> OptimalMeasurement:
    """
    Maximize the CFI over pure single-mode Gaussian measurements.

    A 4×4 grid in (θ, r) seeds Nelder-Mead runs. Heterodyne and both homodyne limits are
    always candidates, so the optimum never falls below them.
    """
    mode = Mode(mode)
    candidates = [
        (cfi_gaussian(state, sens, mode, spec), spec)
        for spec in (MeasurementSpec.heterodyne(), MeasurementSpec.homodyne_q(), MeasurementSpec.homodyne_p())
    ]
    scale = max(F for F, _ in candidates)
    if not scale > 0:
        return OptimalMeasurement(F_ogm=0.0, spec=MeasurementSpec.heterodyne(), at_boundary=False)

    d_mean, d_cov = sens.local(mode)
    L = state.local(mode)

    def objective(x: np.ndarray) -> float:
        spec = MeasurementSpec.general(x[0], x[1])
        return -_squeezed_cfi(L, d_cov, d_mean, spec.theta, spec.r) / scale

    for theta, r in itertools.product(SEED_THETAS, SEED_SQUEEZINGS):
        result = minimize(
            objective,
            x0=np.array([theta, r]),
            method="Nelder-Mead",
            bounds=[(-math.pi, 2 * math.pi), (-r_max, r_max)],
            options={"xatol": SIMPLEX_TOL, "fatol": 1e-13, "maxiter": 2000},
        )
        spec = MeasurementSpec.general(result.x[0], result.x[1])
        candidates.append((-result.fun * scale, spec))

    F_best, spec_best = max(candidates, key=lambda candidate: candidate[0])
    at_boundary = spec_best.kind != MeasurementKind.GENERAL or abs(spec_best.r) >= r_max - 1e-6
    if spec_best.kind == MeasurementKind.HETERODYNE:
        at_boundary = False
    if at_boundary:
        logger.warning(f"optimal measurement on {mode} sits at the homodyne limit ({spec_best.kind}, r={spec_best.r:.3f})")
    return OptimalMeasurement(F_ogm=F_best, spec=spec_best, at_boundary=at_boundary)


def cfi_all(state: GaussianState, sens: Sensitivity, mode: Mode | str) -> dict[str, float]:
    """The two homodyne, the heterodyne and the optimal Gaussian CFI of one mode."""
    return {
        "cfi_hom_q": cfi_gaussian(state, sens, mode, MeasurementSpec.homodyne_q()),
        "cfi_hom_p": cfi_gaussian(state, sens, mode, MeasurementSpec.homodyne_p()),
        "cfi_het": cfi_heterodyne(state, sens, mode),
        "cfi_ogm": optimal_gaussian(state, sens, mode).F_ogm,
    }
