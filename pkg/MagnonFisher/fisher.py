"""
Quantum Fisher information of the Gaussian steady state with respect to the coupling g.
"""

import logging
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.linalg import lu_factor, lu_solve, svdvals

from MagnonFisher.dynamics import (
    GaussianState,
    Mode,
    SymplecticForm,
    build_drift,
    gaussian_state,
    solve_lyapunov,
)
from MagnonFisher.errors import (
    DomainError,
    MagnonFisherError,
    NearPureState,
    StencilCrossesInstability,
    ZeroInformation,
)
from MagnonFisher.params import SystemParams
from MagnonFisher.steady import SteadyState

logger = logging.getLogger(f"MagnonFisher.{__name__}")

DEFAULT_DG_REL = 1e-6
NEAR_PURE_GUARD = 1e-12
METHODS = ("analytic", "stencil")


@dataclass(frozen=True)
class Sensitivity:
    d_mean: np.ndarray
    d_cov: np.ndarray
    method: str

    def local(self, mode: Mode | str) -> tuple[np.ndarray, np.ndarray]:
        """(∂d, ∂L) restricted to one mode."""
        s = Mode(mode).span
        return self.d_mean[s], self.d_cov[s, s]


def five_point_derivative(f: Callable, x: float, dx: float):
    """(-f(x+2dx) + 8f(x+dx) - 8f(x-dx) + f(x-2dx)) / (12dx), exact for polynomials up to degree 4."""
    return (-f(x + 2 * dx) + 8 * f(x + dx) - 8 * f(x - dx) + f(x - 2 * dx)) / (12 * dx)


def stencil_step(params: SystemParams, dg_rel: float = DEFAULT_DG_REL) -> float:
    if not dg_rel > 0:
        raise DomainError(f"relative step must be positive, got {dg_rel!r}")
    reference = params.g if params.g != 0 else max(params.gamma_a1, params.gamma_a2, params.gamma_m)
    return dg_rel * abs(reference)


def sensitivity_stencil(params: SystemParams, dg_rel: float = DEFAULT_DG_REL) -> Sensitivity:
    """
    ∂_g of the mean vector and covariance by the five-point stencil.

    Raises:
        StencilCrossesInstability: a shifted point has no unique stable steady state.
    """
    n = 6

    def moments(g: float) -> np.ndarray:
        try:
            state = gaussian_state(params.with_overrides(g=g))
        except MagnonFisherError as exc:
            raise StencilCrossesInstability(f"shifted point g={g:.9e} failed: {exc}") from exc
        return np.concatenate([state.mean, state.cov.reshape(-1)])

    dg = stencil_step(params, dg_rel)
    derivative = five_point_derivative(moments, params.g, dg)
    d_cov = derivative[n:].reshape(n, n)
    return Sensitivity(d_mean=derivative[:n], d_cov=0.5 * (d_cov + d_cov.T), method="stencil")


def drift_derivative(params: SystemParams, ss: SteadyState, d_mean: np.ndarray) -> np.ndarray:
    """
    Total derivative of the drift matrix with respect to g.

    The explicit ±1 entries at the coupling positions are complemented by the Kerr block,
    which moves with the steady state through ``d_mean``.
    """
    dA = np.zeros((6, 6))
    dA[2, 5], dA[3, 4], dA[4, 3], dA[5, 2] = 1.0, -1.0, 1.0, -1.0
    if params.K != 0:
        q, p = np.sqrt(2.0) * ss.m_mean.real, np.sqrt(2.0) * ss.m_mean.imag
        dq, dp = d_mean[4], d_mean[5]
        d_re = q * dq - p * dp
        d_im = p * dq + q * dp
        d_abs2 = q * dq + p * dp
        K = params.K
        dA[4, 4] += 2 * K * d_im
        dA[5, 5] -= 2 * K * d_im
        dA[4, 5] += 4 * K * d_abs2 - 2 * K * d_re
        dA[5, 4] += -4 * K * d_abs2 - 2 * K * d_re
    return dA


def _analytic(params: SystemParams, state: GaussianState) -> Sensitivity:
    ss = state.steady
    A = state.drift if state.drift is not None else build_drift(params, ss)
    mean = state.mean
    d_force = np.array([0.0, 0.0, mean[5], -mean[4], mean[3], -mean[2]])
    d_mean = -np.linalg.solve(A, d_force)
    dA = drift_derivative(params, ss, d_mean)
    V = state.cov
    d_cov = solve_lyapunov(A, dA @ V + V @ dA.T, check=False)
    return Sensitivity(d_mean=d_mean, d_cov=d_cov, method="analytic")


def sensitivity_analytic(params: SystemParams) -> Sensitivity:
    """∂_g by implicit differentiation of the mean-field and Lyapunov equations."""
    return _analytic(params, gaussian_state(params))


def _informative(V: np.ndarray, dV: np.ndarray, d_mean: np.ndarray) -> np.ndarray:
    """
    Indices of the quadratures to keep.

    A mode that is uncorrelated with the rest and whose moments do not depend on g is a
    product factor and adds nothing to the QFI. It is dropped, which also keeps an exactly
    pure decoupled mode (a vacuum cavity at J = 0) out of the kernel.
    """
    keep = []
    for k in range(V.shape[0] // 2):
        s = slice(2 * k, 2 * k + 2)
        others = np.r_[0 : 2 * k, 2 * k + 2 : V.shape[0]]
        decoupled = not np.any(V[s][:, others])
        constant = not (np.any(dV[s]) or np.any(dV[:, s]) or np.any(d_mean[s]))
        if not (decoupled and constant):
            keep.extend((2 * k, 2 * k + 1))
    return np.array(keep, dtype=int)


def _qfi(V: np.ndarray, dV: np.ndarray, d_mean: np.ndarray, xi: np.ndarray) -> float:
    keep = _informative(V, dV, d_mean)
    if keep.size == 0:
        return 0.0
    if keep.size < V.shape[0]:
        V, dV, d_mean, xi = V[np.ix_(keep, keep)], dV[np.ix_(keep, keep)], d_mean[keep], xi[np.ix_(keep, keep)]
    kernel = 4.0 * np.kron(V, V) - np.kron(xi, xi)
    singular = svdvals(kernel)
    if singular[-1] < NEAR_PURE_GUARD * singular[0]:
        raise NearPureState(float(singular[-1]), float(singular[0]))
    vec_dv = dV.reshape(-1)
    covariance_term = 2.0 * vec_dv @ lu_solve(lu_factor(kernel), vec_dv)
    displacement_term = d_mean @ np.linalg.solve(V, d_mean)
    return max(float(covariance_term + displacement_term), 0.0)


def qfi_global(state: GaussianState, sens: Sensitivity) -> float:
    """ℱ_g = 2 vec[∂V]ᵀ 𝔐⁻¹ vec[∂V] + ∂dᵀ V⁻¹ ∂d with 𝔐 = 4V⊗V - Ξ⊗Ξ."""
    xi = SymplecticForm(state.n_modes).matrix
    return _qfi(state.cov, sens.d_cov, sens.d_mean, xi)


def qfi_subsystem(state: GaussianState, sens: Sensitivity, mode: Mode | str) -> float:
    d_mean, d_cov = sens.local(mode)
    return _qfi(state.local(mode), d_cov, d_mean, SymplecticForm.single())


def qcrb(F: float, N: int = 1) -> float:
    """Smallest variance of an unbiased estimate of g from N repetitions."""
    if N < 1 or int(N) != N:
        raise DomainError(f"number of repetitions must be a positive integer, got {N!r}")
    if not F > 0:
        raise ZeroInformation(f"Fisher information {F!r} carries no information about g")
    return 1.0 / (N * F)


def sensitivity(params: SystemParams, state: GaussianState, method: str = "analytic", dg_rel: float = DEFAULT_DG_REL) -> Sensitivity:
    if method == "analytic":
        return _analytic(params, state)
    if method == "stencil":
        return sensitivity_stencil(params, dg_rel)
    raise DomainError(f"unknown derivative method {method!r}, expected one of {METHODS}")


@dataclass(frozen=True)
class FisherReport:
    qfi_global: float
    qfi_sub: dict[Mode, float]
    N: int = 1
    method: str = "analytic"
    state: GaussianState | None = field(default=None, repr=False, compare=False)
    sensitivity: Sensitivity | None = field(default=None, repr=False, compare=False)

    @property
    def ratios(self) -> dict[Mode, float]:
        """ξ_j = ℱ^j / ℱ_g."""
        if not self.qfi_global > 0:
            raise ZeroInformation("global QFI vanishes, subsystem ratios are undefined")
        return {mode: value / self.qfi_global for mode, value in self.qfi_sub.items()}

    def qcrb(self, N: int | None = None) -> float:
        return qcrb(self.qfi_global, self.N if N is None else N)

    def as_dict(self) -> dict:
        record = {
            "method": self.method,
            "N": self.N,
            "qfi_global": self.qfi_global,
            "qcrb_global": self.qcrb(),
        }
        for mode, value in self.qfi_sub.items():
            record[f"qfi_{mode}"] = value
            record[f"qcrb_{mode}"] = qcrb(value, self.N) if value > 0 else None
        for mode, ratio in self.ratios.items():
            record[f"xi_{mode}"] = ratio
        return record


def fisher_report(
    params: SystemParams,
    method: str = "analytic",
    dg_rel: float = DEFAULT_DG_REL,
    N: int = 1,
    state: GaussianState | None = None,
) -> FisherReport:
    """Global and per-mode QFIs of one parameter point."""
    state = gaussian_state(params) if state is None else state
    sens = sensitivity(params, state, method, dg_rel)
    total = qfi_global(state, sens)
    sub = {mode: qfi_subsystem(state, sens, mode) for mode in Mode}
    for mode, value in sub.items():
        if value > total * (1 + 1e-9):
            logger.warning(f"subsystem QFI of {mode} ({value:.6e}) exceeds the global QFI ({total:.6e})")
    logger.debug(f"QFI via {method}: global {total:.6e}, " + ", ".join(f"{m}={v:.6e}" for m, v in sub.items()))
    return FisherReport(qfi_global=total, qfi_sub=sub, N=N, method=method, state=state, sensitivity=sens)
