"""
Linearized fluctuation dynamics around the mean-field steady state.

Quadratures are ordered (Q_a1, P_a1, Q_a2, P_a2, Q_m, P_m) and the vacuum covariance is ½𝟙.
"""

import logging
import warnings
from dataclasses import dataclass, field
from enum import IntEnum, StrEnum
from functools import cached_property

import numpy as np
from scipy.linalg import LinAlgWarning, lu_factor, lu_solve

from MagnonFisher.errors import DomainError, SingularSystem, UnstableDrift
from MagnonFisher.params import SystemParams
from MagnonFisher.steady import SteadyState, solve_steady

logger = logging.getLogger(f"MagnonFisher.{__name__}")

MARGINAL_BAND = 1e-9
LYAPUNOV_RESIDUAL_BOUND = 1e-10
SINGULAR_PIVOT = 1e-13
CLOSED_FORM_RTOL = 1e-6


class Mode(StrEnum):
    A1 = "a1"
    A2 = "a2"
    M = "m"

    @property
    def position(self) -> int:
        return list(Mode).index(self)

    @property
    def span(self) -> slice:
        return slice(2 * self.position, 2 * self.position + 2)


class Quadrature(IntEnum):
    """One-based quadrature index, as used by homodyne detection."""

    Q_A1 = 1
    P_A1 = 2
    Q_A2 = 3
    P_A2 = 4
    Q_M = 5
    P_M = 6

    @property
    def position(self) -> int:
        return self.value - 1

    @property
    def mode(self) -> Mode:
        return list(Mode)[self.position // 2]


@dataclass(frozen=True)
class SymplecticForm:
    """Ξ = ⊕ Λ over ``n_modes`` modes with Λ = [[0, 1], [-1, 0]]."""

    n_modes: int = 3

    @staticmethod
    def single() -> np.ndarray:
        return np.array([[0.0, 1.0], [-1.0, 0.0]])

    @cached_property
    def matrix(self) -> np.ndarray:
        return np.kron(np.eye(self.n_modes), self.single())


@dataclass(frozen=True)
class StabilityVerdict:
    stable: bool
    max_real_eig: float
    hurwitz_ok: bool
    marginal: bool

    @property
    def agree(self) -> bool:
        return self.marginal or self.stable == self.hurwitz_ok

    def as_dict(self) -> dict:
        return {
            "stable": self.stable,
            "max_real_eig": self.max_real_eig,
            "hurwitz_ok": self.hurwitz_ok,
            "marginal": self.marginal,
        }


def kerr_entries(params: SystemParams, ss: SteadyState) -> tuple[float, float, float, float]:
    """Return (ℜ+, ℜ-, ℑ+, ℑ-) of the magnon block of the drift matrix."""
    m2 = ss.m_mean**2
    K = params.K
    r_plus = -params.gamma_m + 2.0 * K * m2.imag
    r_minus = -params.gamma_m - 2.0 * K * m2.imag
    i_plus = (ss.delta_eff + K) - 2.0 * K * m2.real
    i_minus = -(ss.delta_eff + K) - 2.0 * K * m2.real
    return r_plus, r_minus, i_plus, i_minus


def build_drift(params: SystemParams, ss: SteadyState) -> np.ndarray:
    ga1, ga2 = params.gamma_a1, params.gamma_a2
    da1, da2 = params.delta_a1, params.delta_a2
    J, g = params.J, params.g
    r_plus, r_minus, i_plus, i_minus = kerr_entries(params, ss)
    return np.array(
        [
            [-ga1, da1, 0.0, J, 0.0, 0.0],
            [-da1, -ga1, -J, 0.0, 0.0, 0.0],
            [0.0, J, -ga2, da2, 0.0, g],
            [-J, 0.0, -da2, -ga2, -g, 0.0],
            [0.0, 0.0, 0.0, g, r_plus, i_plus],
            [0.0, 0.0, -g, 0.0, i_minus, r_minus],
        ]
    )


def build_diffusion(params: SystemParams) -> np.ndarray:
    rates = (params.gamma_a1, params.gamma_a2, params.gamma_m)
    entries = [(2.0 * n + 1.0) * gamma for n, gamma in zip(params.occupancies(), rates)]
    return np.diag(np.repeat(entries, 2))


def char_poly(A: np.ndarray) -> np.ndarray:
    """
    Coefficients α_0..α_n of det(λ𝟙 - A) = Σ α_k λ^(n-k) by the Faddeev-LeVerrier recursion.
    """
    A = np.asarray(A, dtype=float)
    n = A.shape[0]
    identity = np.eye(n)
    alpha = np.zeros(n + 1)
    alpha[0] = 1.0
    M = np.zeros_like(A)
    for k in range(1, n + 1):
        M = A @ M + alpha[k - 1] * identity
        alpha[k] = -np.trace(A @ M) / k
    return alpha


def hurwitz_determinants(alpha) -> np.ndarray:
    """
    Leading principal minors of the Hurwitz matrix H_ij = α_(2i-j), with α_m = 0 outside 0..n.
    """
    alpha = np.asarray(alpha, dtype=float)
    n = len(alpha) - 1
    H = np.zeros((n, n))
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            index = 2 * i - j
            if 0 <= index <= n:
                H[i - 1, j - 1] = alpha[index]
    return np.array([np.linalg.det(H[:k, :k]) for k in range(1, n + 1)])


def check_stability(A: np.ndarray) -> StabilityVerdict:
    A = np.asarray(A, dtype=float)
    norm = np.linalg.norm(A)
    max_real = float(np.max(np.linalg.eigvals(A).real))
    band = MARGINAL_BAND * norm
    if norm == 0:
        return StabilityVerdict(stable=False, max_real_eig=max_real, hurwitz_ok=False, marginal=True)
    determinants = hurwitz_determinants(char_poly(A / norm))
    verdict = StabilityVerdict(
        stable=bool(max_real < -band),
        max_real_eig=max_real,
        hurwitz_ok=bool(np.all(determinants > 0)),
        marginal=bool(abs(max_real) <= band),
    )
    if not verdict.agree:
        logger.warning(
            f"eigenvalue verdict {verdict.stable} disagrees with Hurwitz verdict {verdict.hurwitz_ok} "
            f"(max Re λ = {max_real:.3e}, determinants {determinants})"
        )
    return verdict


def lyapunov_residual(A: np.ndarray, D: np.ndarray, V: np.ndarray) -> float:
    """‖AV + VAᵀ + D‖_F / ‖D‖_F, or the bare norm when D vanishes."""
    residual = np.linalg.norm(A @ V + V @ A.T + D)
    scale = np.linalg.norm(D)
    return float(residual / scale) if scale > 0 else float(residual)


def solve_lyapunov(A: np.ndarray, D: np.ndarray, check: bool = True) -> np.ndarray:
    """
    Solve AV + VAᵀ = -D through the vectorized system (𝟙⊗A + A⊗𝟙) vec V = -vec D.

    Args:
        A (np.ndarray): Drift matrix.
        D (np.ndarray): Diffusion matrix.
        check (bool): Certify stability of ``A`` first.

    Raises:
        UnstableDrift: ``check`` is set and ``A`` is not stable.
        SingularSystem: the vectorized system is rank deficient.
    """
    A = np.asarray(A, dtype=float)
    D = np.asarray(D, dtype=float)
    if check:
        verdict = check_stability(A)
        if not verdict.stable:
            raise UnstableDrift(f"drift matrix is not stable (max Re λ = {verdict.max_real_eig:.6e})")

    n = A.shape[0]
    scale = np.max(np.abs(np.diag(A))) or np.linalg.norm(A) or 1.0
    A_s = A / scale
    identity = np.eye(n)
    system = np.kron(identity, A_s) + np.kron(A_s, identity)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", LinAlgWarning)
        lu, piv = lu_factor(system)
    pivots = np.abs(np.diag(lu))
    if pivots.min() <= SINGULAR_PIVOT * pivots.max():
        raise SingularSystem(f"Lyapunov system is singular (pivot ratio {pivots.min() / pivots.max():.3e})")

    vec_v = lu_solve((lu, piv), -(D / scale).reshape(-1, order="F"))
    V = vec_v.reshape((n, n), order="F")
    V = 0.5 * (V + V.T)

    residual = lyapunov_residual(A, D, V)
    if residual > LYAPUNOV_RESIDUAL_BOUND:
        logger.warning(f"Lyapunov residual {residual:.3e} exceeds {LYAPUNOV_RESIDUAL_BOUND:.0e}")
    else:
        logger.debug(f"Lyapunov residual {residual:.3e}")
    return V


@dataclass(frozen=True)
class GaussianState:
    """First and second moments of the quadratures, plus how they were obtained."""

    mean: np.ndarray
    cov: np.ndarray
    steady: SteadyState | None = None
    drift: np.ndarray | None = field(default=None, repr=False)
    diffusion: np.ndarray | None = field(default=None, repr=False)
    verdict: StabilityVerdict | None = None

    @property
    def n_modes(self) -> int:
        return self.cov.shape[0] // 2

    def local(self, mode: Mode | str) -> np.ndarray:
        """Reduced 2×2 covariance L_i of one mode."""
        s = Mode(mode).span
        return self.cov[s, s]

    def correlation(self, first: Mode | str, second: Mode | str) -> np.ndarray:
        """Cross block C_ij between two modes."""
        return self.cov[Mode(first).span, Mode(second).span]

    def local_mean(self, mode: Mode | str) -> np.ndarray:
        return self.mean[Mode(mode).span]

    def uncertainty_min_eig(self) -> float:
        """Smallest eigenvalue of V + iΞ/2, non-negative for a physical state."""
        xi = SymplecticForm(self.n_modes).matrix
        return float(np.linalg.eigvalsh(self.cov + 0.5j * xi).min())


def gaussian_state(params: SystemParams) -> GaussianState:
    """Steady state, drift, stability gate and covariance for one parameter point."""
    ss = solve_steady(params)
    A = build_drift(params, ss)
    verdict = check_stability(A)
    if not verdict.stable:
        raise UnstableDrift(
            f"drift matrix is not stable (max Re λ = {verdict.max_real_eig:.6e}, marginal={verdict.marginal})"
        )
    D = build_diffusion(params)
    V = solve_lyapunov(A, D, check=False)
    return GaussianState(mean=ss.quadratures(), cov=V, steady=ss, drift=A, diffusion=D, verdict=verdict)


def closed_form_coefficients(params: SystemParams, ss: SteadyState) -> np.ndarray:
    """
    Characteristic polynomial coefficients α_0..α_6 from the symmetric-cavity closed forms.

    Only defined for γ_a1 = γ_a2 and Δ_a1 = Δ_a2. The numeric :func:`char_poly` is authoritative.
    """
    if not params.symmetric_cavities:
        raise DomainError("closed-form coefficients need identical cavity linewidths and detunings")
    ga, da = params.gamma_a1, params.delta_a1
    g, J = params.g, params.J
    r_plus, r_minus, i_plus, i_minus = kerr_entries(params, ss)

    eta1 = r_plus + r_minus
    eta2 = r_plus * r_minus - i_plus * i_minus
    eta3 = i_plus - i_minus
    eta4 = ga**2 + da**2
    eta5 = J**2 + da**2
    mu0 = 6 * g**2 + 4 * (eta5 + eta2)
    mu2 = 6 * (g**2 + eta2) + 2 * eta5
    mu3 = (4 * da**2 + 3 * g**2 + 4 * J**4) * eta1
    mu5 = (
        2 * ga**3
        + J**2 * (2 * ga - eta1)
        - (3 * ga**2 + da**2) * eta1
        + 2 * ga * da * (da - i_plus + i_minus)
    )
    mu6 = eta4 * eta1 - 2 * ga * eta2
    mu7 = eta4 * eta1 - 4 * ga * eta2
    mu8 = J**4 + 2 * J**2 * (ga**2 - da**2) + eta4**2
    mu9 = eta4 * (ga * eta1 + da * eta3) + J**2 * (ga * eta1 - da * eta3)

    return np.array(
        [
            1.0,
            4 * ga - eta1,
            2 * (g**2 + J**2) + 6 * ga**2 + 2 * da**2 - 4 * eta1 + eta2,
            4 * ga**3 - eta1 * (g**2 + 2 * eta5) - 6 * ga**2 * eta1 + ga * mu0,
            ga**4 - 4 * ga**3 * eta1 + ga**2 * mu2 - ga * mu3 + 2 * r_plus * r_minus * eta5,
            2 * g**4 * ga - J**4 * eta1 + g**2 * mu5 - 2 * J**2 * mu6 - eta4 * mu7,
            g**4 * eta4 + eta2 * mu8 - g**2 * mu9,
        ]
    )


@dataclass(frozen=True)
class ClosedFormComparison:
    closed_form: np.ndarray
    numeric: np.ndarray
    rel_diff: np.ndarray

    @property
    def agree(self) -> bool:
        return bool(np.all(self.rel_diff <= CLOSED_FORM_RTOL))

    @property
    def mismatched(self) -> list[int]:
        return [k for k, diff in enumerate(self.rel_diff) if diff > CLOSED_FORM_RTOL]


def compare_closed_form(params: SystemParams, ss: SteadyState, A: np.ndarray | None = None) -> ClosedFormComparison:
    """
    Compare the closed-form coefficients with :func:`char_poly` of the drift matrix.

    Differences are measured on the coefficients rescaled by ‖A‖^k and logged, never raised.
    """
    A = build_drift(params, ss) if A is None else A
    numeric = char_poly(A)
    closed = closed_form_coefficients(params, ss)
    norm = np.linalg.norm(A) or 1.0
    powers = norm ** np.arange(len(numeric))
    rel_diff = np.abs(closed - numeric) / powers
    comparison = ClosedFormComparison(closed_form=closed, numeric=numeric, rel_diff=rel_diff)
    for k in comparison.mismatched:
        logger.warning(
            f"closed-form alpha_{k} = {closed[k]:.9e} differs from numeric {numeric[k]:.9e} "
            f"(scaled difference {rel_diff[k]:.3e})"
        )
    return comparison
