"""
Normal-mode picture of the steady state: the Bogoliubov magnon mode and the two
hybridized cavity modes. Their crossings locate the peaks of the QFI against the cavity
detuning.
"""

import logging
import math
from dataclasses import asdict, dataclass, field

from MagnonFisher.errors import DegenerateNormalMode, NoCrossing
from MagnonFisher.params import SystemParams
from MagnonFisher.steady import SteadyState, solve_steady

logger = logging.getLogger(f"MagnonFisher.{__name__}")


@dataclass(frozen=True)
class BogoliubovParams:
    alpha: float
    beta: float
    phi: float
    E: float


@dataclass(frozen=True)
class HybridModes:
    omega_plus: float
    omega_minus: float
    G_plus: float
    G_minus: float
    f: float
    h: float


def bogoliubov(params: SystemParams, ss: SteadyState) -> BogoliubovParams:
    """
    Diagonalize the linearized magnon Hamiltonian with a Bogoliubov transformation.

    β is kept non-negative. The minus sign of βe^(iφ) is carried by φ.

    Raises:
        DegenerateNormalMode: ℰ is not real and positive, or Δ_eff < 0 with squeezing present.
    """
    squeeze = 2.0 * params.K * ss.m_mean**2
    delta_eff = ss.delta_eff
    if squeeze == 0:
        return BogoliubovParams(alpha=1.0, beta=0.0, phi=0.0, E=abs(delta_eff))
    E2 = delta_eff**2 - abs(squeeze) ** 2
    if E2 <= 0:
        raise DegenerateNormalMode(f"squeezing |2K<m>^2| = {abs(squeeze):.6e} reaches |Δ_eff| = {abs(delta_eff):.6e}")
    if delta_eff < 0:
        raise DegenerateNormalMode(f"negative effective detuning {delta_eff:.6e} with Kerr squeezing present")
    E = math.sqrt(E2)
    ratio = delta_eff / E
    return BogoliubovParams(
        alpha=math.sqrt((ratio + 1.0) / 2.0),
        beta=math.sqrt(max(ratio - 1.0, 0.0) / 2.0),
        phi=(math.atan2(squeeze.imag, squeeze.real) + math.pi) % (2 * math.pi),
        E=E,
    )


def hybrid_modes(params: SystemParams) -> HybridModes:
    d1, d2, J, g = params.delta_a1, params.delta_a2, params.J, params.g
    split = math.sqrt((d1 - d2) ** 2 + 4 * J**2)
    omega_plus = 0.5 * (d1 + d2 + split)
    omega_minus = 0.5 * (d1 + d2 - split)
    d = omega_minus - d1
    if J == 0 and d1 == d2:
        f, h = 1.0 / math.sqrt(2.0), -1.0 / math.sqrt(2.0)
    elif d == 0:
        # uncoupled with cavity 1 lowest: the lower mode is cavity 1
        f, h = 0.0, -1.0
    else:
        f = abs(d) / math.hypot(d, J)
        h = J * f / d
    return HybridModes(
        omega_plus=omega_plus,
        omega_minus=omega_minus,
        G_plus=-g * h,
        G_minus=f * g,
        f=f,
        h=h,
    )


def peak_predictor(params: SystemParams, ss: SteadyState) -> tuple[float, ...]:
    """
    Cavity-1 detunings where a hybrid cavity mode is resonant with the normal magnon mode.

    Δ_a2 - Δ_a1 is held fixed, so for identical cavities the crossings are at ℰ ∓ J.
    """
    try:
        E = bogoliubov(params, ss).E
    except DegenerateNormalMode as exc:
        raise NoCrossing(f"normal magnon frequency is not real: {exc}") from exc
    offset = params.delta_a2 - params.delta_a1
    half_split = 0.5 * math.sqrt(offset**2 + 4 * params.J**2)
    crossings = sorted({E - offset / 2 - half_split, E - offset / 2 + half_split})
    if not all(math.isfinite(c) for c in crossings):
        raise NoCrossing("crossing detunings are not finite")
    return tuple(crossings)


@dataclass(frozen=True)
class NormalModeReport:
    hybrid: HybridModes
    bogoliubov: BogoliubovParams | None
    peaks: tuple[float, ...] = ()
    notes: list[str] = field(default_factory=list)

    def as_dict(self) -> dict:
        return {
            "hybrid": asdict(self.hybrid),
            "bogoliubov": asdict(self.bogoliubov) if self.bogoliubov else None,
            "peaks_delta_a1": list(self.peaks),
            "notes": self.notes,
        }


def normal_mode_report(params: SystemParams) -> NormalModeReport:
    """Hybrid cavity modes, the Bogoliubov magnon mode and the predicted peaks of one point."""
    ss = solve_steady(params)
    notes = []
    try:
        normal = bogoliubov(params, ss)
        peaks = peak_predictor(params, ss)
    except (DegenerateNormalMode, NoCrossing) as exc:
        logger.warning(str(exc))
        notes.append(f"{exc.reason}: {exc}")
        normal, peaks = None, ()
    return NormalModeReport(hybrid=hybrid_modes(params), bogoliubov=normal, peaks=peaks, notes=notes)
