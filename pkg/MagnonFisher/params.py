"""
Physical parameters of the driven double-cavity magnon system.

All rates, detunings and frequencies are stored in rad/s. Helpers such as
:func:`two_pi_mhz` convert the values quoted in units of 2π×MHz on ingest.
"""

import logging
import math
from dataclasses import asdict, dataclass, field, fields, replace

from scipy import constants

from MagnonFisher.errors import DomainError

logger = logging.getLogger(f"MagnonFisher.{__name__}")

HBAR: float = constants.hbar  # J·s
K_B: float = constants.k  # J/K
MU_0: float = constants.mu_0  # N/A²
TWO_PI: float = 2.0 * math.pi
GAMMA_E: float = TWO_PI * 28e9  # rad/(s·T)

# beyond this ħω/k_BT the occupancy is below 1e-300
OCCUPANCY_EXPONENT_CUTOFF = 700.0
CONSISTENCY_RTOL = 1e-9

YIG_SPIN_DENSITY = 4.22e27  # m⁻³
YIG_SATURATION_MAGNETIZATION = 1.4e5  # A/m


def two_pi_ghz(value: float) -> float:
    return TWO_PI * value * 1e9


def two_pi_mhz(value: float) -> float:
    return TWO_PI * value * 1e6


def two_pi_uhz(value: float) -> float:
    return TWO_PI * value * 1e-6


def bose_occupancy(omega: float, T: float) -> float:
    """
    Mean thermal occupancy n(ω) = 1/(exp(ħω/k_BT) − 1).

    Args:
        omega (float): Mode angular frequency in rad/s, strictly positive.
        T (float): Temperature in K.

    Returns:
        float: The occupancy, exactly 0 at T = 0 or deep in the quantum limit.
    """
    if not omega > 0:
        raise DomainError(f"mode frequency must be positive, got {omega!r}")
    if T < 0:
        raise DomainError(f"temperature must be non-negative, got {T!r}")
    if T == 0:
        return 0.0
    x = HBAR * omega / (K_B * T)
    if x > OCCUPANCY_EXPONENT_CUTOFF:
        return 0.0
    return 1.0 / math.expm1(x)


def drive_amplitude(P_l: float, omega_l: float, gamma_a2: float) -> float:
    """Drive amplitude E_l = sqrt(γ_a2 P_l / (ħ ω_l)) in rad/s."""
    if P_l < 0 or gamma_a2 < 0:
        raise DomainError("drive power and linewidth must be non-negative")
    if not omega_l > 0:
        raise DomainError(f"drive frequency must be positive, got {omega_l!r}")
    return math.sqrt(gamma_a2 * P_l / (HBAR * omega_l))


def total_spin(diameter: float, rho: float) -> float:
    """Return 2S = 5ρV_m for a sphere of the given diameter."""
    if diameter <= 0 or rho < 0:
        raise DomainError("diameter must be positive and spin density non-negative")
    return 5.0 * rho * sphere_volume(diameter)


def sphere_volume(diameter: float) -> float:
    return math.pi * diameter**3 / 6.0


@dataclass(frozen=True)
class MaterialParams:
    """Material and geometry constants of the YIG sphere and cavity 2."""

    gamma_e: float
    mu0: float
    K_an: float
    M_b: float
    V_m: float
    V_a: float
    rho: float
    H_B: float

    def __post_init__(self):
        for f in fields(self):
            value = getattr(self, f.name)
            if f.name in ("K_an", "H_B"):
                if not value >= 0:
                    raise DomainError(f"material constant {f.name} must be non-negative, got {value!r}")
            elif not value > 0:
                raise DomainError(f"material constant {f.name} must be positive, got {value!r}")

    @property
    def two_s(self) -> float:
        """2S = 5ρV_m."""
        return 5.0 * self.rho * self.V_m

    @classmethod
    def yig(
        cls,
        diameter: float = 250e-6,
        V_a: float = 1e-6,
        H_B: float = 0.36,
        K: float = two_pi_uhz(2.0),
    ) -> "MaterialParams":
        """YIG constants with K_an chosen so that the Kerr coefficient equals ``K``."""
        V_m = sphere_volume(diameter)
        K_an = anisotropy_for_kerr(K, V_m, YIG_SATURATION_MAGNETIZATION, GAMMA_E)
        return cls(
            gamma_e=GAMMA_E,
            mu0=MU_0,
            K_an=K_an,
            M_b=YIG_SATURATION_MAGNETIZATION,
            V_m=V_m,
            V_a=V_a,
            rho=YIG_SPIN_DENSITY,
            H_B=H_B,
        )


def kerr_coefficient(mat: MaterialParams) -> float:
    """K = μ0 K_an γ_e² / (V_m M_b²)."""
    return mat.mu0 * mat.K_an * mat.gamma_e**2 / (mat.V_m * mat.M_b**2)


def anisotropy_for_kerr(K: float, V_m: float, M_b: float, gamma_e: float = GAMMA_E, mu0: float = MU_0) -> float:
    """Invert :func:`kerr_coefficient` for the anisotropy constant K_an."""
    return K * V_m * M_b**2 / (mu0 * gamma_e**2)


def magnon_frequency(mat: MaterialParams) -> float:
    """ω_m = γ_e H_B − 2μ0 K_an γ_e² S / (V_m M_b²), i.e. γ_e H_B − K·2S."""
    return mat.gamma_e * mat.H_B - kerr_coefficient(mat) * mat.two_s


def coupling_from_geometry(mat: MaterialParams, omega_a2: float) -> float:
    """
    g = sqrt(2S) g_am with g_am = sqrt(μ0 ħ γ_e² ω_a2 / (4 V_a)).

    ħ is written out so that g comes out in rad/s with γ_e in rad/(s·T).
    """
    if not omega_a2 > 0:
        raise DomainError(f"cavity frequency must be positive, got {omega_a2!r}")
    g_am = math.sqrt(mat.mu0 * HBAR * mat.gamma_e**2 * omega_a2 / (4.0 * mat.V_a))
    return math.sqrt(mat.two_s) * g_am


@dataclass(frozen=True)
class SystemParams:
    """
    Inputs of the double-cavity magnon model, in SI units with rates in rad/s.

    The absolute mode frequencies only enter the thermal occupancies. When one is
    omitted it defaults to ω_l + Δ_i.
    """

    delta_a1: float
    delta_a2: float
    delta_m: float
    gamma_a1: float
    gamma_a2: float
    gamma_m: float
    J: float
    g: float
    K: float
    P_l: float
    omega_l: float
    T: float
    omega_a1: float | None = None
    omega_a2: float | None = None
    omega_m: float | None = None
    gamma_a2_ex: float | None = field(default=None, compare=False)

    def __post_init__(self):
        for mode in ("a1", "a2", "m"):
            name = f"omega_{mode}"
            if getattr(self, name) is None:
                object.__setattr__(self, name, self.omega_l + getattr(self, f"delta_{mode}"))
        self.validate()

    def validate(self) -> None:
        for name in ("gamma_a1", "gamma_a2", "gamma_m"):
            value = getattr(self, name)
            if not value > 0:
                raise DomainError(f"{name} must be positive, got {value!r}")
        if self.T < 0:
            raise DomainError(f"temperature must be non-negative, got {self.T!r}")
        if self.P_l < 0:
            raise DomainError(f"drive power must be non-negative, got {self.P_l!r}")
        if not self.omega_l > 0:
            raise DomainError(f"drive frequency must be positive, got {self.omega_l!r}")
        if self.J < 0:
            raise DomainError(f"tunneling rate must be non-negative, got {self.J!r}")
        if self.gamma_a2_ex is not None and not 0 <= self.gamma_a2_ex <= self.gamma_a2:
            raise DomainError("external linewidth must lie within [0, gamma_a2]")
        for mode in ("a1", "a2", "m"):
            omega = getattr(self, f"omega_{mode}")
            if not omega > 0:
                raise DomainError(f"omega_{mode} must be positive, got {omega!r}")
            delta = getattr(self, f"delta_{mode}")
            if abs(omega - self.omega_l - delta) > CONSISTENCY_RTOL * omega:
                logger.warning(
                    f"omega_{mode} - omega_l = {omega - self.omega_l:.9e} differs from "
                    f"delta_{mode} = {delta:.9e}"
                )

    @property
    def gamma_a2_0(self) -> float | None:
        """Intrinsic part of the cavity-2 linewidth, when the split is known."""
        if self.gamma_a2_ex is None:
            return None
        return self.gamma_a2 - self.gamma_a2_ex

    @property
    def E_l(self) -> float:
        return drive_amplitude(self.P_l, self.omega_l, self.gamma_a2)

    @property
    def symmetric_cavities(self) -> bool:
        return self.gamma_a1 == self.gamma_a2 and self.delta_a1 == self.delta_a2

    def occupancies(self) -> tuple[float, float, float]:
        return (
            bose_occupancy(self.omega_a1, self.T),
            bose_occupancy(self.omega_a2, self.T),
            bose_occupancy(self.omega_m, self.T),
        )

    def with_overrides(self, **overrides) -> "SystemParams":
        """
        Copy with some fields replaced.

        ``gamma_a`` and ``delta_a`` set both cavities at once. Absolute frequencies that
        were derived from detunings follow the new detunings.
        """
        overrides = dict(overrides)
        if "gamma_a" in overrides:
            value = overrides.pop("gamma_a")
            overrides.setdefault("gamma_a1", value)
            overrides.setdefault("gamma_a2", value)
        if "delta_a" in overrides:
            value = overrides.pop("delta_a")
            overrides.setdefault("delta_a1", value)
            overrides.setdefault("delta_a2", value)
        known = {f.name for f in fields(self)}
        unknown = set(overrides) - known
        if unknown:
            raise DomainError(f"unknown parameter(s): {', '.join(sorted(unknown))}")
        changes = dict(overrides)
        for mode in ("a1", "a2", "m"):
            name = f"omega_{mode}"
            if name in changes:
                continue
            tracks_detuning = getattr(self, name) == self.omega_l + getattr(self, f"delta_{mode}")
            if tracks_detuning and (f"delta_{mode}" in changes or "omega_l" in changes):
                changes[name] = None
        return replace(self, **changes)

    def as_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def baseline(cls, **overrides) -> "SystemParams":
        """The reference operating point used throughout the parameter sweeps."""
        params = cls(
            delta_a1=two_pi_mhz(40.0),
            delta_a2=two_pi_mhz(40.0),
            delta_m=two_pi_mhz(60.0),
            gamma_a1=two_pi_mhz(5.0),
            gamma_a2=two_pi_mhz(5.0),
            gamma_m=two_pi_mhz(40.0),
            J=two_pi_mhz(26.0),
            g=two_pi_mhz(41.0),
            K=two_pi_uhz(2.0),
            P_l=0.5,
            omega_l=two_pi_ghz(10.0),
            T=10e-3,
        )
        return params.with_overrides(**overrides) if overrides else params

    @classmethod
    def from_material(
        cls,
        mat: MaterialParams,
        *,
        omega_l: float,
        delta_a1: float,
        delta_a2: float,
        gamma_a1: float,
        gamma_a2: float,
        gamma_m: float,
        J: float,
        P_l: float,
        T: float,
        g: float | None = None,
    ) -> "SystemParams":
        """
        Build parameters whose ω_m and K follow from the material constants.

        When ``g`` is omitted it is computed from the cavity geometry.
        """
        omega_m = magnon_frequency(mat)
        omega_a2 = omega_l + delta_a2
        return cls(
            delta_a1=delta_a1,
            delta_a2=delta_a2,
            delta_m=omega_m - omega_l,
            gamma_a1=gamma_a1,
            gamma_a2=gamma_a2,
            gamma_m=gamma_m,
            J=J,
            g=coupling_from_geometry(mat, omega_a2) if g is None else g,
            K=kerr_coefficient(mat),
            P_l=P_l,
            omega_l=omega_l,
            T=T,
            omega_m=omega_m,
        )
