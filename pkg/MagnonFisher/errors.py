class MagnonFisherError(Exception):
    """Base class of every error raised by the package."""

    reason = "error"


class DomainError(MagnonFisherError):
    """An argument lies outside the domain of a physical formula."""

    reason = "domain"


class ConfigError(MagnonFisherError):
    reason = "config"


class UnknownPreset(ConfigError):
    reason = "unknown_preset"


class IoError(MagnonFisherError):
    reason = "io"


class MultistableRegime(MagnonFisherError):
    """The mean-field cubic admits more than one admissible root."""

    reason = "multistable"

    def __init__(self, roots: list[float]):
        self.roots = roots
        super().__init__(
            f"{len(roots)} admissible steady states for |<m>|^2: {roots}"
        )


class NoSteadyState(MagnonFisherError):
    reason = "no_steady_state"


class UnstableDrift(MagnonFisherError):
    reason = "unstable"


class SingularSystem(MagnonFisherError):
    reason = "singular"


class StencilCrossesInstability(MagnonFisherError):
    reason = "stencil_unstable"


class NearPureState(MagnonFisherError):
    """The QFI kernel is (numerically) singular, as for a pure state."""

    reason = "near_pure"

    def __init__(self, singular_value: float, norm: float):
        self.singular_value = singular_value
        self.norm = norm
        super().__init__(
            f"smallest singular value {singular_value:.3e} of the QFI kernel "
            f"(norm {norm:.3e}) is below the pure-state guard"
        )


class ZeroInformation(MagnonFisherError):
    reason = "zero_information"


class SingularAleph(MagnonFisherError):
    reason = "singular_aleph"


class DegenerateNormalMode(MagnonFisherError):
    reason = "degenerate_normal_mode"


class NoCrossing(MagnonFisherError):
    reason = "no_crossing"
