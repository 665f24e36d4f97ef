"""Exception hierarchy shared by the library and the CLI exit-code mapping."""


class InterrogationError(ValueError):
    """Base class for every error raised deliberately by this package."""


class DomainError(InterrogationError):
    """An argument lies outside the domain of a formula."""


class SingularityError(DomainError):
    """The penetration depth diverges (angle at or below the critical angle)."""


class ConfigError(InterrogationError):
    """A configuration file or model parameter set is invalid."""
