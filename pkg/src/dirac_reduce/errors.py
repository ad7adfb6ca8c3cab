"""Exception hierarchy shared by the library and the CLI exit-code mapping."""


class DiracReduceError(Exception):
    """Base class for every error raised by this package."""


class ParameterError(DiracReduceError, ValueError):
    """An argument lies outside the domain an operation accepts."""


class DimensionError(DiracReduceError, ValueError):
    """Array shapes of a spinor, potential and grid do not agree."""


class DegenerateAngleError(ParameterError):
    """tan(tau) or cot(tau) is singular while the auxiliary term is nonzero."""


class NotAdmissible(ParameterError):
    """Poschl-Teller parameters violate a square-integrability condition.

    ``reason`` names the violated inequality.
    """

    def __init__(self, reason, channel=None):
        self.reason = reason
        self.channel = channel
        msg = reason if channel is None else f"{channel} channel: {reason}"
        super().__init__(msg)


class ZeroEnergyMode(ParameterError):
    """The closed-form spinor divides by E_n, which vanishes for n = 0."""


class SchemeMismatch(ParameterError):
    """A reduced pair does not satisfy the constraints of a disorder identification."""


class DetectionError(DiracReduceError):
    """Base class for the two ways reducibility detection can fail."""


class UnderdeterminedAngle(DetectionError):
    """The cross blocks vanish, so the mixing angle cannot be recovered."""


class NotReducible(DetectionError):
    """No (tau, phi) makes every dependent entry consistent.

    ``report`` is the worst-violation dictionary produced by the detector.
    """

    def __init__(self, message, report=None):
        self.report = report or {}
        super().__init__(message)


class NumericError(DiracReduceError, RuntimeError):
    """The eigensolver or another numerical routine failed."""


class ConfigError(DiracReduceError):
    """Unreadable, malformed or unknown configuration or input data."""
