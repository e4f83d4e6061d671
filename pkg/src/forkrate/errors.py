"""Exception hierarchy. Every error carries a stable ``code`` used by the CLI."""

from __future__ import annotations


class ForkRateError(ValueError):
    code = "ForkRateError"


class NonPositiveRate(ForkRateError):
    code = "NonPositiveRate"


class XiOutOfRange(ForkRateError):
    code = "XiOutOfRange"


class Unstable(ForkRateError):
    code = "Unstable"


class Infeasible(ForkRateError):
    code = "Infeasible"


class NegativeArgument(ForkRateError):
    code = "NegativeArgument"


class DeltaOutOfRange(ForkRateError):
    code = "DeltaOutOfRange"


class DomainError(ForkRateError):
    code = "DomainError"


class NegativeDiscriminant(ForkRateError):
    code = "NegativeDiscriminant"


class NonFinite(ForkRateError):
    code = "NonFinite"


class BracketEscape(ForkRateError):
    code = "BracketEscape"


class NoSignChange(ForkRateError):
    code = "NoSignChange"


class ConfigError(ForkRateError):
    code = "ConfigError"


class EmptySamples(ForkRateError):
    code = "EmptySamples"


class InsufficientPoints(ForkRateError):
    code = "InsufficientPoints"
