"""Exception hierarchy.

Two families: configuration problems (bad measure specs, bad flags) and
domain problems (a point outside the region where a quantity is defined).
The CLI maps them to exit codes 2 and 3.
"""

from __future__ import annotations


class FPConvError(Exception):
    """Base class for all library errors."""


class ConfigError(FPConvError):
    """Invalid user input: malformed measure spec, bad flag, bad grid."""


class MeasureSpecError(ConfigError):
    pass


class ResourceLimit(ConfigError):
    pass


class DomainError(FPConvError):
    """A quantity was requested outside its domain of definition."""


class NonIntegrable(DomainError):
    pass


class InsideSupport(DomainError):
    pass


class InsideOrRightOfSupport(DomainError):
    pass


class OutOfRange(DomainError):
    pass


class OutOfDomain(DomainError):
    pass


class OutOfEDomain(OutOfDomain):
    pass


# spelling used in the public interface
OutOfE_Domain = OutOfEDomain


class DegenerateMu(DomainError):
    pass


class BeyondEdge(DomainError):
    pass


class ZInsideSpectrum(DomainError):
    pass


class VerificationError(FPConvError):
    """Two independent evaluation paths disagreed beyond tolerance."""
