"""Exception hierarchy shared by every module.

All errors derive from :class:`ArtifactError`, itself a ``ValueError``, so
callers that only care about "bad input" can catch one type. The CLI maps
any ``ArtifactError`` to exit code 2.
"""

from __future__ import annotations


class ArtifactError(ValueError):
    pass


# ff
class NonPrime(ArtifactError):
    pass


class TooLarge(ArtifactError):
    pass


class PDividesN(ArtifactError):
    pass


class NotInSubgroup(ArtifactError):
    pass


# localfield
class DivisionByZeroToPrecision(ArtifactError):
    pass


class PrecisionExhausted(ArtifactError):
    pass


class ZeroElement(ArtifactError):
    pass


class NoRoot(ArtifactError):
    def __init__(self, reason: str):
        super().__init__(f"no root: {reason}")
        self.reason = reason


# galois
class RootsOfUnityMissing(ArtifactError):
    pass


class BadCharacteristic(ArtifactError):
    pass


class ModelTooLarge(ArtifactError):
    pass


class OwnerMismatch(ArtifactError):
    pass


# orbifold
class PrecisionTooLow(ArtifactError):
    pass


class ZeroToPrecision(ArtifactError):
    pass


class SingularReduction(ArtifactError):
    pass


# duality
class TorsionFieldTooLarge(ArtifactError):
    pass


class SingularCurve(ArtifactError):
    pass
