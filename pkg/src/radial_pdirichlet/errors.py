"""Exception hierarchy shared by all modules."""

from __future__ import annotations

import math


class AnnulusError(Exception):
    """Base class for every error raised by this package."""


class DomainError(AnnulusError, ValueError):
    """An argument lies outside the domain of the operation."""


class SingularityError(AnnulusError, ValueError):
    """Evaluation would hit a logarithmic or division singularity."""


class RegimeError(AnnulusError, ValueError):
    """The exponent belongs to a regime the operation does not handle."""


class ExtrapolationError(AnnulusError, ValueError):
    """A resampling grid leaves the domain covered by the data."""


class BracketError(AnnulusError, RuntimeError):
    """A bracketing root search found no sign change."""


class PrecisionError(AnnulusError, RuntimeError):
    """Bracket expansion ran into the floating-point limits of (0, 1)."""


class QuadratureError(AnnulusError, RuntimeError):
    """Adaptive quadrature did not reach its tolerance."""

    def __init__(self, message: str, estimate: float, error: float):
        super().__init__(f"{message} (estimate={estimate!r}, error={error!r})")
        self.estimate = estimate
        self.error = error


class NonexistenceError(AnnulusError):
    """No radial homeomorphic minimizer exists (p = 1 above the threshold)."""

    def __init__(self, r: float, R: float, threshold: float):
        super().__init__(
            f"no radial minimizer for p=1: R={R!r} exceeds R0(r={r!r})={threshold:.12g} "
            f"(log R must be <= {math.log(threshold):.12g})"
        )
        self.r = r
        self.R = R
        self.threshold = threshold


class PerturbationError(AnnulusError, RuntimeError):
    """No admissible perturbation found within the retry budget."""

