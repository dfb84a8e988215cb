"""Exception hierarchy for the Unruh Otto engine numerics"""

from typing import Optional


class UnruhOttoError(Exception):
    """Base class for every error raised by this package."""


class DomainError(UnruhOttoError, ValueError):
    """An argument lies outside the domain of the operation."""


class ValidationError(UnruhOttoError, ValueError):
    """User-supplied parameters violate a model invariant."""


class ConfigError(UnruhOttoError):
    """Configuration file or settings could not be loaded or are invalid."""


class SingularOffset(DomainError):
    """Lerch offset a sits on (or within tolerance of) a non-positive integer."""

    def __init__(self, a: float, tol: float):
        self.a = a
        self.tol = tol
        super().__init__(f"Lerch offset a={a!r} is within {tol:g} of a non-positive integer")


class NoConvergence(UnruhOttoError):
    """A series ran out of its term budget before reaching the requested accuracy."""

    def __init__(self, z: float, s: int, a: float, terms: int, rel_error: float):
        self.z = z
        self.s = s
        self.a = a
        self.terms = terms
        self.rel_error = rel_error
        super().__init__(
            f"Lerch series (z={z!r}, s={s}, a={a!r}) did not converge in {terms} terms "
            f"(estimated relative error {rel_error:.3e})"
        )


class DegenerateKappa(DomainError):
    """Acceleration ratio too close to 1 for the cross-detector separation to be defined."""

    def __init__(self, alpha: float):
        self.alpha = alpha
        super().__init__(f"alpha={alpha!r} is degenerate (|alpha - 1| below tolerance); kappa vanishes")


class NearSingularA(DomainError):
    """Dimensionless acceleration A falls inside a masked band around 2*pi*n."""

    def __init__(self, A: float, n: int, radius: float):
        self.A = A
        self.n = n
        self.radius = radius
        super().__init__(f"A={A!r} lies within {radius:g} of 2*pi*{n}; closed forms are singular there")


class UnderdeterminedOmega1(DomainError):
    """Both stage acceleration ratios equal 1, so the lower gap is not fixed."""

    def __init__(self, alpha_H: float, alpha_C: float):
        self.alpha_H = alpha_H
        self.alpha_C = alpha_C
        super().__init__(f"omega1 is undetermined for alpha_H={alpha_H!r}, alpha_C={alpha_C!r} (both equal 1)")


class NonPositiveOmega1(DomainError):
    """The energy balance forces a lower gap that is not positive."""

    def __init__(self, omega1_hat: float, alpha_H: float, alpha_C: float):
        self.omega1_hat = omega1_hat
        self.alpha_H = alpha_H
        self.alpha_C = alpha_C
        super().__init__(
            f"omega1*T={omega1_hat!r} is not positive for alpha_H={alpha_H!r}, alpha_C={alpha_C!r}; "
            "alpha_C must lie on the same side of 1 as alpha_H"
        )


class QuadratureDivergence(UnruhOttoError):
    """Regulator extrapolation of an oracle integral did not settle."""

    def __init__(self, message: str, values: Optional[list] = None):
        self.values = values or []
        super().__init__(message)
