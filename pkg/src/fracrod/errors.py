"""Exception hierarchy shared by every fracrod module."""

from __future__ import annotations


class FracrodError(Exception):
    """Base class for all library errors."""


class DomainError(FracrodError, ValueError):
    """Evaluation point lies on the branch cut (-inf, 0]."""


class SingularModel(FracrodError, ZeroDivisionError):
    """A constitutive symbol vanished where it appears in a denominator."""


class PoleHit(FracrodError, ZeroDivisionError):
    """Transfer function evaluated at (or numerically on top of) a pole."""


class AsymptoticsViolation(FracrodError):
    """M(s) has no finite positive limit at zero or at infinity."""


class UnsupportedModel(FracrodError):
    """Model is valid but outside what the solver handles (x0 > 0)."""


class ZeroOnContour(FracrodError):
    """|f| dropped below the floor while tracing a winding contour."""


class ContourTooCoarse(FracrodError):
    """Argument tracking could not be resolved within the refinement depth."""


class NoConvergence(FracrodError):
    """Newton iteration for the pole did not converge."""


class CertificationFailed(FracrodError):
    """Winding counts do not certify exactly one conjugate pole pair in Re s < 0."""


class QuadratureFailure(FracrodError):
    """Branch-cut quadrature hit its panel/interval budget."""


class MethodBreakdown(FracrodError):
    """Reference inverse-Laplace method produced non-finite weights or values."""


class GridTooCoarse(FracrodError, ValueError):
    """Time grid cannot resolve the oscillation frequencies in play."""


class ResonanceCase(FracrodError, ValueError):
    """Closed-form elastic solution requested at omega == 1."""


class ConfigError(FracrodError, ValueError):
    """Run configuration is malformed; message names the offending field."""
