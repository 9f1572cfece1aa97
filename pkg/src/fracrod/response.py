"""Strain and stress histories ``eps = F * P``, ``sigma = F * Q``.

Convolutions are evaluated on the user grid refined four times, so that
composite Simpson weights apply at every output point.  Harmonic forcing
uses ``cos(w(t - tau)) = cos wt cos w tau + sin wt sin w tau`` to turn the
convolution into two running integrals.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import GridTooCoarse, ResonanceCase
from .kernels import KernelEvaluator

REFINE = 4
RESONANCE_WINDOW = 1e-9


def _finite(name: str, x: float) -> float:
    x = float(x)
    if not math.isfinite(x):
        raise ValueError(f"{name} must be finite")
    return x


@dataclass(frozen=True)
class Impulse:
    amplitude: float = 1.0

    def __post_init__(self) -> None:
        _finite("amplitude", self.amplitude)


@dataclass(frozen=True)
class Step:
    amplitude: float = 1.0

    def __post_init__(self) -> None:
        _finite("amplitude", self.amplitude)

    def values(self, t: np.ndarray) -> np.ndarray:
        return np.where(np.asarray(t) >= 0, self.amplitude, 0.0)


@dataclass(frozen=True)
class Harmonic:
    F0: float = 1.0
    omega: float = 1.0

    def __post_init__(self) -> None:
        _finite("F0", self.F0)
        if _finite("omega", self.omega) < 0:
            raise ValueError("omega must be nonnegative")

    def values(self, t: np.ndarray) -> np.ndarray:
        t = np.asarray(t)
        return np.where(t >= 0, self.F0 * np.cos(self.omega * t), 0.0)


@dataclass(frozen=True)
class Sampled:
    """Force samples ``values[k]`` at ``k * dt``; linear in between, zero after."""

    dt: float
    values_: tuple[float, ...]

    def __post_init__(self) -> None:
        if not (_finite("dt", self.dt) > 0):
            raise ValueError("dt must be positive")
        if len(self.values_) < 2:
            raise ValueError("sampled forcing needs at least two samples")
        if not all(math.isfinite(v) for v in self.values_):
            raise ValueError("sampled forcing values must be finite")

    @classmethod
    def from_array(cls, dt: float, values) -> "Sampled":
        return cls(float(dt), tuple(float(v) for v in np.ravel(values)))

    def values(self, t: np.ndarray) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        ts = self.dt * np.arange(len(self.values_))
        return np.interp(t, ts, self.values_, left=0.0, right=0.0)


Forcing = Impulse | Step | Harmonic | Sampled


@dataclass(frozen=True)
class ResponseSeries:
    t: np.ndarray
    eps: np.ndarray
    sigma: np.ndarray
    P: np.ndarray
    Q: np.ndarray
    x_section: float | None = None

    def __post_init__(self) -> None:
        n = len(self.t)
        if any(len(a) != n for a in (self.eps, self.sigma, self.P, self.Q)):
            raise ValueError("series columns must have equal length")

    def displacement(self, x: float | None = None) -> np.ndarray:
        """``u(x, t) = x eps(t)``; ``x`` defaults to ``x_section``."""
        x = self.x_section if x is None else x
        if x is None:
            raise ValueError("no cross-section given")
        return x * self.eps


def _uniform_step(grid) -> tuple[np.ndarray, float]:
    t = np.asarray(grid, dtype=float).ravel()
    if t.size < 2 or t[0] != 0.0:
        raise ValueError("grid must start at 0 and have at least two points")
    d = np.diff(t)
    h = (t[-1] - t[0]) / (t.size - 1)
    if not (h > 0 and np.allclose(d, h, rtol=1e-9, atol=0)):
        raise ValueError("grid must be uniform and increasing")
    return t, h


def _check_resolution(h: float, omega: float, ev: KernelEvaluator) -> None:
    w = max(omega, abs(ev.cert.s0.imag))
    if w > 0 and h > math.pi / (8 * w):
        raise GridTooCoarse(f"step {h:g} exceeds pi/(8*{w:.6g}) = {math.pi / (8 * w):.6g}")


def _cumulative_simpson(y: np.ndarray, h: float) -> np.ndarray:
    """Running Simpson integral at the even nodes of ``y`` (odd length)."""
    pairs = h / 3.0 * (y[0:-2:2] + 4.0 * y[1:-1:2] + y[2::2])
    return np.concatenate([[0.0], np.cumsum(pairs)])


def respond(ev: KernelEvaluator, forcing: Forcing, grid, x_section: float | None = None) -> ResponseSeries:
    """Response of the rod to ``forcing`` on a uniform grid starting at 0."""
    t, h = _uniform_step(grid)
    _, P, Q = ev.kernel_table(t)
    if isinstance(forcing, Impulse):
        a = forcing.amplitude
        return ResponseSeries(t, a * P, a * Q, P, Q, x_section)

    omega = forcing.omega if isinstance(forcing, Harmonic) else 0.0
    _check_resolution(h, omega, ev)

    if isinstance(forcing, Sampled):
        F = forcing.values(t)
        eps = h * (np.convolve(F, P)[: t.size] - 0.5 * F[0] * P)
        sigma = h * (np.convolve(F, Q)[: t.size] - 0.5 * F[0] * Q)
        return ResponseSeries(t, eps, sigma, P, Q, x_section)

    tf = np.linspace(0.0, t[-1], REFINE * (t.size - 1) + 1)
    hf = h / REFINE
    _, Pf, Qf = ev.kernel_table(tf)
    every = REFINE // 2  # cumulative Simpson lands on even fine nodes

    if isinstance(forcing, Step):
        a = forcing.amplitude
        eps = a * _cumulative_simpson(Pf, hf)[::every]
        sigma = a * _cumulative_simpson(Qf, hf)[::every]
        return ResponseSeries(t, eps, sigma, P, Q, x_section)

    if isinstance(forcing, Harmonic):
        c, s = np.cos(omega * tf), np.sin(omega * tf)
        ct, st = np.cos(omega * t), np.sin(omega * t)
        out = []
        for K in (Pf, Qf):
            ic = _cumulative_simpson(c * K, hf)[::every]
            is_ = _cumulative_simpson(s * K, hf)[::every]
            out.append(forcing.F0 * (ct * ic + st * is_))
        return ResponseSeries(t, out[0], out[1], P, Q, x_section)

    raise TypeError(f"unsupported forcing {forcing!r}")


def motion_residual(series: ResponseSeries, forcing: Forcing) -> np.ndarray:
    """``eps'' + sigma - F`` on interior nodes, ``eps''`` by second differences."""
    if isinstance(forcing, Impulse):
        raise ValueError("impulse forcing has no pointwise values")
    t = series.t
    h = t[1] - t[0]
    d2 = (series.eps[2:] - 2 * series.eps[1:-1] + series.eps[:-2]) / h**2
    return d2 + series.sigma[1:-1] - forcing.values(t[1:-1])


def elastic_closed_form(F0: float, omega: float, t):
    """Elastic rod (``M == 1``) under ``F0 cos(omega t)``; returns ``(eps, sigma)``.

    ``eps = sigma = 2 F0/(omega^2 - 1) sin((omega+1)t/2) sin((omega-1)t/2)``.
    """
    if omega < 0:
        raise ValueError("omega must be nonnegative")
    if abs(omega - 1.0) < RESONANCE_WINDOW:
        raise ResonanceCase("omega = 1 is resonant; use resonance_closed_form")
    t = np.asarray(t, dtype=float)
    eps = 2 * F0 / (omega**2 - 1) * np.sin((omega + 1) * t / 2) * np.sin((omega - 1) * t / 2)
    return eps, eps.copy()


def resonance_closed_form(t, F0: float = 1.0):
    """Elastic rod forced at ``omega = 1``: ``eps = sigma = F0 t sin(t) / 2``."""
    t = np.asarray(t, dtype=float)
    eps = 0.5 * F0 * t * np.sin(t)
    return eps, eps.copy()
