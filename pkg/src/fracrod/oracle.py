"""Reference numerical Laplace inversion, for cross-validation only.

Two classical methods working directly on a transfer function ``F(s)``:

* fixed Talbot: trapezoid rule on the contour
  ``s(theta) = r theta (cot theta + i)``, ``r = scaling * N / t``;
* de Hoog: Fourier series on the Bromwich line accelerated by the
  quotient-difference continued fraction, with the usual remainder estimate.

Neither shares code with :mod:`fracrod.kernels`.

In double precision fixed Talbot only sees singularities inside its
contour, which crosses the imaginary axis at ``Im s = r pi/2``.  Poles of
``f`` at ``Im s ~ 1`` therefore drop out once ``t`` exceeds roughly
``0.6 N``/``Im s``; :func:`talbot_encloses` tells callers when a pole is
still inside.  de Hoog has no such restriction and is the default, but its
continued fraction also degrades in double precision: with the default 48
nodes it is accurate to about ``1e-7`` for ``t <= 50`` when ``|Re s0|`` is as
small as ``0.02``, and it can settle on wrong values well beyond that.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Literal

import numpy as np

from .errors import MethodBreakdown

Transfer = Callable[[np.ndarray], np.ndarray]

DEFAULT_SCALING = {"talbot": 0.4, "dehoog": 0.8}
DEHOOG_TOL = 1e-10
CUT_MARGIN = 1e-3


@dataclass(frozen=True)
class InversionConfig:
    method: Literal["talbot", "dehoog"] = "dehoog"
    node_count: int = 48
    scaling: float | None = None

    def __post_init__(self) -> None:
        if self.method not in DEFAULT_SCALING:
            raise ValueError(f"unknown method {self.method!r}")
        if self.node_count < 16:
            raise ValueError("node_count must be at least 16")
        if self.scaling is not None and not self.scaling > 0:
            raise ValueError("scaling must be positive")

    @property
    def contour_scaling(self) -> float:
        return DEFAULT_SCALING[self.method] if self.scaling is None else self.scaling


def talbot_nodes(t: float, n: int, scaling: float) -> tuple[np.ndarray, np.ndarray]:
    """Nodes ``s_k`` and complex weights so that ``f(t) ~ Re sum w_k F(s_k)``."""
    r = scaling * n / t
    theta = np.arange(1, n) * math.pi / n
    cot = 1.0 / np.tan(theta)
    s = np.concatenate([[r + 0j], r * theta * (cot + 1j)])
    sigma = theta + (theta * cot - 1.0) * cot
    w = np.concatenate([[0.5 + 0j], 1.0 + 1j * sigma]) * np.exp(s * t) * (r / n)
    return s, w


def talbot_encloses(pole: complex, t: float, cfg: InversionConfig, margin: float = 1.5) -> bool:
    """True when the Talbot contour for ``t`` passes above ``margin * |Im pole|``."""
    r = cfg.contour_scaling * cfg.node_count / t
    return r * math.pi / 2 > margin * abs(pole.imag) and r > pole.real


def _talbot(F: Transfer, t: float, n: int, scaling: float) -> float:
    s, w = talbot_nodes(t, n, scaling)
    if np.any(np.abs(np.angle(s)) >= math.pi - CUT_MARGIN):
        raise MethodBreakdown("Talbot node too close to the negative real axis")
    if not np.all(np.isfinite(w)):
        raise MethodBreakdown("Talbot weights overflow")
    return float(np.real(np.sum(w * np.asarray(F(s), dtype=complex))))


def _dehoog(F: Transfer, t: float, m: int, scaling: float) -> float:
    T = scaling * t
    gamma = -math.log(DEHOOG_TOL) / (2 * T)
    k = np.arange(2 * m + 1)
    a = np.asarray(F(gamma + 1j * math.pi * k / T), dtype=complex).copy()
    a[0] *= 0.5
    # quotient-difference table
    e = np.zeros((2 * m + 1, m + 1), dtype=complex)
    q = np.zeros((2 * m, m + 1), dtype=complex)
    q[:, 1] = a[1:] / a[:-1]
    for c in range(1, m + 1):
        n = 2 * (m - c)
        e[: n + 1, c] = q[1 : n + 2, c] - q[: n + 1, c] + e[1 : n + 2, c - 1]
        if c < m:
            q[:n, c + 1] = q[1 : n + 1, c] * e[1 : n + 1, c] / e[:n, c]
    d = np.zeros(2 * m + 1, dtype=complex)
    d[0] = a[0]
    d[1::2] = -q[0, 1:]
    d[2::2] = -e[0, 1:]
    # continued fraction by the three-term recurrence
    z = np.exp(1j * math.pi * t / T)
    A = np.zeros(2 * m + 2, dtype=complex)
    B = np.zeros(2 * m + 2, dtype=complex)
    A[1] = d[0]
    B[0] = B[1] = 1.0
    for j in range(2, 2 * m + 2):
        A[j] = A[j - 1] + d[j - 1] * z * A[j - 2]
        B[j] = B[j - 1] + d[j - 1] * z * B[j - 2]
    h = 0.5 * (1.0 + (d[2 * m - 1] - d[2 * m]) * z)
    rem = -h * (1.0 - np.sqrt(1.0 + d[2 * m] * z / h**2))
    A[-1] = A[-2] + rem * A[-3]
    B[-1] = B[-2] + rem * B[-3]
    out = math.exp(gamma * t) / T * (A[-1] / B[-1]).real
    if not math.isfinite(out):
        raise MethodBreakdown("de Hoog continued fraction broke down")
    return out


def invert_reference(transfer: Transfer, t: float, cfg: InversionConfig | None = None) -> float:
    """Approximate inverse Laplace transform of ``transfer`` at ``t > 0``.

    ``transfer`` must accept numpy arrays of complex ``s``.
    """
    cfg = cfg or InversionConfig()
    if not (t > 0 and math.isfinite(t)):
        raise ValueError("t must be positive and finite")
    with np.errstate(all="ignore"):
        if cfg.method == "talbot":
            val = _talbot(transfer, t, cfg.node_count, cfg.contour_scaling)
        else:
            val = _dehoog(transfer, t, cfg.node_count // 2, cfg.contour_scaling)
    if not math.isfinite(val):
        raise MethodBreakdown(f"{cfg.method} produced a non-finite value at t = {t}")
    return val
