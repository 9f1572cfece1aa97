"""Location and certification of the zeros of ``f(s) = 1 + (s M(s))**2``.

Zeros are counted with the argument principle: the image of a closed
contour under ``f`` is traced with adaptive sampling so that consecutive
samples never differ in argument by ``pi/2`` or more, and the unwrapped
phase change divided by ``2 pi`` is the winding number.  The left contour
is the half annulus ``r < |s| < R, Re s < 0`` and the right contour the
quarter annulus in the first quadrant (zeros come in conjugate pairs, so
the fourth quadrant adds nothing new).

The branch cut ``(-inf, 0]`` crosses the left contour on both arcs; ``f``
jumps there by a conjugation, which on those arcs is a small phase change
because ``f`` is nearly real at very small and very large ``|s|``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Literal

import numpy as np

from .errors import (
    CertificationFailed,
    ContourTooCoarse,
    NoConvergence,
    UnsupportedModel,
    ZeroOnContour,
)
from .models import MaterialModel, f_derivative, f_eval, modulus_squared

MAX_DEPTH = 40
MAX_NEWTON = 200
MARGINAL_RE = 1e-8
ZERO_FLOOR = 1e-9

Arc = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class ContourSpec:
    """Closed contour for zero counting, traversed counterclockwise.

    ``shift`` moves the straight leg off the imaginary axis: for the left
    contour the leg sits at ``Re s = -shift`` and for the right contour at
    ``Re s = +shift``.  With a nonzero shift the inner arc is dropped.
    """

    side: Literal["left", "right"]
    r: float
    R: float
    samples_per_arc: int = 64
    shift: float = 0.0

    def __post_init__(self) -> None:
        if self.side not in ("left", "right"):
            raise ValueError(f"side must be 'left' or 'right', got {self.side!r}")
        if not (0 < self.r < self.R):
            raise ValueError("need 0 < r < R")
        if self.samples_per_arc < 4:
            raise ValueError("samples_per_arc must be at least 4")
        if abs(self.shift) >= self.R:
            raise ValueError("|shift| must be smaller than R")
        if self.side == "right" and self.shift < 0:
            raise ValueError("right contour needs shift >= 0")

    def arcs(self) -> list[Arc]:
        r, R, d = self.r, self.R, self.shift
        lr = math.log(R / r)
        if self.side == "left" and d == 0.0:
            return [
                lambda u: 1j * r * np.exp(lr * u),
                lambda u: R * np.exp(1j * (math.pi / 2 + math.pi * u)),
                lambda u: -1j * R * np.exp(-lr * u),
                lambda u: r * np.exp(1j * (1.5 * math.pi - math.pi * u)),
            ]
        if self.side == "right" and d == 0.0:
            return [
                lambda u: r * np.exp(lr * u),
                lambda u: R * np.exp(1j * (math.pi / 2) * u),
                lambda u: 1j * R * np.exp(-lr * u),
                lambda u: r * np.exp(1j * (math.pi / 2) * (1 - u)),
            ]
        h = math.sqrt(R * R - d * d)
        if self.side == "left":
            th = math.atan2(h, -d)
            return [
                lambda u: -d + 1j * h * (2 * u - 1),
                lambda u: R * np.exp(1j * (th + (2 * math.pi - 2 * th) * u)),
            ]
        th = math.acos(d / R)
        ld = math.log(R / d)
        return [
            lambda u: d * np.exp(ld * u) + 0j,
            lambda u: R * np.exp(1j * th * u),
            lambda u: d + 1j * h * (1 - u),
        ]


def _wrap(x: np.ndarray) -> np.ndarray:
    return (x + math.pi) % (2 * math.pi) - math.pi


def _arc_phase_change(fun, arc: Arc, n: int, scale: float) -> float:
    u = np.linspace(0.0, 1.0, n + 1)
    depth = np.zeros(n + 1, dtype=int)
    vals = fun(arc(u))
    while True:
        mag_floor = ZERO_FLOOR * (1.0 + scale * np.abs(arc(u)) ** 2)
        if np.any(np.abs(vals) < mag_floor):
            i = int(np.argmax(np.abs(vals) < mag_floor))
            raise ZeroOnContour(f"|f| = {abs(vals[i]):.3e} at s = {complex(arc(u[i:i+1])[0])}")
        d = _wrap(np.diff(np.angle(vals)))
        coarse = np.abs(d) >= math.pi / 2
        if not np.any(coarse):
            return float(d.sum())
        idx = np.nonzero(coarse)[0]
        new_depth = np.maximum(depth[idx], depth[idx + 1]) + 1
        if new_depth.max() > MAX_DEPTH:
            raise ContourTooCoarse("argument change unresolved at refinement depth 40")
        mid = 0.5 * (u[idx] + u[idx + 1])
        u = np.insert(u, idx + 1, mid)
        depth = np.insert(depth, idx + 1, new_depth)
        vals = np.insert(vals, idx + 1, fun(arc(mid)))


def winding_number(model: MaterialModel, contour: ContourSpec) -> int:
    """Number of zeros of ``f`` enclosed by ``contour`` (argument principle)."""
    try:
        scale = model.c_inf**2
    except Exception:
        scale = 1.0

    def fun(s: np.ndarray) -> np.ndarray:
        # a leg crossing the cut is evaluated on its upper lip
        s = np.where((s.imag == 0) & (s.real <= 0), s + 1e-300j, s)
        return np.asarray(f_eval(model, s))

    total = sum(
        _arc_phase_change(fun, arc, contour.samples_per_arc, scale) for arc in contour.arcs()
    )
    return int(round(total / (2 * math.pi)))


@dataclass(frozen=True)
class PoleCertificate:
    """Dominant zero ``s0`` of ``f`` (``Im s0 > 0``) with its evidence."""

    s0: complex
    winding_left: int
    winding_right: int
    dfds_at_s0: complex
    residue_P: complex
    residue_Q: complex
    marginal: bool
    f_residual: float
    newton_iterations: int

    def to_key_values(self) -> list[str]:
        return [
            f"s0_re={self.s0.real!r}",
            f"s0_im={self.s0.imag!r}",
            f"winding_left={self.winding_left}",
            f"winding_right={self.winding_right}",
            f"marginal={'true' if self.marginal else 'false'}",
            f"f_residual={self.f_residual!r}",
            f"residue_P_re={self.residue_P.real!r}",
            f"residue_P_im={self.residue_P.imag!r}",
            f"residue_Q_re={self.residue_Q.real!r}",
            f"residue_Q_im={self.residue_Q.imag!r}",
        ]


def _newton(model: MaterialModel, s: complex, tol_scale: float) -> tuple[complex, int]:
    for it in range(1, MAX_NEWTON + 1):
        fv = complex(f_eval(model, s))
        if abs(fv) <= 1e-12 * (1.0 + abs(s) ** 2 * tol_scale):
            # one polishing step; keep it only if it does not hurt
            s_next = s - fv / complex(f_derivative(model, s))
            if s_next.imag > 0 and abs(complex(f_eval(model, s_next))) <= abs(fv):
                s = s_next
            return s, it
        s = s - fv / complex(f_derivative(model, s))
        if s.imag <= 0:
            # stay in the upper half-plane; the lower zero is the conjugate
            s = complex(s.real, abs(s.imag) if s.imag != 0 else 1e-3)
    raise NoConvergence(f"Newton did not converge in {MAX_NEWTON} iterations (last s = {s})")


def locate_pole(model: MaterialModel) -> PoleCertificate:
    """Find and certify the upper zero ``s0`` of ``f``.

    Newton starts at ``(-0.05 + i)/c0``.  Certification counts zeros inside
    the left and right contours with radii ``1e-4 |s0|`` and ``1e4 |s0|``;
    exactly ``(2, 0)`` is required.  When ``|Re s0| < 1e-8`` the pole is
    marginal (elastic limit): the straight legs are then moved to
    ``Re s = +-1e-3 |s0|`` so the pole pair sits strictly inside the left
    contour.
    """
    if model.x0 > 0:
        raise UnsupportedModel("pole certification requires x0 = 0")
    c0, c_inf = model.c0, model.c_inf
    s0, its = _newton(model, complex(-0.05, 1.0) / c0, c_inf**2)
    fres = abs(complex(f_eval(model, s0)))
    marginal = abs(s0.real) < MARGINAL_RE
    rad = abs(s0)
    r, R = 1e-4 * rad, 1e4 * rad
    if marginal:
        d = 1e-3 * rad
        left = ContourSpec("left", r, R, shift=-d)
        right = ContourSpec("right", r, R, shift=d)
    else:
        left = ContourSpec("left", r, R)
        right = ContourSpec("right", r, R)
    wl = winding_number(model, left)
    wr = winding_number(model, right)
    if (wl, wr) != (2, 0):
        raise CertificationFailed(f"winding counts (left, right) = ({wl}, {wr}), expected (2, 0)")
    if not marginal and s0.real >= 0:
        raise CertificationFailed(f"pole s0 = {s0} is not in the left half-plane")
    df = complex(f_derivative(model, s0))
    m2 = complex(modulus_squared(model, s0))
    return PoleCertificate(
        s0=s0,
        winding_left=wl,
        winding_right=wr,
        dfds_at_s0=df,
        residue_P=m2 / df,
        residue_Q=1.0 / df,
        marginal=marginal,
        f_residual=fres,
        newton_iterations=its,
    )
