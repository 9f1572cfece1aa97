"""Physical admissibility of a material model, checked on dense sampling grids.

Three checks, each returning a partial :class:`AdmissibilityReport`:

``check_reality``
    ``M(x)`` is real for ``x`` on a log grid over ``(x0, x_max]``.
``check_thermodynamics``
    storage and loss moduli are nonnegative on a log grid of frequencies.
``check_asymptotics``
    ``M`` has finite positive limits ``c0`` at zero and ``c_inf`` at infinity
    with vanishing imaginary part along rays into the upper half-plane.

These are sampling certificates, not proofs.  :func:`check_admissibility`
combines all three.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import AsymptoticsViolation
from .models import MaterialModel, complex_modulus_E, estimate_asymptotics, modulus_M


@dataclass(frozen=True)
class LogGrid:
    """``n`` log-spaced points from ``lo`` to ``hi`` inclusive."""

    lo: float
    hi: float
    n: int

    def __post_init__(self) -> None:
        if not (0 < self.lo < self.hi) or self.n < 2:
            raise ValueError(f"invalid log grid {self}")

    def points(self) -> np.ndarray:
        return np.logspace(math.log10(self.lo), math.log10(self.hi), self.n)


REALITY_GRID = LogGrid(1e-6, 1e6, 200)
OMEGA_GRID = LogGrid(1e-4, 1e4, 400)

REALITY_TOL = 1e-8
MODULUS_TOL = 1e-12
RAY_RADII = (1e8, 1e16, 1e32, 1e64)
RAY_PHASES = (0.0, math.pi / 4, math.pi / 2, 3 * math.pi / 4)
RAY_IMAG_TOL = 1e-4
ZERO_LIMIT_TOL = 1e-2


@dataclass
class AdmissibilityReport:
    reality_ok: bool = True
    thermo_ok: bool = True
    asymptotics_ok: bool = True
    violations: list[tuple[str, float, float]] = field(default_factory=list)
    c0: float = math.nan
    c_inf: float = math.nan

    @property
    def admissible(self) -> bool:
        return self.reality_ok and self.thermo_ok and self.asymptotics_ok

    def merge(self, other: "AdmissibilityReport") -> "AdmissibilityReport":
        return AdmissibilityReport(
            reality_ok=self.reality_ok and other.reality_ok,
            thermo_ok=self.thermo_ok and other.thermo_ok,
            asymptotics_ok=self.asymptotics_ok and other.asymptotics_ok,
            violations=self.violations + other.violations,
            c0=other.c0 if math.isnan(self.c0) else self.c0,
            c_inf=other.c_inf if math.isnan(self.c_inf) else self.c_inf,
        )

    def to_key_values(self) -> list[str]:
        lines = [
            f"admissible={_flag(self.admissible)}",
            f"reality_ok={_flag(self.reality_ok)}",
            f"thermo_ok={_flag(self.thermo_ok)}",
            f"asymptotics_ok={_flag(self.asymptotics_ok)}",
            f"c0={self.c0!r}",
            f"c_inf={self.c_inf!r}",
        ]
        for name, probe, value in self.violations:
            lines.append(f"violation={name} probe={probe!r} value={value!r}")
        return lines

    def to_text(self) -> str:
        out = ["Admissibility", "-------------"]
        out.append(f"  reality (M real on x > x0) : {'pass' if self.reality_ok else 'FAIL'}")
        out.append(f"  thermodynamics (E', E'' >= 0): {'pass' if self.thermo_ok else 'FAIL'}")
        out.append(f"  asymptotics (c0, c_inf)    : {'pass' if self.asymptotics_ok else 'FAIL'}")
        out.append(f"  c0 = {self.c0:.12g}, c_inf = {self.c_inf:.12g}")
        for name, probe, value in self.violations:
            out.append(f"  violation: {name} at {probe:.6g} -> {value:.6g}")
        return "\n".join(out)


def _flag(b: bool) -> str:
    return "true" if b else "false"


def check_reality(model: MaterialModel, grid: LogGrid | None = None) -> AdmissibilityReport:
    """``|Im M(x)| <= 1e-8 (1 + |M(x)|)`` on ``(x0, x_max]``."""
    if grid is None:
        grid = REALITY_GRID
    x = grid.points()
    if model.x0 > 0:
        x = np.logspace(math.log10(model.x0), math.log10(grid.hi), grid.n)[1:]
    m = np.asarray(modulus_M(model, x))
    bad = np.abs(m.imag) > REALITY_TOL * (1.0 + np.abs(m))
    rep = AdmissibilityReport()
    if np.any(bad):
        i = int(np.argmax(bad))
        rep.reality_ok = False
        rep.violations.append(("reality", float(x[i]), float(m.imag[i])))
    return rep


def check_thermodynamics(model: MaterialModel, grid: LogGrid | None = None) -> AdmissibilityReport:
    """Storage and loss moduli must stay above ``-1e-12`` on the grid.

    The first violating frequency is recorded for each modulus.
    """
    if grid is None:
        grid = OMEGA_GRID
    w = grid.points()
    e1, e2 = complex_modulus_E(model, w)
    rep = AdmissibilityReport()
    for name, vals in (("storage_modulus", e1), ("loss_modulus", e2)):
        bad = vals < -MODULUS_TOL
        if np.any(bad):
            i = int(np.argmax(bad))
            rep.thermo_ok = False
            rep.violations.append((name, float(w[i]), float(vals[i])))
    return rep


def check_asymptotics(model: MaterialModel) -> AdmissibilityReport:
    """Existence of ``c0``, ``c_inf`` plus ray probes of their approach.

    Along each ray ``arg s`` in ``{0, pi/4, pi/2, 3pi/4}`` the deviations
    ``|M - c_inf|`` at radii ``1e8 .. 1e64`` and ``|M - c0|`` at the
    reciprocal radii must not grow.  At the outermost radius the imaginary
    part must be below ``1e-4 |M|``; at the innermost one ``M`` must sit
    within ``1e-2`` (relative) of ``c0``.  The loose inner tolerance is forced
    by models whose symbols approach their limit like ``1/log s``.
    """
    rep = AdmissibilityReport()
    try:
        c0, c_inf = estimate_asymptotics(model)
    except AsymptoticsViolation:
        rep.asymptotics_ok = False
        big = complex(modulus_M(model, RAY_RADII[0]))
        rep.violations.append(("asymptotics", RAY_RADII[0], abs(big)))
        return rep
    rep.c0, rep.c_inf = c0, c_inf
    radii = np.array(RAY_RADII)
    for phase in RAY_PHASES:
        rot = complex(math.cos(phase), math.sin(phase))
        far = np.asarray(modulus_M(model, radii * rot))
        near = np.asarray(modulus_M(model, rot / radii))
        dev_far = np.abs(far - c_inf)
        dev_near = np.abs(near - c0)
        slack = 1e-12
        if np.any(np.diff(dev_far) > slack * c_inf):
            rep.asymptotics_ok = False
            rep.violations.append(("asymptotics_infinity_trend", phase, float(dev_far.max())))
        if abs(far[-1].imag) > RAY_IMAG_TOL * abs(far[-1]):
            rep.asymptotics_ok = False
            rep.violations.append(("asymptotics_imag_part", phase, float(far[-1].imag)))
        if np.any(np.diff(dev_near) > slack * c0):
            rep.asymptotics_ok = False
            rep.violations.append(("asymptotics_zero_trend", phase, float(dev_near.max())))
        if dev_near[-1] > ZERO_LIMIT_TOL * c0:
            rep.asymptotics_ok = False
            rep.violations.append(("asymptotics_zero_limit", phase, float(dev_near[-1])))
    return rep


def check_admissibility(
    model: MaterialModel,
    reality_grid: LogGrid | None = None,
    omega_grid: LogGrid | None = None,
) -> AdmissibilityReport:
    rep = check_reality(model, reality_grid)
    rep = rep.merge(check_thermodynamics(model, omega_grid))
    return rep.merge(check_asymptotics(model))
