"""Response kernels ``P(t)`` and ``Q(t)``.

For ``t > 0``

    P(t) = (1/pi) int_0^inf Im P~(q e^{-i pi}) e^{-qt} dq + 2 Re(res_P e^{s0 t})

and likewise for ``Q`` with ``Q~ = 1/f``.  The integral runs along the lower
lip of the cut; ``s0`` is the certified upper pole.

The integral is computed on geometric panels ``[0,1], [1,2], [2,4], ...``
with a vectorised adaptive Gauss-Kronrod (7/15) rule.  A whole batch of
``t`` values is integrated at once on a shared partition; each ``t`` leaves
the batch as soon as its tail bound is below tolerance.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Literal

import numpy as np

from .errors import QuadratureFailure
from .models import (
    MaterialModel,
    f_derivative,
    f_eval,
    modulus_squared,
    modulus_squared_above_cut,
    modulus_squared_below_cut,
)
from .poles import PoleCertificate, locate_pole

Which = Literal["P", "Q"]

# Kronrod 15-point abscissae on [-1, 1] (positive half, descending) and weights
_XK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
])
_WK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
# embedded Gauss 7-point weights sit on the odd Kronrod nodes
_WG = np.array([
    0.0,
    0.129484966168869693270611432679082,
    0.0,
    0.279705391489276667901467771423780,
    0.0,
    0.381830050505118944950369775488975,
    0.0,
    0.417959183673469387755102040816327,
])
NODES = np.concatenate([-_XK[:-1], _XK[::-1]])
W_KRONROD = np.concatenate([_WK[:-1], _WK[::-1]])
W_GAUSS = np.concatenate([_WG[:-1], _WG[::-1]])

MAX_DEPTH = 100
MAX_INTERVALS = 4000
# |Im P~|, |Im Q~| on the cut are bounded by a small multiple of
# max(1, c_inf^-2); 10 is a safety factor on that envelope
TAIL_SAFETY = 10.0
CHUNK = 256
MARGINAL_PROBE = np.logspace(-6, 6, 49)


@dataclass(frozen=True)
class QuadratureConfig:
    rel_tol: float = 1e-9
    abs_tol: float = 1e-12
    max_panels: int = 200
    truncation_factor: float = 50.0

    def __post_init__(self) -> None:
        if not (self.rel_tol > 0 and self.abs_tol > 0 and self.truncation_factor > 0):
            raise ValueError("quadrature tolerances must be positive")
        if self.max_panels < 8:
            raise ValueError("max_panels must be at least 8")


def _gk(g: Callable, a: np.ndarray, b: np.ndarray, t: np.ndarray):
    """Kronrod values and |K - G| on each interval, for every t and component."""
    half = 0.5 * (b - a)
    q = 0.5 * (a + b)[:, None] + half[:, None] * NODES  # (m, 15)
    gv = g(q)  # (m, 15, k)
    e = np.exp(-q[:, :, None] * t)  # (m, 15, nt)
    kr = np.einsum("mj,mjk,mjn->mnk", W_KRONROD * np.ones_like(q), gv, e) * half[:, None, None]
    ga = np.einsum("mj,mjk,mjn->mnk", W_GAUSS * np.ones_like(q), gv, e) * half[:, None, None]
    return kr, np.abs(kr - ga), float(np.max(np.abs(gv), initial=0.0))


def _panel(g, lo: float, hi: float, t: np.ndarray, acc: np.ndarray, quad: QuadratureConfig):
    a = np.array([lo])
    b = np.array([hi])
    depth = np.zeros(1, dtype=int)
    kr, err, gmax = _gk(g, a, b, t)
    while True:
        total = kr.sum(axis=0)
        tol = quad.abs_tol + quad.rel_tol * np.abs(acc + total)
        if np.all(err.sum(axis=0) <= 0.5 * tol):
            return total, gmax
        score = (err / tol).reshape(len(a), -1).max(axis=1)
        split = score >= 0.25 * score.max()
        if depth[split].max() >= MAX_DEPTH or len(a) + split.sum() > MAX_INTERVALS:
            raise QuadratureFailure(
                f"panel [{lo:g}, {hi:g}] unresolved with {len(a)} intervals"
            )
        mid = 0.5 * (a[split] + b[split])
        na = np.concatenate([a[split], mid])
        nb = np.concatenate([mid, b[split]])
        nd = np.tile(depth[split] + 1, 2)
        k2, e2, g2 = _gk(g, na, nb, t)
        keep = ~split
        a = np.concatenate([a[keep], na])
        b = np.concatenate([b[keep], nb])
        depth = np.concatenate([depth[keep], nd])
        kr = np.concatenate([kr[keep], k2])
        err = np.concatenate([err[keep], e2])
        gmax = max(gmax, g2)


def cut_integral(g: Callable, t: np.ndarray, quad: QuadratureConfig, scale: float) -> np.ndarray:
    """``int_0^inf g(q) e^{-qt} dq`` for each ``t > 0``.

    ``g`` maps an ``(m, 15)`` array of abscissae to ``(m, 15, k)`` values;
    the result has shape ``(len(t), k)``.  ``scale`` is an a-priori bound
    on ``|g|`` used in the tail estimate.
    """
    t = np.asarray(t, dtype=float)
    probe = g(np.ones((1, 1)))
    acc = np.zeros((t.size, probe.shape[-1]), dtype=probe.dtype)
    active = np.ones(t.size, dtype=bool)
    gmax = 0.0
    lo, hi = 0.0, 1.0
    for _ in range(quad.max_panels):
        idx = np.nonzero(active)[0]
        val, gm = _panel(g, lo, hi, t[idx], acc[idx], quad)
        acc[idx] += val
        gmax = max(gmax, gm)
        ta = t[idx]
        bound = TAIL_SAFETY * max(1.0, scale, gmax) * np.exp(-hi * ta) / (math.pi * ta)
        tol = quad.abs_tol + quad.rel_tol * np.abs(acc[idx]).max(axis=1)
        done = (bound < tol) | (hi >= quad.truncation_factor / ta)
        active[idx[done]] = False
        if not active.any():
            return acc
        lo, hi = hi, 2.0 * hi
    raise QuadratureFailure(f"tail not truncated after {quad.max_panels} panels")


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("FRACROD_THREADS", "1")))
    except ValueError:
        return 1


@dataclass(frozen=True)
class KernelEvaluator:
    model: MaterialModel
    cert: PoleCertificate
    quad: QuadratureConfig = field(default_factory=QuadratureConfig)

    def __post_init__(self) -> None:
        fv = abs(complex(f_eval(self.model, self.cert.s0)))
        if fv > 1e-8 * (1.0 + abs(self.cert.s0) ** 2):
            raise ValueError(f"certificate does not belong to this model (|f(s0)| = {fv:.3e})")

    @classmethod
    def for_model(cls, model: MaterialModel, quad: QuadratureConfig | None = None) -> "KernelEvaluator":
        return cls(model, locate_pole(model), quad or QuadratureConfig())

    def _cut_values(self, q) -> np.ndarray:
        q = np.asarray(q, dtype=float)
        m2 = np.asarray(modulus_squared_below_cut(self.model, q))
        inv = 1.0 / (1.0 + q * q * m2)
        return np.stack([(m2 * inv).imag, inv.imag], axis=-1)

    def branch_cut_integrand(self, q, which: Which = "P"):
        """``Im P~`` or ``Im Q~`` just below the cut at ``s = -q``."""
        if np.any(np.asarray(q) <= 0):
            raise ValueError("q must be positive")
        v = self._cut_values(q)[..., _col(which)]
        return v if np.ndim(v) else float(v)

    def _cut_vanishes(self) -> bool:
        return self.model.is_elastic or not np.any(self._cut_values(MARGINAL_PROBE))

    def _residue_terms(self, t: np.ndarray) -> np.ndarray:
        s0 = self.cert.s0
        if self.cert.marginal:
            s0 = complex(0.0, s0.imag)
        e = np.exp(s0 * t)
        return np.stack([2 * (self.cert.residue_P * e).real, 2 * (self.cert.residue_Q * e).real], axis=-1)

    def _table(self, t: np.ndarray) -> np.ndarray:
        out = np.zeros((t.size, 2))
        pos = t > 0
        if not pos.any():
            return out
        tp = t[pos]
        res = self._residue_terms(tp)
        if self._cut_vanishes():
            out[pos] = res
            return out
        scale = max(1.0, self.model.c_inf ** -2)
        chunks = [tp[i:i + CHUNK] for i in range(0, tp.size, CHUNK)]

        def run(c):
            return cut_integral(self._cut_values, c, self.quad, scale)

        n = _threads()
        if n > 1 and len(chunks) > 1:
            with ThreadPoolExecutor(n) as ex:
                parts = list(ex.map(run, chunks))
        else:
            parts = [run(c) for c in chunks]
        out[pos] = np.concatenate(parts) / math.pi + res
        return out

    def kernel_value(self, t: float, which: Which = "P") -> float:
        if not (t >= 0 and math.isfinite(t)):
            raise ValueError("t must be finite and nonnegative")
        return float(self._table(np.array([float(t)]))[0, _col(which)])

    def kernel_table(self, grid) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """``(t, P(t), Q(t))`` on a strictly increasing grid of times ``>= 0``."""
        t = np.asarray(grid, dtype=float).ravel()
        if t.size and (not np.all(np.isfinite(t)) or t[0] < 0 or np.any(np.diff(t) <= 0)):
            raise ValueError("grid must be finite, nonnegative and strictly increasing")
        v = self._table(t)
        return t, v[:, 0].copy(), v[:, 1].copy()

    def kernel_value_complex(self, t: float, which: Which = "P") -> complex:
        """Unprojected sum of both lip integrals and both pole residues.

        The lips and the conjugate pole are evaluated independently, so the
        imaginary part of the result measures the accumulated asymmetry.
        """
        if t <= 0:
            return 0j
        col = _col(which)

        def g(q):
            low = np.asarray(modulus_squared_below_cut(self.model, q))
            up = np.asarray(modulus_squared_above_cut(self.model, q))
            vals = []
            for m2 in (low, up):
                inv = 1.0 / (1.0 + q * q * m2)
                vals.append(m2 * inv if col == 0 else inv)
            return ((vals[0] - vals[1]) / 2j)[..., None]

        cut = complex(cut_integral(g, np.array([t]), self.quad, max(1.0, self.model.c_inf ** -2))[0, 0])
        total = cut / math.pi
        for s in (self.cert.s0, self.cert.s0.conjugate()):
            df = complex(f_derivative(self.model, s))
            num = complex(modulus_squared(self.model, s)) if col == 0 else 1.0
            total += num / df * np.exp(s * t)
        return total


def _col(which: str) -> int:
    if which == "P":
        return 0
    if which == "Q":
        return 1
    raise ValueError(f"which must be 'P' or 'Q', got {which!r}")
