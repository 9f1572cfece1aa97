"""Order distributions and the Laplace-domain quantities built from them.

A constitutive law of distributed order is described by two weights
``phi_sigma`` and ``phi_eps`` on derivative orders ``gamma`` in ``[0, 1]``.
Each weight is a finite sum of

- Dirac atoms ``w * delta(gamma - g)``, whose symbol is ``w * s**g``;
- power-law densities ``w * c**gamma``, whose symbol is
  ``w * ((c*s) - 1) / log(c*s)``.

From the two symbols we form

- ``M(s) = sqrt(Phi_sigma(s) / Phi_eps(s))``,
- ``E(omega) = Phi_eps(i omega) / Phi_sigma(i omega)`` (storage + i loss),
- ``f(s) = 1 + (s M(s))**2`` and the transfer functions
  ``P~ = M**2 / f`` (force -> strain) and ``Q~ = 1 / f`` (force -> stress).

Every power and logarithm uses the principal branch with the cut on
``(-inf, 0]``.  Values on the lower lip of the cut, ``q * exp(-i pi)``, are
computed from the explicit logarithm ``log(q) - i pi`` (see
:func:`phi_symbol_below_cut`) instead of relying on signed zeros.

All functions accept scalars or numpy arrays and broadcast.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable

import numpy as np

from .errors import AsymptoticsViolation, DomainError, PoleHit, SingularModel

# |log(c s)| below this switches the density term to its power series.
_SERIES_RADIUS = 0.5
_SERIES_TERMS = 24
# (e^v - 1)/v = sum v^n / (n+1)!  and its v-derivative.
_EXPM1_OVER_V = np.array([1.0 / math.factorial(n + 1) for n in range(_SERIES_TERMS)])
_EXPM1_OVER_V_D = np.array(
    [(n + 1) / math.factorial(n + 2) for n in range(_SERIES_TERMS - 1)]
)

_POLE_FLOOR = 1e-14


@dataclass(frozen=True)
class OrderDistribution:
    """Weight on derivative orders: Dirac atoms plus power-law densities.

    Parameters
    ----------
    atoms
        Pairs ``(weight, order)``; order in ``[0, 1]``, weight > 0.
    densities
        Pairs ``(weight, base)``; both > 0.  Term ``weight * base**gamma``
        on ``gamma in (0, 1)``.
    """

    atoms: tuple[tuple[float, float], ...] = ()
    densities: tuple[tuple[float, float], ...] = ()

    def __post_init__(self) -> None:
        atoms = tuple((float(w), float(g)) for w, g in self.atoms)
        dens = tuple((float(w), float(c)) for w, c in self.densities)
        if not atoms and not dens:
            raise ValueError("order distribution needs at least one term")
        for w, g in atoms:
            if not (math.isfinite(w) and w > 0):
                raise ValueError(f"atom weight must be positive, got {w}")
            if not (0.0 <= g <= 1.0):
                raise ValueError(f"atom order must lie in [0, 1], got {g}")
        for w, c in dens:
            if not (math.isfinite(w) and w > 0):
                raise ValueError(f"density weight must be positive, got {w}")
            if not (math.isfinite(c) and c > 0):
                raise ValueError(f"density base must be positive, got {c}")
        object.__setattr__(self, "atoms", atoms)
        object.__setattr__(self, "densities", dens)

    @classmethod
    def atom(cls, weight: float, order: float) -> "OrderDistribution":
        return cls(atoms=((weight, order),))

    @classmethod
    def density(cls, weight: float, base: float) -> "OrderDistribution":
        return cls(densities=((weight, base),))

    def _terms_at_infinity(self) -> list[tuple[float, int, float]]:
        # (power of s, power of log s, coefficient) of each term's leading behavior
        out = [(g, 0, w) for w, g in self.atoms]
        out += [(1.0, -1, w * c) for w, c in self.densities]
        return out

    def _terms_at_zero(self) -> list[tuple[float, int, float]]:
        # density: (cs - 1)/log(cs) ~ 1/log(1/s) as s -> 0+
        out = [(g, 0, w) for w, g in self.atoms]
        out += [(0.0, -1, w) for w, _ in self.densities]
        return out


def _leading(terms: Iterable[tuple[float, int, float]], at_zero: bool) -> tuple[float, int, float]:
    terms = list(terms)
    if at_zero:
        key = min((p, -k) for p, k, _ in terms)
        key = (key[0], -key[1])
    else:
        key = max((p, k) for p, k, _ in terms)
    coef = sum(c for p, k, c in terms if (p, k) == key)
    return key[0], key[1], coef


def _as_complex(s) -> np.ndarray:
    return np.asarray(s, dtype=complex)


def _check_off_cut(s: np.ndarray) -> None:
    if not np.all(np.isfinite(s)):
        raise DomainError("non-finite evaluation point")
    on_cut = (s.imag == 0.0) & (s.real <= 0.0)
    if np.any(on_cut):
        bad = s[on_cut].flat[0] if s.ndim else s
        raise DomainError(f"s = {complex(bad)} lies on the branch cut (-inf, 0]")


def _expm1_over_v(v: np.ndarray) -> np.ndarray:
    small = np.abs(v) < _SERIES_RADIUS
    out = np.empty_like(v)
    vs = v[small]
    out[small] = np.polynomial.polynomial.polyval(vs, _EXPM1_OVER_V)
    vb = v[~small]
    out[~small] = np.expm1(vb) / vb
    return out


def _expm1_over_v_deriv(v: np.ndarray) -> np.ndarray:
    small = np.abs(v) < _SERIES_RADIUS
    out = np.empty_like(v)
    out[small] = np.polynomial.polynomial.polyval(v[small], _EXPM1_OVER_V_D)
    vb = v[~small]
    ev = np.exp(vb)
    out[~small] = (vb * ev - ev + 1.0) / (vb * vb)
    return out


def _phi_from_log(dist: OrderDistribution, logs: np.ndarray) -> np.ndarray:
    """Symbol value given ``log s`` on whichever sheet the caller wants."""
    out = np.zeros_like(logs)
    for w, g in dist.atoms:
        out += w if g == 0.0 else w * np.exp(g * logs)
    for w, c in dist.densities:
        v = math.log(c) + logs
        out += w * _expm1_over_v(np.atleast_1d(v)).reshape(v.shape)
    return out


def _dphi_from_log(dist: OrderDistribution, logs: np.ndarray) -> np.ndarray:
    """d Phi / ds given ``log s``; uses s = exp(log s)."""
    out = np.zeros_like(logs)
    for w, g in dist.atoms:
        if g != 0.0:
            out += w * g * np.exp((g - 1.0) * logs)
    if dist.densities:
        inv_s = np.exp(-logs)
        for w, c in dist.densities:
            v = math.log(c) + logs
            # d/ds g(log(cs)) = g'(v) / s
            out += w * _expm1_over_v_deriv(np.atleast_1d(v)).reshape(v.shape) * inv_s
    return out


def _below_cut_log(q) -> np.ndarray:
    q = np.asarray(q, dtype=float)
    if np.any(~(q > 0)) or not np.all(np.isfinite(q)):
        raise DomainError("lower-lip evaluation needs finite q > 0")
    return np.log(q) - 1j * math.pi


def _above_cut_log(q) -> np.ndarray:
    q = np.asarray(q, dtype=float)
    if np.any(~(q > 0)) or not np.all(np.isfinite(q)):
        raise DomainError("upper-lip evaluation needs finite q > 0")
    return np.log(q) + 1j * math.pi


def _shape_out(x: np.ndarray):
    return x[()] if x.ndim == 0 else x


def phi_symbol(dist: OrderDistribution, s):
    """Laplace symbol ``Phi(s) = integral phi(gamma) s**gamma dgamma``."""
    s = _as_complex(s)
    _check_off_cut(s)
    return _shape_out(_phi_from_log(dist, np.log(s)))


def phi_symbol_derivative(dist: OrderDistribution, s):
    """``d Phi / ds`` in closed form."""
    s = _as_complex(s)
    _check_off_cut(s)
    return _shape_out(_dphi_from_log(dist, np.log(s)))


def phi_symbol_below_cut(dist: OrderDistribution, q):
    """``Phi(q e^{-i pi})`` for real ``q > 0`` (lower lip of the cut)."""
    return _shape_out(_phi_from_log(dist, _below_cut_log(q)))


@dataclass(frozen=True)
class MaterialModel:
    """Constitutive pair ``(phi_sigma, phi_eps)`` with reality threshold ``x0``.

    ``c0`` and ``c_inf`` are the limits of ``M`` at zero and infinity.  They
    are computed on first access and raise :class:`AsymptoticsViolation`
    when the model has no finite positive limit.
    """

    phi_sigma: OrderDistribution
    phi_eps: OrderDistribution
    x0: float = 0.0
    name: str = field(default="custom", compare=False)

    def __post_init__(self) -> None:
        if not (math.isfinite(self.x0) and self.x0 >= 0):
            raise ValueError(f"x0 must be a nonnegative real, got {self.x0}")

    @cached_property
    def _asymptotics(self) -> tuple[float, float]:
        return estimate_asymptotics(self)

    @property
    def c0(self) -> float:
        return self._asymptotics[0]

    @property
    def c_inf(self) -> float:
        return self._asymptotics[1]

    @property
    def is_elastic(self) -> bool:
        """True when both distributions coincide, so ``M == 1``."""
        return self.phi_sigma == self.phi_eps


def zener(a: float, b: float, alpha: float) -> MaterialModel:
    """Fractional Zener law ``(1 + a D^alpha) sigma = (1 + b D^alpha) eps``."""
    if not (a > 0 and b > 0):
        raise ValueError("zener needs a > 0 and b > 0")
    if not (0 < alpha < 1):
        raise ValueError("alpha out of (0,1)")
    return MaterialModel(
        OrderDistribution(atoms=((1.0, 0.0), (a, alpha))),
        OrderDistribution(atoms=((1.0, 0.0), (b, alpha))),
        name=f"zener(a={a:g}, b={b:g}, alpha={alpha:g})",
    )


def distributed(a: float, b: float) -> MaterialModel:
    """Distributed-order law with weights ``a**gamma`` and ``b**gamma``."""
    if not (a > 0 and b > 0):
        raise ValueError("distributed model needs a > 0 and b > 0")
    return MaterialModel(
        OrderDistribution.density(1.0, a),
        OrderDistribution.density(1.0, b),
        name=f"distributed(a={a:g}, b={b:g})",
    )


def _ratio_from_log(model: MaterialModel, logs: np.ndarray) -> np.ndarray:
    if model.is_elastic:
        # z/z is not always exactly 1 in complex floating point
        return np.ones_like(logs)
    num = _phi_from_log(model.phi_sigma, logs)
    den = _phi_from_log(model.phi_eps, logs)
    if np.any(den == 0):
        raise SingularModel("Phi_eps vanishes at an evaluation point")
    return num / den


def modulus_squared(model: MaterialModel, s):
    """``M(s)**2 = Phi_sigma(s) / Phi_eps(s)`` (no square root taken)."""
    s = _as_complex(s)
    _check_off_cut(s)
    return _shape_out(_ratio_from_log(model, np.log(s)))


def modulus_squared_below_cut(model: MaterialModel, q):
    """``M(q e^{-i pi})**2`` for real ``q > 0``."""
    return _shape_out(_ratio_from_log(model, _below_cut_log(q)))


def modulus_squared_above_cut(model: MaterialModel, q):
    """``M(q e^{+i pi})**2`` for real ``q > 0``; only used for cross-checks."""
    return _shape_out(_ratio_from_log(model, _above_cut_log(q)))


def modulus_M(model: MaterialModel, s):
    """Principal square root of ``Phi_sigma / Phi_eps``."""
    return np.sqrt(modulus_squared(model, s))


def modulus_squared_derivative(model: MaterialModel, s):
    s = _as_complex(s)
    _check_off_cut(s)
    logs = np.log(s)
    ns = _phi_from_log(model.phi_sigma, logs)
    ne = _phi_from_log(model.phi_eps, logs)
    if np.any(ne == 0):
        raise SingularModel("Phi_eps vanishes at an evaluation point")
    dns = _dphi_from_log(model.phi_sigma, logs)
    dne = _dphi_from_log(model.phi_eps, logs)
    return _shape_out((dns * ne - ns * dne) / (ne * ne))


def modulus_M_derivative(model: MaterialModel, s):
    """``dM/ds = (M**2)' / (2 M)``."""
    return modulus_squared_derivative(model, s) / (2.0 * modulus_M(model, s))


def complex_modulus_E(model: MaterialModel, omega):
    """Storage and loss moduli ``(E', E'')`` at angular frequency ``omega``."""
    omega = np.asarray(omega, dtype=float)
    if np.any(~(omega > 0)):
        raise ValueError("omega must be positive")
    s = 1j * omega
    ps = np.asarray(phi_symbol(model.phi_sigma, s))
    if np.any(ps == 0):
        raise SingularModel("Phi_sigma(i omega) vanishes")
    E = np.asarray(phi_symbol(model.phi_eps, s)) / ps
    return _shape_out(E.real), _shape_out(E.imag)


def f_eval(model: MaterialModel, s):
    """Characteristic function ``f(s) = 1 + (s M(s))**2``."""
    s = _as_complex(s)
    return 1.0 + s * s * np.asarray(modulus_squared(model, s))


def f_derivative(model: MaterialModel, s):
    """``df/ds = 2 s M**2 + s**2 (M**2)'``, equal to ``2 s M (M + s M')``."""
    s = _as_complex(s)
    m2 = np.asarray(modulus_squared(model, s))
    dm2 = np.asarray(modulus_squared_derivative(model, s))
    return _shape_out(2.0 * s * m2 + s * s * dm2)


def _transfer_parts(model: MaterialModel, s):
    s = _as_complex(s)
    m2 = np.asarray(modulus_squared(model, s))
    f = 1.0 + s * s * m2
    floor = _POLE_FLOOR * (1.0 + np.abs(s * s * m2))
    if np.any(np.abs(f) <= floor):
        raise PoleHit("transfer function evaluated at a pole of 1/f")
    return m2, f


def transfer_P(model: MaterialModel, s):
    """Force-to-strain transfer ``M**2 / (1 + (s M)**2)``."""
    m2, f = _transfer_parts(model, s)
    return _shape_out(m2 / f)


def transfer_Q(model: MaterialModel, s):
    """Force-to-stress transfer ``1 / (1 + (s M)**2)``."""
    _, f = _transfer_parts(model, s)
    return _shape_out(1.0 / f)


_REAL_PROBES = (1e-8, 1e8)


def estimate_asymptotics(model: MaterialModel) -> tuple[float, float]:
    """Limits ``c0 = M(0+)`` and ``c_inf = M(+inf)``.

    The limits are read off the leading-order term of each symbol (largest
    power of ``s``, then of ``log s``, at infinity; the reverse at zero), so
    that logarithmically converging models such as the distributed-order law
    get their exact constants.  The positive real axis is then probed at
    ``1e-8`` and ``1e8``: ``M`` must be finite, positive and real there to
    ``1e-6`` relative.
    """
    out = []
    for at_zero in (True, False):
        get = "_terms_at_zero" if at_zero else "_terms_at_infinity"
        ps, ks, cs = _leading(getattr(model.phi_sigma, get)(), at_zero)
        pe, ke, ce = _leading(getattr(model.phi_eps, get)(), at_zero)
        where = "zero" if at_zero else "infinity"
        if (ps, ks) != (pe, ke):
            raise AsymptoticsViolation(
                f"M(s) has no finite positive limit at {where}: "
                f"leading orders s^{ps:g} log^{ks} vs s^{pe:g} log^{ke}"
            )
        out.append(math.sqrt(cs / ce))
    for x in _REAL_PROBES:
        m = complex(modulus_M(model, x))
        if not (np.isfinite(m.real) and np.isfinite(m.imag)) or m.real <= 0:
            raise AsymptoticsViolation(f"M({x:g}) = {m} is not finite and positive")
        if abs(m.imag) > 1e-6 * abs(m):
            raise AsymptoticsViolation(f"M({x:g}) = {m} is not real")
    c0, c_inf = out
    return c0, c_inf
