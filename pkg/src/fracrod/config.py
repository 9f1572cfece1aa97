"""Run configuration: an INI file with ``[model]``, ``[forcing]``, ``[grid]``,
``[output]`` and optional ``[tolerances]`` sections.

Relative paths are resolved against the directory holding the config file.
Every validation failure raises :class:`ConfigError` naming the section and
key at fault.
"""

from __future__ import annotations

import configparser
import math
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .errors import ConfigError
from .kernels import QuadratureConfig
from .models import MaterialModel, OrderDistribution, distributed, zener
from .response import Forcing, Harmonic, Impulse, Sampled, Step

FAMILIES = ("zener", "distributed", "explicit")
FORCINGS = ("impulse", "step", "cosine", "file")


@dataclass(frozen=True)
class ModelBlock:
    family: str
    a: float | None = None
    b: float | None = None
    alpha: float | None = None
    x0: float = 0.0
    sigma_atoms: tuple[tuple[float, float], ...] = ()
    sigma_densities: tuple[tuple[float, float], ...] = ()
    eps_atoms: tuple[tuple[float, float], ...] = ()
    eps_densities: tuple[tuple[float, float], ...] = ()

    def build(self) -> MaterialModel:
        if self.family == "zener":
            m = zener(self.a, self.b, self.alpha)
        elif self.family == "distributed":
            m = distributed(self.a, self.b)
        else:
            m = MaterialModel(
                OrderDistribution(self.sigma_atoms, self.sigma_densities),
                OrderDistribution(self.eps_atoms, self.eps_densities),
                name="explicit",
            )
        return replace(m, x0=self.x0) if self.x0 else m


@dataclass(frozen=True)
class ForcingBlock:
    kind: str
    F0: float = 1.0
    omega: float = 0.0
    path: Path | None = None

    def build(self) -> Forcing:
        if self.kind == "impulse":
            return Impulse(self.F0)
        if self.kind == "step":
            return Step(self.F0)
        if self.kind == "cosine":
            return Harmonic(self.F0, self.omega)
        dt, values = read_force_file(self.path)
        return Sampled.from_array(dt, self.F0 * values)


@dataclass(frozen=True)
class RunConfig:
    model: ModelBlock
    forcing: ForcingBlock
    t_end: float
    n_points: int
    csv: Path
    report: Path
    figure: Path | None = None
    quad: QuadratureConfig = QuadratureConfig()

    def grid(self) -> np.ndarray:
        return np.linspace(0.0, self.t_end, self.n_points)


def _field(section: str, key: str) -> str:
    return f"[{section}] {key}"


def _get(cp: configparser.ConfigParser, section: str, key: str, required: bool = True) -> str | None:
    if not cp.has_section(section):
        if required:
            raise ConfigError(f"missing section [{section}]")
        return None
    raw = cp.get(section, key, fallback=None)
    if raw is None or raw.strip() == "":
        if required:
            raise ConfigError(f"{_field(section, key)}: missing")
        return None
    return raw.strip()


def _float(cp, section: str, key: str, required: bool = True, default: float | None = None) -> float | None:
    raw = _get(cp, section, key, required)
    if raw is None:
        return default
    try:
        x = float(raw)
    except ValueError:
        raise ConfigError(f"{_field(section, key)}: not a number: {raw!r}") from None
    if not math.isfinite(x):
        raise ConfigError(f"{_field(section, key)}: must be finite")
    return x


def _int(cp, section: str, key: str, default: int | None = None) -> int:
    raw = _get(cp, section, key, default is None)
    if raw is None:
        return default
    try:
        return int(raw)
    except ValueError:
        raise ConfigError(f"{_field(section, key)}: not an integer: {raw!r}") from None


def _pairs(cp, section: str, key: str) -> tuple[tuple[float, float], ...]:
    """``weight:order`` pairs separated by commas."""
    raw = _get(cp, section, key, required=False)
    if raw is None:
        return ()
    out = []
    for item in raw.split(","):
        try:
            w, x = item.split(":")
            out.append((float(w), float(x)))
        except ValueError:
            raise ConfigError(f"{_field(section, key)}: expected weight:value pairs, got {item.strip()!r}") from None
    return tuple(out)


def _positive(x: float, section: str, key: str) -> float:
    if not x > 0:
        raise ConfigError(f"{_field(section, key)}: must be positive")
    return x


def _model_block(cp) -> ModelBlock:
    fam = (_get(cp, "model", "family") or "").lower()
    if fam not in FAMILIES:
        raise ConfigError(f"[model] family: expected one of {', '.join(FAMILIES)}, got {fam!r}")
    x0 = _float(cp, "model", "x0", required=False, default=0.0)
    if x0 < 0:
        raise ConfigError("[model] x0: must be nonnegative")
    if fam == "explicit":
        blk = ModelBlock(
            fam,
            x0=x0,
            sigma_atoms=_pairs(cp, "model", "sigma_atoms"),
            sigma_densities=_pairs(cp, "model", "sigma_densities"),
            eps_atoms=_pairs(cp, "model", "eps_atoms"),
            eps_densities=_pairs(cp, "model", "eps_densities"),
        )
        for side in ("sigma", "eps"):
            try:
                OrderDistribution(getattr(blk, f"{side}_atoms"), getattr(blk, f"{side}_densities"))
            except ValueError as exc:
                raise ConfigError(f"[model] {side}_atoms/{side}_densities: {exc}") from None
        return blk
    a = _positive(_float(cp, "model", "a"), "model", "a")
    b = _positive(_float(cp, "model", "b"), "model", "b")
    alpha = None
    if fam == "zener":
        alpha = _float(cp, "model", "alpha")
        if not 0 < alpha < 1:
            raise ConfigError("[model] alpha: alpha out of (0,1)")
    return ModelBlock(fam, a, b, alpha, x0)


def _forcing_block(cp, base: Path) -> ForcingBlock:
    kind = (_get(cp, "forcing", "kind") or "").lower()
    if kind not in FORCINGS:
        raise ConfigError(f"[forcing] kind: expected one of {', '.join(FORCINGS)}, got {kind!r}")
    F0 = _float(cp, "forcing", "F0", required=False, default=1.0)
    omega = 0.0
    path = None
    if kind == "cosine":
        omega = _float(cp, "forcing", "omega")
        if omega < 0:
            raise ConfigError("[forcing] omega: must be nonnegative")
    if kind == "file":
        raw = _get(cp, "forcing", "path")
        path = (base / raw).resolve()
        if not path.is_file():
            raise ConfigError(f"[forcing] path: file not found: {raw}")
        read_force_file(path)
    return ForcingBlock(kind, F0, omega, path)


def read_force_file(path: Path) -> tuple[float, np.ndarray]:
    """Two columns ``t,F`` (comma separated, optional header), uniform in ``t`` from 0."""
    try:
        lines = Path(path).read_text(encoding="utf-8").splitlines()
        rows = [ln for ln in lines if ln.strip() and not ln.lstrip().startswith("#")]
        if rows and not _is_numeric_row(rows[0]):
            rows = rows[1:]
        data = np.array([[float(v) for v in r.split(",")] for r in rows], dtype=float)
    except (OSError, ValueError) as exc:
        raise ConfigError(f"[forcing] path: cannot read {path}: {exc}") from None
    if data.ndim != 2 or data.shape[1] != 2 or data.shape[0] < 2:
        raise ConfigError("[forcing] path: expected at least two rows of 't,F'")
    t, f = data[:, 0], data[:, 1]
    dt = t[1] - t[0]
    if t[0] != 0 or not dt > 0 or not np.allclose(np.diff(t), dt, rtol=1e-9, atol=1e-12):
        raise ConfigError("[forcing] path: times must be uniform and start at 0")
    if not np.all(np.isfinite(f)):
        raise ConfigError("[forcing] path: non-finite force value")
    return float(dt), f


def _is_numeric_row(row: str) -> bool:
    try:
        [float(v) for v in row.split(",")]
        return True
    except ValueError:
        return False


def _quad(cp) -> QuadratureConfig:
    d = QuadratureConfig()
    kw = dict(
        rel_tol=_float(cp, "tolerances", "rel_tol", required=False, default=d.rel_tol),
        abs_tol=_float(cp, "tolerances", "abs_tol", required=False, default=d.abs_tol),
        max_panels=_int(cp, "tolerances", "max_panels", default=d.max_panels),
        truncation_factor=_float(cp, "tolerances", "truncation_factor", required=False, default=d.truncation_factor),
    )
    try:
        return QuadratureConfig(**kw)
    except ValueError as exc:
        raise ConfigError(f"[tolerances] {exc}") from None


def parse_config(text: str, base_dir: Path | str = ".") -> RunConfig:
    cp = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    cp.optionxform = str  # keep "F0" as written
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"syntax: {exc}") from None
    base = Path(base_dir)
    model = _model_block(cp)
    forcing = _forcing_block(cp, base)
    t_end = _float(cp, "grid", "t_end")
    if not t_end > 0:
        raise ConfigError("[grid] t_end: must be positive")
    n = _int(cp, "grid", "n_points")
    if n < 16:
        raise ConfigError("[grid] n_points: must be at least 16")
    csv = base / _get(cp, "output", "csv")
    report = base / _get(cp, "output", "report")
    fig = _get(cp, "output", "figure", required=False)
    return RunConfig(model, forcing, t_end, n, csv, report, base / fig if fig else None, _quad(cp))


def load_config(path: Path | str) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    return parse_config(text, path.parent)
