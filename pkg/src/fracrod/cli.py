"""Command-line front end.

``fracrod run CONFIG``
    admissibility, pole certification, kernels, response; writes the CSV,
    the key=value report and, if configured, a PNG figure.
``fracrod check CONFIG``
    admissibility and pole certificate only.

Exit codes: 0 success, 1 configuration error, 2 model rejected by the
admissibility checks (report still written), 3 certification or quadrature
failure.
"""

from __future__ import annotations

import argparse
import sys
import time
from dataclasses import replace
from pathlib import Path

from .admissibility import check_admissibility
from .config import RunConfig, load_config
from .errors import (
    CertificationFailed,
    ConfigError,
    ContourTooCoarse,
    GridTooCoarse,
    NoConvergence,
    QuadratureFailure,
    UnsupportedModel,
    ZeroOnContour,
)
from .kernels import KernelEvaluator
from .poles import locate_pole
from .response import ResponseSeries, respond

EXIT_OK, EXIT_CONFIG, EXIT_INADMISSIBLE, EXIT_NUMERICAL = 0, 1, 2, 3
CSV_HEADER = "t,eps,sigma,P,Q"
NUMERICAL_ERRORS = (
    CertificationFailed,
    ContourTooCoarse,
    NoConvergence,
    QuadratureFailure,
    UnsupportedModel,
    ZeroOnContour,
)


def write_csv(series: ResponseSeries, path: Path) -> None:
    cols = (series.t, series.eps, series.sigma, series.P, series.Q)
    lines = [CSV_HEADER]
    lines += [",".join("%.17g" % v for v in row) for row in zip(*cols)]
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def _write_report(path: Path, lines: list[str]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def _pipeline(cfg: RunConfig, full: bool) -> tuple[int, list[str], ResponseSeries | None]:
    model = cfg.model.build()
    lines = [f"model={model.name}", f"x0={model.x0!r}"]
    clock = time.perf_counter()

    rep = check_admissibility(model)
    lines += rep.to_key_values()
    lines.append(f"time_admissibility_s={time.perf_counter() - clock:.6f}")
    if not rep.admissible:
        lines.insert(0, "status=inadmissible")
        return EXIT_INADMISSIBLE, lines, None

    try:
        t0 = time.perf_counter()
        cert = locate_pole(model)
        lines += cert.to_key_values()
        lines.append(f"time_pole_s={time.perf_counter() - t0:.6f}")
        if not full:
            lines.insert(0, "status=ok")
            return EXIT_OK, lines, None
        t0 = time.perf_counter()
        ev = KernelEvaluator(model, cert, cfg.quad)
        series = respond(ev, cfg.forcing.build(), cfg.grid())
        lines.append(f"time_response_s={time.perf_counter() - t0:.6f}")
    except NUMERICAL_ERRORS as exc:
        lines.insert(0, "status=numerical_failure")
        lines.append(f"error={type(exc).__name__}: {exc}")
        return EXIT_NUMERICAL, lines, None
    except GridTooCoarse as exc:
        raise ConfigError(f"[grid] n_points: {exc}") from None

    lines.insert(0, "status=ok")
    lines.append(f"n_points={series.t.size}")
    lines.append(f"time_total_s={time.perf_counter() - clock:.6f}")
    return EXIT_OK, lines, series


def execute(cfg: RunConfig, full: bool = True, out=None) -> int:
    out = out or sys.stdout
    code, lines, series = _pipeline(cfg, full)
    _write_report(cfg.report, lines)
    if series is not None:
        write_csv(series, cfg.csv)
        if cfg.figure is not None:
            from .plotting import plot_series

            plot_series(series, cfg.figure, title=cfg.model.build().name)
    for ln in lines:
        if ln.startswith(("status=", "admissible=", "violation=", "s0_", "winding_", "error=")):
            print(ln, file=out)
    return code


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="fracrod", description="Fractional viscoelastic rod response")
    sub = ap.add_subparsers(dest="command", required=True)
    for name, help_ in (("run", "full pipeline"), ("check", "admissibility and pole certificate only")):
        p = sub.add_parser(name, help=help_)
        p.add_argument("config", type=Path)
        p.add_argument("--tol-quad", type=float, default=None, help="relative quadrature tolerance")
        p.add_argument("--grid-points", type=int, default=None, help="override [grid] n_points")
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        if args.tol_quad is not None:
            try:
                cfg = replace(cfg, quad=replace(cfg.quad, rel_tol=args.tol_quad))
            except ValueError as exc:
                raise ConfigError(f"--tol-quad: {exc}") from None
        if args.grid_points is not None:
            if args.grid_points < 16:
                raise ConfigError("--grid-points: must be at least 16")
            cfg = replace(cfg, n_points=args.grid_points)
        return execute(cfg, full=args.command == "run")
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
