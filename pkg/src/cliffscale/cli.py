"""Command-line harness: seeded experiment runs, curve analysis, SVG plots.

Subcommands:
  run      simulate a scaling experiment (or import a CSV) and write
           curve.csv, curve.json, plot.svg and manifest.json
  analyze  fit a power law and/or detect cliffs on a curve file
  plot     render one or more curve files to SVG

Exit codes: 0 success, 2 configuration error, 3 data error,
4 numerical failure.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .curves import (
    CurveError,
    FitError,
    ScalingCurve,
    detect_cliffs,
    fit_power_law,
    log_spaced_ns,
    DEFAULT_CLIFF_THRESHOLD,
    DEFAULT_ERROR_FLOOR,
    DEFAULT_MIN_RUN,
)
from .curve_io import (
    cliffs_to_json,
    curve_to_json,
    fit_to_json,
    read_curve_csv,
    write_curve_csv,
)
from .gaussian import GaussianTask, approx_error, run_gaussian_scaling
from .harmonic.training import DivergenceError, TrainConfig, run_harmonic_scaling
from .linreg import run_linreg_scaling
from .svgplot import Overlay, PlotError, render_svg

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DATA = 3
EXIT_NUMERIC = 4

KINDS = ("linreg", "gaussian", "harmonic", "import")


class ConfigError(ValueError):
    """Invalid experiment configuration; message names the offending field."""


@dataclass
class ExperimentConfig:
    kind: str = "linreg"
    d: int = 5
    sigma: float = 0.0
    lam: float = 1.0
    s: float = 1.0
    sampler: str = "sufficient"
    bandlimit: int = 2
    arm: str = "reg"
    width: int = 256
    estimator: str = "lstsq"
    n_grid: list[int] = field(default_factory=list)
    n_min: int = 1
    n_max: int = 1000
    points_per_decade: int = 10
    trials: int = 50
    seed: int = 0
    workers: int = 1
    fix_task: bool = False
    max_steps: int = 20_000
    reg_points: int = 20_000
    input: str | None = None
    out: str = "."

    def validate(self) -> None:
        if self.kind not in KINDS:
            raise ConfigError(f"kind: expected one of {KINDS}, got {self.kind!r}")
        if self.kind == "import":
            if not self.input:
                raise ConfigError("input: import runs need an input CSV path")
            return
        if self.d < 1:
            raise ConfigError(f"d: must be >= 1, got {self.d}")
        if self.sigma < 0:
            raise ConfigError(f"sigma: must be >= 0, got {self.sigma}")
        if self.s < 0:
            raise ConfigError(f"s: must be >= 0, got {self.s}")
        if self.estimator not in ("lstsq", "ridge", "nn"):
            raise ConfigError(f"estimator: expected lstsq, ridge or nn, got {self.estimator!r}")
        if self.estimator == "ridge" and self.lam <= 0:
            raise ConfigError(f"lambda: ridge needs a positive value, got {self.lam}")
        if self.sampler not in ("full", "sufficient"):
            raise ConfigError(f"sampler: expected full or sufficient, got {self.sampler!r}")
        if self.bandlimit < 0:
            raise ConfigError(f"bandlimit: must be >= 0, got {self.bandlimit}")
        if self.arm not in ("reg", "noreg"):
            raise ConfigError(f"arm: expected reg or noreg, got {self.arm!r}")
        if self.width < 1:
            raise ConfigError(f"width: must be >= 1, got {self.width}")
        if self.trials < 1:
            raise ConfigError(f"trials: must be >= 1, got {self.trials}")
        if not 0 <= self.seed < 2**64:
            raise ConfigError(f"seed: must be a 64-bit unsigned integer, got {self.seed}")
        if self.workers < 1:
            raise ConfigError(f"workers: must be >= 1, got {self.workers}")
        grid = self.resolve_n_grid()
        if not grid or any(b <= a for a, b in zip(grid, grid[1:])) or grid[0] < 1:
            raise ConfigError(f"n_grid: must be ascending positive integers, got {grid}")

    def resolve_n_grid(self) -> list[int]:
        if self.n_grid:
            return [int(n) for n in self.n_grid]
        try:
            return log_spaced_ns(self.n_min, self.n_max, self.points_per_decade)
        except CurveError as exc:
            raise ConfigError(f"n_grid: {exc}") from None


def _load_config_file(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            payload = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"config: cannot read {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config: {path} is not valid JSON: {exc}") from None
    if not isinstance(payload, dict):
        raise ConfigError(f"config: {path} must hold a JSON object")
    known = set(ExperimentConfig.__dataclass_fields__)
    for key in payload:
        if key not in known:
            raise ConfigError(f"config: unknown field {key!r} in {path}")
    return payload


def _build_config(args: argparse.Namespace) -> ExperimentConfig:
    cfg = ExperimentConfig()
    if args.config:
        for key, value in _load_config_file(args.config).items():
            setattr(cfg, key, value)
    overrides = {
        "kind": args.kind,
        "d": args.d,
        "sigma": args.sigma,
        "lam": args.lam,
        "s": args.s,
        "sampler": args.sampler,
        "bandlimit": args.bandlimit,
        "arm": args.arm,
        "width": args.width,
        "estimator": args.estimator,
        "n_grid": _parse_n_grid(args.n_grid) if args.n_grid else None,
        "n_min": args.n_min,
        "n_max": args.n_max,
        "points_per_decade": args.points_per_decade,
        "trials": args.trials,
        "seed": args.seed,
        "workers": args.workers,
        "fix_task": True if args.fix_task else None,
        "max_steps": args.max_steps,
        "reg_points": args.reg_points,
        "input": args.input,
        "out": args.out,
    }
    for key, value in overrides.items():
        if value is not None:
            setattr(cfg, key, value)
    cfg.validate()
    return cfg


def _parse_n_grid(text: str) -> list[int]:
    try:
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise ConfigError(f"n_grid: expected comma-separated integers, got {text!r}") from None


def _dispatch_run(cfg: ExperimentConfig) -> ScalingCurve:
    if cfg.kind == "import":
        return read_curve_csv(cfg.input, metadata={"task": "import", "source": str(cfg.input)})
    grid = cfg.resolve_n_grid()
    if cfg.kind == "linreg":
        return run_linreg_scaling(
            d=cfg.d,
            sigma=cfg.sigma,
            estimator=cfg.estimator,
            n_grid=grid,
            trials=cfg.trials,
            seed=cfg.seed,
            lam=cfg.lam if cfg.estimator == "ridge" else None,
            fix_task=cfg.fix_task,
            workers=cfg.workers,
        )
    if cfg.kind == "gaussian":
        return run_gaussian_scaling(
            d=cfg.d,
            s=cfg.s,
            n_grid=grid,
            trials=cfg.trials,
            seed=cfg.seed,
            sampler=cfg.sampler,
            workers=cfg.workers,
        )
    train_cfg = TrainConfig(width=cfg.width, max_steps=cfg.max_steps, reg_points=cfg.reg_points)
    return run_harmonic_scaling(
        B=cfg.bandlimit,
        arm=cfg.arm,
        n_grid=grid,
        trials=cfg.trials,
        seed=cfg.seed,
        config=train_cfg,
        workers=cfg.workers,
    )


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def cmd_run(args: argparse.Namespace) -> int:
    cfg = _build_config(args)
    out_dir = Path(cfg.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    started = time.time()
    curve = _dispatch_run(cfg)
    duration = time.time() - started

    csv_path = out_dir / "curve.csv"
    json_path = out_dir / "curve.json"
    svg_path = out_dir / "plot.svg"
    write_curve_csv(curve, csv_path)
    json_path.write_text(curve_to_json(curve), encoding="utf-8")
    outputs = {"curve.csv": _sha256(csv_path), "curve.json": _sha256(json_path)}
    if len(curve.points) >= 2:
        svg_path.write_text(
            render_svg([curve], floor=DEFAULT_ERROR_FLOOR), encoding="utf-8"
        )
        outputs["plot.svg"] = _sha256(svg_path)

    manifest = {
        "config": asdict(cfg),
        "version": __version__,
        "duration_seconds": duration,
        "trial_counts": {str(n): len(errs) for n, errs in curve.points},
        "outputs": outputs,
    }
    (out_dir / "manifest.json").write_text(
        json.dumps(manifest, sort_keys=True, indent=2) + "\n", encoding="utf-8"
    )
    print(f"wrote {csv_path}, {json_path} and manifest ({len(curve.points)} n values)")
    return EXIT_OK


def _analysis_table(curve: ScalingCurve) -> str:
    med = curve.statistic("median")
    lo = curve.statistic("min")
    hi = curve.statistic("max")
    lines = [f"{'n':>8}  {'median':>12}  {'min':>12}  {'max':>12}  {'trials':>6}"]
    for (n, errs), m, a, b in zip(curve.points, med, lo, hi):
        lines.append(f"{n:>8}  {m:>12.5e}  {a:>12.5e}  {b:>12.5e}  {len(errs):>6}")
    return "\n".join(lines)


def cmd_analyze(args: argparse.Namespace) -> int:
    curve = read_curve_csv(args.curve)
    print(_analysis_table(curve))
    report: dict = {}
    if args.mode in ("fit", "both"):
        n_range = None
        if args.n_min is not None or args.n_max is not None:
            n_range = (args.n_min or 1, args.n_max or int(curve.ns[-1]))
        fit = fit_power_law(curve, n_range=n_range, statistic=args.statistic, floor=args.floor)
        report["fit"] = json.loads(fit_to_json(fit))
        print(
            f"power law: A={fit.A:.6g} alpha={fit.alpha:.6g} E={fit.E:.6g} "
            f"residual={fit.residual:.3g} over n in [{fit.n_range[0]}, {fit.n_range[1]}]"
        )
    if args.mode in ("cliffs", "both"):
        regions = detect_cliffs(
            curve,
            threshold=args.threshold,
            min_run=args.min_run,
            statistic=args.statistic,
            floor=args.floor if args.floor is not None else DEFAULT_ERROR_FLOOR,
        )
        report["cliffs"] = json.loads(cliffs_to_json(regions))
        if regions:
            for r in regions:
                print(f"cliff: n in [{r.n_start}, {r.n_end}], strength {r.strength:.4g}")
        else:
            print("cliff: none detected")
    text = json.dumps(report, sort_keys=True, indent=2) + "\n"
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        print(text, end="")
    return EXIT_OK


def _parse_overlays(args, n_lo: int, n_hi: int) -> list[Overlay]:
    overlays: list[Overlay] = []
    ns = np.array(log_spaced_ns(max(n_lo, 1), max(n_hi, 2), 40), dtype=float)
    if args.overlay_powerlaw:
        try:
            a_, alpha_, e_ = (float(p) for p in args.overlay_powerlaw.split(","))
        except ValueError:
            raise ConfigError(
                f"overlay-powerlaw: expected A,alpha,E, got {args.overlay_powerlaw!r}"
            ) from None
        overlays.append(
            Overlay(label=f"A n^-a + E ({a_:g},{alpha_:g},{e_:g})", ns=ns, values=a_ * ns**-alpha_ + e_)
        )
    if args.overlay_gaussian:
        try:
            d_, s_ = args.overlay_gaussian.split(",")
            task = GaussianTask(d=int(d_), s=float(s_))
        except ValueError:
            raise ConfigError(
                f"overlay-gaussian: expected d,s, got {args.overlay_gaussian!r}"
            ) from None
        values = np.array([approx_error(task, int(n)) for n in ns])
        overlays.append(Overlay(label=f"closed form (d={task.d}, s={task.s:g})", ns=ns, values=values))
    return overlays


def cmd_plot(args: argparse.Namespace) -> int:
    curves = [read_curve_csv(path) for path in args.curves]
    n_lo = min(int(c.ns[0]) for c in curves)
    n_hi = max(int(c.ns[-1]) for c in curves)
    overlays = _parse_overlays(args, n_lo, n_hi)
    svg = render_svg(
        curves,
        overlays=overlays,
        vline=args.vline,
        floor=args.floor,
        title=args.title,
    )
    Path(args.out).write_text(svg, encoding="utf-8")
    print(f"wrote {args.out}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cliffscale",
        description="Simulate and analyze data-scaling cliffs.",
    )
    parser.add_argument("--version", action="version", version=f"cliffscale {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a scaling experiment and write its outputs")
    run.add_argument("--config", help="JSON config file; flags override its fields")
    run.add_argument("--kind", choices=KINDS)
    run.add_argument("--d", type=int, help="task dimension (linreg, gaussian)")
    run.add_argument("--sigma", type=float, help="observation noise (linreg)")
    run.add_argument("--lambda", dest="lam", type=float, help="ridge penalty (linreg)")
    run.add_argument("--estimator", choices=("lstsq", "ridge", "nn"))
    run.add_argument("--s", type=float, help="signal-to-noise ratio (gaussian)")
    run.add_argument("--sampler", choices=("full", "sufficient"), help="gaussian sampler")
    run.add_argument("--bandlimit", type=int, help="harmonic bandlimit B")
    run.add_argument("--arm", choices=("reg", "noreg"), help="harmonic arm")
    run.add_argument("--width", type=int, help="harmonic network width")
    run.add_argument("--max-steps", type=int, help="harmonic optimizer step budget")
    run.add_argument("--reg-points", type=int, help="harmonic regularizer sample count m")
    run.add_argument("--n-grid", help="explicit comma-separated n values")
    run.add_argument("--n-min", type=int)
    run.add_argument("--n-max", type=int)
    run.add_argument("--points-per-decade", type=int)
    run.add_argument("--trials", type=int)
    run.add_argument("--seed", type=int)
    run.add_argument("--workers", type=int)
    run.add_argument("--fix-task", action="store_true", default=None)
    run.add_argument("--input", help="CSV to ingest (kind=import)")
    run.add_argument("--out", help="output directory")
    run.set_defaults(func=cmd_run)

    analyze = sub.add_parser("analyze", help="fit and/or detect cliffs on a curve file")
    analyze.add_argument("curve", help="curve CSV file")
    analyze.add_argument("--mode", choices=("fit", "cliffs", "both"), default="both")
    analyze.add_argument("--statistic", choices=("median", "mean"), default="median")
    analyze.add_argument("--n-min", type=int, help="restrict the fit range")
    analyze.add_argument("--n-max", type=int, help="restrict the fit range")
    analyze.add_argument("--threshold", type=float, default=DEFAULT_CLIFF_THRESHOLD)
    analyze.add_argument("--min-run", type=int, default=DEFAULT_MIN_RUN)
    analyze.add_argument("--floor", type=float, help="clamp errors up to this before logs")
    analyze.add_argument("--out", help="write the analysis JSON here")
    analyze.set_defaults(func=cmd_analyze)

    plot = sub.add_parser("plot", help="render curve files to SVG")
    plot.add_argument("curves", nargs="+", help="curve CSV files")
    plot.add_argument("--out", default="plot.svg")
    plot.add_argument("--vline", type=int, help="dashed vertical marker at this n")
    plot.add_argument("--floor", type=float, help="clamp errors up to this before log axes")
    plot.add_argument("--title")
    plot.add_argument("--overlay-powerlaw", help="overlay A,alpha,E closed form")
    plot.add_argument("--overlay-gaussian", help="overlay the gaussian closed form: d,s")
    plot.set_defaults(func=cmd_plot)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (FitError, DivergenceError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (CurveError, PlotError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except OSError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
