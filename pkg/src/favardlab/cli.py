"""Command line front end.

Exit codes: 0 success or verification passed, 2 verification failed,
3 resource cap exceeded, 4 bad input.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path

from . import __version__
from .errors import DataError, FavardError, InputValidationError, ResourceLimitError
from .estimators import estimate_curve, estimate_expected_favard, favard_length, read_curve_csv
from .geometry import FractalSpec, Mode, disks_to_json, enumerate_disks
from .intervals import make_interval_set
from .projection import DEFAULT_MAX_INTERVALS, projection_set_enumerated, projection_set_recursive
from .rng import SeedSpec, draw_word
from .svgplot import decay_plot_svg
from .verification import (
    fit_decay,
    lemma_constant,
    mattila_ratio,
    overlap_integral,
    verify_induction,
    verify_theta_invariance,
)

EXIT_OK, EXIT_FAIL, EXIT_RESOURCE, EXIT_INPUT = 0, 2, 3, 4
SEED_ENV = "FAVARDLAB_SEED"


@dataclass
class RunConfig:
    degree: int = 4
    generations: int = 6
    mode: str = "shared"
    samples: int = 500
    theta: list = field(default_factory=lambda: [0.0])
    ntheta: int = 256
    seed: int = 0
    workers: int = 1
    max_intervals: int = DEFAULT_MAX_INTERVALS
    out: str | None = None

    @property
    def spec(self) -> FractalSpec:
        return FractalSpec(self.degree, self.generations, self.mode)

    def embedded(self) -> dict:
        """Configuration written into outputs; worker count and paths are omitted."""
        cfg = asdict(self)
        del cfg["workers"], cfg["out"]
        return cfg


CONFIG_KEYS = set(RunConfig.__dataclass_fields__)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _theta_list(text):
    try:
        return [float(eval_angle(t)) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def eval_angle(text: str) -> float:
    """Parse an angle such as ``0.3``, ``pi/4`` or ``2*pi/7``."""
    t = text.strip().replace(" ", "")
    if "pi" not in t:
        return float(t)
    num, _, den = t.partition("/")
    coef = num.replace("pi", "").rstrip("*") or "1"
    val = float(coef) * math.pi if coef not in ("-",) else -math.pi
    return val / float(den) if den else val


def _common(p):
    g = p.add_argument_group("run configuration")
    g.add_argument("--config", help="JSON file with flat keys mirroring the flags")
    g.add_argument("--degree", type=int)
    g.add_argument("--generations", type=int)
    g.add_argument("--mode", choices=[m.value for m in Mode])
    g.add_argument("--samples", type=int)
    g.add_argument("--theta", type=_theta_list, action="append",
                   help="projection angle(s); repeat or comma-separate")
    g.add_argument("--ntheta", type=int)
    g.add_argument("--seed", type=int)
    g.add_argument("--workers", type=int)
    g.add_argument("--max-intervals", dest="max_intervals", type=int)
    g.add_argument("--out")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="favardlab", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"favardlab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("sample", help="write one realization: disks and projections")
    _common(p)
    p.add_argument("--sample-index", type=int, default=0)

    _common(sub.add_parser("curve", help="Monte Carlo E_k curve as CSV"))
    _common(sub.add_parser("favard", help="Favard length (expected, or of the deterministic set)"))

    p = sub.add_parser("verify", help="run one numerical check")
    p.add_argument("which", choices=["overlap", "induction", "theta", "mattila"])
    _common(p)
    p.add_argument("--a", type=float, default=0.25, help="half-width for the overlap check")
    p.add_argument("--interval", action="append", default=None,
                   help="LO,HI component of I for the overlap check (repeatable; write --interval=-LO,HI for negative LO)")
    p.add_argument("--quad-points", type=int, default=1024)
    p.add_argument("--curve", help="curve CSV for induction/mattila (computed if omitted)")
    p.add_argument("--c", type=float, help="induction constant (default: derived c_d)")

    for name, text in (("fit", "fit decay laws to a curve CSV"), ("plot", "log-log SVG of a curve CSV")):
        p = sub.add_parser(name, help=text)
        p.add_argument("csv")
        p.add_argument("--out")
    return parser


def resolve_config(args) -> RunConfig:
    values = {}
    if getattr(args, "config", None):
        try:
            data = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise InputValidationError(f"cannot read config {args.config}: {exc}") from None
        unknown = set(data) - CONFIG_KEYS
        if unknown:
            raise InputValidationError(f"unknown config keys: {sorted(unknown)}")
        values.update(data)
    for key in CONFIG_KEYS:
        v = getattr(args, key, None)
        if v is not None:
            values[key] = v
    if isinstance(values.get("theta"), list) and values["theta"] and isinstance(values["theta"][0], list):
        values["theta"] = [t for chunk in values["theta"] for t in chunk]
    elif "theta" in values and not isinstance(values["theta"], list):
        values["theta"] = [float(values["theta"])]
    if "seed" not in values:
        env = os.environ.get(SEED_ENV)
        if env is not None:
            try:
                values["seed"] = int(env)
            except ValueError:
                raise InputValidationError(f"{SEED_ENV} must be an integer") from None
    cfg = RunConfig(**values)
    cfg.theta = [float(t) for t in cfg.theta]
    if cfg.workers < 1:
        raise InputValidationError("workers must be >= 1")
    return cfg


def _dump_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _envelope(cfg: RunConfig | None, payload: dict) -> dict:
    out = {"favardlab_version": __version__}
    if cfg is not None:
        out["config"] = cfg.embedded()
    out.update(payload)
    return out


def _emit(text: str, out: str | None):
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_sample(args) -> int:
    cfg = resolve_config(args)
    spec = cfg.spec
    seed = SeedSpec(cfg.seed)
    count = spec.degree**spec.generations
    if count > cfg.max_intervals:
        raise ResourceLimitError(f"generation {spec.generations} with degree {spec.degree}", count, cfg.max_intervals)
    word = draw_word(spec, seed, args.sample_index)
    disks = enumerate_disks(spec, word, max_disks=cfg.max_intervals)
    outdir = Path(cfg.out or ".")
    outdir.mkdir(parents=True, exist_ok=True)
    meta = {"sample_index": args.sample_index, "word": word.to_json()}
    (outdir / "disks.json").write_text(_dump_json(_envelope(cfg, {**meta, "disks": disks_to_json(disks)})))
    for i, theta in enumerate(cfg.theta):
        if spec.mode is Mode.PER_NODE:
            proj = projection_set_enumerated(spec, word, theta, max_intervals=cfg.max_intervals)
        else:
            proj = projection_set_recursive(spec, word, theta, max_intervals=cfg.max_intervals)
        payload = {**meta, "theta": theta, "measure": proj.measure, "intervals": proj.to_json()}
        (outdir / f"projection_{i}.json").write_text(_dump_json(_envelope(cfg, payload)))
    return EXIT_OK


def _run_curve(cfg: RunConfig):
    if cfg.samples < 2:
        raise InputValidationError("--samples must be at least 2 (stderr undefined)")
    return estimate_curve(
        cfg.spec, cfg.theta[0], cfg.samples, SeedSpec(cfg.seed), workers=cfg.workers,
        max_intervals=cfg.max_intervals,
    )


def cmd_curve(args) -> int:
    cfg = resolve_config(args)
    report = _run_curve(cfg)
    report.extra = {"samples": cfg.samples, "max_intervals": cfg.max_intervals}
    _emit(report.to_csv(), cfg.out)
    return EXIT_OK


def cmd_favard(args) -> int:
    cfg = resolve_config(args)
    spec = cfg.spec
    if spec.mode is Mode.DETERMINISTIC:
        value = favard_length(spec, None, cfg.ntheta, max_intervals=cfg.max_intervals)
        result = {"n": spec.generations, "favard_length": value}
    else:
        rec = estimate_expected_favard(
            spec, cfg.samples, cfg.ntheta, SeedSpec(cfg.seed), workers=cfg.workers, max_intervals=cfg.max_intervals
        )
        result = {"n": rec.k, "mean": rec.mean, "stderr": rec.stderr, "samples": rec.samples}
    _emit(_dump_json(_envelope(cfg, {"favard": result})), cfg.out)
    return EXIT_OK


def _load_curve(path):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from None
    return read_curve_csv(text)


def _parse_interval(text):
    try:
        lo, hi = (float(eval_angle(v)) for v in text.split(","))
    except ValueError:
        raise InputValidationError(f"--interval expects LO,HI, got {text!r}") from None
    return lo, hi


def cmd_verify(args) -> int:
    cfg = resolve_config(args)
    which = args.which
    if which == "overlap":
        a = args.a
        raw = [_parse_interval(t) for t in args.interval] if args.interval else [(-a, a)]
        report = overlap_integral(make_interval_set(raw), a, args.quad_points)
        payload, passed = report.to_json(), report.passed
    elif which in ("induction", "mattila"):
        curve = _load_curve(args.curve) if args.curve else _run_curve(cfg)
        if which == "induction":
            degree = curve.spec.degree if curve.spec is not None else cfg.degree
            c = args.c if args.c is not None else lemma_constant(degree)
            report = verify_induction(curve, c, degree=degree)
            payload, passed = report.to_json(), report.passed
        else:
            report = mattila_ratio(curve)
            payload, passed = report.to_json(), report.within_band
    else:
        report = verify_theta_invariance(
            cfg.spec, cfg.generations, cfg.theta, cfg.samples, SeedSpec(cfg.seed), workers=cfg.workers,
            max_intervals=cfg.max_intervals,
        )
        payload, passed = report.to_json(), report.passed
    # file paths are left out, like --out, so renamed inputs give identical bytes
    payload = {"check": which, "passed": passed, "report": payload}
    if which in ("induction", "mattila"):
        payload["source"] = curve.header()
    _emit(_dump_json(_envelope(cfg, payload)), cfg.out)
    return EXIT_OK if passed else EXIT_FAIL


def cmd_fit(args) -> int:
    curve = _load_curve(args.csv)
    report = fit_decay(curve)
    _emit(_dump_json(_envelope(None, {"source": curve.header(), "fit": report.to_json()})), args.out)
    return EXIT_OK


def cmd_plot(args) -> int:
    curve = _load_curve(args.csv)
    try:
        svg = decay_plot_svg(
            curve.ks, curve.means, curve.stderrs,
            metadata={"favardlab_version": __version__, "source": curve.header()},
        )
    except ValueError as exc:
        raise DataError(str(exc)) from None
    _emit(svg, args.out)
    return EXIT_OK


COMMANDS = {
    "sample": cmd_sample,
    "curve": cmd_curve,
    "favard": cmd_favard,
    "verify": cmd_verify,
    "fit": cmd_fit,
    "plot": cmd_plot,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except FavardError as exc:
        print(f"favardlab: {exc}", file=sys.stderr)
        return exc.exit_code
    except (TypeError, ValueError) as exc:
        print(f"favardlab: invalid input: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
