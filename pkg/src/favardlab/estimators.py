"""Monte Carlo and quadrature estimates of projection lengths and Favard length."""

from __future__ import annotations

import io
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .errors import DataError, InputValidationError, UnsupportedModeError
from .geometry import FractalSpec, Mode, RotationWord, disk_centers
from .projection import DEFAULT_MAX_INTERVALS, level_measures, projection_length, warm_up
from .rng import SeedSpec, draw_word

CSV_COLUMNS = ("k", "mean", "stderr", "samples", "theta")
MAX_KINKS = 8192


def fmt(x) -> str:
    """Round-trip decimal formatting used by every text output."""
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".17g")


@dataclass(frozen=True)
class EstimateRecord:
    k: int
    mean: float
    stderr: float
    samples: int
    theta: float | None

    def __post_init__(self):
        if self.samples < 1:
            raise InputValidationError("an estimate needs at least one sample")
        if not self.stderr >= 0:
            raise InputValidationError("stderr must be non-negative")


def sample_stats(values) -> tuple:
    """Mean and standard error with exactly rounded, order-free sums."""
    vals = [float(v) for v in values]
    n = len(vals)
    mean = math.fsum(vals) / n
    if n < 2:
        return mean, 0.0
    var = math.fsum((v - mean) ** 2 for v in vals) / (n - 1)
    return mean, math.sqrt(var / n)


@dataclass
class CurveReport:
    spec: FractalSpec
    seed: SeedSpec | None
    theta: float
    records: list
    engine: str = "recursive"
    wall_seconds: float = 0.0
    workers: int = 1
    extra: dict = field(default_factory=dict)

    @property
    def ks(self) -> np.ndarray:
        return np.array([r.k for r in self.records])

    @property
    def means(self) -> np.ndarray:
        return np.array([r.mean for r in self.records])

    @property
    def stderrs(self) -> np.ndarray:
        return np.array([r.stderr for r in self.records])

    def header(self) -> dict:
        # worker count and timings are left out so outputs do not depend on them
        cfg = dict(self.spec.to_dict()) if self.spec is not None else {}
        cfg["seed"] = self.seed.master_seed if self.seed is not None else None
        cfg["theta"] = self.theta
        cfg["engine"] = self.engine
        cfg.update(self.extra)
        return cfg

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(f"# favardlab {__version__}\n")
        buf.write("# config: " + json.dumps(self.header(), sort_keys=True) + "\n")
        buf.write(",".join(CSV_COLUMNS) + "\n")
        for r in self.records:
            theta = "" if r.theta is None else fmt(r.theta)
            buf.write(f"{r.k},{fmt(r.mean)},{fmt(r.stderr)},{r.samples},{theta}\n")
        return buf.getvalue()


def read_curve_csv(text: str) -> CurveReport:
    """Parse the CSV written by :meth:`CurveReport.to_csv`.

    Header comments are optional, so hand-made ``k,mean,stderr,samples,theta``
    tables are accepted too.
    """
    config = {}
    rows = []
    header_seen = False
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line:
            continue
        if line.startswith("#"):
            if line.startswith("# config:"):
                try:
                    config = json.loads(line[len("# config:"):])
                except json.JSONDecodeError as exc:
                    raise DataError(f"line {lineno}: bad config comment: {exc}") from None
            continue
        cells = [c.strip() for c in line.split(",")]
        if not header_seen:
            if tuple(cells) != CSV_COLUMNS:
                raise DataError(f"line {lineno}: expected header {','.join(CSV_COLUMNS)}")
            header_seen = True
            continue
        if len(cells) != len(CSV_COLUMNS):
            raise DataError(f"line {lineno}: expected {len(CSV_COLUMNS)} fields, got {len(cells)}")
        try:
            rec = EstimateRecord(
                k=int(cells[0]),
                mean=float(cells[1]),
                stderr=float(cells[2]),
                samples=int(cells[3]),
                theta=float(cells[4]) if cells[4] else None,
            )
        except (ValueError, InputValidationError) as exc:
            raise DataError(f"line {lineno}: {exc}") from None
        if not (math.isfinite(rec.mean) and math.isfinite(rec.stderr)):
            raise DataError(f"line {lineno}: non-finite value")
        rows.append(rec)
    if not rows:
        raise DataError("curve CSV has no data rows")
    rows.sort(key=lambda r: r.k)
    spec = None
    if "degree" in config:
        spec = FractalSpec(config["degree"], config.get("generations", rows[-1].k), config.get("mode", "shared"))
    seed = SeedSpec(config["seed"]) if config.get("seed") is not None else None
    theta = config.get("theta", rows[0].theta if rows[0].theta is not None else 0.0)
    extra = {k: v for k, v in config.items() if k not in {"degree", "generations", "mode", "seed", "theta", "engine"}}
    return CurveReport(spec, seed, theta, rows, engine=config.get("engine", "recursive"), extra=extra)


def _level_rows(spec_dict, master_seed, theta, start, stop, max_intervals):
    spec = FractalSpec(**spec_dict)
    seed = SeedSpec(master_seed)
    out = np.empty((stop - start, spec.generations))
    for i in range(start, stop):
        word = draw_word(spec, seed, i)
        out[i - start] = level_measures(spec, word, theta, max_intervals=max_intervals)
    return out


def _chunks(n_samples, workers):
    parts = max(1, min(n_samples, workers * 4))
    edges = np.linspace(0, n_samples, parts + 1).astype(int)
    return [(int(a), int(b)) for a, b in zip(edges[:-1], edges[1:]) if b > a]


def _run_chunks(func, args_list, workers):
    if workers <= 1 or len(args_list) <= 1:
        return [func(*a) for a in args_list]
    # compile in the parent so forked workers inherit the machine code
    warm_up()
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, *zip(*args_list)))


def sample_level_matrix(spec, theta, n_samples, seed, *, workers=1, max_intervals=DEFAULT_MAX_INTERVALS):
    """``(n_samples, n)`` array of per-sample ``L_k`` values, rows in sample order."""
    if spec.mode is Mode.PER_NODE:
        raise UnsupportedModeError("curve estimation needs shared rotations (or deterministic mode)")
    args = [
        (spec.to_dict(), seed.master_seed, float(theta), a, b, max_intervals)
        for a, b in _chunks(n_samples, workers)
    ]
    blocks = _run_chunks(_level_rows, args, workers)
    return np.concatenate(blocks, axis=0) if blocks else np.zeros((0, spec.generations))


def estimate_curve(
    spec: FractalSpec, theta: float, n_samples: int, seed: SeedSpec, *, workers: int = 1,
    max_intervals=DEFAULT_MAX_INTERVALS,
) -> CurveReport:
    """Monte Carlo estimates of ``E_k`` for ``k = 1..n`` from one set of sampled words."""
    if n_samples < 2:
        raise InputValidationError("estimate_curve needs at least 2 samples for a standard error")
    t0 = time.perf_counter()
    mat = sample_level_matrix(spec, theta, n_samples, seed, workers=workers, max_intervals=max_intervals)
    records = []
    for k in range(1, spec.generations + 1):
        mean, se = sample_stats(mat[:, k - 1])
        records.append(EstimateRecord(k, mean, se, n_samples, float(theta)))
    return CurveReport(
        spec, seed, float(theta), records, wall_seconds=time.perf_counter() - t0, workers=workers,
        extra={"samples": n_samples},
    )


def composite_simpson(values, h: float) -> float:
    """Composite Simpson rule on an odd number of equally spaced samples."""
    v = np.asarray(values, dtype=float)
    if v.shape[0] < 3 or v.shape[0] % 2 == 0:
        raise InputValidationError("Simpson's rule needs an odd number (>= 3) of samples")
    return h / 3.0 * (v[0] + v[-1] + 4.0 * v[1:-1:2].sum() + 2.0 * v[2:-1:2].sum())


def first_level_measure(d: int, omega, theta: float = 0.0) -> np.ndarray:
    """``L_1(omega)``: measure of the ``d`` projected first-level disks, vectorized in ``omega``."""
    omega = np.atleast_1d(np.asarray(omega, dtype=float))
    phase = 2.0 * np.pi * np.arange(d)[None, :] / d - omega[:, None] - theta
    centers = np.sort((d - 1) / d * np.cos(phase), axis=1)
    width = 2.0 / d
    return width + np.minimum(np.diff(centers, axis=1), width).sum(axis=1)


def exact_E1(spec: FractalSpec, theta: float = 0.0, quad_points: int = 64, *, tol=1e-10, max_points=1 << 24) -> float:
    """``E_1 = (d/2pi) * integral of L_1 over [0, 2pi/d)`` by refined composite Simpson."""
    if quad_points < 64:
        raise InputValidationError("quad_points must be at least 64")
    d = spec.degree
    span = 2.0 * math.pi / d
    n = quad_points + (quad_points % 2)

    def rule(panels):
        grid = np.linspace(0.0, span, panels + 1)
        return composite_simpson(first_level_measure(d, grid, theta), span / panels) / span

    prev = rule(n)
    while True:
        n *= 2
        cur = rule(n)
        if abs(cur - prev) < tol:
            return cur
        if n >= max_points:
            raise RuntimeError(f"exact_E1 did not converge to {tol:g} with {n} panels")
        prev = cur


def projection_kinks(spec: FractalSpec, word: RotationWord | None, theta_shift: float = 0.0) -> np.ndarray:
    """Angles in ``[theta_shift, theta_shift + pi)`` where ``|Proj_theta|`` may fail to be smooth.

    All generation-``n`` disks share the radius ``r``, so the union length only
    changes its formula when two projected centers coincide or sit exactly
    ``2r`` apart: ``|v| cos(theta - arg v)`` in ``{0, 2r, -2r}`` for a center
    difference ``v``.
    """
    centers = disk_centers(spec, word)
    r = float(spec.degree) ** -spec.generations
    i, j = np.triu_indices(centers.shape[0], k=1)
    v = centers[j] - centers[i]
    norm = np.hypot(v[:, 0], v[:, 1])
    arg = np.arctan2(v[:, 1], v[:, 0])
    keep = norm > 2 * r
    spread = np.arccos(2 * r / norm[keep])
    angles = np.concatenate([arg + math.pi / 2, arg[keep] + spread, arg[keep] - spread])
    angles = theta_shift + np.mod(angles - theta_shift, math.pi)
    return np.unique(angles)


def _kink_aware_nodes(kinks, n_theta, start):
    """Simpson panels whose edges include every kink, about ``n_theta`` panels in total."""
    edges = np.unique(np.concatenate([[start], kinks, [start + math.pi]]))
    edges = edges[np.concatenate([[True], np.diff(edges) > 1e-14])]
    edges[-1] = start + math.pi
    pieces = []
    for a, b in zip(edges[:-1], edges[1:]):
        m = 2 * max(1, round(n_theta / 2 * (b - a) / math.pi))
        pieces.append((a, b, m))
    return pieces


def favard_length(
    spec: FractalSpec, word: RotationWord | None, n_theta: int = 256, *, engine="recursive",
    theta_shift: float = 0.0, max_intervals=DEFAULT_MAX_INTERVALS, max_kinks: int = MAX_KINKS,
) -> float:
    """``(1/pi) * integral over [0, pi] of |Proj_theta|`` by composite Simpson with ``n_theta`` panels.

    The integrand has kinks.  When there are at most ``max_kinks`` candidate
    kink angles the panels are laid out so that every kink is a panel edge,
    which restores the fourth-order rate; each piece between kinks gets at
    least two panels, so the total can exceed ``n_theta``.  Larger figures
    use ``n_theta`` uniform panels.
    """
    if n_theta < 8 or n_theta % 2:
        raise InputValidationError("n_theta must be an even number >= 8")
    if spec.generations == 0:
        return 2.0
    count = spec.degree**spec.generations
    kinks = None
    if 3 * count * (count - 1) // 2 <= max_kinks:
        kinks = projection_kinks(spec, word, theta_shift)

    def length(t):
        return projection_length(spec, word, float(t), engine=engine, max_intervals=max_intervals)

    if kinks is None:
        thetas = theta_shift + np.linspace(0.0, math.pi, n_theta + 1)
        return composite_simpson([length(t) for t in thetas], math.pi / n_theta) / math.pi
    total = 0.0
    for a, b, m in _kink_aware_nodes(kinks, n_theta, theta_shift):
        total += composite_simpson([length(t) for t in np.linspace(a, b, m + 1)], (b - a) / m)
    return total / math.pi


def _favard_rows(spec_dict, master_seed, n_theta, start, stop, max_intervals):
    spec = FractalSpec(**spec_dict)
    seed = SeedSpec(master_seed)
    engine = "enumerated" if spec.mode is Mode.PER_NODE else "recursive"
    return np.array(
        [
            favard_length(spec, draw_word(spec, seed, i), n_theta, engine=engine, max_intervals=max_intervals)
            for i in range(start, stop)
        ]
    )


def estimate_expected_favard(
    spec: FractalSpec, n_samples: int, n_theta: int, seed: SeedSpec, *, workers: int = 1,
    max_intervals=DEFAULT_MAX_INTERVALS,
) -> EstimateRecord:
    """Monte Carlo mean of the Favard length over random words."""
    if n_samples < 1:
        raise InputValidationError("need at least one sample")
    if spec.generations == 0:
        return EstimateRecord(0, 2.0, 0.0, n_samples, None)
    args = [
        (spec.to_dict(), seed.master_seed, n_theta, a, b, max_intervals) for a, b in _chunks(n_samples, workers)
    ]
    values = np.concatenate(_run_chunks(_favard_rows, args, workers))
    mean, se = sample_stats(values)
    return EstimateRecord(spec.generations, mean, se, n_samples, None)
