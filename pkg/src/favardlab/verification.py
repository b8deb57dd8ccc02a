"""Numerical checks of the overlap estimate, the inductive inequality and the 1/n decay."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import least_squares

from .errors import DataError, InputValidationError, UnsupportedModeError
from .estimators import CurveReport, estimate_curve
from .geometry import FractalSpec, Mode
from .intervals import IntervalSet, measure
from .projection import DEFAULT_MAX_INTERVALS
from .rng import SeedSpec

SQRT2 = math.sqrt(2.0)


def theta_star(a: float = 1.0, tol: float = 1e-14) -> float:
    """First angle where ``I + 3a sin`` and ``I + 3a cos`` of ``I = [-a, a]`` meet.

    Solves ``cos t - sin t = 2/3`` on ``[0, pi/4]`` by bisection; the answer
    does not depend on ``a``.
    """
    if not a > 0:
        raise InputValidationError("a must be positive")
    lo, hi = 0.0, math.pi / 4
    # cos - sin - 2/3 is decreasing on [0, pi/4]: +1/3 at 0, -2/3 at pi/4
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if math.cos(mid) - math.sin(mid) - 2.0 / 3.0 > 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def full_interval_overlap(a: float) -> float:
    """Closed form of the overlap integral for ``I = [-a, a]``.

    There ``f(t) = 2a - 3a|cos t - sin t|`` between ``t*`` and ``pi/2 - t*``
    and zero elsewhere; integrate over ``[t*, pi/4]`` and double.
    """
    ts = theta_star(a)
    return 2.0 * (2.0 * a * (math.pi / 4 - ts) - 3.0 * a * (SQRT2 - (math.sin(ts) + math.cos(ts))))


def overlap_profile(intervals: IntervalSet, a: float, thetas) -> np.ndarray:
    """``f(t) = |(I + 3a sin t) & (I + 3a cos t)|`` at each angle.

    Both copies are translates of ``I``, so ``f(t) = |I & (I + delta)|`` with
    ``delta = 3a (cos t - sin t)``, summed pairwise over the components of
    ``I`` (which are disjoint).
    """
    thetas = np.atleast_1d(np.asarray(thetas, dtype=float))
    m = len(intervals)
    if m == 0:
        return np.zeros(thetas.shape)
    delta = 3.0 * a * (np.cos(thetas) - np.sin(thetas))
    lo, hi = intervals.lo, intervals.hi
    out = np.empty(thetas.shape)
    step = max(1, (1 << 22) // (m * m))
    for s in range(0, thetas.shape[0], step):
        dl = delta[s : s + step, None, None]
        top = np.minimum(hi[None, :, None], hi[None, None, :] + dl)
        bot = np.maximum(lo[None, :, None], lo[None, None, :] + dl)
        out[s : s + step] = np.maximum(top - bot, 0.0).sum(axis=(1, 2))
    return out


@dataclass
class OverlapReport:
    a: float
    intervals: IntervalSet
    integral: float
    error_estimate: float
    points: int
    lower_bound: float
    upper_bound: float
    symmetric_lower_bound: float
    theta_star: float
    vanishes_outside: bool
    coincides_at_quarter: bool
    lower_ok: bool
    upper_ok: bool

    @property
    def passed(self) -> bool:
        return self.lower_ok and self.upper_ok and self.vanishes_outside and self.coincides_at_quarter

    def to_json(self) -> dict:
        return {
            "a": self.a,
            "intervals": self.intervals.to_json(),
            "integral": self.integral,
            "error_estimate": self.error_estimate,
            "points": self.points,
            "lower_bound": self.lower_bound,
            "upper_bound": self.upper_bound,
            "symmetric_lower_bound": self.symmetric_lower_bound,
            "theta_star": self.theta_star,
            "vanishes_outside": self.vanishes_outside,
            "coincides_at_quarter": self.coincides_at_quarter,
            "lower_ok": self.lower_ok,
            "upper_ok": self.upper_ok,
            "passed": self.passed,
        }


def overlap_integral(
    intervals: IntervalSet, a: float, quad_points: int = 1024, *, rtol: float = 1e-9, max_points: int = 1 << 24
) -> OverlapReport:
    """Integrate ``f`` over ``[0, pi/2]`` and compare with the two-sided bound.

    Composite midpoint, doubling the panel count until two successive
    values differ by less than ``rtol * max(1, |I|**2 / a)``.  ``f`` has kinks
    wherever endpoints of the two copies cross, so a rule that never samples
    the panel edges is used.
    """
    if not a > 0:
        raise InputValidationError("a must be positive")
    if quad_points < 1024:
        raise InputValidationError("quad_points must be at least 2**10")
    slack = 1e-12 * a
    if len(intervals) and (intervals.lo[0] < -a - slack or intervals.hi[-1] > a + slack):
        raise InputValidationError(f"interval set must lie inside [-{a}, {a}]")

    size = measure(intervals)
    scale = max(1.0, size * size / a)
    half_pi = math.pi / 2

    def midpoint(n):
        h = half_pi / n
        grid = (np.arange(n) + 0.5) * h
        vals = overlap_profile(intervals, a, grid)
        return h * float(np.sum(vals)), grid, vals

    n = quad_points
    prev, _, _ = midpoint(n)
    while True:
        n *= 2
        cur, grid, vals = midpoint(n)
        diff = abs(cur - prev)
        if diff < rtol * scale:
            break
        if n >= max_points:
            raise RuntimeError(f"overlap integral did not converge with {n} panels")
        prev = cur

    ts = theta_star(a)
    outside = (grid < ts - 1e-9) | (grid > half_pi - ts + 1e-9)
    vanishes = bool(np.all(vals[outside] <= 1e-12))
    at_quarter = float(overlap_profile(intervals, a, [math.pi / 4])[0])
    coincides = abs(at_quarter - size) <= 1e-12

    err = diff / 3.0
    lower = size * size / (6.0 * SQRT2 * a)
    upper = size * size / (3.0 * a)
    return OverlapReport(
        a=a,
        intervals=intervals,
        integral=cur,
        error_estimate=err,
        points=n,
        lower_bound=lower,
        upper_bound=upper,
        symmetric_lower_bound=size * size / (3.0 * SQRT2 * a),
        theta_star=ts,
        vanishes_outside=vanishes,
        coincides_at_quarter=coincides,
        lower_ok=cur >= lower - err,
        upper_ok=cur <= upper + err,
    )


def lemma_constant(d: int, *, with_density: bool = True) -> float:
    """Constant ``c_d`` in ``E_k <= E_{k-1} - c_d E_{k-1}**2``.

    Derivation.  Fix the inner angles, let ``R`` be the unit-scale level
    ``k-1`` projection with ``L = |R|``.  The level-``k`` figure is ``d``
    copies ``I + x_j`` with ``I = R/d`` inside ``[-1/d, 1/d]`` and
    ``x_j = (d-1)/d cos(2 pi j/d - w - theta)``.  For any pair of copies
    ``L_k <= L - |(I + x_p) & (I + x_q)|``.  For adjacent copies the shift
    ``x_{j+1} - x_j = A sin(psi_j)`` with ``A = 2 (d-1)/d sin(pi/d)`` and the
    ``psi_j`` spaced ``2 pi/d`` apart; as ``w`` runs over ``[0, 2 pi/d)`` they
    sweep the circle exactly once.  With ``g(s) = |I & (I + s)|``,
    ``integral g(s) ds = |I|**2``, and substituting ``s = A sin(psi)`` near each
    of the two zeros of ``sin`` gives ``integral g(A sin psi) dpsi >= 2 |I|**2 / A``.
    ``g`` vanishes unless ``|s| < 2/d``, i.e. unless ``psi`` is within
    ``beta = arcsin(1 / ((d-1) sin(pi/d)))`` of a zero, so at most ``2 M_d``
    adjacent pairs overlap at once, ``M_d = 1 + floor(beta d / pi)``
    (``M_d = 1`` for ``d <= 8``).  Subtracting the largest overlap and
    averaging over ``w`` with density ``d/(2 pi)``:

        E_w L_k <= L - L**2 / (4 pi (d-1) sin(pi/d) M_d).

    Like the half-range bound used for ``d = 4``, only half of this is kept:

        c_d = 1 / (8 pi (d-1) sin(pi/d) M_d),

    which is ``sqrt(2)/(24 pi)`` for ``d = 4``.  With ``with_density=False``
    the ``d/(2 pi)`` density is dropped (``sqrt(2)/48`` for ``d = 4``).
    """
    if d < 3:
        raise InputValidationError("degree must be >= 3")
    s = math.sin(math.pi / d)
    beta = math.asin(1.0 / ((d - 1) * s))
    overlaps = 1 + math.floor(beta * d / math.pi)
    c = 1.0 / (8.0 * math.pi * (d - 1) * s * overlaps)
    if not with_density:
        c *= 2.0 * math.pi / d
    return c


@dataclass
class InductionRow:
    k: int
    e_k: float
    e_prev: float
    slack: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.slack >= -self.tolerance


@dataclass
class InductionReport:
    c: float
    c_without_density: float
    rows: list

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.rows)

    def to_json(self) -> dict:
        return {
            "c": self.c,
            "c_without_density": self.c_without_density,
            "passed": self.passed,
            "rows": [
                {"k": r.k, "E_k": r.e_k, "E_prev": r.e_prev, "slack": r.slack, "tolerance": r.tolerance,
                 "passed": r.passed}
                for r in self.rows
            ],
        }


def _curve_arrays(curve):
    if isinstance(curve, CurveReport):
        return curve.ks.astype(float), curve.means, curve.stderrs
    ks, means, *rest = curve
    ks = np.asarray(ks, dtype=float)
    means = np.asarray(means, dtype=float)
    ses = np.asarray(rest[0], dtype=float) if rest else np.zeros_like(means)
    if not (ks.shape == means.shape == ses.shape):
        raise DataError("k, mean and stderr columns differ in length")
    return ks, means, ses


def verify_induction(curve, c: float | None = None, *, degree: int | None = None) -> InductionReport:
    """Check ``E_k <= E_{k-1} - c E_{k-1}**2`` row by row with a 3-sigma allowance."""
    ks, e, se = _curve_arrays(curve)
    if degree is None:
        spec = curve.spec if isinstance(curve, CurveReport) else None
        degree = spec.degree if spec is not None else 4
    if c is None:
        c = lemma_constant(degree)
    if len(ks) < 2:
        raise DataError("induction check needs at least two levels")
    if np.any(np.diff(ks) != 1):
        raise DataError("curve levels must be consecutive")
    rows = []
    for i in range(1, len(ks)):
        slack = e[i - 1] - c * e[i - 1] ** 2 - e[i]
        tol = 3.0 * (se[i] + se[i - 1] + 2.0 * e[i - 1] * se[i - 1])
        rows.append(InductionRow(int(ks[i]), float(e[i]), float(e[i - 1]), float(slack), float(tol)))
    alt = c * 2.0 * math.pi / degree
    return InductionReport(c=c, c_without_density=alt, rows=rows)


@dataclass
class ModelFit:
    name: str
    params: dict
    stderr: dict
    rss: float

    def to_json(self) -> dict:
        return {"params": self.params, "stderr": self.stderr, "rss": self.rss}


@dataclass
class FitReport:
    ks: list
    means: list
    models: dict
    k_times_mean: list

    @property
    def exponent(self) -> float:
        return self.models["power"].params["p"]

    @property
    def best_model(self) -> str:
        core = ("power", "inverse", "sqrt_log")
        return min(core, key=lambda name: self.models[name].rss)

    def to_json(self) -> dict:
        return {
            "k": self.ks,
            "mean": self.means,
            "k_times_mean": self.k_times_mean,
            "best_model": self.best_model,
            "models": {name: fit.to_json() for name, fit in self.models.items()},
        }


def _linear_fit(x_cols, y):
    X = np.column_stack(x_cols)
    coef, *_ = np.linalg.lstsq(X, y, rcond=None)
    resid = y - X @ coef
    rss = float(resid @ resid)
    dof = max(1, len(y) - X.shape[1])
    cov = rss / dof * np.linalg.inv(X.T @ X)
    return coef, np.sqrt(np.diag(cov)), rss


def fit_decay(curve) -> FitReport:
    """Least-squares fits of ``log E_k`` against three decay laws.

    * ``power``:    ``log C - p log k``
    * ``inverse``:  ``log C - log k``
    * ``sqrt_log``: ``log C - c sqrt(log k)``

    A fourth ``shifted`` model ``log C - log(k + k0)`` is reported as a
    diagnostic of how far the data are from their asymptotic regime.
    Residuals are sums of squares in log space.
    """
    ks, e, _ = _curve_arrays(curve)
    if len(ks) < 4:
        raise DataError("decay fit needs at least four levels")
    if np.any(e <= 0) or np.any(ks <= 0):
        raise DataError("decay fit needs positive levels and means")
    y = np.log(e)
    logk = np.log(ks)
    one = np.ones_like(y)
    models = {}

    coef, se, rss = _linear_fit([one, -logk], y)
    C = math.exp(coef[0])
    models["power"] = ModelFit("power", {"C": C, "p": float(coef[1])}, {"C": C * float(se[0]), "p": float(se[1])}, rss)

    z = y + logk
    logc = float(np.mean(z))
    resid = z - logc
    rss = float(resid @ resid)
    se_logc = float(np.std(z, ddof=1) / math.sqrt(len(z)))
    C = math.exp(logc)
    models["inverse"] = ModelFit("inverse", {"C": C}, {"C": C * se_logc}, rss)

    coef, se, rss = _linear_fit([one, -np.sqrt(logk)], y)
    C = math.exp(coef[0])
    models["sqrt_log"] = ModelFit(
        "sqrt_log", {"C": C, "c": float(coef[1])}, {"C": C * float(se[0]), "c": float(se[1])}, rss
    )

    def shifted_resid(par):
        return y - (par[0] - np.log(ks + par[1]))

    sol = least_squares(shifted_resid, x0=[logc, 0.0], bounds=([-np.inf, -0.999], [np.inf, np.inf]))
    rss = float(sol.fun @ sol.fun)
    models["shifted"] = ModelFit("shifted", {"C": math.exp(sol.x[0]), "k0": float(sol.x[1])}, {}, rss)

    return FitReport(ks.tolist(), e.tolist(), models, (ks * e).tolist())


@dataclass
class MattilaReport:
    ns: list
    ratios: list
    r_min: float
    r_max: float

    @property
    def within_band(self) -> bool:
        return all(self.r_min <= r <= self.r_max for r in self.ratios)

    def band_factor(self, lo: int, hi: int) -> float:
        """``max / min`` of ``n * value`` over ``lo <= n <= hi``."""
        sel = [r for n, r in zip(self.ns, self.ratios) if lo <= n <= hi]
        if not sel:
            raise DataError(f"no levels in [{lo}, {hi}]")
        return max(sel) / min(sel)

    def to_json(self) -> dict:
        return {
            "n": self.ns,
            "n_times_value": self.ratios,
            "r_min": self.r_min,
            "r_max": self.r_max,
            "within_band": self.within_band,
        }


def mattila_ratio(curve, *, reference=(2, 5), factor: float = 4.0) -> MattilaReport:
    """Table of ``n * value`` with an observational band.

    The band is ``[min_ref / factor, factor * max_ref]`` where ``min_ref`` and
    ``max_ref`` are taken over ``n`` in ``reference``.  This only records that
    ``n * Fav`` stays bounded away from 0 and infinity on the data at hand.
    """
    ks, e, _ = _curve_arrays(curve)
    ratios = ks * e
    ref = ratios[(ks >= reference[0]) & (ks <= reference[1])]
    if ref.size == 0:
        raise DataError(f"no levels in the reference range {reference}")
    return MattilaReport(
        [int(k) for k in ks], ratios.tolist(), float(ref.min() / factor), float(ref.max() * factor)
    )


@dataclass
class ThetaInvarianceReport:
    k: int
    thetas: list
    means: list
    stderrs: list
    z_scores: dict = field(default_factory=dict)

    @property
    def max_abs_z(self) -> float:
        return max((abs(z) for z in self.z_scores.values()), default=0.0)

    @property
    def passed(self) -> bool:
        return self.max_abs_z <= 3.0

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "theta": self.thetas,
            "mean": self.means,
            "stderr": self.stderrs,
            "z": {f"{i},{j}": z for (i, j), z in self.z_scores.items()},
            "max_abs_z": self.max_abs_z,
            "passed": self.passed,
        }


def verify_theta_invariance(
    spec: FractalSpec, k: int, thetas, n_samples: int, seed: SeedSpec, *, workers: int = 1,
    max_intervals=DEFAULT_MAX_INTERVALS,
) -> ThetaInvarianceReport:
    """Pairwise z-tests that ``E_k`` does not depend on the projection angle.

    Only expectations over random rotations are invariant; a single
    deterministic figure has angle-dependent projections, so deterministic
    mode is rejected.
    """
    if spec.mode is not Mode.SHARED:
        raise UnsupportedModeError("angle invariance is a statement about random shared rotations")
    thetas = [float(t) for t in thetas]
    if len(thetas) < 2:
        raise InputValidationError("need at least two angles")
    sub = spec.with_generations(k)
    means, ses = [], []
    for t in thetas:
        rec = estimate_curve(sub, t, n_samples, seed, workers=workers, max_intervals=max_intervals).records[-1]
        means.append(rec.mean)
        ses.append(rec.stderr)
    report = ThetaInvarianceReport(k, thetas, means, ses)
    for i, j in itertools.combinations(range(len(thetas)), 2):
        den = math.hypot(ses[i], ses[j])
        diff = means[i] - means[j]
        report.z_scores[(i, j)] = diff / den if den > 0 else (0.0 if diff == 0 else math.inf)
    return report
