"""Orthogonal projections of the disk construction onto lines.

Two engines compute ``Proj_theta D_n``:

* the recursive engine exploits that every level-``k`` figure is ``d``
  translated copies of the scaled level-``(k-1)`` figure built from the inner
  angles, so ``R_k = U_j (R_{k-1}/d + (d-1)/d * cos(2*pi*j/d - omega - theta))``
  starting from ``R_0 = [-1, 1]``.  Angles are consumed innermost first, so
  one pass over a word of length ``n`` yields ``L_k = |R_k|`` for every
  ``k``, each built from the innermost ``k`` angles.
* the enumerated engine projects all ``d**n`` disks and unions them.  It
  works in every mode and serves as the oracle for the recursive one.
"""

from __future__ import annotations

import math

import numpy as np

from ._kernels import expand_union
from .errors import ResourceLimitError, UnsupportedModeError
from .geometry import Disk, FractalSpec, Mode, RotationWord, disk_centers
from .intervals import IntervalSet, make_interval_set

DEFAULT_MAX_INTERVALS = 30_000_000


def warm_up() -> None:
    """Trigger JIT compilation of the merge kernel."""
    level_measures(FractalSpec(3, 2, Mode.DETERMINISTIC), None)


def project_disk(disk: Disk, theta: float):
    """Projection of a disk onto the line at angle ``theta``, as ``(lo, hi)``."""
    t = disk.cx * math.cos(theta) + disk.cy * math.sin(theta)
    return (t - disk.r, t + disk.r)


def level_offsets(d: int, omega: float, theta: float) -> np.ndarray:
    """Sorted projected centers of the ``d`` first-level copies."""
    phase = 2.0 * np.pi * np.arange(d) / d - omega - theta
    return np.sort((d - 1) / d * np.cos(phase))


def _shared_angles(spec: FractalSpec, word: RotationWord | None) -> np.ndarray:
    if spec.mode is Mode.PER_NODE:
        raise UnsupportedModeError(
            "the recursive engine needs identical siblings; "
            "use projection_set_enumerated for per-node words"
        )
    if spec.mode is Mode.DETERMINISTIC or word is None:
        return np.zeros(spec.generations)
    word.validate(spec)
    return np.asarray(word.angles, dtype=float)


def _recurse(spec, word, theta, max_intervals, keep_last):
    d, n = spec.degree, spec.generations
    angles = _shared_angles(spec, word)
    lo = np.array([-1.0])
    hi = np.array([1.0])
    measures = np.empty(n)
    fd = float(d)
    empty = np.zeros(0)
    for k in range(1, n + 1):
        offsets = level_offsets(d, angles[n - k], theta)
        last = k == n
        if last and not keep_last:
            _, measures[k - 1] = expand_union(lo, hi, offsets, fd, empty, empty, False)
            break
        size = lo.shape[0] * d
        if size > max_intervals:
            raise ResourceLimitError(f"projection level {k} (degree {d})", size, max_intervals)
        out_lo = np.empty(size)
        out_hi = np.empty(size)
        count, measures[k - 1] = expand_union(lo, hi, offsets, fd, out_lo, out_hi, True)
        lo = out_lo[:count].copy()
        hi = out_hi[:count].copy()
    return measures, lo, hi


def projection_set_recursive(
    spec: FractalSpec, word: RotationWord | None, theta: float = 0.0, *, max_intervals=DEFAULT_MAX_INTERVALS
) -> IntervalSet:
    """``Proj_theta D_n`` at unit scale via the translate-scale recursion."""
    _, lo, hi = _recurse(spec, word, theta, max_intervals, keep_last=True)
    return IntervalSet(lo, hi)


def level_measures(
    spec: FractalSpec, word: RotationWord | None, theta: float = 0.0, *, max_intervals=DEFAULT_MAX_INTERVALS
) -> np.ndarray:
    """``[L_1, ..., L_n]`` where ``L_k`` uses the innermost ``k`` angles.

    The last level is measured while merging and never stored, so the cap
    only applies to the intermediate sets.
    """
    measures, _, _ = _recurse(spec, word, theta, max_intervals, keep_last=False)
    return measures


def projection_length(
    spec: FractalSpec, word: RotationWord | None, theta: float = 0.0, *, engine="recursive",
    max_intervals=DEFAULT_MAX_INTERVALS,
) -> float:
    if spec.generations == 0:
        return 2.0
    if engine == "recursive":
        return float(level_measures(spec, word, theta, max_intervals=max_intervals)[-1])
    if engine == "enumerated":
        return projection_set_enumerated(spec, word, theta, max_intervals=max_intervals).measure
    raise ValueError(f"unknown engine {engine!r}")


def projection_set_enumerated(
    spec: FractalSpec, word: RotationWord | None, theta: float = 0.0, *, max_intervals=DEFAULT_MAX_INTERVALS
) -> IntervalSet:
    """Union of the projections of every generation-``n`` disk."""
    count = spec.degree**spec.generations
    if count > max_intervals:
        raise ResourceLimitError(f"enumerating generation {spec.generations}", count, max_intervals)
    centers = disk_centers(spec, word, max_disks=max_intervals)
    r = float(spec.degree) ** -spec.generations
    t = centers[:, 0] * math.cos(theta) + centers[:, 1] * math.sin(theta)
    return make_interval_set(np.stack([t - r, t + r], axis=1))
