"""Canonical finite unions of closed intervals on the real line.

A canonical set stores sorted, pairwise separated intervals ``[lo_i, hi_i]``
with ``lo_i < hi_i < lo_{i+1}``.  Intervals that overlap or merely touch are
merged.  Endpoint comparisons are exact; no merge epsilon is applied.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import InputValidationError


def _frozen(a):
    a = np.ascontiguousarray(a, dtype=float)
    a.setflags(write=False)
    return a


class IntervalSet:
    """Immutable canonical interval union.

    Build instances with :func:`make_interval_set`; the constructor trusts
    its input to already be canonical.
    """

    __slots__ = ("lo", "hi")

    def __init__(self, lo, hi):
        self.lo = _frozen(lo)
        self.hi = _frozen(hi)

    @classmethod
    def empty(cls) -> IntervalSet:
        return cls(np.zeros(0), np.zeros(0))

    def __len__(self):
        return self.lo.shape[0]

    def __iter__(self):
        return iter(zip(self.lo.tolist(), self.hi.tolist()))

    def __eq__(self, other):
        if not isinstance(other, IntervalSet):
            return NotImplemented
        return np.array_equal(self.lo, other.lo) and np.array_equal(self.hi, other.hi)

    def __repr__(self):
        body = ", ".join(f"[{a!r}, {b!r}]" for a, b in list(self)[:6])
        more = ", ..." if len(self) > 6 else ""
        return f"IntervalSet({body}{more})"

    @property
    def measure(self) -> float:
        return measure(self)

    def is_canonical(self) -> bool:
        return bool(np.all(self.lo < self.hi) and np.all(self.hi[:-1] < self.lo[1:]))

    def to_json(self) -> list:
        return [[a, b] for a, b in self]


def _merge_sorted(lo, hi):
    """Merge intervals already sorted by ``lo``; touching pairs are joined."""
    if lo.shape[0] == 0:
        return lo, hi
    reach = np.maximum.accumulate(hi)
    start = np.empty(lo.shape[0], dtype=bool)
    start[0] = True
    start[1:] = lo[1:] > reach[:-1]
    idx = np.flatnonzero(start)
    return lo[idx], np.maximum.reduceat(hi, idx)


def make_interval_set(raw) -> IntervalSet:
    """Canonicalize an iterable of ``(lo, hi)`` pairs or an ``(m, 2)`` array."""
    arr = np.asarray(list(raw) if not isinstance(raw, np.ndarray) else raw, dtype=float)
    if arr.size == 0:
        return IntervalSet.empty()
    arr = arr.reshape(-1, 2)
    if not np.all(np.isfinite(arr)):
        raise InputValidationError("interval endpoints must be finite")
    lo, hi = arr[:, 0], arr[:, 1]
    if np.any(lo > hi):
        raise InputValidationError("every interval needs lo <= hi")
    keep = lo < hi
    lo, hi = lo[keep], hi[keep]
    order = np.argsort(lo, kind="stable")
    return IntervalSet(*_merge_sorted(lo[order], hi[order]))


def measure(s: IntervalSet) -> float:
    """Lebesgue measure: the sum of the interval lengths."""
    if len(s) == 0:
        return 0.0
    return float(np.sum(s.hi - s.lo))


def translate_scale(s: IntervalSet, scale: float, shift: float) -> IntervalSet:
    """Image of ``s`` under ``x -> scale*x + shift`` with ``scale > 0``."""
    if not scale > 0 or not math.isfinite(scale) or not math.isfinite(shift):
        raise InputValidationError("scale must be positive and finite, shift finite")
    if scale == 1.0 and shift == 0.0:
        return s
    lo = scale * s.lo + shift
    hi = scale * s.hi + shift
    # rounding can close a tiny gap; re-merge to stay canonical
    if len(s) > 1 and np.any(hi[:-1] >= lo[1:]):
        return IntervalSet(*_merge_sorted(lo, hi))
    return IntervalSet(lo, hi)


def union(a: IntervalSet, b: IntervalSet) -> IntervalSet:
    lo = np.concatenate([a.lo, b.lo])
    hi = np.concatenate([a.hi, b.hi])
    order = np.argsort(lo, kind="stable")
    return IntervalSet(*_merge_sorted(lo[order], hi[order]))


def intersect(a: IntervalSet, b: IntervalSet) -> IntervalSet:
    if len(a) == 0 or len(b) == 0:
        return IntervalSet.empty()
    # b-intervals meeting a_i in positive length form the index range [first, last)
    first = np.searchsorted(b.hi, a.lo, side="right")
    last = np.searchsorted(b.lo, a.hi, side="left")
    counts = np.maximum(last - first, 0)
    total = int(counts.sum())
    if total == 0:
        return IntervalSet.empty()
    ia = np.repeat(np.arange(len(a)), counts)
    starts = np.repeat(first, counts)
    offsets = np.arange(total) - np.repeat(np.cumsum(counts) - counts, counts)
    ib = starts + offsets
    lo = np.maximum(a.lo[ia], b.lo[ib])
    hi = np.minimum(a.hi[ia], b.hi[ib])
    keep = lo < hi
    return IntervalSet(lo[keep], hi[keep])


def difference_measure(a: IntervalSet, b: IntervalSet) -> float:
    """Measure of ``a \\ b``."""
    return max(0.0, measure(a) - measure(intersect(a, b)))


def subset_of(a: IntervalSet, b: IntervalSet, tol: float = 1e-12) -> bool:
    return difference_measure(a, b) <= tol


def _directed_hausdorff(a: IntervalSet, b: IntervalSet) -> float:
    # dist(., b) restricted to a is piecewise linear; its maximum sits at an
    # endpoint of a or at the midpoint of a gap of b lying inside a
    cand = [a.lo, a.hi]
    if len(b) > 1:
        mids = 0.5 * (b.hi[:-1] + b.lo[1:])
        idx = np.searchsorted(a.lo, mids, side="right") - 1
        inside = (idx >= 0) & (mids <= a.hi[np.clip(idx, 0, None)])
        cand.append(mids[inside])
    x = np.concatenate(cand)
    pos = np.searchsorted(b.lo, x, side="right") - 1
    has_left = pos >= 0
    left_hi = b.hi[np.clip(pos, 0, None)]
    covered = has_left & (x <= left_hi)
    left_gap = np.where(has_left, x - left_hi, np.inf)
    nxt = np.clip(pos + 1, 0, len(b) - 1)
    right_gap = np.where(pos + 1 < len(b), b.lo[nxt] - x, np.inf)
    dist = np.where(covered, 0.0, np.minimum(left_gap, right_gap))
    return float(dist.max())


def hausdorff_distance(a: IntervalSet, b: IntervalSet) -> float:
    """Hausdorff distance between two nonempty interval unions."""
    if len(a) == 0 or len(b) == 0:
        return 0.0 if len(a) == len(b) else math.inf
    return max(_directed_hausdorff(a, b), _directed_hausdorff(b, a))


def interval_set_from_json(data) -> IntervalSet:
    return make_interval_set([(float(p[0]), float(p[1])) for p in data])
