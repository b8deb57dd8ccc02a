"""Compiled inner loop of the translate-scale projection recursion."""

import numpy as np
from numba import njit


@njit(cache=True)
def _neumaier_add(s, comp, x):
    t = s + x
    if abs(s) >= abs(x):
        comp += (s - t) + x
    else:
        comp += (x - t) + s
    return t, comp


@njit(cache=True)
def expand_union(lo, hi, offsets, d, out_lo, out_hi, store):
    """Union of the copies ``lo/d + offsets[j]`` of one canonical set.

    Every copy is itself sorted, so this is a k-way merge of ``len(offsets)``
    runs that coalesces overlapping or touching intervals on the fly.  The
    current minimum run is drained until its head passes the second smallest
    head, which makes well separated copies nearly free.

    Returns ``(count, measure)``; merged intervals are written to
    ``out_lo``/``out_hi`` only when ``store`` is true.
    """
    m = lo.shape[0]
    nc = offsets.shape[0]
    if m == 0:
        return 0, 0.0
    heads = np.zeros(nc, np.int64)
    head_val = np.empty(nc)
    for j in range(nc):
        head_val[j] = lo[0] / d + offsets[j]
    count = 0
    s = 0.0
    comp = 0.0
    cur_lo = 0.0
    cur_hi = -np.inf
    remaining = m * nc
    while remaining > 0:
        best = 0
        v = head_val[0]
        second = np.inf
        for j in range(1, nc):
            w = head_val[j]
            if w < v:
                second = v
                v = w
                best = j
            elif w < second:
                second = w
        h = heads[best]
        off = offsets[best]
        while True:
            vh = hi[h] / d + off
            if v <= cur_hi:
                if vh > cur_hi:
                    cur_hi = vh
            else:
                if cur_hi > -np.inf:
                    if store:
                        out_lo[count] = cur_lo
                        out_hi[count] = cur_hi
                    s, comp = _neumaier_add(s, comp, cur_hi - cur_lo)
                    count += 1
                cur_lo = v
                cur_hi = vh
            h += 1
            remaining -= 1
            if h >= m:
                v = np.inf
                break
            v = lo[h] / d + off
            if v > second:
                break
        heads[best] = h
        head_val[best] = v
    if store:
        out_lo[count] = cur_lo
        out_hi[count] = cur_hi
    s, comp = _neumaier_add(s, comp, cur_hi - cur_lo)
    return count + 1, s + comp
