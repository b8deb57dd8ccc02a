"""Overlap of two moving copies of an interval set, integrated over a quarter turn."""

import numpy as np

from favardlab import make_interval_set, overlap_integral, theta_star
from favardlab.verification import full_interval_overlap, overlap_profile

a = 0.25
ts = theta_star()
print(f"copies of [-a, a] first meet at theta* = {ts:.12f}")

full = overlap_integral(make_interval_set([(-a, a)]), a)
print(f"I = [-a, a]: quadrature {full.integral:.12f}, closed form {full_interval_overlap(a):.12f}")
print(f"  bounds [{full.lower_bound:.4f}, {full.upper_bound:.4f}]")

grid = np.linspace(0, np.pi / 2, 9)
print("  f(theta):", " ".join(f"{v:.3f}" for v in overlap_profile(make_interval_set([(-a, a)]), a, grid)))

rng = np.random.default_rng(0)
worst = np.inf
for _ in range(50):
    pts = np.sort(rng.uniform(-a, a, 2 * int(rng.integers(1, 6))))
    rep = overlap_integral(make_interval_set(pts.reshape(-1, 2)), a)
    worst = min(worst, rep.integral / rep.lower_bound)
print(f"50 random sets: smallest integral / lower bound = {worst:.3f}")
