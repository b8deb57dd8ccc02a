"""Favard length of the unrotated figures and the expectation over random rotations."""

from favardlab import FractalSpec, Mode, SeedSpec, estimate_expected_favard, favard_length

for n in range(0, 5):
    spec = FractalSpec(4, n, Mode.DETERMINISTIC)
    coarse, fine = favard_length(spec, None, 256), favard_length(spec, None, 512)
    print(f"Fav(G_{n}) = {fine:.9f}  (256 -> 512 panels moves it by {abs(fine - coarse):.1e})")

for n in (2, 4, 6):
    rec = estimate_expected_favard(FractalSpec(4, n), 100, 64, SeedSpec(5))
    print(f"E Fav(D_{n}) = {rec.mean:.4f} +- {rec.stderr:.4f}, n * E = {n * rec.mean:.3f}")
