"""Project the construction onto lines and compare the two engines."""

import math

from favardlab import (
    FractalSpec,
    RotationWord,
    SeedSpec,
    draw_word,
    level_measures,
    projection_set_enumerated,
    projection_set_recursive,
)

first = FractalSpec(4, 1)
for omega in (0.0, math.pi / 4):
    s = projection_set_recursive(first, RotationWord.shared([omega]), 0.0)
    print(f"omega = {omega:.4f}: {s.to_json()}  length {s.measure:.4f}")

# a deeper random figure: the recursion and brute-force enumeration agree
spec = FractalSpec(5, 5)
word = draw_word(spec, SeedSpec(3), 0)
fast = projection_set_recursive(spec, word, 0.8)
slow = projection_set_enumerated(spec, word, 0.8)
print(f"d=5 n=5: {len(fast)} intervals, |recursive - enumerated| = {abs(fast.measure - slow.measure):.1e}")

# one pass gives L_k for every k, each built from the innermost k angles
spec = FractalSpec(4, 10)
for i in range(3):
    ls = level_measures(spec, draw_word(spec, SeedSpec(2024), i), 0.0)
    print(f"sample {i}: " + " ".join(f"{v:.3f}" for v in ls))
