"""Build a few generations of the rotated disk construction and check its geometry.

Writes ``construction.svg`` (generation 3 for one random word) to the
current directory.
"""

from favardlab import FractalSpec, SeedSpec, draw_word, enumerate_disks, validate_geometry

spec = FractalSpec(4, 3)
word = draw_word(spec, SeedSpec(7), 0)
print("rotation angles per level:", [round(float(w), 4) for w in word.angles])

prev = enumerate_disks(spec.with_generations(0))
for n in range(1, spec.generations + 1):
    disks = enumerate_disks(spec.with_generations(n), word.prefix(n))
    report = validate_geometry(prev, disks)
    print(
        f"generation {n}: {len(disks):3d} disks of radius {disks[0].r:.5f}, "
        f"tangency error {report.max_tangency_error:.1e}, "
        f"closest siblings {report.min_sibling_gap:.4f} apart, {'ok' if report.passed else 'FAILED'}"
    )
    prev = disks

size = 400
circles = "\n".join(
    f'<circle cx="{size / 2 * (1 + dk.cx):.2f}" cy="{size / 2 * (1 - dk.cy):.2f}" r="{size / 2 * dk.r:.2f}"/>'
    for dk in prev
)
with open("construction.svg", "w") as fh:
    fh.write(
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}">\n'
        f'<circle cx="{size / 2}" cy="{size / 2}" r="{size / 2 - 1}" fill="none" stroke="#999"/>\n'
        f'<g fill="#1f77b4">\n{circles}\n</g>\n</svg>\n'
    )
print("wrote construction.svg")
