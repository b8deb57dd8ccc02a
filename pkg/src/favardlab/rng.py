"""Counter-based random angles.

Every angle is a pure function of ``(master_seed, sample_index, level_index)``
so samples can be drawn in any order, by any number of workers, with
identical results.  The bits come from the SplitMix64 finalizer applied to
``master_seed + counter * 0x9E3779B97F4A7C15 (mod 2**64)`` where

    counter = sample_index * 2**20 + level_index

and ``level_index = k - 1`` for the angle of level ``k``.

Per-node words need ``d**(k-1)`` angles per level.  For those the pair
``(sample_index, level_index)`` first selects a substream key
``K = mix(master_seed + counter * gamma)`` and the node angle is
``mix(K + (node_index + 1) * gamma)``, i.e. node ``node_index`` reads the
``node_index``-th output of a SplitMix64 generator seeded with ``K``.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import numpy as np

from .errors import InputValidationError, LayoutOverflowError
from .geometry import FractalSpec, Mode, RotationWord

GOLDEN_GAMMA = 0x9E3779B97F4A7C15
LEVEL_BITS = 20
MAX_LEVEL = 1 << LEVEL_BITS
MAX_SAMPLE = 1 << (64 - LEVEL_BITS)
_MASK = (1 << 64) - 1

# First outputs of the reference SplitMix64 generator seeded with 1234567.
SPLITMIX64_REFERENCE = (
    1234567,
    (
        6457827717110365317,
        3203168211198807973,
        9817491932198370423,
        4593380528125082431,
        16408922859458223821,
    ),
)


def mix64(z):
    """SplitMix64 output finalizer on uint64 arrays (wrapping arithmetic)."""
    z = np.asarray(z, dtype=np.uint64)
    with np.errstate(over="ignore"):
        z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
        return z ^ (z >> np.uint64(31))


def _offset(base, counter):
    """``base + counter * gamma`` modulo 2**64, elementwise."""
    with np.errstate(over="ignore"):
        return np.asarray(base, dtype=np.uint64) + np.asarray(counter, dtype=np.uint64) * np.uint64(
            GOLDEN_GAMMA
        )


def splitmix64_outputs(seed: int, count: int) -> list:
    """The first ``count`` outputs of a sequential SplitMix64 generator."""
    return [int(v) for v in mix64(_offset(np.uint64(seed), np.arange(1, count + 1, dtype=np.uint64)))]


@functools.cache
def check_mixer() -> None:
    """Compare the mixer with the published SplitMix64 sequence; raise on mismatch."""
    seed, expected = SPLITMIX64_REFERENCE
    got = tuple(splitmix64_outputs(seed, len(expected)))
    if got != expected:
        raise RuntimeError(f"SplitMix64 self-test failed: {got} != {expected}")


def _to_unit(bits):
    # top 53 bits -> [0, 1)
    return (np.asarray(bits, dtype=np.uint64) >> np.uint64(11)).astype(np.float64) * 2.0**-53


@dataclass(frozen=True)
class SeedSpec:
    master_seed: int

    def __post_init__(self):
        seed = self.master_seed
        if isinstance(seed, bool) or int(seed) != seed or not 0 <= seed <= _MASK:
            raise InputValidationError(f"master seed must be an unsigned 64-bit integer, got {seed!r}")
        object.__setattr__(self, "master_seed", int(seed))


def _counters(sample_index, level_index):
    s = np.asarray(sample_index, dtype=np.int64)
    lv = np.asarray(level_index, dtype=np.int64)
    if np.any(s < 0) or np.any(lv < 0):
        raise InputValidationError("sample and level indices must be non-negative")
    if np.any(lv >= MAX_LEVEL):
        raise LayoutOverflowError(f"level index must be < 2**{LEVEL_BITS}")
    if np.any(s >= MAX_SAMPLE):
        raise LayoutOverflowError(f"sample index must be < 2**{64 - LEVEL_BITS}")
    return (s.astype(np.uint64) << np.uint64(LEVEL_BITS)) | lv.astype(np.uint64)


def _scale(u, d):
    limit = 2.0 * math.pi / d
    ang = u * limit
    # u < 1 but the product may round up to the excluded endpoint
    return np.where(ang >= limit, np.nextafter(limit, 0.0), ang)


def uniform_angles(seed: SeedSpec, sample_index, level_index, d: int) -> np.ndarray:
    """Vectorized :func:`uniform_angle` over broadcastable index arrays."""
    check_mixer()
    bits = mix64(_offset(np.uint64(seed.master_seed), _counters(sample_index, level_index)))
    return _scale(_to_unit(bits), d)


def uniform_angle(seed: SeedSpec, sample_index: int, level_index: int, d: int) -> float:
    """A uniform angle in ``[0, 2*pi/d)`` for one ``(sample, level)`` slot."""
    return float(uniform_angles(seed, sample_index, level_index, d))


def node_angles(seed: SeedSpec, sample_index: int, level_index: int, count: int, d: int) -> np.ndarray:
    """``count`` per-node angles for one level of a per-node word."""
    check_mixer()
    key = mix64(_offset(np.uint64(seed.master_seed), _counters(sample_index, level_index)))
    bits = mix64(_offset(key, np.arange(1, count + 1, dtype=np.uint64)))
    return _scale(_to_unit(bits), d)


def draw_word(spec: FractalSpec, seed: SeedSpec, sample_index: int) -> RotationWord:
    """The rotation word of Monte Carlo sample ``sample_index``."""
    n, d = spec.generations, spec.degree
    if spec.mode is Mode.DETERMINISTIC:
        return RotationWord.zeros(spec)
    if spec.mode is Mode.PER_NODE:
        return RotationWord.per_node(
            [node_angles(seed, sample_index, k, d**k, d) for k in range(n)]
        )
    return RotationWord.shared(uniform_angles(seed, sample_index, np.arange(n), d))
