import math

import numpy as np
import pytest
from scipy import stats

from favardlab import FractalSpec, InputValidationError, LayoutOverflowError, Mode
from favardlab.rng import (
    MAX_LEVEL,
    SPLITMIX64_REFERENCE,
    SeedSpec,
    check_mixer,
    draw_word,
    node_angles,
    splitmix64_outputs,
    uniform_angle,
    uniform_angles,
)


def splitmix64_scalar(seed, count):
    """Plain-int SplitMix64, independent of the numpy implementation."""
    mask = (1 << 64) - 1
    state, out = seed, []
    for _ in range(count):
        state = (state + 0x9E3779B97F4A7C15) & mask
        z = state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & mask
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & mask
        out.append(z ^ (z >> 31))
    return out


def test_reference_sequence():
    seed, expected = SPLITMIX64_REFERENCE
    assert tuple(splitmix64_outputs(seed, 5)) == expected
    assert splitmix64_scalar(seed, 5) == list(expected)
    check_mixer()


def test_vectorized_matches_scalar_on_large_seeds():
    seed = (1 << 64) - 12345
    assert splitmix64_outputs(seed, 50) == splitmix64_scalar(seed, 50)


def test_counter_layout():
    # slot (sample, level) reads the mixer at master_seed + (sample * 2**20 + level) * gamma
    seed = SeedSpec(42)
    counter = 3 * MAX_LEVEL + 5
    bits = splitmix64_scalar(42 + (counter - 1) * 0x9E3779B97F4A7C15 & ((1 << 64) - 1), 1)[0]
    expected = (bits >> 11) * 2.0**-53 * (2 * math.pi / 4)
    assert uniform_angle(seed, 3, 5, 4) == expected


def test_deterministic():
    seed = SeedSpec(2024)
    assert uniform_angle(seed, 17, 3, 5) == uniform_angle(seed, 17, 3, 5)
    spec = FractalSpec(4, 8)
    a, b = draw_word(spec, seed, 9), draw_word(spec, seed, 9)
    assert np.array_equal(a.angles, b.angles)


def test_range():
    vals = uniform_angles(SeedSpec(1), np.arange(20000)[:, None], np.arange(10)[None, :], 4)
    assert vals.min() >= 0 and vals.max() < math.pi / 2


def test_uniformity_ks():
    vals = uniform_angles(SeedSpec(31337), np.arange(10**6), 0, 4) / (math.pi / 2)
    stat = stats.kstest(vals, "uniform").statistic
    # 1% critical value of the one-sample KS statistic
    assert stat < 1.63 / math.sqrt(10**6)


def test_levels_and_samples_are_decorrelated():
    vals = uniform_angles(SeedSpec(5), np.arange(50000)[:, None], np.arange(2)[None, :], 3)
    r = np.corrcoef(vals[:, 0], vals[:, 1])[0, 1]
    assert abs(r) < 0.02


def test_layout_overflow():
    with pytest.raises(LayoutOverflowError):
        uniform_angle(SeedSpec(1), 0, MAX_LEVEL, 4)
    with pytest.raises(LayoutOverflowError):
        uniform_angle(SeedSpec(1), 1 << 44, 0, 4)


@pytest.mark.parametrize("bad", [-1, 1 << 64, 1.5, True])
def test_seed_validation(bad):
    with pytest.raises(InputValidationError):
        SeedSpec(bad)


def test_per_node_words():
    spec = FractalSpec(3, 3, Mode.PER_NODE)
    word = draw_word(spec, SeedSpec(8), 2)
    assert [len(lev) for lev in word.node_angles] == [1, 3, 9]
    word.validate(spec)
    again = node_angles(SeedSpec(8), 2, 2, 9, 3)
    assert np.array_equal(again, word.node_angles[2])
    assert len(set(again.tolist())) == 9


def test_deterministic_mode_draws_zeros():
    word = draw_word(FractalSpec(4, 5, Mode.DETERMINISTIC), SeedSpec(3), 0)
    assert not np.any(word.angles)
