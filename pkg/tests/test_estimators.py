import math

import numpy as np
import pytest
from scipy import integrate

from favardlab import DataError, FractalSpec, InputValidationError, Mode, RotationWord, UnsupportedModeError
from favardlab.estimators import (
    CurveReport,
    composite_simpson,
    estimate_curve,
    estimate_expected_favard,
    exact_E1,
    favard_length,
    first_level_measure,
    projection_kinks,
    read_curve_csv,
    sample_stats,
)
from favardlab.intervals import make_interval_set
from favardlab.projection import project_disk, projection_length
from favardlab.geometry import enumerate_disks
from favardlab.rng import SeedSpec


def brute_L1(d, omega, theta):
    disks = enumerate_disks(FractalSpec(d, 1), RotationWord.shared([omega]))
    return make_interval_set([project_disk(dk, theta) for dk in disks]).measure


def test_first_level_measure_against_enumeration():
    rng = np.random.default_rng(3)
    for d in (3, 4, 5, 7):
        for _ in range(20):
            w, t = rng.uniform(0, 2 * math.pi / d), rng.uniform(0, math.pi)
            assert first_level_measure(d, w, t)[0] == pytest.approx(brute_L1(d, w, t), abs=1e-14)
    assert first_level_measure(4, 0.0, 0.0)[0] == pytest.approx(1.5, abs=1e-15)


def test_exact_E1_independent_quadrature():
    spec = FractalSpec(4, 1)
    value = exact_E1(spec)
    # adaptive Gauss-Kronrod over the enumerated integrand, split at its kinks
    span = math.pi / 2
    ref, _ = integrate.quad(lambda w: brute_L1(4, w, 0.0), 0, span, limit=400, epsabs=1e-13)
    assert value == pytest.approx(ref / span, abs=1e-9)
    assert 1 < value < 2
    assert value == pytest.approx(1.5868044255356135, abs=1e-9)


@pytest.mark.parametrize("d", [3, 4, 5, 7])
def test_exact_E1_shift_invariance(d):
    spec = FractalSpec(d, 1)
    assert exact_E1(spec, 0.3) == pytest.approx(exact_E1(spec, 0.3 + 2 * math.pi / d), abs=1e-10)
    assert exact_E1(spec) <= 2


def test_composite_simpson_exact_on_cubics():
    x = np.linspace(0, 2, 9)
    assert composite_simpson(x**3 - x, 0.25) == pytest.approx(2.0, abs=1e-14)
    with pytest.raises(InputValidationError):
        composite_simpson([1.0, 2.0], 1.0)


def test_sample_stats_order_free():
    vals = np.random.default_rng(0).random(1001) * 1e6
    assert sample_stats(vals) == sample_stats(vals[::-1])
    m, se = sample_stats([1.0, 3.0])
    assert (m, se) == (2.0, 1.0)


def test_curve_basic_properties():
    spec = FractalSpec(4, 6)
    rep = estimate_curve(spec, 0.0, 200, SeedSpec(12))
    assert list(rep.ks) == [1, 2, 3, 4, 5, 6]
    assert np.all(rep.means <= 2) and np.all(rep.means > 0)
    assert np.all(np.diff(rep.means) < 0)
    e1 = exact_E1(spec)
    assert abs(rep.means[0] - e1) <= 3 * rep.stderrs[0]
    again = estimate_curve(spec, 0.0, 200, SeedSpec(12))
    assert again.to_csv() == rep.to_csv()


def test_curve_workers_do_not_change_results():
    spec = FractalSpec(3, 5)
    a = estimate_curve(spec, 0.2, 64, SeedSpec(1), workers=1)
    b = estimate_curve(spec, 0.2, 64, SeedSpec(1), workers=3)
    assert a.to_csv() == b.to_csv()


def test_curve_rejects_single_sample_and_per_node():
    with pytest.raises(InputValidationError):
        estimate_curve(FractalSpec(4, 3), 0.0, 1, SeedSpec(1))
    with pytest.raises(UnsupportedModeError):
        estimate_curve(FractalSpec(4, 3, Mode.PER_NODE), 0.0, 10, SeedSpec(1))


def test_csv_round_trip():
    rep = estimate_curve(FractalSpec(4, 4), 0.5, 20, SeedSpec(3))
    text = rep.to_csv()
    back = read_curve_csv(text)
    assert back.to_csv() == text
    assert text.splitlines()[2] == "k,mean,stderr,samples,theta"


def test_csv_without_comments_and_malformed():
    rep = read_curve_csv("k,mean,stderr,samples,theta\n1,2,0,5,0\n2,1,0,5,0\n")
    assert list(rep.means) == [2.0, 1.0] and rep.spec is None
    for bad in ["", "k,mean\n1,2\n", "k,mean,stderr,samples,theta\n1,x,0,5,0\n",
                "k,mean,stderr,samples,theta\n1,2,-1,5,0\n", "k,mean,stderr,samples,theta\n"]:
        with pytest.raises(DataError):
            read_curve_csv(bad)


def test_favard_generation_zero():
    assert favard_length(FractalSpec(4, 0), None) == pytest.approx(2.0, abs=1e-9)
    rec = estimate_expected_favard(FractalSpec(4, 0), 10, 64, SeedSpec(1))
    assert (rec.mean, rec.stderr) == (2.0, 0.0)


def test_favard_deterministic_first_generation_converged():
    spec = FractalSpec(4, 1, Mode.DETERMINISTIC)
    assert abs(favard_length(spec, None, 256) - favard_length(spec, None, 512)) < 1e-6


def test_favard_first_generation_equals_E1():
    # averaging over theta for the fixed figure equals averaging over omega at fixed theta
    fav = favard_length(FractalSpec(4, 1, Mode.DETERMINISTIC), None, 512)
    assert fav == pytest.approx(exact_E1(FractalSpec(4, 1)), abs=1e-9)


def test_kink_panels_beat_uniform_panels():
    spec = FractalSpec(4, 1, Mode.DETERMINISTIC)
    ref = favard_length(spec, None, 4096)
    uniform = favard_length(spec, None, 256, max_kinks=0)
    aligned = favard_length(spec, None, 256)
    assert abs(aligned - ref) < 1e-9 < abs(uniform - ref)


def test_kinks_lie_in_period():
    k = projection_kinks(FractalSpec(4, 1), RotationWord.shared([0.2]), 1.0)
    assert np.all((k >= 1.0) & (k < 1.0 + math.pi))
    assert 0 < len(k) <= 18  # symmetric pairs share angles


def test_favard_pi_shift():
    spec = FractalSpec(4, 3, Mode.DETERMINISTIC)
    a = favard_length(spec, None, 128)
    b = favard_length(spec, None, 128, theta_shift=math.pi)
    assert abs(a - b) < 1e-9


def test_favard_engines_agree():
    spec = FractalSpec(3, 3)
    word = RotationWord.shared([0.1, 1.0, 2.0])
    assert favard_length(spec, word, 64) == pytest.approx(favard_length(spec, word, 64, engine="enumerated"), abs=1e-12)


def test_expected_favard_matches_angle_averaged_curve():
    # Fubini: averaging E_n over theta equals the expected Favard length
    spec = FractalSpec(4, 4)
    fav = estimate_expected_favard(spec, 300, 64, SeedSpec(9))
    assert 0 < fav.mean < 2
    thetas = np.arange(16) * math.pi / 16
    per_theta = [estimate_curve(spec, t, 300, SeedSpec(10)).records[-1] for t in thetas]
    mean = np.mean([r.mean for r in per_theta])
    se = math.sqrt(np.mean([r.stderr**2 for r in per_theta]))
    assert abs(fav.mean - mean) <= 3 * math.hypot(fav.stderr, se)


def test_expected_favard_per_node():
    rec = estimate_expected_favard(FractalSpec(3, 3, Mode.PER_NODE), 8, 16, SeedSpec(2))
    assert 0 < rec.mean < 2


def test_deterministic_projection_depends_on_angle():
    # a single figure is not rotation invariant; only expectations are
    spec = FractalSpec(4, 1, Mode.DETERMINISTIC)
    assert abs(projection_length(spec, None, 0.0) - projection_length(spec, None, math.pi / 4)) > 0.1


def test_curve_report_header_excludes_workers():
    rep = estimate_curve(FractalSpec(3, 3), 0.0, 4, SeedSpec(1))
    assert isinstance(rep, CurveReport)
    assert "workers" not in rep.header() and "wall_seconds" not in rep.header()
