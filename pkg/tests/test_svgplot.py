import math
import xml.etree.ElementTree as ET

import numpy as np
import pytest

from favardlab.svgplot import LogAxis, decay_plot_svg

NS = {"svg": "http://www.w3.org/2000/svg"}


def points(polyline):
    return np.array([[float(v) for v in p.split(",")] for p in polyline.get("points").split()])


def test_two_polylines_and_metadata():
    ks = np.arange(1, 11)
    svg = decay_plot_svg(ks, 1.5 / ks**0.5, 0.01 * np.ones(10), metadata={"seed": 3})
    root = ET.fromstring(svg.encode())
    lines = root.findall(".//svg:polyline", NS)
    assert [pl.get("class") for pl in lines] == ["series data", "series fit"]
    assert '"seed": 3' in root.find("svg:metadata", NS).text
    assert len(root.findall(".//svg:circle", NS)) == 10


def test_inverse_law_is_a_straight_slope_minus_one():
    ks = np.arange(1, 11)
    root = ET.fromstring(decay_plot_svg(ks, 2 / ks, np.zeros(10)).encode())
    data = points(root.find(".//svg:polyline[@class='series data']", NS))
    fit = points(root.find(".//svg:polyline[@class='series fit']", NS))
    assert np.allclose(data, fit, atol=0.011)
    slopes = np.diff(data[:, 1]) / np.diff(data[:, 0])
    # a straight line in log-log space; its pixel slope is minus the ratio of the axis scales
    assert np.ptp(slopes) < 0.02 * abs(slopes.mean())


def test_deterministic():
    ks = np.arange(1, 6)
    a = decay_plot_svg(ks, 1 / ks, 0.1 / ks)
    assert a == decay_plot_svg(ks, 1 / ks, 0.1 / ks)


@pytest.mark.parametrize("ks,means", [([], []), ([1, 2], [1.0, 0.0])])
def test_bad_input(ks, means):
    with pytest.raises(ValueError):
        decay_plot_svg(ks, means, np.zeros(len(ks)))


def test_log_axis():
    ax = LogAxis(1, 100, 0, 200)
    assert ax(10) == pytest.approx(100)
    assert ax(100) - ax(10) == pytest.approx(ax.pixels_per_decade)
    assert 1 in ax.ticks() and 50 in ax.ticks()
    assert math.isfinite(LogAxis(3, 3, 0, 1)(3))
