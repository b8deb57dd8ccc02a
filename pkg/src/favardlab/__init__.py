"""Projection lengths and Favard length of random rotated disk Cantor sets."""

__version__ = "0.1.0"

from .errors import (
    DataError,
    FavardError,
    InputValidationError,
    LayoutOverflowError,
    ResourceLimitError,
    UnsupportedModeError,
)
from .geometry import (
    Disk,
    FractalSpec,
    Mode,
    RotationWord,
    disk_centers,
    enumerate_disks,
    subdisk_map,
    validate_geometry,
)
from .intervals import IntervalSet, intersect, make_interval_set, measure, subset_of, translate_scale, union
from .projection import (
    level_measures,
    project_disk,
    projection_length,
    projection_set_enumerated,
    projection_set_recursive,
)
from .rng import SeedSpec, draw_word, uniform_angle, uniform_angles
from .estimators import (
    CurveReport,
    EstimateRecord,
    estimate_curve,
    estimate_expected_favard,
    exact_E1,
    favard_length,
)
from .verification import (
    fit_decay,
    lemma_constant,
    mattila_ratio,
    overlap_integral,
    theta_star,
    verify_induction,
    verify_theta_invariance,
)
