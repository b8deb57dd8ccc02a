"""Self-similar rotated disk Cantor sets.

Generation ``n`` of the construction is a union of ``d**n`` disks of radius
``d**-n``.  A disk is addressed by its digit string ``(j_1, ..., j_n)`` with
``0 <= j_k < d``; its center is

    sum_k (d - 1) / d**k * exp(i * (2*pi*j_k/d - omega_k))

where ``omega_k`` is the rotation applied at level ``k`` (level 1 is the
outermost).  Disks are always listed in address order, i.e. by the base-``d``
integer ``j_1 j_2 ... j_n`` with ``j_1`` most significant.

In per-node mode every node of the construction tree gets its own angle.
Level ``k`` then carries ``d**(k-1)`` angles stored breadth first: the angle
for the children of the level-``(k-1)`` disk with address ``(j_1..j_{k-1})``
sits at index ``j_1 j_2 ... j_{k-1}`` read in base ``d``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree

from .errors import InputValidationError, ResourceLimitError

GEOMETRY_TOL = 1e-12
DEFAULT_MAX_DISKS = 4_000_000


class Mode(str, enum.Enum):
    SHARED = "shared"
    PER_NODE = "per-node"
    DETERMINISTIC = "deterministic"


@dataclass(frozen=True)
class FractalSpec:
    degree: int
    generations: int
    mode: Mode = Mode.SHARED

    def __post_init__(self):
        if isinstance(self.degree, bool) or int(self.degree) != self.degree or self.degree < 3:
            raise InputValidationError(f"degree must be an integer >= 3, got {self.degree!r}")
        if isinstance(self.generations, bool) or int(self.generations) != self.generations or self.generations < 0:
            raise InputValidationError(
                f"generations must be an integer >= 0, got {self.generations!r}"
            )
        object.__setattr__(self, "degree", int(self.degree))
        object.__setattr__(self, "generations", int(self.generations))
        object.__setattr__(self, "mode", Mode(self.mode))

    @property
    def max_angle(self) -> float:
        """Upper (excluded) end of the rotation range, ``2*pi/d``."""
        return 2.0 * math.pi / self.degree

    def with_generations(self, n: int) -> FractalSpec:
        return FractalSpec(self.degree, n, self.mode)

    def to_dict(self) -> dict:
        return {"degree": self.degree, "generations": self.generations, "mode": self.mode.value}


@dataclass(frozen=True, eq=False)
class RotationWord:
    """Rotation angles of one realization.

    ``angles[k-1]`` is the shared angle of level ``k``.  For per-node words
    ``node_angles[k-1]`` holds the ``d**(k-1)`` node angles of level ``k`` and
    ``angles`` is left empty.
    """

    angles: np.ndarray
    node_angles: tuple | None = field(default=None)

    @classmethod
    def shared(cls, angles) -> RotationWord:
        arr = np.array(angles, dtype=float).reshape(-1)
        arr.setflags(write=False)
        return cls(arr)

    @classmethod
    def per_node(cls, levels) -> RotationWord:
        frozen = []
        for lev in levels:
            arr = np.array(lev, dtype=float).reshape(-1)
            arr.setflags(write=False)
            frozen.append(arr)
        empty = np.zeros(0)
        empty.setflags(write=False)
        return cls(empty, tuple(frozen))

    @classmethod
    def zeros(cls, spec: FractalSpec) -> RotationWord:
        if spec.mode is Mode.PER_NODE:
            return cls.per_node([np.zeros(spec.degree**k) for k in range(spec.generations)])
        return cls.shared(np.zeros(spec.generations))

    @property
    def is_per_node(self) -> bool:
        return self.node_angles is not None

    def __len__(self):
        return len(self.node_angles) if self.is_per_node else len(self.angles)

    def level(self, k: int) -> np.ndarray:
        """Angles used at level ``k`` (1-based): length 1 if shared."""
        if self.is_per_node:
            return self.node_angles[k - 1]
        return self.angles[k - 1 : k]

    def prefix(self, k: int) -> RotationWord:
        if self.is_per_node:
            return RotationWord.per_node(self.node_angles[:k])
        return RotationWord.shared(self.angles[:k])

    def suffix(self, k: int) -> RotationWord:
        """The innermost ``k`` shared angles ``(omega_{n-k+1}, ..., omega_n)``."""
        if self.is_per_node:
            raise InputValidationError("suffix words are only defined for shared rotations")
        n = len(self.angles)
        return RotationWord.shared(self.angles[n - k :])

    def validate(self, spec: FractalSpec) -> None:
        if spec.mode is Mode.DETERMINISTIC:
            return
        if len(self) != spec.generations:
            raise InputValidationError(
                f"rotation word has {len(self)} levels, spec has {spec.generations} generations"
            )
        if spec.mode is Mode.PER_NODE:
            if not self.is_per_node:
                raise InputValidationError("per-node mode needs a per-node rotation word")
            for k, lev in enumerate(self.node_angles, start=1):
                if lev.shape[0] != spec.degree ** (k - 1):
                    raise InputValidationError(
                        f"level {k} needs {spec.degree ** (k - 1)} node angles, got {lev.shape[0]}"
                    )
            values = np.concatenate(self.node_angles) if self.node_angles else np.zeros(0)
        else:
            if self.is_per_node:
                raise InputValidationError("shared mode needs a shared rotation word")
            values = self.angles
        bad = ~np.isfinite(values) | (values < 0.0) | (values >= spec.max_angle)
        if np.any(bad):
            raise InputValidationError(
                f"rotation angles must lie in [0, 2*pi/{spec.degree}); "
                f"offending value {values[bad][0]!r}"
            )

    def to_json(self):
        if self.is_per_node:
            return [lev.tolist() for lev in self.node_angles]
        return self.angles.tolist()


@dataclass(frozen=True)
class Disk:
    cx: float
    cy: float
    r: float

    def to_json(self) -> dict:
        return {"cx": self.cx, "cy": self.cy, "r": self.r}


def subdisk_map(spec: FractalSpec, j: int, omega: float, z):
    """Apply the ``j``-th similarity ``z/d + (d-1)/d * exp(i(2*pi*j/d - omega))``.

    ``z`` is an ``(x, y)`` pair; the returned point is a tuple.  The linear
    part is a pure contraction, the rotation only moves the translation.
    """
    d = spec.degree
    if isinstance(j, bool) or int(j) != j or not 0 <= j < d:
        raise InputValidationError(f"branch index must be in 0..{d - 1}, got {j!r}")
    if spec.mode is Mode.DETERMINISTIC:
        omega = 0.0
    elif not 0.0 <= omega < spec.max_angle:
        raise InputValidationError(f"omega must lie in [0, 2*pi/{d}), got {omega!r}")
    x, y = z
    phase = 2.0 * math.pi * j / d - omega
    t = (d - 1) / d
    return (x / d + t * math.cos(phase), y / d + t * math.sin(phase))


def disk_centers(spec: FractalSpec, word: RotationWord | None = None, *, max_disks=DEFAULT_MAX_DISKS):
    """Centers of all generation-``n`` disks as a ``(d**n, 2)`` array, in address order."""
    d, n = spec.degree, spec.generations
    if word is None or spec.mode is Mode.DETERMINISTIC:
        word = RotationWord.zeros(spec)
    word.validate(spec)
    count = d**n
    if count > max_disks:
        raise ResourceLimitError(f"generation {n} with degree {d}", count, max_disks, "max_disks")

    base_phase = 2.0 * np.pi * np.arange(d) / d
    centers = np.zeros((1, 2))
    for k in range(1, n + 1):
        if spec.mode is Mode.DETERMINISTIC:
            omega = np.zeros((1, 1))
        else:
            omega = word.level(k)[:, None]
        phase = base_phase[None, :] - omega
        step = (d - 1) / d**k
        shift = np.stack([step * np.cos(phase), step * np.sin(phase)], axis=-1)
        centers = (centers[:, None, :] + shift).reshape(-1, 2)
    return centers


def enumerate_disks(spec: FractalSpec, word: RotationWord | None = None, *, max_disks=DEFAULT_MAX_DISKS):
    centers = disk_centers(spec, word, max_disks=max_disks)
    r = float(spec.degree) ** -spec.generations
    return [Disk(float(x), float(y), r) for x, y in centers]


def disks_to_json(disks) -> list:
    return [disk.to_json() for disk in disks]


def disks_from_json(records) -> list:
    return [Disk(float(rec["cx"]), float(rec["cy"]), float(rec["r"])) for rec in records]


@dataclass
class GeometryReport:
    radius_ok: bool
    tangent_ok: bool
    siblings_disjoint_ok: bool
    globally_disjoint_ok: bool
    max_tangency_error: float
    min_sibling_gap: float
    min_global_gap: float
    failures: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.radius_ok and self.tangent_ok and self.siblings_disjoint_ok and self.globally_disjoint_ok


def _as_arrays(disks):
    arr = np.array([(dk.cx, dk.cy, dk.r) for dk in disks], dtype=float).reshape(-1, 3)
    return arr[:, :2], arr[:, 2]


def validate_geometry(parents, children, tol: float = GEOMETRY_TOL) -> GeometryReport:
    """Check tangency, radius ratio and disjointness between two consecutive levels.

    ``children[i]`` must be a child of ``parents[i // d]``, which is how
    :func:`enumerate_disks` orders them.  Failed checks are reported, never
    raised.
    """
    pc, pr = _as_arrays(parents)
    cc, cr = _as_arrays(children)
    failures = []
    if len(pc) == 0 or len(cc) % len(pc):
        raise InputValidationError("children count must be a positive multiple of the parent count")
    d = len(cc) // len(pc)
    parent_of = np.arange(len(cc)) // d

    ratio_err = np.abs(cr * d - pr[parent_of])
    radius_ok = bool(np.all(ratio_err <= tol))
    if not radius_ok:
        failures.append(f"radius ratio off by {ratio_err.max():.3e}")

    dist = np.hypot(*(cc - pc[parent_of]).T)
    tangency = np.abs(dist + cr - pr[parent_of])
    max_tan = float(tangency.max())
    tangent_ok = max_tan <= tol
    if not tangent_ok:
        failures.append(f"tangency error {max_tan:.3e} exceeds {tol:g}")

    # siblings: all pairs inside each group of d consecutive children
    groups = cc.reshape(-1, d, 2)
    rad = cr.reshape(-1, d)
    ii, jj = np.triu_indices(d, 1)
    if d > 1:
        gaps = np.hypot(*(groups[:, ii] - groups[:, jj]).transpose(2, 0, 1)) - rad[:, ii] - rad[:, jj]
        min_sib = float(gaps.min())
    else:
        min_sib = math.inf
    siblings_ok = min_sib > tol
    if not siblings_ok:
        failures.append(f"sibling disks overlap or touch (gap {min_sib:.3e})")

    min_global = math.inf
    if len(cc) > 1:
        tree = cKDTree(cc)
        reach = 2.0 * float(cr.max()) + tol
        pairs = tree.query_pairs(reach, output_type="ndarray")
        if len(pairs):
            g = np.hypot(*(cc[pairs[:, 0]] - cc[pairs[:, 1]]).T) - cr[pairs[:, 0]] - cr[pairs[:, 1]]
            min_global = float(g.min())
    global_ok = min_global > tol
    if not global_ok:
        failures.append(f"disks at this level overlap or touch (gap {min_global:.3e})")

    return GeometryReport(
        radius_ok=radius_ok,
        tangent_ok=tangent_ok,
        siblings_disjoint_ok=siblings_ok,
        globally_disjoint_ok=global_ok,
        max_tangency_error=max_tan,
        min_sibling_gap=min_sib,
        min_global_gap=min_global,
        failures=failures,
    )
