"""68-point facial landmark clouds: CSV I/O, mouth extraction, synthetic faces.

CSV format, one face per line, no header::

    label,x0,y0,x1,y1,...,x67,y67

Coordinates are raw pixels with y growing downward.
"""

from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "Expression",
    "PointCloud",
    "LandmarkParseError",
    "FACE_POINTS",
    "MOUTH_INDICES",
    "MOUTH_WIDTH",
    "load_landmarks",
    "write_landmarks",
    "format_row",
    "parse_row",
    "extract_mouth",
    "synthesize_face",
    "draw_vertex_positions",
    "select_vertices",
]

FACE_POINTS = 68
# 0-based indices of the mouth in the 68-point annotation scheme
MOUTH_INDICES = tuple(range(48, 68))


class Expression(str, enum.Enum):
    HAPPY = "happy"
    SAD = "sad"

    def __str__(self) -> str:
        return self.value


class LandmarkParseError(ValueError):
    """A landmark CSV row does not follow the expected format."""


@dataclass(frozen=True, eq=False)
class PointCloud:
    """Ordered 2-D landmarks; ``indices`` keeps each point's landmark id."""

    points: np.ndarray
    label: Expression
    indices: tuple[int, ...] = ()

    def __post_init__(self):
        pts = np.array(self.points, dtype=np.float64)
        if pts.ndim != 2 or pts.shape[1] != 2:
            raise ValueError(f"points must have shape (k, 2), got {pts.shape}")
        if not np.all(np.isfinite(pts)):
            raise ValueError("non-finite landmark coordinate")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "label", Expression(self.label))
        idx = tuple(int(i) for i in self.indices) or tuple(range(len(pts)))
        if len(idx) != len(pts):
            raise ValueError("indices and points differ in length")
        object.__setattr__(self, "indices", idx)

    def __len__(self) -> int:
        return self.points.shape[0]

    def __eq__(self, other):
        if not isinstance(other, PointCloud):
            return NotImplemented
        return (
            self.label == other.label
            and self.indices == other.indices
            and np.array_equal(self.points, other.points)
        )

    __hash__ = None


def parse_row(fields: Sequence[str], row: int = 0) -> PointCloud:
    expected = 2 * FACE_POINTS
    if len(fields) != expected + 1:
        raise LandmarkParseError(f"row {row}: expected {expected} coordinates, got {len(fields) - 1}")
    label = fields[0].strip().lower()
    try:
        label = Expression(label)
    except ValueError:
        raise LandmarkParseError(f"row {row}: unknown label {fields[0]!r}") from None
    try:
        coords = [float(v) for v in fields[1:]]
    except ValueError as exc:
        raise LandmarkParseError(f"row {row}: non-numeric coordinate ({exc})") from None
    if not all(math.isfinite(v) for v in coords):
        raise LandmarkParseError(f"row {row}: non-finite coordinate")
    return PointCloud(np.reshape(coords, (FACE_POINTS, 2)), label)


def format_row(face: PointCloud) -> list[str]:
    if len(face) != FACE_POINTS:
        raise ValueError(f"CSV rows hold {FACE_POINTS}-point faces, got {len(face)}")
    return [face.label.value] + [repr(float(v)) for v in face.points.reshape(-1)]


def load_landmarks(path, limit: int | None = None) -> list[PointCloud]:
    faces = []
    with open(path, newline="") as fh:
        for row, fields in enumerate(csv.reader(fh)):
            if limit is not None and len(faces) >= limit:
                break
            if not fields:
                continue
            faces.append(parse_row(fields, row))
    return faces


def write_landmarks(path, faces: Iterable[PointCloud]) -> None:
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        for face in faces:
            writer.writerow(format_row(face))


def extract_mouth(face: PointCloud, indices: Sequence[int] = MOUTH_INDICES) -> PointCloud:
    if len(face) != FACE_POINTS:
        raise ValueError(f"expected a {FACE_POINTS}-point face, got {len(face)} points")
    idx = list(indices)
    return PointCloud(face.points[idx], face.label, tuple(face.indices[i] for i in idx))


# ---------------------------------------------------------------------------
# synthetic faces
# ---------------------------------------------------------------------------

FACE_CENTER = (320.0, 260.0)
MOUTH_CENTER = (320.0, 330.0)
MOUTH_WIDTH = 60.0

# per-expression mouth shape: (half width, upper lip height, lower lip height,
# corner elevation).  Elevation > 0 lifts the corners (smaller y).
_MOUTH_SHAPE = {
    Expression.HAPPY: (34.0, 6.0, 12.0, 12.0),
    Expression.SAD: (26.0, 10.0, 6.0, -12.0),
}
_INNER_SCALE = (0.8, 0.4, 0.4, 0.8)


def _lip(half_w, h_up, h_low, elev, n_side):
    """Left corner, upper lip, right corner, lower lip (right to left)."""
    cx, cy = MOUTH_CENTER

    def at(t, h):
        s = math.sin(t)
        return (cx - half_w * math.cos(t), cy - h * s - elev * (1.0 - s))

    step = math.pi / (n_side + 1)
    pts = [at(0.0, 0.0)]
    pts += [at(k * step, h_up) for k in range(1, n_side + 1)]
    pts.append(at(math.pi, 0.0))
    pts += [at(math.pi - k * step, -h_low) for k in range(1, n_side + 1)]
    return pts


def _mouth_template(kind: Expression) -> np.ndarray:
    w, hu, hl, e = _MOUTH_SHAPE[kind]
    outer = _lip(w, hu, hl, e, 5)  # 48..59
    si = _INNER_SCALE
    inner = _lip(w * si[0], hu * si[1], hl * si[2], e * si[3], 3)  # 60..67
    return np.array(outer + inner)


def _face_template() -> np.ndarray:
    fx, fy = FACE_CENTER
    s = np.linspace(0.0, math.pi, 17)
    jaw = np.c_[fx - 95.0 * np.cos(s), fy - 20.0 + 120.0 * np.sin(s)]
    u = np.linspace(0.0, 1.0, 5)
    brow_l = np.c_[fx - 80.0 + 60.0 * u, fy - 70.0 - 8.0 * np.sin(math.pi * u)]
    brow_r = np.c_[fx + 20.0 + 60.0 * u, fy - 70.0 - 8.0 * np.sin(math.pi * u)]
    bridge = np.c_[np.full(4, fx), np.linspace(fy - 50.0, fy - 5.0, 4)]
    nose = np.c_[fx + np.linspace(-18.0, 18.0, 5), fy + 10.0 + 4.0 * np.sin(math.pi * u)]
    a = np.linspace(0.0, 2.0 * math.pi, 6, endpoint=False)
    eye_l = np.c_[fx - 40.0 - 15.0 * np.cos(a), fy - 40.0 - 6.0 * np.sin(a)]
    eye_r = np.c_[fx + 40.0 - 15.0 * np.cos(a), fy - 40.0 - 6.0 * np.sin(a)]
    return np.vstack([jaw, brow_l, brow_r, bridge, nose, eye_l, eye_r])


_FACE_TEMPLATE = _face_template()


def synthesize_face(kind, noise: float, rng: np.random.Generator) -> PointCloud:
    """Template face with a parametric mouth plus isotropic Gaussian jitter.

    ``noise`` is the jitter standard deviation in pixels; with ``noise == 0``
    the result does not depend on ``rng``.
    """
    kind = Expression(kind)
    if not math.isfinite(noise) or noise < 0:
        raise ValueError(f"noise must be finite and >= 0, got {noise!r}")
    pts = np.vstack([_FACE_TEMPLATE, _mouth_template(kind)])
    if noise > 0:
        pts = pts + rng.normal(0.0, noise, size=pts.shape)
    return PointCloud(pts, kind)


# ---------------------------------------------------------------------------
# vertex subsets
# ---------------------------------------------------------------------------


def draw_vertex_positions(n: int, rng: np.random.Generator, pool: int = len(MOUTH_INDICES)) -> tuple[int, ...]:
    """Uniform n-subset of ``range(pool)``, returned in ascending order."""
    if not 3 <= n <= pool:
        raise ValueError(f"n must lie in [3, {pool}], got {n}")
    if n == pool:
        return tuple(range(pool))
    return tuple(sorted(int(i) for i in rng.choice(pool, size=n, replace=False)))


def select_vertices(mouth: PointCloud, n=None, rng=None, positions=None) -> PointCloud:
    """Sub-cloud of ``mouth``.

    Pass either ``n`` and ``rng`` to draw a fresh subset, or ``positions``
    (from :func:`draw_vertex_positions`) to reuse one across faces.
    """
    if len(mouth) != len(MOUTH_INDICES):
        raise ValueError(f"expected a {len(MOUTH_INDICES)}-point mouth, got {len(mouth)}")
    if positions is None:
        if n is None or rng is None:
            raise ValueError("need n and rng, or positions")
        positions = draw_vertex_positions(n, rng, len(mouth))
    pos = list(positions)
    if len(set(pos)) != len(pos) or not all(0 <= p < len(mouth) for p in pos):
        raise ValueError(f"invalid vertex positions {positions!r}")
    if not 3 <= len(pos) <= len(mouth):
        raise ValueError(f"n must lie in [3, {len(mouth)}], got {len(pos)}")
    return PointCloud(mouth.points[pos], mouth.label, tuple(mouth.indices[p] for p in pos))
