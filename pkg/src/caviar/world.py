"""Static 3D scene, scripted UAV trajectory, and line-of-sight occlusion.

Angles exposed by this module are elevation angles in degrees (positive
above the horizontal plane of the base station); downstream physics code
converts to radians.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

PHASE_NAMES = ("takeoff", "cruise", "land")


@dataclass(frozen=True)
class Vec3:
    x: float
    y: float
    z: float

    def __post_init__(self):
        for name in ("x", "y", "z"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"non-finite {name} component")

    def as_tuple(self):
        return (self.x, self.y, self.z)


@dataclass(frozen=True)
class ObstacleBox:
    """Axis-aligned box given by its two extreme corners."""

    min_corner: Vec3
    max_corner: Vec3

    def __post_init__(self):
        lo, hi = self.min_corner, self.max_corner
        if lo.x > hi.x or lo.y > hi.y or lo.z > hi.z:
            raise ValueError("box min_corner exceeds max_corner")

    def contains(self, p: Vec3) -> bool:
        return (
            self.min_corner.x <= p.x <= self.max_corner.x
            and self.min_corner.y <= p.y <= self.max_corner.y
            and self.min_corner.z <= p.z <= self.max_corner.z
        )


@dataclass(frozen=True)
class Scene:
    """Immutable scene: BS position, obstacle boxes, optional angle masks.

    ``nlos_angle_masks`` are closed elevation intervals in degrees; any
    BS-to-UAV elevation falling inside a mask counts as blocked, in addition
    to the geometric box test.
    """

    bs_position: Vec3
    obstacles: tuple[ObstacleBox, ...] = ()
    nlos_angle_masks: tuple[tuple[float, float], ...] = ()


@dataclass(frozen=True)
class SceneConfig:
    """Raw scene description as it appears in the JSON config."""

    bs_position: tuple[float, float, float]
    obstacles: tuple[tuple[tuple[float, float, float], tuple[float, float, float]], ...] = ()
    nlos_angle_masks_deg: tuple[tuple[float, float], ...] = ()


def build_scene(config: SceneConfig) -> Scene:
    """Validate a raw scene description and freeze it into a Scene."""
    bs = Vec3(*config.bs_position)
    boxes = tuple(ObstacleBox(Vec3(*lo), Vec3(*hi)) for lo, hi in config.obstacles)
    for box in boxes:
        if box.contains(bs):
            raise ValueError("base station lies inside an obstacle box")
    masks = []
    for lo, hi in config.nlos_angle_masks_deg:
        if lo > hi:
            raise ValueError(f"angle mask [{lo}, {hi}] has lower > upper")
        masks.append((float(lo), float(hi)))
    return Scene(bs, boxes, tuple(masks))


@dataclass(frozen=True)
class Phase:
    name: str
    steps: int
    start: Vec3
    end: Vec3

    def __post_init__(self):
        if self.name not in PHASE_NAMES:
            raise ValueError(f"unknown phase name {self.name!r}")
        if self.steps < 1:
            raise ValueError("phase duration must be at least one step")


@dataclass(frozen=True)
class TrajectoryPlan:
    """Piecewise-linear flight plan over discrete time steps 0..S."""

    phases: tuple[Phase, ...]
    total_steps: int = field(init=False)

    def __post_init__(self):
        if not self.phases:
            raise ValueError("trajectory needs at least one phase")
        first, last = self.phases[0], self.phases[-1]
        if first.name != "takeoff" or first.start.z != 0.0:
            raise ValueError("plan must start with a takeoff phase at altitude 0")
        if last.name != "land" or last.end.z != 0.0:
            raise ValueError("plan must end with a land phase at altitude 0")
        for prev, cur in zip(self.phases, self.phases[1:]):
            if prev.end != cur.start:
                raise ValueError(
                    f"phase {cur.name!r} does not start where the previous one ends"
                )
        object.__setattr__(self, "total_steps", sum(p.steps for p in self.phases))


@dataclass(frozen=True)
class UavState:
    t: int
    position: Vec3
    phase: str


def trajectory_state(plan: TrajectoryPlan, t: int) -> UavState:
    """Pose at discrete time t: linear within each phase, clamped past the end."""
    if t < 0:
        raise ValueError("time index must be non-negative")
    if t >= plan.total_steps:
        return UavState(t, plan.phases[-1].end, "land")
    offset = t
    for phase in plan.phases:
        if offset < phase.steps:
            f = offset / phase.steps
            pos = Vec3(
                phase.start.x + f * (phase.end.x - phase.start.x),
                phase.start.y + f * (phase.end.y - phase.start.y),
                phase.start.z + f * (phase.end.z - phase.start.z),
            )
            return UavState(t, pos, phase.name)
        offset -= phase.steps
    raise AssertionError("unreachable")


def bs_to_uav_angle(bs: Vec3, uav: Vec3) -> float:
    """Elevation of the UAV as seen from the BS, in degrees within [-90, 90]."""
    dx, dy, dz = uav.x - bs.x, uav.y - bs.y, uav.z - bs.z
    horizontal = math.hypot(dx, dy)
    if horizontal == 0.0 and dz == 0.0:
        raise ValueError("BS and UAV positions coincide")
    return math.degrees(math.atan2(dz, horizontal))


def _segment_hits_box(p0: Vec3, p1: Vec3, box: ObstacleBox) -> bool:
    # Slab test for the open segment p0 -> p1.  Face-grazing contact counts
    # as a hit; touching only at an endpoint does not.
    t_min, t_max = 0.0, 1.0
    for a0, a1, lo, hi in (
        (p0.x, p1.x, box.min_corner.x, box.max_corner.x),
        (p0.y, p1.y, box.min_corner.y, box.max_corner.y),
        (p0.z, p1.z, box.min_corner.z, box.max_corner.z),
    ):
        d = a1 - a0
        if d == 0.0:
            if a0 < lo or a0 > hi:
                return False
        else:
            t1 = (lo - a0) / d
            t2 = (hi - a0) / d
            if t1 > t2:
                t1, t2 = t2, t1
            t_min = max(t_min, t1)
            t_max = min(t_max, t2)
            if t_min > t_max:
                return False
    return t_max > 0.0 and t_min < 1.0


def los_blocked(scene: Scene, bs: Vec3, uav: Vec3) -> bool:
    """True when any obstacle box cuts the BS-UAV segment or the elevation
    falls inside a configured NLOS angle mask."""
    if scene.nlos_angle_masks:
        theta = bs_to_uav_angle(bs, uav)
        for lo, hi in scene.nlos_angle_masks:
            if lo <= theta <= hi:
                return True
    for box in scene.obstacles:
        if _segment_hits_box(bs, uav, box):
            return True
    return False
