"""Synthesizes full hand frames from pointer-style input.

Live clients send only a palm position, an aperture and a drop-pose flag;
the engine needs 21 landmarks. The canonical template is posed to match:
curl is the inverse of the template's aperture curve, and the orientation
comes from a per-scenario preset (working over a desk points the fingers
forward with the palm down; catching faces the palm at the pitcher).
"""

from __future__ import annotations

from bisect import bisect_left

from .geometry import Quat, QUAT_IDENTITY, Vec3, clamp, quat_from_basis, quat_rotate, vsub
from .hand_model import HandFrame, pose_metrics, template

# palm down, fingers pointing away from the viewer (-z)
PALM_DOWN_FORWARD: Quat = quat_from_basis((-1.0, 0.0, 0.0), (0.0, 0.0, -1.0), (0.0, -1.0, 0.0))
# template rest: palm toward the viewer (+z), fingers up
PALM_AT_VIEWER: Quat = QUAT_IDENTITY

ORIENTATION_PRESETS: dict[str, Quat] = {
    "panel": PALM_DOWN_FORWARD,
    "juggle": PALM_DOWN_FORWARD,
    "medic": PALM_DOWN_FORWARD,
    "catch": PALM_AT_VIEWER,
}

_N_TABLE = 256


def _aperture_table() -> tuple[list[float], list[float]]:
    """(aperture ascending, curl) samples of the default curl family."""
    tpl = template()
    apertures: list[float] = []
    curls: list[float] = []
    for k in range(_N_TABLE + 1):
        curl = 1.0 - k / _N_TABLE  # descending curl => ascending aperture
        frame = tpl.pose(curl=curl, spread=1.0 - curl)
        apertures.append(pose_metrics(frame).aperture)
        curls.append(curl)
    return apertures, curls


_TABLE: tuple[list[float], list[float]] | None = None


def curl_for_aperture(aperture: float) -> float:
    """Invert the template's aperture curve (piecewise-linear, monotone)."""
    global _TABLE
    if _TABLE is None:
        _TABLE = _aperture_table()
    xs, ys = _TABLE
    a = clamp(aperture, 0.0, 1.0)
    i = bisect_left(xs, a)
    if i <= 0:
        return ys[0]
    if i >= len(xs):
        return ys[-1]
    x0, x1 = xs[i - 1], xs[i]
    if x1 == x0:
        return ys[i]
    u = (a - x0) / (x1 - x0)
    return ys[i - 1] + (ys[i] - ys[i - 1]) * u


def palm_center_offset(side: str) -> Vec3:
    """Palm center in the template frame (independent of curl and spread)."""
    frame = template().pose(curl=0.0, spread=1.0, side=side)
    return pose_metrics(frame).palm_center


def hand_from_pointer(
    side: str,
    position: Vec3,
    aperture: float,
    timestamp: float,
    drop_pose: bool = False,
    orientation: Quat = PALM_DOWN_FORWARD,
) -> HandFrame:
    """Pose the template so its palm center lands on `position`."""
    tpl = template()
    if drop_pose:
        orientation = PALM_DOWN_FORWARD
        curl, spread = 0.0, 1.0
    else:
        curl = curl_for_aperture(aperture)
        spread = 1.0 - curl
    pc_local = palm_center_offset(side)
    wrist = vsub(position, quat_rotate(orientation, pc_local))
    return tpl.pose(
        curl=curl,
        spread=spread,
        position=wrist,
        orientation=orientation,
        side=side,
        timestamp=timestamp,
    )
