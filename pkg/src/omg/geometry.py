"""Small 3D math kit on plain float tuples.

The interaction engine must produce byte-identical event logs across runs
and platforms, so everything on the simulation path sticks to IEEE-754
add/sub/mul/div and sqrt (all correctly rounded). No trig: rotations are
quaternions built from orthonormal bases via Shepperd's method.
"""

from __future__ import annotations

import math
from typing import Sequence

Vec3 = tuple[float, float, float]
Quat = tuple[float, float, float, float]  # (w, x, y, z)

ZERO: Vec3 = (0.0, 0.0, 0.0)
UNIT_X: Vec3 = (1.0, 0.0, 0.0)
UNIT_Y: Vec3 = (0.0, 1.0, 0.0)
UNIT_Z: Vec3 = (0.0, 0.0, 1.0)
QUAT_IDENTITY: Quat = (1.0, 0.0, 0.0, 0.0)


def vadd(a: Vec3, b: Vec3) -> Vec3:
    return (a[0] + b[0], a[1] + b[1], a[2] + b[2])


def vsub(a: Vec3, b: Vec3) -> Vec3:
    return (a[0] - b[0], a[1] - b[1], a[2] - b[2])


def vscale(a: Vec3, s: float) -> Vec3:
    return (a[0] * s, a[1] * s, a[2] * s)


def vdot(a: Vec3, b: Vec3) -> float:
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]


def vcross(a: Vec3, b: Vec3) -> Vec3:
    return (
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    )


def vnorm(a: Vec3) -> float:
    return math.sqrt(a[0] * a[0] + a[1] * a[1] + a[2] * a[2])


def vnorm2(a: Vec3) -> float:
    return a[0] * a[0] + a[1] * a[1] + a[2] * a[2]


def vdist(a: Vec3, b: Vec3) -> float:
    return vnorm(vsub(a, b))


def vnormalize(a: Vec3) -> Vec3:
    n = vnorm(a)
    if n == 0.0:
        raise ZeroDivisionError("cannot normalize zero vector")
    return (a[0] / n, a[1] / n, a[2] / n)


def vlerp(a: Vec3, b: Vec3, t: float) -> Vec3:
    return (
        a[0] + (b[0] - a[0]) * t,
        a[1] + (b[1] - a[1]) * t,
        a[2] + (b[2] - a[2]) * t,
    )


def vmean(points: Sequence[Vec3]) -> Vec3:
    n = float(len(points))
    sx = sy = sz = 0.0
    for p in points:
        sx += p[0]
        sy += p[1]
        sz += p[2]
    return (sx / n, sy / n, sz / n)


def clamp(x: float, lo: float, hi: float) -> float:
    if x < lo:
        return lo
    if x > hi:
        return hi
    return x


# --- quaternions ------------------------------------------------------------

def quat_mul(a: Quat, b: Quat) -> Quat:
    aw, ax, ay, az = a
    bw, bx, by, bz = b
    return (
        aw * bw - ax * bx - ay * by - az * bz,
        aw * bx + ax * bw + ay * bz - az * by,
        aw * by - ax * bz + ay * bw + az * bx,
        aw * bz + ax * by - ay * bx + az * bw,
    )


def quat_conj(q: Quat) -> Quat:
    return (q[0], -q[1], -q[2], -q[3])


def quat_norm(q: Quat) -> float:
    return math.sqrt(q[0] * q[0] + q[1] * q[1] + q[2] * q[2] + q[3] * q[3])


def quat_normalize(q: Quat) -> Quat:
    n = quat_norm(q)
    if n == 0.0:
        raise ZeroDivisionError("cannot normalize zero quaternion")
    return (q[0] / n, q[1] / n, q[2] / n, q[3] / n)


def quat_rotate(q: Quat, v: Vec3) -> Vec3:
    """Rotate v by unit quaternion q (q v q*)."""
    w, x, y, z = q
    # t = 2 q_vec x v
    tx = 2.0 * (y * v[2] - z * v[1])
    ty = 2.0 * (z * v[0] - x * v[2])
    tz = 2.0 * (x * v[1] - y * v[0])
    # v' = v + w t + q_vec x t
    return (
        v[0] + w * tx + (y * tz - z * ty),
        v[1] + w * ty + (z * tx - x * tz),
        v[2] + w * tz + (x * ty - y * tx),
    )


def quat_from_basis(ex: Vec3, ey: Vec3, ez: Vec3) -> Quat:
    """Unit quaternion for the rotation with columns (ex, ey, ez).

    Shepperd's method: picks the numerically largest diagonal branch, uses
    only sqrt and arithmetic. The basis must be right-handed orthonormal.
    """
    m00, m10, m20 = ex
    m01, m11, m21 = ey
    m02, m12, m22 = ez
    tr = m00 + m11 + m22
    if tr > 0.0:
        s = math.sqrt(tr + 1.0) * 2.0
        q = (0.25 * s, (m21 - m12) / s, (m02 - m20) / s, (m10 - m01) / s)
    elif m00 > m11 and m00 > m22:
        s = math.sqrt(1.0 + m00 - m11 - m22) * 2.0
        q = ((m21 - m12) / s, 0.25 * s, (m01 + m10) / s, (m02 + m20) / s)
    elif m11 > m22:
        s = math.sqrt(1.0 + m11 - m00 - m22) * 2.0
        q = ((m02 - m20) / s, (m01 + m10) / s, 0.25 * s, (m12 + m21) / s)
    else:
        s = math.sqrt(1.0 + m22 - m00 - m11) * 2.0
        q = ((m10 - m01) / s, (m02 + m20) / s, (m12 + m21) / s, 0.25 * s)
    return quat_normalize(q)


def quat_integrate(q: Quat, omega: Vec3, dt: float) -> Quat:
    """First-order orientation update for angular velocity omega (rad/s)."""
    if omega == ZERO:
        return q
    dq = quat_mul((0.0, omega[0] * 0.5 * dt, omega[1] * 0.5 * dt, omega[2] * 0.5 * dt), q)
    return quat_normalize((q[0] + dq[0], q[1] + dq[1], q[2] + dq[2], q[3] + dq[3]))


# --- rigid poses ------------------------------------------------------------

def pose_apply(position: Vec3, orientation: Quat, local: Vec3) -> Vec3:
    return vadd(position, quat_rotate(orientation, local))


def pose_invert_apply(position: Vec3, orientation: Quat, world: Vec3) -> Vec3:
    return quat_rotate(quat_conj(orientation), vsub(world, position))


def closest_point_on_segment(a: Vec3, b: Vec3, p: Vec3) -> Vec3:
    ab = vsub(b, a)
    denom = vnorm2(ab)
    if denom == 0.0:
        return a
    t = clamp(vdot(vsub(p, a), ab) / denom, 0.0, 1.0)
    return vadd(a, vscale(ab, t))


def rotation_between(a: Vec3, b: Vec3) -> Quat:
    """Shortest-arc rotation taking unit vector a to unit vector b (no trig)."""
    d = vdot(a, b)
    if d < -0.999999999:
        # antiparallel: rotate half-turn about any axis perpendicular to a
        axis = vcross(a, UNIT_X)
        if vnorm2(axis) < 1e-12:
            axis = vcross(a, UNIT_Y)
        axis = vnormalize(axis)
        return (0.0, axis[0], axis[1], axis[2])
    c = vcross(a, b)
    return quat_normalize((1.0 + d, c[0], c[1], c[2]))


PI = 3.141592653589793
_HALF_PI = PI / 2.0


def _atan_poly(x: float) -> float:
    # odd Taylor series after three half-angle reductions (|x| <= ~0.132);
    # remainder below 1e-13, and only +-*/ and sqrt, so the result is
    # bit-identical on every IEEE-754 platform
    x2 = x * x
    return x * (
        1.0
        + x2
        * (
            -1.0 / 3.0
            + x2
            * (
                0.2
                + x2 * (-1.0 / 7.0 + x2 * (1.0 / 9.0 + x2 * (-1.0 / 11.0 + x2 / 13.0)))
            )
        )
    )


def datan(x: float) -> float:
    """Deterministic arctangent (platform-independent, ~1e-13 accurate)."""
    neg = x < 0.0
    if neg:
        x = -x
    invert = x > 1.0
    if invert:
        x = 1.0 / x
    for _ in range(3):
        x = x / (1.0 + math.sqrt(1.0 + x * x))
    r = 8.0 * _atan_poly(x)
    if invert:
        r = _HALF_PI - r
    return -r if neg else r


def datan2(y: float, x: float) -> float:
    """Deterministic two-argument arctangent with the usual conventions."""
    if x > 0.0:
        return datan(y / x)
    if x < 0.0:
        if y >= 0.0:
            return datan(y / x) + PI
        return datan(y / x) - PI
    if y > 0.0:
        return _HALF_PI
    if y < 0.0:
        return -_HALF_PI
    return 0.0


def ray_box_intersect(
    origin: Vec3, direction: Vec3, half_extents: Vec3
) -> tuple[float, float] | None:
    """Slab test against an axis-aligned box centered at the origin.

    Returns the (t_enter, t_exit) parameter interval along `direction`
    (not necessarily unit), or None if the ray misses.
    """
    t0, t1 = -math.inf, math.inf
    for i in range(3):
        o, d, h = origin[i], direction[i], half_extents[i]
        if d == 0.0:
            if o < -h or o > h:
                return None
            continue
        ta = (-h - o) / d
        tb = (h - o) / d
        if ta > tb:
            ta, tb = tb, ta
        if ta > t0:
            t0 = ta
        if tb < t1:
            t1 = tb
        if t0 > t1:
            return None
    return (t0, t1)
