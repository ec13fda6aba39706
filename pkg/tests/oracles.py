"""Reference computations that share no code with the package under test."""
import mpmath as mp
import numpy as np

mp.mp.dps = 40


def circle_intersection_mp(l0, l1, l2, theta1, theta2):
    """Upper-left intersection of the coupler circles, high precision.

    Generic two-circle construction: distance along the centre line
    ``a = (r0^2 - r1^2 + d^2) / (2d)``, then the chord half-height. The
    returned point lies to the left of the directed line B -> F.
    """
    l0, l1, l2 = mp.mpf(l0), mp.mpf(l1), mp.mpf(l2)
    t1, t2 = mp.mpf(theta1), mp.mpf(theta2)
    bx, bz = l1 * mp.cos(t1), l1 * mp.sin(t1)
    fx, fz = l0 + l1 * mp.cos(t2), l1 * mp.sin(t2)
    d = mp.sqrt((fx - bx) ** 2 + (fz - bz) ** 2)
    if d > 2 * l2 or d == 0:
        return None
    a = (l2 ** 2 - l2 ** 2 + d ** 2) / (2 * d)
    hh = mp.sqrt(l2 ** 2 - a ** 2)
    ux, uz = (fx - bx) / d, (fz - bz) / d
    px, pz = bx + a * ux, bz + a * uz
    return px - hh * uz, pz + hh * ux


def circle_intersection_np(l0, l1, l2, theta1, theta2):
    """Float64 version of the same construction, vectorized; NaN if none."""
    t1, t2 = np.asarray(theta1, float), np.asarray(theta2, float)
    b = np.stack([l1 * np.cos(t1), l1 * np.sin(t1)], -1)
    f = np.stack([l0 + l1 * np.cos(t2), l1 * np.sin(t2)], -1)
    v = f - b
    d = np.linalg.norm(v, axis=-1)
    with np.errstate(invalid="ignore", divide="ignore"):
        u = v / d[..., None]
        hh = np.sqrt(l2 ** 2 - (d / 2) ** 2)
    mid = b + 0.5 * v
    normal = np.stack([-u[..., 1], u[..., 0]], -1)
    c = mid + hh[..., None] * normal
    c[(d > 2 * l2) | (d == 0)] = np.nan
    return c


def central_difference(f, t, h):
    return (f(t + h) - f(t - h)) / (2 * h)
