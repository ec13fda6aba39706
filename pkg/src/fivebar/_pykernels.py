"""Numpy implementations of the hot loops. Mirrors ``_ckernels.pyx``."""
import numpy as np

# below this elbow separation (mm) the coupler direction is undefined
H_MIN = 1e-9


def fk_batch(l0, l1, l2, theta1, theta2):
    """Closed-form coupler point for arrays of crank angles.

    Returns ``(x, z, ok)``; entries with ``ok == False`` are NaN.
    """
    theta1 = np.ascontiguousarray(theta1, dtype=np.float64)
    theta2 = np.ascontiguousarray(theta2, dtype=np.float64)
    c1, s1 = np.cos(theta1), np.sin(theta1)
    c2, s2 = np.cos(theta2), np.sin(theta2)
    dx = l0 + l1 * (c2 - c1)
    dz = l1 * (s2 - s1)
    h2 = dx * dx + dz * dz
    ok = (h2 >= H_MIN * H_MIN) & (h2 <= 4.0 * l2 * l2)
    with np.errstate(divide="ignore", invalid="ignore"):
        k = np.sqrt(l2 * l2 / h2 - 0.25)
    x = l1 * c1 + 0.5 * dx - dz * k
    z = l1 * s1 + 0.5 * dz + dx * k
    x[~ok] = np.nan
    z[~ok] = np.nan
    return x, z, ok


def _schedule(start, end, n):
    if n == 1:
        return np.array([start])
    u = np.arange(n) / (n - 1.0)
    return start + u * (end - start)


def tracking_terms(l0, l1, l2, t1_start, t1_end, t2_start, t2_end, dx, dz):
    """Tracking terms of a linear crank sweep against desired points.

    Returns ``(dist_sum, n_infeasible, h_excess_sq)`` where ``dist_sum``
    only covers feasible samples and ``h_excess_sq`` sums
    ``(H / (2 l2) - 1)**2`` over samples whose elbows are too far apart.
    """
    dx = np.ascontiguousarray(dx, dtype=np.float64)
    dz = np.ascontiguousarray(dz, dtype=np.float64)
    n = dx.shape[0]
    th1 = _schedule(t1_start, t1_end, n)
    th2 = _schedule(t2_start, t2_end, n)
    x, z, ok = fk_batch(l0, l1, l2, th1, th2)
    dist = np.hypot(x[ok] - dx[ok], z[ok] - dz[ok])
    c1, s1 = np.cos(th1), np.sin(th1)
    c2, s2 = np.cos(th2), np.sin(th2)
    h = np.hypot(l0 + l1 * (c2 - c1), l1 * (s2 - s1))
    excess = np.maximum(h / (2.0 * l2) - 1.0, 0.0)
    return float(dist.sum()), int(n - ok.sum()), float(np.sum(excess * excess))


def reach_terms(l0, l1, l2, dx, dz):
    """Law-of-cosines reach ratios of both crank chains.

    Returns ``(r1_excess_sq, r2_excess_sq, max_abs_r1, max_abs_r2)``.
    """
    dx = np.asarray(dx, dtype=np.float64)
    dz = np.asarray(dz, dtype=np.float64)
    den = 2.0 * l1 * l2
    r1 = (l1 * l1 + l2 * l2 - (dx * dx + dz * dz)) / den
    r2 = (l2 * l2 + l1 * l1 - ((l0 - dx) ** 2 + dz * dz)) / den
    e1 = np.maximum(np.abs(r1) - 1.0, 0.0)
    e2 = np.maximum(np.abs(r2) - 1.0, 0.0)
    return (float(np.sum(e1 * e1)), float(np.sum(e2 * e2)),
            float(np.max(np.abs(r1))), float(np.max(np.abs(r2))))
