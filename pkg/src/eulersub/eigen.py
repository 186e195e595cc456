"""Largest eigenvalue of small real symmetric matrices.

Three independent routes, all vectorized over leading batch axes:

* closed forms for d = 2 (quadratic formula) and d = 3 (trigonometric
  solution of the characteristic cubic),
* cyclic Jacobi rotations for any d,
* power iteration, run as repeated squaring of a positive shift.
"""

from __future__ import annotations

import numpy as np

SYMMETRY_RTOL = 1e-12
JACOBI_TOL = 1e-13


class AsymmetricMatrixError(ValueError):
    pass


def check_symmetric(m: np.ndarray, rtol: float = SYMMETRY_RTOL) -> np.ndarray:
    m = np.asarray(m, dtype=float)
    if m.ndim < 2 or m.shape[-1] != m.shape[-2]:
        raise ValueError(f"expected square matrices, got shape {m.shape}")
    if m.size:
        asym = np.max(np.abs(m - np.swapaxes(m, -1, -2)))
        scale = max(1.0, float(np.max(np.abs(m))))
        if asym > rtol * scale:
            raise AsymmetricMatrixError(f"matrix is not symmetric: max |m - m^T| = {asym:.3e}")
    return m


def _closed_form_2(m):
    a, b, c = m[..., 0, 0], m[..., 0, 1], m[..., 1, 1]
    return 0.5 * (a + c) + np.hypot(0.5 * (a - c), b)


def _closed_form_3(m):
    q = np.trace(m, axis1=-2, axis2=-1) / 3.0
    p1 = m[..., 0, 1] ** 2 + m[..., 0, 2] ** 2 + m[..., 1, 2] ** 2
    dev = [m[..., i, i] - q for i in range(3)]
    p2 = dev[0] ** 2 + dev[1] ** 2 + dev[2] ** 2 + 2 * p1
    p = np.sqrt(p2 / 6.0)
    safe = np.where(p > 0, p, 1.0)
    b00, b11, b22 = (x / safe for x in dev)
    b01, b02, b12 = m[..., 0, 1] / safe, m[..., 0, 2] / safe, m[..., 1, 2] / safe
    det = b00 * (b11 * b22 - b12 * b12) - b01 * (b01 * b22 - b12 * b02) + b02 * (b01 * b12 - b11 * b02)
    phi = np.arccos(np.clip(0.5 * det, -1.0, 1.0)) / 3.0
    return np.where(p > 0, q + 2 * p * np.cos(phi), q)


def lambda_max_closed_form(m) -> np.ndarray:
    m = check_symmetric(m)
    d = m.shape[-1]
    if d == 1:
        return m[..., 0, 0].copy()
    if d == 2:
        return _closed_form_2(m)
    if d == 3:
        return _closed_form_3(m)
    raise ValueError(f"no closed form for d={d}; use the Jacobi route")


def _rotation(app, aqq, apq):
    """cos and sin of the Jacobi rotation that annihilates apq (zero angle where apq = 0)."""
    active = apq != 0.0
    theta = (aqq - app) / (2.0 * np.where(active, apq, 1.0))
    big = np.abs(theta) > 1e150
    theta_c = np.where(big, 1.0, theta)
    t = np.sign(theta_c + (theta_c == 0)) / (np.abs(theta_c) + np.sqrt(theta_c**2 + 1.0))
    t = np.where(big, 0.5 / np.where(big, theta, 1.0), t)
    t = np.where(active, t, 0.0)
    c = 1.0 / np.sqrt(1.0 + t**2)
    return c, t * c


def jacobi_eigenvalues(m, tol: float = JACOBI_TOL, max_sweeps: int = 64) -> np.ndarray:
    """All eigenvalues (unsorted) by cyclic Jacobi sweeps.

    Iterates until the off-diagonal Frobenius mass is below
    ``tol`` times the matrix Frobenius norm for every batch member.
    Converged members are dropped from later sweeps.
    """
    m = check_symmetric(m)
    batch_shape = m.shape[:-2]
    d = m.shape[-1]
    # batch axis last so that row and column slices are contiguous
    a = np.ascontiguousarray(np.moveaxis(m.reshape((-1, d, d)), 0, -1))
    out = np.empty((d, a.shape[-1]))
    todo = np.arange(a.shape[-1])
    scale = np.sqrt(np.sum(a**2, axis=(0, 1)))
    offdiag = ~np.eye(d, dtype=bool)
    for _ in range(max_sweeps):
        off = np.sqrt(np.sum(a[offdiag] ** 2, axis=0))
        done = off <= tol * scale
        if np.any(done):
            out[:, todo[done]] = np.diagonal(a[:, :, done]).T
            keep = ~done
            a, todo, scale = np.ascontiguousarray(a[:, :, keep]), todo[keep], scale[keep]
        if todo.size == 0:
            break
        for p in range(d - 1):
            for q in range(p + 1, d):
                c, s = _rotation(a[p, p], a[q, q], a[p, q])
                cp, cq = a[:, p].copy(), a[:, q].copy()
                a[:, p] = c * cp - s * cq
                a[:, q] = s * cp + c * cq
                rp, rq = a[p].copy(), a[q].copy()
                a[p] = c * rp - s * rq
                a[q] = s * rp + c * rq
    if todo.size:
        out[:, todo] = np.diagonal(a).T
    return np.moveaxis(out, 0, -1).reshape(batch_shape + (d,))


def lambda_max_jacobi(m, tol: float = JACOBI_TOL) -> np.ndarray:
    return np.max(jacobi_eigenvalues(m, tol), axis=-1)


def lambda_max_power(m, squarings: int = 48) -> np.ndarray:
    """Power iteration on the PSD shift m + |m|_F I, by repeated squaring.

    After s squarings the normalized power is (to rounding) the trace-one
    projector onto the top eigenspace; contamination from the next
    eigenvalue scales as ratio^(2^s).
    """
    m = check_symmetric(m)
    d = m.shape[-1]
    shift = np.sqrt(np.sum(m**2, axis=(-2, -1)))
    eye = np.eye(d)
    b = m + shift[..., None, None] * eye
    tr = np.trace(b, axis1=-2, axis2=-1)
    zero = tr <= 0
    p = b / np.where(zero, 1.0, tr)[..., None, None]
    for _ in range(squarings):
        p = p @ p
        tr = np.trace(p, axis1=-2, axis2=-1)
        p = p / np.where(tr > 0, tr, 1.0)[..., None, None]
    top = np.sum(b * p, axis=(-2, -1))
    return np.where(zero, 0.0, top - shift)


def lambda_max(m, method: str = "auto") -> np.ndarray | float:
    """Largest eigenvalue of a symmetric matrix or a batch of them.

    ``method`` is one of ``auto`` (closed form for d <= 3, Jacobi above),
    ``closed``, ``jacobi`` or ``power``.
    """
    arr = np.asarray(m, dtype=float)
    if method == "auto":
        method = "closed" if arr.shape[-1] <= 3 else "jacobi"
    routes = {"closed": lambda_max_closed_form, "jacobi": lambda_max_jacobi, "power": lambda_max_power}
    if method not in routes:
        raise ValueError(f"unknown eigenvalue method {method!r}")
    out = routes[method](arr)
    return float(out) if np.ndim(out) == 0 else out
