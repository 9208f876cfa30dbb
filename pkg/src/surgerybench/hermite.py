"""Quintic Hermite interpolation with value, slope and curvature matching.

Used for two things: dense output between ODE nodes (where all three
derivatives come from the defining equation) and C^2 blends across a
corner of a warping function.
"""

import numpy as np


def _basis(x):
    """Quintic Hermite basis on [0, 1] and its first two derivatives.

    Returns three arrays of shape (6, ...) ordered as
    (y0, dy0, d2y0, y1, dy1, d2y1).
    """
    x2 = x * x
    x3 = x2 * x
    x4 = x3 * x
    x5 = x4 * x
    one = np.ones_like(x)

    b = np.stack([
        1 - 10 * x3 + 15 * x4 - 6 * x5,
        x - 6 * x3 + 8 * x4 - 3 * x5,
        0.5 * x2 - 1.5 * x3 + 1.5 * x4 - 0.5 * x5,
        10 * x3 - 15 * x4 + 6 * x5,
        -4 * x3 + 7 * x4 - 3 * x5,
        0.5 * x3 - x4 + 0.5 * x5,
    ])
    db = np.stack([
        -30 * x2 + 60 * x3 - 30 * x4,
        one - 18 * x2 + 32 * x3 - 15 * x4,
        x - 4.5 * x2 + 6 * x3 - 2.5 * x4,
        30 * x2 - 60 * x3 + 30 * x4,
        -12 * x2 + 28 * x3 - 15 * x4,
        1.5 * x2 - 4 * x3 + 2.5 * x4,
    ])
    d2b = np.stack([
        -60 * x + 180 * x2 - 120 * x3,
        -36 * x + 96 * x2 - 60 * x3,
        one - 9 * x + 18 * x2 - 10 * x3,
        60 * x - 180 * x2 + 120 * x3,
        -24 * x + 84 * x2 - 60 * x3,
        3 * x - 12 * x2 + 10 * x3,
    ])
    return b, db, d2b


def quintic_hermite(nodes, y, dy, d2y, t, derivatives=0):
    """Evaluate the piecewise quintic Hermite interpolant at ``t``.

    Parameters
    ----------
    nodes : (n,) array
        Strictly increasing abscissae.
    y, dy, d2y : (n,) arrays
        Values and first two derivatives at the nodes.
    t : array_like
        Query points inside ``[nodes[0], nodes[-1]]``.
    derivatives : int
        0 returns the value only; 1 or 2 return a tuple that also
        contains the requested derivatives of the interpolant.
    """
    t = np.asarray(t, dtype=float)
    idx = np.clip(np.searchsorted(nodes, t, side="right") - 1, 0, len(nodes) - 2)
    t0 = nodes[idx]
    H = nodes[idx + 1] - t0
    x = (t - t0) / H
    b, db, d2b = _basis(x)

    coeffs = np.stack([
        y[idx], H * dy[idx], H * H * d2y[idx],
        y[idx + 1], H * dy[idx + 1], H * H * d2y[idx + 1],
    ])
    value = np.sum(coeffs * b, axis=0)
    if derivatives == 0:
        return value
    first = np.sum(coeffs * db, axis=0) / H
    if derivatives == 1:
        return value, first
    second = np.sum(coeffs * d2b, axis=0) / (H * H)
    return value, first, second


def blend(t_left, left, t_right, right):
    """Return the quintic on ``[t_left, t_right]`` matching two jets.

    ``left`` and ``right`` are ``(value, slope, curvature)`` triples. The
    result is a callable mapping ``t`` to ``(p, p', p'')``.
    """
    nodes = np.array([t_left, t_right], dtype=float)
    y = np.array([left[0], right[0]], dtype=float)
    dy = np.array([left[1], right[1]], dtype=float)
    d2y = np.array([left[2], right[2]], dtype=float)

    def jet(t):
        return quintic_hermite(nodes, y, dy, d2y, t, derivatives=2)

    return jet
