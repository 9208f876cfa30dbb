"""Model warping functions h0 and f_C.

``h0`` solves ``h0' = exp(-h0^2/2)`` from ``h0(0) = sqrt(-2 ln min(lambda, 1/2))``
and ``f_C`` solves ``f'' = C exp(-h0^2) f`` with ``f(0) = 1, f'(0) = 0``.
Both are integrated with an adaptive 8th order Dormand-Prince pair and then
stored as Hermite node data. Derivatives at query points are recovered from
the defining equations rather than by differentiating the interpolant.
"""

import bisect
import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy.integrate import solve_ivp

from . import hermite
from .errors import NumericError
from .warp_core import Segment, WarpProfilePair

DEFAULT_TOL = 1e-10
MAX_T = 1e3

# node layout: uniform spacing up to UNIFORM_UNTIL, then geometric growth
NODE_SPACING = 0.05
NODE_GROWTH = 0.005
UNIFORM_UNTIL = NODE_SPACING / NODE_GROWTH


def h0_initial(lam):
    """``h0(0)``; the minimum with 1/2 keeps the logarithm negative."""
    return math.sqrt(-2.0 * math.log(min(lam, 0.5)))


def node_grid(t_max):
    """Node abscissae on ``[0, t_max]``.

    Spacing is ``NODE_SPACING`` up to ``UNIFORM_UNTIL`` and proportional to
    ``t`` beyond, which keeps the relative interpolation error flat.
    """
    head = np.arange(0.0, min(t_max, UNIFORM_UNTIL), NODE_SPACING)
    if t_max > UNIFORM_UNTIL:
        k = math.ceil(math.log(t_max / UNIFORM_UNTIL) / math.log1p(NODE_GROWTH))
        tail = UNIFORM_UNTIL * (1.0 + NODE_GROWTH) ** np.arange(k + 1)
        head = np.concatenate([head, tail[tail < t_max]])
    nodes = np.append(head, t_max)
    # drop a sliver interval at the end
    if len(nodes) > 2 and nodes[-1] - nodes[-2] < 1e-3 * NODE_SPACING:
        nodes = np.delete(nodes, -2)
    return nodes


def _check_tol(tol):
    if not 0 < tol <= 1e-6:
        raise ValueError(f"tol must lie in (0, 1e-6], got {tol!r}")


@dataclass(frozen=True)
class PropertyCheck:
    name: str
    passed: bool
    margin: float
    detail: str = ""


@dataclass(frozen=True)
class PropertyReport:
    entries: tuple

    @property
    def passed(self):
        return all(e.passed for e in self.entries)

    def __getitem__(self, name):
        for e in self.entries:
            if e.name == name:
                return e
        raise KeyError(name)

    def as_dict(self):
        return {e.name: {"passed": bool(e.passed), "margin": float(e.margin),
                         "detail": e.detail} for e in self.entries}


@dataclass(frozen=True, eq=False)
class H0Profile:
    """Hermite node data ``(t, h0, h0')`` for a fixed ``lambda``."""

    lam: float
    t_max: float
    tol: float
    t: np.ndarray = field(repr=False)
    h: np.ndarray = field(repr=False)
    dh: np.ndarray = field(repr=False)

    @property
    def initial_value(self):
        return float(self.h[0])

    @property
    def d2h(self):
        return -self.h * np.exp(-self.h ** 2)

    def jet(self, t):
        """``(h0, h0', h0'')`` at ``t``."""
        v = hermite.quintic_hermite(self.t, self.h, self.dh, self.d2h, t)
        e = np.exp(-0.5 * v * v)
        return v, e, -v * e * e

    def value(self, t):
        return self.jet(t)[0]

    def _scalar(self, t):
        # fast path for ODE right-hand sides
        nodes = self._nodes_list
        i = min(max(bisect.bisect_right(nodes, t) - 1, 0), len(nodes) - 2)
        t0, t1 = nodes[i], nodes[i + 1]
        H = t1 - t0
        x = (t - t0) / H
        y0, y1 = self._h_list[i], self._h_list[i + 1]
        d0, d1 = self._dh_list[i], self._dh_list[i + 1]
        c0, c1 = -y0 * d0 * d0, -y1 * d1 * d1
        x2 = x * x
        x3 = x2 * x
        x4 = x3 * x
        x5 = x4 * x
        return (y0 * (1 - 10 * x3 + 15 * x4 - 6 * x5)
                + H * d0 * (x - 6 * x3 + 8 * x4 - 3 * x5)
                + H * H * c0 * (0.5 * x2 - 1.5 * x3 + 1.5 * x4 - 0.5 * x5)
                + y1 * (10 * x3 - 15 * x4 + 6 * x5)
                + H * d1 * (-4 * x3 + 7 * x4 - 3 * x5)
                + H * H * c1 * (0.5 * x3 - x4 + 0.5 * x5))

    def __post_init__(self):
        object.__setattr__(self, "_nodes_list", self.t.tolist())
        object.__setattr__(self, "_h_list", self.h.tolist())
        object.__setattr__(self, "_dh_list", self.dh.tolist())

    def invariant_checks(self):
        """Node-wise checks of the properties of h0 listed in its docs."""
        d2h = self.d2h
        expected0 = h0_initial(self.lam)
        return (
            PropertyCheck("initial_value", abs(self.h[0] - expected0) <= 10 * self.tol,
                          10 * self.tol - abs(self.h[0] - expected0)),
            PropertyCheck("initial_slope",
                          abs(self.dh[0] - min(self.lam, 0.5)) <= 10 * self.tol,
                          10 * self.tol - abs(self.dh[0] - min(self.lam, 0.5))),
            PropertyCheck("positive", bool(np.all(self.h > 0) and np.all(self.dh > 0)),
                          float(min(self.h.min(), self.dh.min()))),
            PropertyCheck("concave", bool(np.all(d2h < 0)), float(-d2h.max())),
            PropertyCheck("increasing", bool(np.all(np.diff(self.h) > 0)),
                          float(np.diff(self.h).min())),
        )


@dataclass(frozen=True, eq=False)
class FCProfile:
    """Hermite node data ``(t, f_C, f_C')`` built on a shared :class:`H0Profile`."""

    C: float
    h0: H0Profile = field(repr=False)
    t_max: float
    tol: float
    t: np.ndarray = field(repr=False)
    f: np.ndarray = field(repr=False)
    df: np.ndarray = field(repr=False)

    @cached_property
    def _node_data(self):
        hv = self.h0.value(self.t)
        w = self.C * np.exp(-hv * hv)
        d2f = w * self.f
        # third derivative from differentiating the ODE once more
        d3f = w * (self.df - 2.0 * hv * np.exp(-0.5 * hv * hv) * self.f)
        return d2f, d3f

    @property
    def d2f(self):
        return self._node_data[0]

    def jet(self, t):
        """``(f_C, f_C', f_C'')`` at ``t``."""
        d2f, d3f = self._node_data
        v = hermite.quintic_hermite(self.t, self.f, self.df, d2f, t)
        dv = hermite.quintic_hermite(self.t, self.df, d2f, d3f, t)
        h = self.h0.value(t)
        return v, dv, self.C * np.exp(-h * h) * v

    def ratio(self, t=None):
        """``f_C' / (f_C h0 h0')`` at ``t`` (nodes by default)."""
        if t is None:
            f, df, hv = self.f, self.df, self.h0.value(self.t)
        else:
            f, df, _ = self.jet(t)
            hv = self.h0.value(t)
        return df / (f * hv * np.exp(-0.5 * hv * hv))


def solve_h0(lam, t_max, tol=DEFAULT_TOL):
    """Integrate ``h0`` on ``[0, t_max]``."""
    if not lam > 0:
        raise ValueError(f"lambda must be positive, got {lam!r}")
    if not 0 < t_max <= MAX_T:
        raise ValueError(f"t_max must lie in (0, {MAX_T:g}], got {t_max!r}")
    _check_tol(tol)
    y0 = h0_initial(lam)

    def rhs(t, y):
        return np.exp(-0.5 * y * y)

    sol = solve_ivp(rhs, (0.0, t_max), [y0], method="DOP853", rtol=tol, atol=tol,
                    dense_output=True)
    if not sol.success:
        raise NumericError(f"h0 integration failed: {sol.message}")
    nodes = node_grid(t_max)
    h = sol.sol(nodes)[0]
    h[0] = y0
    if not np.all(np.isfinite(h)):
        raise NumericError("h0 integration produced non-finite values")
    return H0Profile(float(lam), float(t_max), float(tol), nodes, h, np.exp(-0.5 * h * h))


def solve_fc(C, h0, tol=None, t_max=None):
    """Integrate ``f_C`` using ``h0`` values from the shared profile."""
    if not 0 < C < 1:
        raise ValueError(f"C must lie in (0, 1), got {C!r}")
    tol = h0.tol if tol is None else tol
    _check_tol(tol)
    t_max = h0.t_max if t_max is None else t_max
    if not 0 < t_max <= h0.t_max:
        raise ValueError(f"t_max={t_max!r} exceeds the h0 range {h0.t_max!r}")

    scalar = h0._scalar

    def rhs(t, y):
        hv = scalar(t)
        return [y[1], C * math.exp(-hv * hv) * y[0]]

    sol = solve_ivp(rhs, (0.0, t_max), [1.0, 0.0], method="DOP853", rtol=tol,
                    atol=tol, dense_output=True)
    if not sol.success:
        raise NumericError(f"f_C integration failed: {sol.message}")
    nodes = h0.t[h0.t < t_max]
    nodes = np.append(nodes, t_max)
    f, df = sol.sol(nodes)
    f[0], df[0] = 1.0, 0.0
    if not (np.all(np.isfinite(f)) and np.all(np.isfinite(df))):
        raise NumericError("f_C integration produced non-finite values")
    return FCProfile(float(C), h0, float(t_max), float(tol), nodes, f, df)


def verify_profile_properties(h0, fc, decay_threshold=1e-3, growth_thresholds=(1.0, 0.0),
                              ratio_slack=1e-8):
    """Finite-horizon checks of the four listed properties of ``f_C``.

    1. ``positivity``: f_C, f_C', f_C'' > 0 at every node with t > 0.
    2. ``divergence``: f_C and f_C' strictly increasing across the nodes and
       above ``growth_thresholds`` at ``t_max``.
    3. ``decay``: ``f_C h0'`` strictly decreasing on ``[t_max/2, t_max]`` and
       below ``decay_threshold`` at ``t_max``.
    4. ``ratio``: ``f_C'/(f_C h0 h0')`` within ``[0, 1]`` up to ``ratio_slack``.

    Failures are report entries, never exceptions.
    """
    if fc.h0 is not h0:
        raise ValueError("f_C profile was not built on this h0 profile")
    t, f, df, d2f = fc.t, fc.f, fc.df, fc.d2f
    entries = []

    inner = t > 0
    pos = float(min(f[inner].min(), df[inner].min(), d2f[inner].min()))
    entries.append(PropertyCheck("positivity", pos > 0, pos))

    thr_f, thr_df = growth_thresholds
    growing = bool(np.all(np.diff(f[inner]) > 0) and np.all(np.diff(df) > 0))
    grow_margin = float(min(f[-1] - thr_f, df[-1] - thr_df))
    entries.append(PropertyCheck(
        "divergence", growing and grow_margin > 0, grow_margin,
        f"f_C(t_max)={f[-1]:.6g}, f_C'(t_max)={df[-1]:.6g}"))

    y = f * np.exp(-0.5 * h0.value(t) ** 2)
    tail = t >= 0.5 * t[-1]
    falling = bool(np.all(np.diff(y[tail]) < 0))
    decay_margin = float(decay_threshold - y[-1])
    detail = f"f_C h0'(t_max)={y[-1]:.6g}, threshold {decay_threshold:g}"
    if t[-1] < 50:
        detail += " (horizon below 50)"
    entries.append(PropertyCheck("decay", falling and decay_margin > 0, decay_margin, detail))

    r = fc.ratio()
    r_margin = float(min(r.min() + ratio_slack, 1.0 + ratio_slack - r.max()))
    entries.append(PropertyCheck("ratio", r_margin >= 0, r_margin,
                                 f"range [{r.min():.6g}, {r.max():.6g}]"))
    return PropertyReport(tuple(entries))


def scale_profiles(h0, fc, a, b):
    """The pair ``(a h0, b f_C)`` on the common range ``[0, fc.t_max]``."""
    if not (a > 0 and b > 0):
        raise ValueError("scales a and b must be positive")

    def h(t):
        v, d1, d2 = h0.jet(t)
        return a * v, a * d1, a * d2

    def f(t):
        v, d1, d2 = fc.jet(t)
        return b * v, b * d1, b * d2

    return WarpProfilePair((Segment(0.0, fc.t_max, h, f, "hermite"),))


def profile_header(h0, fc):
    return {"lambda": h0.lam, "C": fc.C, "tol": fc.tol, "t_max": fc.t_max}
