"""Ricci curvature of doubly warped products.

A metric of the form ``dt^2 + h(t)^2 ds_{p-1}^2 + f(t)^2 ds_{q-1}^2`` is
determined by the pair of warping functions ``(h, f)``. This module holds the
piecewise representation of such a pair and evaluates the three independent
Ricci components (the mixed ones vanish identically):

    Ric(dt, dt) = -(p-1) h''/h - (q-1) f''/f
    Ric(V, V)   = -h''/h + (p-2) (1 - h'^2)/h^2 - (q-1) h' f'/(h f)
    Ric(W, W)   = -f''/f + (q-2) (1 - f'^2)/f^2 - (p-1) h' f'/(h f)

with V, W unit vectors tangent to the two sphere factors.
"""

import csv
import io
import json
import math
from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np

from .errors import BreakpointSmoothnessError, DomainError

COMPONENTS = ("tt", "vv", "ww")
CSV_COLUMNS = ("t", "h", "h'", "h''", "f", "f'", "f''", "ric_tt", "ric_vv", "ric_ww")

#: default sweep density, points per unit length
DEFAULT_DENSITY = 10_000

# relative tolerance used to decide whether a query sits on a breakpoint
_BREAK_RTOL = 1e-13

Jet = Callable[[np.ndarray], tuple]


@dataclass(frozen=True)
class Segment:
    """One piece of a profile pair on ``[start, end]``.

    ``h`` and ``f`` map an array of times to ``(value, first, second)``
    derivative arrays. ``kind`` is informational: ``"analytic"``,
    ``"hermite"`` (ODE dense output) or ``"blend"``.
    """

    start: float
    end: float
    h: Jet
    f: Jet
    kind: str = "analytic"


@dataclass(frozen=True)
class WarpProfilePair:
    """Immutable piecewise pair of warping functions ``(h, f)``.

    ``smoothness[i]`` is the continuity class (0, 1 or 2) declared at the
    breakpoint between ``segments[i]`` and ``segments[i + 1]``. Queries that
    land on a breakpoint use the segment to the right of it.
    """

    segments: tuple
    smoothness: tuple = ()

    def __post_init__(self):
        segs = tuple(self.segments)
        object.__setattr__(self, "segments", segs)
        object.__setattr__(self, "smoothness", tuple(int(c) for c in self.smoothness))
        if not segs:
            raise ValueError("a profile pair needs at least one segment")
        if len(self.smoothness) != len(segs) - 1:
            raise ValueError("need one continuity class per interior breakpoint")
        for c in self.smoothness:
            if c not in (0, 1, 2):
                raise ValueError(f"continuity class must be 0, 1 or 2, got {c}")
        for s in segs:
            if not s.end > s.start:
                raise ValueError(f"empty segment [{s.start}, {s.end}]")
        for left, right in zip(segs, segs[1:]):
            if left.end != right.start:
                raise ValueError(f"segments not contiguous at {left.end} / {right.start}")

    @classmethod
    def from_functions(cls, h, f, start, end, kind="analytic"):
        return cls((Segment(float(start), float(end), h, f, kind),))

    @property
    def start(self):
        return self.segments[0].start

    @property
    def end(self):
        return self.segments[-1].end

    @property
    def breakpoints(self):
        return np.array([s.end for s in self.segments[:-1]], dtype=float)

    def continuity_at(self, t):
        """Continuity class of the pair at ``t`` (2 away from breakpoints)."""
        t = np.atleast_1d(np.asarray(t, dtype=float))
        cls_ = np.full(t.shape, 2, dtype=int)
        for bp, c in zip(self.breakpoints, self.smoothness):
            hit = np.abs(t - bp) <= _BREAK_RTOL * max(1.0, abs(bp))
            cls_[hit] = np.minimum(cls_[hit], c)
        return cls_

    def evaluate(self, t, need=2):
        """Jets of both functions at ``t``.

        Returns an array of shape ``(6,) + shape(t)`` with rows
        ``h, h', h'', f, f', f''``. ``need`` is the number of derivatives the
        caller relies on; breakpoints declared with a lower class raise
        :class:`BreakpointSmoothnessError`.
        """
        t_arr = np.asarray(t, dtype=float)
        flat = np.atleast_1d(t_arr).ravel()
        span = _BREAK_RTOL * max(1.0, abs(self.start), abs(self.end))
        if np.any(flat < self.start - span) or np.any(flat > self.end + span):
            raise DomainError(
                f"query outside profile domain [{self.start}, {self.end}]")
        if need > 0 and self.smoothness:
            low = self.continuity_at(flat) < need
            if np.any(low):
                raise BreakpointSmoothnessError(
                    f"t = {flat[low][0]!r} is a breakpoint without C^{need} data")

        out = np.empty((6, flat.size))
        which = np.searchsorted(self.breakpoints, flat, side="right")
        for i, seg in enumerate(self.segments):
            sel = which == i
            if not np.any(sel):
                continue
            ts = np.clip(flat[sel], seg.start, seg.end)
            for j, arr in enumerate(seg.h(ts)):
                out[j, sel] = arr
            for j, arr in enumerate(seg.f(ts)):
                out[3 + j, sel] = arr
        return out.reshape((6,) + t_arr.shape)

    def one_sided(self, t, side):
        """Jets at a single ``t`` taken from the segment on ``side``.

        ``side`` is ``"left"`` or ``"right"``; useful at breakpoints where
        the two one-sided limits differ.
        """
        t = float(t)
        bps = self.breakpoints
        if side == "left":
            i = int(np.searchsorted(bps, t, side="left"))
        elif side == "right":
            i = int(np.searchsorted(bps, t, side="right"))
        else:
            raise ValueError(f"side must be 'left' or 'right', got {side!r}")
        seg = self.segments[min(i, len(self.segments) - 1)]
        if not seg.start <= t <= seg.end:
            raise DomainError(f"t = {t!r} outside profile domain")
        ts = np.array([t])
        return np.array([float(np.asarray(v).ravel()[0]) for v in (*seg.h(ts), *seg.f(ts))])

    def restrict(self, start, end):
        """Sub-pair on ``[start, end]`` sharing the underlying segments."""
        if not (self.start <= start < end <= self.end):
            raise ValueError(f"[{start}, {end}] not inside [{self.start}, {self.end}]")
        segs, classes = [], []
        for i, s in enumerate(self.segments):
            lo, hi = max(s.start, start), min(s.end, end)
            if hi <= lo:
                continue
            if segs:
                classes.append(self.smoothness[i - 1])
            segs.append(Segment(lo, hi, s.h, s.f, s.kind))
        return WarpProfilePair(tuple(segs), tuple(classes))

    def concat(self, other, smoothness):
        """Append ``other`` (which must start where ``self`` ends)."""
        return WarpProfilePair(self.segments + other.segments,
                               self.smoothness + (smoothness,) + other.smoothness)

    def swapped(self):
        """The pair ``(f, h)``; Ricci components trade ``vv`` and ``ww``."""
        segs = tuple(Segment(s.start, s.end, s.f, s.h, s.kind) for s in self.segments)
        return WarpProfilePair(segs, self.smoothness)


class RicciSample(NamedTuple):
    t: float
    ric_tt: float
    ric_vv: float
    ric_ww: float


class GridMinimum(NamedTuple):
    min_value: float
    argmin: float
    component: str


def _check_dims(p, q):
    for name, v in (("p", p), ("q", q)):
        if int(v) != v or v < 2:
            raise ValueError(f"{name} must be an integer >= 2, got {v!r}")


def _positive(h, f):
    bad = (h <= 0) | (f <= 0) | ~np.isfinite(h) | ~np.isfinite(f)
    if np.any(bad):
        raise DomainError("warping functions must be strictly positive")


def ricci_from_jets(jets, p, q):
    """Ricci components from stacked jets ``(h, h', h'', f, f', f'')``."""
    _check_dims(p, q)
    h, dh, d2h, f, df, d2f = jets
    _positive(h, f)
    mixed = dh * df / (h * f)
    tt = -(p - 1) * d2h / h - (q - 1) * d2f / f
    vv = -d2h / h + (p - 2) * (1.0 - dh * dh) / (h * h) - (q - 1) * mixed
    ww = -d2f / f + (q - 2) * (1.0 - df * df) / (f * f) - (p - 1) * mixed
    return tt, vv, ww


def ricci_components(pair, p, q, t):
    """Vectorised Ricci components ``(tt, vv, ww)`` at the times ``t``."""
    _check_dims(p, q)
    return ricci_from_jets(pair.evaluate(t, need=2), p, q)


def ricci_at(pair, p, q, t):
    """Ricci curvatures of ``g_{f,h}`` at a single time ``t``."""
    tt, vv, ww = ricci_components(pair, p, q, float(t))
    return RicciSample(float(t), float(tt), float(vv), float(ww))


def slice_second_fundamental_form(pair, t):
    """Diagonal blocks ``(h'/h, f'/f)`` of II of the slice ``{t}`` w.r.t. d/dt."""
    h, dh, _, f, df, _ = pair.evaluate(float(t), need=1)
    _positive(h, f)
    return float(dh / h), float(df / f)


def min_ricci_on_grid(pair, p, q, grid, tie_tol=1e-12):
    """Smallest Ricci component over all grid points.

    Values within ``tie_tol`` (relative to ``max(1, |min|)``) of the minimum
    count as ties; ties resolve to the smallest ``t`` and then to the
    component order ``tt, vv, ww``. ``min_value`` is always the exact
    minimum, never the value at the tie-break location.
    """
    grid = np.asarray(grid, dtype=float)
    if grid.size == 0:
        raise ValueError("empty grid")
    vals = np.stack(ricci_components(pair, p, q, grid), axis=-1)
    m = float(vals.min())
    cand = np.flatnonzero((vals <= m + tie_tol * max(1.0, abs(m))).ravel())[0]
    i, c = divmod(int(cand), 3)
    return GridMinimum(m, float(grid[i]), COMPONENTS[c])


def uniform_grid(start, end, density=DEFAULT_DENSITY, min_points=2):
    """Uniform grid with ``density`` points per unit length, endpoints included."""
    n = max(int(min_points), int(math.ceil((end - start) * density)) + 1)
    return np.linspace(start, end, n)


def round_join_profiles(p, q, T):
    """``h = cos t``, ``f = sin t``: the round sphere S^{p+q-1} as a join.

    The pair lives on ``[eps, T]`` with ``eps = min(1e-3, T/2)`` so that ``f``
    stays positive. Every Ricci component equals ``p + q - 2``.
    """
    _check_dims(p, q)
    if not 0 < T < math.pi / 2:
        raise ValueError(f"T must lie in (0, pi/2), got {T!r}")
    eps = min(1e-3, T / 2)

    def h(t):
        c, s = np.cos(t), np.sin(t)
        return c, -s, -c

    def f(t):
        c, s = np.cos(t), np.sin(t)
        return s, c, -s

    return WarpProfilePair.from_functions(h, f, eps, T)


def profile_table(pair, p, q, grid):
    """Rows of :data:`CSV_COLUMNS` for every grid point."""
    grid = np.asarray(grid, dtype=float)
    jets = pair.evaluate(grid)
    ric = ricci_components(pair, p, q, grid)
    return np.column_stack([grid, *jets, *ric])


def write_profile_csv(fh, pair, p, q, grid, header=None):
    """Dump a profile table as CSV.

    ``header`` (a JSON-serialisable dict) is written first as a single
    ``# {...}`` comment line. Rows are sorted by increasing ``t``.
    """
    table = profile_table(pair, p, q, np.sort(np.asarray(grid, dtype=float)))
    if header is not None:
        fh.write("# " + json.dumps(header, sort_keys=True) + "\n")
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for row in table:
        w.writerow([repr(float(v)) for v in row])


def profile_csv_string(pair, p, q, grid, header=None):
    buf = io.StringIO()
    write_profile_csv(buf, pair, p, q, grid, header)
    return buf.getvalue()


def read_profile_csv(fh):
    """Inverse of :func:`write_profile_csv`; returns ``(header, table)``."""
    header = None
    lines = fh.read().splitlines()
    if lines and lines[0].startswith("#"):
        header = json.loads(lines[0][1:])
        lines = lines[1:]
    rows = list(csv.reader(lines))
    if tuple(rows[0]) != CSV_COLUMNS:
        raise ValueError(f"unexpected CSV columns {rows[0]}")
    table = np.array([[float(x) for x in r] for r in rows[1:]], dtype=float)
    return header, table.reshape(-1, len(CSV_COLUMNS))
