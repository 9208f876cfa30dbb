"""Certified positive-Ricci necks between a core boundary and a round handle.

The neck is a doubly warped product on ``[0, t0]``. Near ``t = 0`` it is a
scaled copy of the model profiles ``(a h0, b f_C)``; past ``t1`` the first
factor is frozen and the second grows with a concave slope that stays above
``cos(R/N)``. The corner at ``t1`` is then smoothed and the result swept for
positive Ricci curvature.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .errors import (
    CertificationError,
    InfeasibleTargetError,
    KappaViolationError,
    ParametersTooLargeError,
    PreconditionError,
    SearchFailureError,
    SmoothingFailureError,
)
from .hermite import blend
from .profiles import scale_profiles, solve_fc, solve_h0
from .warp_core import (
    COMPONENTS,
    DEFAULT_DENSITY,
    Segment,
    WarpProfilePair,
    min_ricci_on_grid,
    profile_csv_string,
    ricci_at,
    ricci_components,
    ricci_from_jets,
    uniform_grid,
)

MAX_SEARCH_HALVINGS = 60
MAX_SMOOTH_HALVINGS = 40
ROOT_XTOL = 1e-10
SLOPE_CEILING = 1.0 - 1e-6
BOUNDARY_TOL = 1e-8
#: points per unit length for the parameter search and the t_b scan
SEARCH_DENSITY = 200
MIN_CERT_POINTS = 10_001


@dataclass(frozen=True)
class SurgeryInput:
    """Dimensions, radii and boundary data of one surgery."""

    p: int
    q: int
    ratio_RN: float
    lam: float
    r: float
    rho_over_N: float = None

    def __post_init__(self):
        for name in ("p", "q"):
            v = getattr(self, name)
            if isinstance(v, bool) or int(v) != v or v < 3:
                raise ValueError(f"{name} must be an integer >= 3, got {v!r}")
            object.__setattr__(self, name, int(v))
        if not 0.0 < self.ratio_RN < math.pi / 2:
            raise ValueError(
                f"ratio_RN must lie in (0, pi/2), got {self.ratio_RN!r}; "
                "ratios at or beyond pi/2 are not supported")
        if not self.lam > 0:
            raise ValueError(f"lambda must be positive, got {self.lam!r}")
        if not self.r > 0:
            raise ValueError(f"r must be positive, got {self.r!r}")
        if self.rho_over_N is not None and not self.rho_over_N > 0:
            raise ValueError(f"rho_over_N must be positive, got {self.rho_over_N!r}")

    @property
    def C(self):
        return min(0.5, (self.p - 1) / (2 * (self.q - 1)))

    def to_dict(self):
        return {"p": self.p, "q": self.q, "ratio_RN": self.ratio_RN,
                "lambda": self.lam, "r": self.r, "rho_over_N": self.rho_over_N}

    @classmethod
    def from_dict(cls, d):
        return cls(p=d["p"], q=d["q"], ratio_RN=d["ratio_RN"], lam=d["lambda"],
                   r=d["r"], rho_over_N=d.get("rho_over_N"))


@dataclass(frozen=True)
class SearchResult:
    a: float
    b: float
    C: float
    t1: float
    t_b: float
    halvings: int
    ricci_margin: float
    fprime_t1: float


@dataclass(frozen=True)
class BoundaryCheck:
    name: str
    lhs: float
    relation: str
    rhs: float
    residual: float
    passed: bool

    def as_dict(self):
        return {"name": self.name, "lhs": self.lhs, "relation": self.relation,
                "rhs": self.rhs, "residual": self.residual, "passed": self.passed}


@dataclass(frozen=True)
class NeckCertificate:
    """Everything needed to audit one neck.

    ``beta`` is ``None`` when no ``rho_over_N`` was given; the scale is then
    left free and only ``h(t1)`` is recorded. ``kappa`` and ``extras``
    hold the values at the corner ``t1`` before smoothing; the blend moves
    ``h(t1)`` and ``f(t1)`` slightly but leaves ``[t1 + delta, t0]`` alone.
    """

    input: SurgeryInput
    a: float
    b: float
    C: float
    t_b: float
    t1: float
    t0: float
    alpha: float
    beta: float
    kappa: float
    min_ricci_margin: float
    min_ricci_at: float
    min_ricci_component: str
    profiles: WarpProfilePair
    boundary_report: tuple
    grid_points: int
    density: float
    delta: float
    extension_slopes: tuple
    halvings: int
    tol: float
    t_max: float
    extras: dict = field(default_factory=dict)

    @property
    def passed(self):
        return bool(self.min_ricci_margin > 0) and all(c.passed for c in self.boundary_report)

    def to_dict(self, csv_points=1001):
        d = self.input.to_dict()
        d.update({
            "a": self.a, "b": self.b, "C": self.C,
            "t_b": None if math.isinf(self.t_b) else self.t_b,
            "t1": self.t1, "t0": self.t0, "alpha": self.alpha, "beta": self.beta,
            "kappa": self.kappa, "min_ricci_margin": self.min_ricci_margin,
            "min_ricci_at": self.min_ricci_at,
            "min_ricci_component": self.min_ricci_component,
            "boundary_report": [c.as_dict() for c in self.boundary_report],
            "grid": {"points": self.grid_points, "density": self.density,
                     "start": 0.0, "end": self.t0},
            "smoothing_delta": self.delta,
            "extension_slopes": {"c1": self.extension_slopes[0],
                                 "c2": self.extension_slopes[1], "k": 1.0},
            "halvings": self.halvings,
            "corner": dict(self.extras),
            "tol": self.tol, "t_max": self.t_max,
            "global_rescale": 1.0 / self.alpha,
        })
        if csv_points:
            grid = np.linspace(0.0, self.t0, int(csv_points))
            d["profile_csv"] = profile_csv_string(
                self.profiles, self.input.p, self.input.q, grid)
        return d


def _scan_first_nonpositive(values):
    idx = np.flatnonzero(values <= 0)
    return int(idx[0]) if idx.size else None


def find_tb(h0, fc, p, q, a, b, density=SEARCH_DENSITY):
    """Smallest ``t`` where the second-sphere Ricci component vanishes.

    A dense scan over ``[0, fc.t_max]`` brackets the first sign change,
    which is then refined by Brent's method to ``1e-10``. Returns ``inf``
    if the component stays positive on the whole range.
    """
    pair = scale_profiles(h0, fc, a, b)
    if ricci_at(pair, p, q, 0.0).ric_ww <= 0:
        raise ParametersTooLargeError(
            f"Ric(W,W)(0) <= 0 for a={a!r}, b={b!r}; shrink the parameters")
    grid = uniform_grid(0.0, fc.t_max, density)
    ww = ricci_components(pair, p, q, grid)[2]
    return _refine_tb(pair, p, q, grid, ww)


def _refine_tb(pair, p, q, grid, ww):
    i = _scan_first_nonpositive(ww)
    if i is None:
        return math.inf
    if ww[i] == 0:
        return float(grid[i])

    def g(t):
        return float(ricci_components(pair, p, q, np.array([t]))[2][0])

    return float(brentq(g, grid[i - 1], grid[i], xtol=ROOT_XTOL))


def _model_jets(h0, fc, grid):
    h, dh, d2h = h0.jet(grid)
    f, df, d2f = fc.jet(grid)
    return np.array([h, dh, d2h, f, df, d2f])


def search_parameters(inp, h0, fc=None, density=SEARCH_DENSITY, margin=0.0,
                      max_halvings=MAX_SEARCH_HALVINGS):
    """Halve ``a`` (with ``b = a h0(0) r``) until a usable ``t1`` appears.

    Accepts the first candidate whose three Ricci components are positive
    on ``[0, t_b)`` and whose second slope exceeds ``cos(R/N)`` before
    ``t_b``. ``t1`` is the first grid point with that slope and a positive
    running Ricci minimum.
    """
    C = inp.C
    if fc is None:
        fc = solve_fc(C, h0)
    elif fc.C != C:
        raise ValueError(f"fc was solved for C={fc.C!r}, search needs C={C!r}")
    cos_t = math.cos(inp.ratio_RN)
    grid = uniform_grid(0.0, fc.t_max, density)
    base = _model_jets(h0, fc, grid)
    h00 = h0.initial_value

    a = min(1.0, 2.0 * inp.lam)
    last = {}
    for k in range(max_halvings + 1):
        b = a * h00 * inp.r
        jets = base * np.array([a, a, a, b, b, b])[:, None]
        tt, vv, ww = ricci_from_jets(jets, inp.p, inp.q)
        ric_min = np.minimum(np.minimum(tt, vv), ww)
        fp = jets[4]
        last = {"a": a, "b": b, "C": C, "halvings": k, "target_cos": cos_t,
                "ric_ww_0": float(ww[0])}
        if ww[0] <= 0:
            last["reason"] = "Ric(W,W)(0) <= 0"
            a *= 0.5
            continue
        pair = scale_profiles(h0, fc, a, b)
        t_b = _refine_tb(pair, inp.p, inp.q, grid, ww)
        before = grid < t_b
        last.update(t_b=None if math.isinf(t_b) else t_b,
                    max_fprime=float(np.max(fp[before])),
                    min_ricci_before_tb=float(np.min(ric_min[before])))
        if last["min_ricci_before_tb"] <= margin:
            last["reason"] = "Ricci not positive on [0, t_b)"
            a *= 0.5
            continue
        running = np.minimum.accumulate(ric_min)
        ok = np.flatnonzero(before & (fp > cos_t) & (running > margin))
        if ok.size == 0:
            last["reason"] = "slope never exceeds cos(R/N) before t_b"
            a *= 0.5
            continue
        i = int(ok[0])
        return SearchResult(a=a, b=b, C=C, t1=float(grid[i]), t_b=t_b, halvings=k,
                            ricci_margin=float(running[i]), fprime_t1=float(fp[i]))
    raise SearchFailureError(
        f"no admissible parameters after {max_halvings} halvings", details=last)


def extension_slopes(fprime_left, ratio_RN):
    """Outer and inner slopes ``(c1, c2)`` of the concave extension."""
    cos_t = math.cos(ratio_RN)
    c2 = min(float(fprime_left), SLOPE_CEILING)
    if not c2 > cos_t:
        raise PreconditionError(
            f"f'(t1-) = {fprime_left!r} must exceed cos(R/N) = {cos_t!r}")
    return 0.5 * (cos_t + c2), c2


def _extension_jets(t1, h1, f1, c1, c2, k=1.0):
    def h(t):
        t = np.asarray(t, dtype=float)
        return np.full_like(t, h1), np.zeros_like(t), np.zeros_like(t)

    def f(t):
        s = np.asarray(t, dtype=float) - t1
        e = np.exp(-k * s)
        return (f1 + c1 * s + (c2 - c1) * (1.0 - e) / k,
                c1 + (c2 - c1) * e,
                -k * (c2 - c1) * e)

    return h, f


def extension_length(f1, f_target, c1, c2, k=1.0):
    """Root ``s > 0`` of ``f1 + c1 s + (c2 - c1)(1 - exp(-k s))/k = f_target``."""
    if not f_target > f1:
        raise InfeasibleTargetError(
            f"target f = {f_target!r} not above f(t1) = {f1!r}; rho/N is at least kappa")
    gap = f_target - f1

    def g(s):
        return c1 * s + (c2 - c1) * (1.0 - math.exp(-k * s)) / k - gap

    hi = gap / c1
    if g(hi) < 0:
        raise InfeasibleTargetError(f"target f = {f_target!r} unreachable")
    return float(brentq(g, 0.0, hi, xtol=ROOT_XTOL * max(1.0, hi)))


def extend_profiles(pair, t1, ratio_RN, f_target):
    """Cut at ``t1`` and continue with constant ``h`` and concave ``f``.

    ``f_target=None`` extends by one unit of ``t``. Returns the new pair
    and its right end ``t0``; the join at ``t1`` is only continuous.
    """
    h1, _, _, f1, df1, _ = pair.one_sided(t1, "left")
    c1, c2 = extension_slopes(df1, ratio_RN)
    if f_target is None:
        t0 = t1 + 1.0
    else:
        t0 = t1 + extension_length(f1, f_target, c1, c2)
    if not t0 > t1:
        raise InfeasibleTargetError("extension has zero length")
    hj, fj = _extension_jets(t1, h1, f1, c1, c2)
    tail = WarpProfilePair((Segment(t1, t0, hj, fj, "extension"),))
    head = pair.restrict(pair.start, t1) if t1 < pair.end else pair
    return head.concat(tail, smoothness=0), t0


def compute_kappa(pair, t1, ratio_RN):
    """``h(t1)/f(t1) * sin(R/N)``."""
    h, _, _, f, _, _ = pair.evaluate(np.array([t1]), need=0)[:, 0]
    return float(h / f * math.sin(ratio_RN))


def _neighbour_gap(pair, t):
    stops = [pair.start, pair.end] + [float(x) for x in pair.breakpoints]
    return min(abs(t - s) for s in stops if abs(t - s) > 1e-12 * max(1.0, abs(t)))


def smooth_corner(pair, t1, p, q, delta0, max_halvings=MAX_SMOOTH_HALVINGS,
                  window_points=2001, margin=0.0):
    """Replace both profiles on ``[t1 - d, t1 + d]`` by quintic blends.

    ``d`` starts at ``delta0`` (capped at half the distance to the nearest
    other breakpoint) and halves until Ricci is positive on the window.
    Returns ``(pair, d)``.
    """
    left = pair.one_sided(t1, "left")
    right = pair.one_sided(t1, "right")
    for name, i in (("h", 0), ("f", 3)):
        if abs(left[i] - right[i]) > 1e-9 * max(1.0, abs(left[i])):
            raise PreconditionError(f"{name} is discontinuous at t1 = {t1!r}")
        if left[i + 1] < right[i + 1] - 1e-12:
            raise PreconditionError(
                f"{name}'(t1-) = {left[i + 1]!r} < {name}'(t1+) = {right[i + 1]!r}")
    delta = min(float(delta0), 0.5 * _neighbour_gap(pair, t1))
    if not delta > 0:
        raise ValueError(f"delta0 must be positive, got {delta0!r}")
    last = None
    for _ in range(max_halvings + 1):
        lo, hi = t1 - delta, t1 + delta
        jl = pair.one_sided(lo, "right")
        jr = pair.one_sided(hi, "left")
        hb = blend(lo, jl[:3], hi, jr[:3])
        fb = blend(lo, jl[3:], hi, jr[3:])
        mid = WarpProfilePair((Segment(lo, hi, hb, fb, "blend"),))
        out = pair.restrict(pair.start, lo).concat(mid, 2).concat(
            pair.restrict(hi, pair.end), 2)
        last = min_ricci_on_grid(out, p, q, np.linspace(lo, hi, window_points))
        if last.min_value > margin:
            return out, delta
        delta *= 0.5
    raise SmoothingFailureError(
        f"no positive blend after {max_halvings} halvings; last minimum "
        f"{last.min_value!r} ({last.component}) at t = {last.argmin!r}")


def iota_boundary_form(ratio_RN, N=1.0):
    """Diagonal blocks of the boundary form of a product of spheres in a round ball.

    Returns ``(0, -cot(R/N)/N)``.
    """
    if not 0.0 < ratio_RN < math.pi:
        raise ValueError(f"ratio_RN must lie in (0, pi), got {ratio_RN!r}")
    if not N > 0:
        raise ValueError(f"N must be positive, got {N!r}")
    if abs(ratio_RN - math.pi / 2) <= 1e-15:
        return 0.0, 0.0
    return 0.0, -1.0 / (N * math.tan(ratio_RN))


def _boundary_report(pair, inp, alpha, h1, t0):
    h0_, dh0, _, f0_, df0, _ = pair.evaluate(np.array([0.0]), need=1)[:, 0]
    ht, dht, _, ft, dft, _ = pair.evaluate(np.array([t0]), need=1)[:, 0]
    cos_t, sin_t = math.cos(inp.ratio_RN), math.sin(inp.ratio_RN)

    def eq(name, lhs, rhs):
        res = abs(lhs - rhs)
        return BoundaryCheck(name, float(lhs), "==", float(rhs), float(res),
                             bool(res <= BOUNDARY_TOL * max(1.0, abs(rhs))))

    def le(name, lhs, rhs):
        res = max(0.0, lhs - rhs)
        return BoundaryCheck(name, float(lhs), "<=", float(rhs), float(res),
                             bool(res <= BOUNDARY_TOL))

    def ge(name, lhs, rhs):
        res = max(0.0, rhs - lhs)
        return BoundaryCheck(name, float(lhs), ">=", float(rhs), float(res),
                             bool(res <= BOUNDARY_TOL))

    checks = [
        eq("h(0) = alpha", h0_, alpha),
        eq("f(0) = alpha r", f0_, alpha * inp.r),
        le("h'(0) <= lambda", dh0, inp.lam),
        le("f'(0) <= 0", df0, 0.0),
        ge("h'(t0) >= 0", dht, 0.0),
        ge("f'(t0) >= cos(R/N)", dft, cos_t),
    ]
    if inp.rho_over_N is not None:
        checks.append(eq("f(t0) (rho/N) / h(t1) = sin(R/N)",
                         ft * inp.rho_over_N / h1, sin_t))
        # second fundamental form at t0 must dominate the ball's, after scaling
        beta = h1 / inp.rho_over_N
        _, iota = iota_boundary_form(inp.ratio_RN)
        checks.append(ge("f'(t0)/f(t0) >= -iota/beta", dft / ft, -iota / beta))
    return tuple(checks)


def solve_neck(inp, tol=1e-10, t_max=100.0, density=DEFAULT_DENSITY,
               search_density=SEARCH_DENSITY, delta0=0.5, margin=0.0, h0=None):
    """Run the whole construction and return a :class:`NeckCertificate`.

    Raises :class:`CertificationError` if the final sweep over ``[0, t0]``
    (at least ``MIN_CERT_POINTS`` points) finds a non-positive component.
    """
    if h0 is None:
        h0 = solve_h0(inp.lam, t_max, tol)
    fc = solve_fc(inp.C, h0)
    sr = search_parameters(inp, h0, fc=fc, density=search_density, margin=margin)
    pair = scale_profiles(h0, fc, sr.a, sr.b)
    # kappa and h(t1) use the corner values, before the blend moves them
    kappa = compute_kappa(pair, sr.t1, inp.ratio_RN)
    h1, f1 = (float(v) for v in pair.evaluate(np.array([sr.t1]), need=0)[[0, 3], 0])
    if inp.rho_over_N is None:
        f_target, beta = None, None
    else:
        if inp.rho_over_N >= kappa:
            raise KappaViolationError(
                f"rho/N = {inp.rho_over_N!r} is not below kappa = {kappa!r}")
        f_target = math.sin(inp.ratio_RN) * h1 / inp.rho_over_N
        beta = h1 / inp.rho_over_N
    ext, t0 = extend_profiles(pair, sr.t1, inp.ratio_RN, f_target)
    c1, c2 = extension_slopes(pair.one_sided(sr.t1, "left")[4], inp.ratio_RN)
    smooth, delta = smooth_corner(ext, sr.t1, inp.p, inp.q, delta0, margin=margin)

    grid = uniform_grid(0.0, t0, density, MIN_CERT_POINTS)
    gm = min_ricci_on_grid(smooth, inp.p, inp.q, grid)
    if not gm.min_value > margin:
        raise CertificationError(
            f"Ricci minimum {gm.min_value!r} ({gm.component}) at t = {gm.argmin!r}")
    alpha = sr.a * h0.initial_value
    report = _boundary_report(smooth, inp, alpha, h1, t0)
    return NeckCertificate(
        input=inp, a=sr.a, b=sr.b, C=sr.C, t_b=sr.t_b, t1=sr.t1, t0=t0,
        alpha=alpha, beta=beta, kappa=kappa, min_ricci_margin=gm.min_value,
        min_ricci_at=gm.argmin, min_ricci_component=gm.component,
        profiles=smooth, boundary_report=report, grid_points=int(grid.size),
        density=float(density), delta=delta, extension_slopes=(c1, c2),
        halvings=sr.halvings, tol=tol, t_max=t_max,
        extras={"h_t1": h1, "f_t1": f1, "fprime_t1": sr.fprime_t1,
                "search_margin": sr.ricci_margin})


__all__ = [
    "COMPONENTS", "SurgeryInput", "SearchResult", "BoundaryCheck", "NeckCertificate",
    "find_tb", "search_parameters", "extension_slopes", "extension_length",
    "extend_profiles", "compute_kappa", "smooth_corner", "iota_boundary_form",
    "solve_neck",
]
