import math
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from surgerybench.errors import (
    InfeasibleTargetError,
    KappaViolationError,
    ParametersTooLargeError,
    PreconditionError,
    SearchFailureError,
)
from surgerybench.neck_solver import (
    SurgeryInput,
    compute_kappa,
    extend_profiles,
    extension_length,
    extension_slopes,
    find_tb,
    iota_boundary_form,
    search_parameters,
    smooth_corner,
    solve_neck,
)
from surgerybench.profiles import scale_profiles, solve_fc, solve_h0
from surgerybench.warp_core import (
    Segment,
    WarpProfilePair,
    min_ricci_on_grid,
    ricci_at,
    ricci_components,
    round_join_profiles,
)

from conftest import FEASIBLE_RATIO


def const_pair(hv, fv, start, end):
    def jet(v):
        def f(t):
            t = np.asarray(t, dtype=float)
            return np.full_like(t, v), np.zeros_like(t), np.zeros_like(t)
        return f
    return WarpProfilePair.from_functions(jet(hv), jet(fv), start, end)


def linear_pair(h1, f1, slope, start, end):
    def h(t):
        t = np.asarray(t, dtype=float)
        return np.full_like(t, h1), np.zeros_like(t), np.zeros_like(t)

    def f(t):
        t = np.asarray(t, dtype=float)
        return f1 + slope * (t - end), np.full_like(t, slope), np.zeros_like(t)

    return WarpProfilePair.from_functions(h, f, start, end)


class TestSurgeryInput:
    @pytest.mark.parametrize("kw", [
        dict(p=2, q=3, ratio_RN=1.0, lam=0.5, r=1.0),
        dict(p=3, q=3, ratio_RN=math.pi / 2, lam=0.5, r=1.0),
        dict(p=3, q=3, ratio_RN=0.0, lam=0.5, r=1.0),
        dict(p=3, q=3, ratio_RN=1.0, lam=0.0, r=1.0),
        dict(p=3, q=3, ratio_RN=1.0, lam=0.5, r=-1.0),
        dict(p=3, q=3, ratio_RN=1.0, lam=0.5, r=1.0, rho_over_N=0.0),
    ])
    def test_rejects(self, kw):
        with pytest.raises(ValueError):
            SurgeryInput(**kw)

    def test_dict_round_trip(self):
        inp = SurgeryInput(3, 5, 0.5, 0.2, 0.5, 0.01)
        assert SurgeryInput.from_dict(inp.to_dict()) == inp
        assert "lambda" in inp.to_dict()

    @pytest.mark.parametrize("p,q,C", [(3, 3, 0.5), (3, 5, 0.25), (5, 3, 0.5), (3, 4, 1 / 3)])
    def test_C(self, p, q, C):
        assert SurgeryInput(p, q, 1.0, 0.5, 1.0).C == pytest.approx(C)


class TestFindTb:
    def test_positive(self, h0_half, fc_half):
        pair = scale_profiles(h0_half, fc_half, 1.0, 1.0)
        assert ricci_at(pair, 3, 3, 0.0).ric_ww == pytest.approx(0.875, abs=1e-10)
        assert find_tb(h0_half, fc_half, 3, 3, 1.0, 1.0) > 0

    def test_too_large(self, h0_half, fc_half):
        with pytest.raises(ParametersTooLargeError):
            find_tb(h0_half, fc_half, 3, 3, 1.0, 3.0)

    def test_root_is_located(self, h0_half, fc_half):
        # large C and b with p = 6 drive Ric(W, W) negative early
        h0 = solve_h0(0.5, 50.0)
        fc = solve_fc(0.9, h0)
        tb = find_tb(h0, fc, 6, 3, 1.0, 2.0)
        assert math.isfinite(tb)
        pair = scale_profiles(h0, fc, 1.0, 2.0)
        assert abs(ricci_components(pair, 6, 3, np.array([tb]))[2][0]) < 1e-8
        grid = np.linspace(0, tb, 2000)[:-1]
        assert np.all(ricci_components(pair, 6, 3, grid)[2] > 0)

    def test_trend_under_halving(self, h0_half, fc_half):
        # expected to fail on t <= t_max: f_C' grows like log log t, so t_b is out of range
        b0 = 1.0 * h0_half.initial_value
        tbs = [find_tb(h0_half, fc_half, 3, 3, 1.0, b0 / 2 ** k) for k in range(4)]
        assert all(math.isfinite(t) for t in tbs), tbs
        assert all(x < y for x, y in zip(tbs, tbs[1:]))


class TestSearch:
    def test_coupling_and_slope(self, feasible_input):
        h0 = solve_h0(feasible_input.lam, 100.0)
        sr = search_parameters(feasible_input, h0)
        assert sr.a * min(feasible_input.lam, 0.5) <= feasible_input.lam
        assert sr.b == sr.a * h0.initial_value * feasible_input.r
        assert 0 < sr.C < 1 and sr.C < (feasible_input.p - 1) / (feasible_input.q - 1)
        assert sr.fprime_t1 > math.cos(FEASIBLE_RATIO)
        assert sr.t1 < sr.t_b and sr.ricci_margin > 0
        pair = scale_profiles(h0, solve_fc(sr.C, h0), sr.a, sr.b)
        f0, h0v = pair.evaluate(np.array([0.0]))[[3, 0], 0]
        assert f0 / h0v == pytest.approx(feasible_input.r, rel=1e-15)

    def test_t1_is_first_admissible(self, feasible_input):
        h0 = solve_h0(feasible_input.lam, 100.0)
        sr = search_parameters(feasible_input, h0, density=200)
        pair = scale_profiles(h0, solve_fc(sr.C, h0), sr.a, sr.b)
        before = np.arange(0, sr.t1, 1 / 200)[:-1]
        assert np.all(pair.evaluate(before)[4] <= math.cos(FEASIBLE_RATIO))

    @settings(max_examples=10, deadline=None)
    @given(st.floats(0.05, 3.0), st.floats(0.5, 2.0))
    def test_h_slope_bound(self, lam, r):
        inp = SurgeryInput(3, 3, 1.55, lam, r)
        try:
            sr = search_parameters(inp, solve_h0(lam, 100.0))
        except SearchFailureError:
            return
        assert sr.a * min(lam, 0.5) <= lam

    def test_pi_over_four(self):
        # expected to fail: b f_C' stays below cos(pi/4) for t <= 1e3
        inp = SurgeryInput(3, 3, math.pi / 4, 0.5, 1.0)
        sr = search_parameters(inp, solve_h0(0.5, 1000.0))
        assert sr.fprime_t1 > math.cos(math.pi / 4)


class TestExtension:
    def test_slopes_and_target(self, h0_half, fc_half):
        pair = scale_profiles(h0_half, fc_half, 1.0, 1.0)
        t1, ratio = 30.0, 1.5
        h1, _, _, f1, df1, _ = pair.evaluate(np.array([t1]))[:, 0]
        target = f1 + 3.0
        ext, t0 = extend_profiles(pair, t1, ratio, target)
        c1, c2 = extension_slopes(df1, ratio)
        assert c2 == pytest.approx(min(df1, 1 - 1e-6))
        assert c1 == pytest.approx((math.cos(ratio) + c2) / 2)
        assert ext.one_sided(t1, "right")[4] == pytest.approx(c2) and c2 <= df1
        assert ext.evaluate(np.array([t0]), need=0)[3, 0] == pytest.approx(target, abs=1e-9)
        # oracle: plain bisection on the closed form
        lo, hi = 0.0, 100.0
        g = lambda s: f1 + c1 * s + (c2 - c1) * (1 - math.exp(-s)) - target
        for _ in range(200):
            mid = (lo + hi) / 2
            lo, hi = (mid, hi) if g(mid) < 0 else (lo, mid)
        assert t0 - t1 == pytest.approx(lo, abs=1e-9)
        s = np.linspace(t1 + 1e-6, t0, 50)
        jets = ext.evaluate(s)
        assert np.all(jets[5] < 0)
        assert np.all((jets[4] > math.cos(ratio)) & (jets[4] < 1))
        tt, vv, _ = ricci_components(ext, 3, 3, s)
        assert np.allclose(tt, -2 * jets[5] / jets[3])
        assert np.allclose(vv, 1 / h1 ** 2)

    def test_no_target(self, h0_half, fc_half):
        pair = scale_profiles(h0_half, fc_half, 1.0, 1.0)
        _, t0 = extend_profiles(pair, 30.0, 1.5, None)
        assert t0 == 31.0

    def test_infeasible(self):
        with pytest.raises(InfeasibleTargetError):
            extension_length(2.0, 1.5, 0.5, 0.6)

    def test_slope_precondition(self):
        with pytest.raises(PreconditionError):
            extension_slopes(0.1, 1.0)


class TestKappa:
    def test_unit_ratio(self):
        pair = const_pair(2.0, 2.0, 0.0, 1.0)
        assert compute_kappa(pair, 0.5, 0.7) == pytest.approx(math.sin(0.7))

    def test_half_pi(self):
        pair = const_pair(2.0, 1.0, 0.0, 1.0)
        assert compute_kappa(pair, 0.5, math.pi / 2) == pytest.approx(2.0)


class TestSmoothCorner:
    def test_smooth_input_unchanged(self):
        pair = round_join_profiles(3, 3, 1.2)
        out, delta = smooth_corner(pair, 0.6, 3, 3, 0.01)
        t = np.linspace(0.1, 1.2, 221)
        outside = np.abs(t - 0.6) > delta * (1 + 1e-9)
        assert np.array_equal(out.evaluate(t[outside]), pair.evaluate(t[outside]))
        grid = np.linspace(0.1, 1.2, 1001)
        assert min_ricci_on_grid(out, 3, 3, grid).min_value == pytest.approx(4, abs=1e-9)

    def test_concave_corner(self):
        def h(t):
            t = np.asarray(t, dtype=float)
            return np.ones_like(t), np.zeros_like(t), np.zeros_like(t)

        def f(t):
            s = np.asarray(t, dtype=float) - 1.0
            return 2.0 + 0.9 * s - 0.1 * s * s, 0.9 - 0.2 * s, np.full_like(s, -0.2)

        c2 = 0.7
        c1 = (math.cos(1.2) + c2) / 2

        def g(t):
            s = np.asarray(t, dtype=float) - 1.0
            e = np.exp(-s)
            return 2.0 + c1 * s + (c2 - c1) * (1 - e), c1 + (c2 - c1) * e, -(c2 - c1) * e

        left = WarpProfilePair.from_functions(h, f, 0.0, 1.0)
        pair = left.concat(WarpProfilePair.from_functions(h, g, 1.0, 3.0), 0)
        assert pair.one_sided(1.0, "left")[4] > pair.one_sided(1.0, "right")[4]
        out, delta = smooth_corner(pair, 1.0, 3, 3, 0.5)
        t = np.linspace(1 - delta, 1 + delta, 401)
        jets = out.evaluate(t)
        assert np.any(jets[5] < 0)
        assert np.all(ricci_components(out, 3, 3, t)[0] > 0)
        assert out.continuity_at(np.array([1 - delta, 1 + delta])).tolist() == [2, 2]

    def test_precondition(self):
        left = linear_pair(1.0, 2.0, 0.5, 0.0, 1.0)
        right = WarpProfilePair.from_functions(
            left.segments[0].h,
            lambda t: (2.0 + 0.9 * (np.asarray(t) - 1.0), np.full_like(np.asarray(t, float), 0.9),
                       np.zeros_like(np.asarray(t, float))),
            1.0, 2.0)
        with pytest.raises(PreconditionError):
            smooth_corner(left.concat(right, 0), 1.0, 3, 3, 0.5)


class TestIota:
    def test_values(self):
        assert iota_boundary_form(math.pi / 2, 1.0) == (0.0, 0.0)
        assert iota_boundary_form(math.pi / 4, 1.0) == pytest.approx((0.0, -1.0))
        assert iota_boundary_form(math.pi / 4, 2.0) == pytest.approx((0.0, -0.5))

    @pytest.mark.parametrize("x", [0.0, math.pi, -1.0, 4.0])
    def test_range(self, x):
        with pytest.raises(ValueError):
            iota_boundary_form(x, 1.0)


class TestSolveNeck:
    def test_certificate(self, feasible_certificate):
        c = feasible_certificate
        assert 0 < c.t1 < c.t0 and c.t1 <= c.t_b
        assert c.min_ricci_margin > 0 and c.grid_points >= 10_001
        assert all(b.passed for b in c.boundary_report), [b.as_dict() for b in c.boundary_report]
        assert len(c.boundary_report) == 8
        assert c.kappa == pytest.approx(
            c.extras["h_t1"] / c.extras["f_t1"] * math.sin(FEASIBLE_RATIO), abs=1e-10)
        jets = c.profiles.evaluate(np.array([c.t0]))[:, 0]
        assert jets[1] == 0 and jets[4] >= math.cos(FEASIBLE_RATIO)
        _, iota = iota_boundary_form(FEASIBLE_RATIO)
        assert jets[4] / jets[3] >= -iota / c.beta - 1e-12

    def test_json_fields(self, feasible_certificate):
        d = feasible_certificate.to_dict(csv_points=11)
        for key in ("p", "q", "ratio_RN", "lambda", "r", "rho_over_N", "a", "b", "C", "t_b",
                    "t1", "t0", "alpha", "beta", "kappa", "min_ricci_margin"):
            assert key in d
        assert d["profile_csv"].splitlines()[0].startswith("t,h,")

    def test_kappa_violation(self, feasible_input, feasible_certificate):
        with pytest.raises(KappaViolationError):
            solve_neck(replace(feasible_input, rho_over_N=feasible_certificate.kappa * 1.01))

    def test_tol_stability(self, feasible_input):
        a = solve_neck(feasible_input, tol=1e-10)
        b = solve_neck(feasible_input, tol=1e-10 / 2)
        assert a.kappa == pytest.approx(b.kappa, abs=1e-6)

    def test_radius_scaling(self, feasible_input):
        for c in (0.5, 2.0):
            cert = solve_neck(replace(feasible_input, r=c * feasible_input.r))
            jets = cert.profiles.evaluate(np.array([0.0]))[:, 0]
            assert jets[3] / jets[0] == pytest.approx(c * feasible_input.r, rel=1e-15)

    def test_reference_input(self):
        # expected to fail: the slope target cos(pi/4) is not reached for t <= 1e3
        first = solve_neck(SurgeryInput(3, 3, math.pi / 4, 0.5, 1.0), t_max=1000.0)
        assert first.kappa > 0
