"""Acceptance suite: one PASS/FAIL line per criterion.

Run with ``pytest tests/test_acceptance.py -v -s`` or ``python3 tests/test_acceptance.py``.
"""
import math
import sys
import time

import numpy as np
import pytest

from surgerybench.errors import WorkbenchError
from surgerybench.invariants6 import (
    BundleData,
    as_sphere_bundle_input,
    bundle_over_connected_sum,
    classify_bundle,
    is_spin,
    novelty_test,
    proposition_manifold,
    s3s3,
    sphere_bundle_invariants,
    trilinear,
)
from surgerybench.neck_solver import SurgeryInput, find_tb, solve_neck
from surgerybench.plumbing import (
    LOW_BASE_DIM,
    NOT_A_TREE,
    DiscBundleNode,
    Edge,
    PlumbingGraph,
    schedule_radii,
    theorem_c_chain,
    validate_theorem_b,
)
from surgerybench.profiles import solve_fc, solve_h0, verify_profile_properties
from surgerybench.warp_core import (
    WarpProfilePair,
    ricci_at,
    ricci_components,
    round_join_profiles,
)

sys.path.insert(0, __file__.rsplit("/", 1)[0])
from conftest import analytic_pair, random_coeffs  # noqa: E402


@pytest.fixture
def report(capsys):
    def emit(n, ok, detail):
        with capsys.disabled():
            print(f"\nCRITERION {n}: {'PASS' if ok else 'FAIL'} {detail}")
        assert ok, detail
    return emit


def fd_pair(pair, step=1e-3):
    def make(row):
        def jet(t):
            t = np.asarray(t, dtype=float)
            v = [pair.evaluate(t + k * step, need=0)[row] for k in (-2, -1, 0, 1, 2)]
            d1 = (v[0] - 8 * v[1] + 8 * v[3] - v[4]) / (12 * step)
            d2 = (-v[0] + 16 * v[1] - 30 * v[2] + 16 * v[3] - v[4]) / (12 * step * step)
            return v[2], d1, d2
        return jet
    return WarpProfilePair.from_functions(make(0), make(3), pair.start, pair.end)


def test_criterion_1_round_sphere(report):
    t0 = time.perf_counter()
    worst = 0.0
    for p in range(3, 7):
        for q in range(3, 7):
            pair = round_join_profiles(p, q, 1.5)
            for t in np.linspace(pair.start, pair.end, 20):
                s = ricci_at(pair, p, q, float(t))
                worst = max(worst, max(abs(c - (p + q - 2)) for c in s[1:]))
    dt = time.perf_counter() - t0
    report(1, worst < 1e-9 and dt < 1.0, f"max error {worst:.2e}, runtime {dt:.3f}s")


def test_criterion_2_finite_differences(report):
    rng = np.random.default_rng(2)
    worst = 0.0
    for _ in range(10):
        pair = analytic_pair(random_coeffs(rng), 0.0, 2.0)
        t = np.linspace(0.05, 1.95, 40)
        for x, y in zip(ricci_components(pair, 3, 4, t), ricci_components(fd_pair(pair), 3, 4, t)):
            worst = max(worst, float(np.max(np.abs(x - y))))
    report(2, worst < 1e-6, f"max |analytic - FD| {worst:.2e}")


def test_criterion_3_ode_properties(report):
    t0 = time.perf_counter()
    failures = []
    worst_ratio, worst_halving = 0.0, 0.0
    for lam in (0.1, 0.5, 2.0):
        h0 = solve_h0(lam, 50.0, 1e-10)
        h0b = solve_h0(lam, 50.0, 5e-11)
        for chk in h0.invariant_checks():
            if not chk.passed:
                failures.append(f"h0[lam={lam}].{chk.name}")
        worst_halving = max(worst_halving, float(np.max(np.abs(h0.h - h0b.h))))
        for C in (0.1, 0.5, 0.9):
            fc = solve_fc(C, h0)
            fcb = solve_fc(C, h0b)
            rep = verify_profile_properties(h0, fc, ratio_slack=1e-8)
            for chk in rep.entries:
                if chk.name == "decay" and C > 0.5:
                    continue
                if not chk.passed:
                    failures.append(f"fc[lam={lam},C={C}].{chk.name} ({chk.detail})")
            r = fc.ratio()
            worst_ratio = max(worst_ratio, float(max(-r.min(), r.max() - 1.0)))
            rel = np.abs(fc.f - fcb.f) / np.maximum(1.0, np.abs(fc.f))
            worst_halving = max(worst_halving, float(rel.max()))
    dt = time.perf_counter() - t0
    ok = not failures and worst_halving < 1e-8 and dt < 10.0
    report(3, ok, f"failures {failures or 'none'}; ratio excess {worst_ratio:.2e}; "
                  f"halving {worst_halving:.2e}; runtime {dt:.2f}s")


def test_criterion_4_tb_trend(report):
    lam, C = 0.5, 0.5
    h0 = solve_h0(lam, 1000.0)
    fc = solve_fc(C, h0)
    a0 = min(1.0, 2 * lam)
    b0 = a0 * h0.initial_value * 1.0
    tbs, slopes = [], []
    for k in range(5):
        b = b0 / 2 ** k
        tb = find_tb(h0, fc, 3, 3, a0, b, 200)
        tbs.append(tb)
        slopes.append(b * float(fc.jet(np.array([tb]))[1][0]) if math.isfinite(tb) else math.nan)
    finite = all(math.isfinite(t) for t in tbs)
    ok = (finite and all(x < y for x, y in zip(tbs, tbs[1:]))
          and all(x < y for x, y in zip(slopes, slopes[1:])) and slopes[-1] > 0.9)
    report(4, ok, f"t_b {tbs}; f'(t_b) {slopes}")


def two_pass(inp, tol):
    first = solve_neck(inp, tol=tol, t_max=1000.0)
    cert = solve_neck(SurgeryInput(inp.p, inp.q, inp.ratio_RN, inp.lam, inp.r,
                                   rho_over_N=first.kappa / 2), tol=tol, t_max=1000.0)
    return first, cert


@pytest.mark.parametrize("args", [(3, 3, math.pi / 4, 0.5, 1.0), (3, 5, math.pi / 6, 0.2, 0.5)],
                         ids=["quarter_turn", "sixth_turn"])
def test_criterion_5_end_to_end_neck(report, args):
    t0 = time.perf_counter()
    inp = SurgeryInput(*args)
    try:
        first, cert = two_pass(inp, 1e-10)
        again, _ = two_pass(inp, 5e-11)
    except WorkbenchError as exc:
        d = exc.to_dict()
        d.update(d.get("details", {}))
        report(5, False, f"{args}: {d.get('error')}: {d.get('message')} "
                         f"(max f' {d.get('max_fprime')}, target {d.get('target_cos')}) "
                         f"after {time.perf_counter() - t0:.1f}s")
        return
    dt = time.perf_counter() - t0
    bounds = all(c.passed for c in cert.boundary_report)
    drift = abs(first.kappa - again.kappa)
    ok = (cert.min_ricci_margin > 0 and cert.grid_points >= 10_000 and bounds and drift < 1e-6
          and dt < 30.0)
    report(5, ok, f"{args}: kappa {cert.kappa:.8g}, margin {cert.min_ricci_margin:.2e}, "
                  f"boundary {bounds}, drift {drift:.1e}, runtime {dt:.1f}s")


def random_tree(rng, n):
    parents = [None] + [int(rng.integers(0, i)) for i in range(1, n)]
    depth = [0] * n
    for i in range(1, n):
        depth[i] = depth[parents[i]] + 1
    nodes = tuple(DiscBundleNode(f"N{i}", *((3, 4) if depth[i] % 2 == 0 else (4, 3)))
                  for i in range(n))
    edges = tuple(Edge(f"N{parents[i]}", f"N{i}", int(rng.choice([1, -1])))
                  for i in range(1, n))
    return PlumbingGraph(nodes, edges), parents


def test_criterion_6_plumbing(report):
    chain = theorem_c_chain("s2_fiber_over_base", 4)
    core = validate_theorem_b(chain, "S3xD4").boundary_core_metric

    graph, parents = random_tree(np.random.default_rng(6), 5)
    inputs = {n.name: SurgeryInput(n.base_dim, n.fiber_dim, 1.56, 0.5, 4.0) for n in graph.nodes}
    try:
        sched = schedule_radii(graph, "N0", inputs)
        radii = sched.radii
        decreasing = all(radii[f"N{i}"] < radii[f"N{parents[i]}"] for i in range(1, 5))
        sched_detail = f"radii {radii}"
    except WorkbenchError as exc:
        decreasing, sched_detail = False, f"schedule failed: {exc}"

    cyc = PlumbingGraph(tuple(DiscBundleNode(x, 3, 3) for x in "ABC"),
                        (Edge("A", "B"), Edge("B", "C"), Edge("C", "A")))
    low = PlumbingGraph((DiscBundleNode("X", 2, 4), DiscBundleNode("Y", 4, 2)), (Edge("X", "Y"),))
    rc, rl = validate_theorem_b(cyc, "A"), validate_theorem_b(low, "Y")
    rejected = (not rc.boundary_positive_ricci and NOT_A_TREE in rc.reasons
                and not rl.boundary_positive_ricci and LOW_BASE_DIM in rl.reasons)
    report(6, core and decreasing and rejected,
           f"chain core {core}; {sched_detail}; rejections {rejected}")


def random_bundle(rng):
    k = int(rng.integers(0, 5))
    return BundleData(tuple(int(x) for x in rng.choice([1, -1], k)), int(rng.integers(-20, 21)),
                      tuple(int(x) for x in rng.integers(0, 2, k)))


def test_criterion_7_invariants(report):
    rng = np.random.default_rng(7)
    subst = all(
        sphere_bundle_invariants(*as_sphere_bundle_input(d)) == bundle_over_connected_sum(d)
        for d in (random_bundle(rng) for _ in range(50)))
    trips = all(classify_bundle(d.gamma, d.beta, d.p1_xi) == d.alpha
                for d in (random_bundle(rng) for _ in range(100)))
    cp3 = bundle_over_connected_sum(BundleData((), 1, ()))
    cross = cp3.mu_entry("a", "a", "a") == 1 and cp3.p1 == (4,) and is_spin(cp3)
    report(7, subst and trips and cross,
           f"substitution {subst}; round trips {trips}; CP3 {cross}")


def test_criterion_8_novelty(report):
    t0 = time.perf_counter()
    case1 = novelty_test(proposition_manifold(1, [BundleData((), 1, ())]))
    rng = np.random.default_rng(8)
    witnesses = 0
    cases2 = True
    for _ in range(20):
        g = int(rng.choice([1, -1]))
        blocks = [BundleData((g,), int(rng.integers(-5, 6)), (int(rng.integers(0, 2)),)),
                  BundleData((int(rng.choice([1, -1])),), int(rng.integers(-5, 6)),
                             (int(rng.integers(0, 2)),))]
        inv = proposition_manifold(0, blocks)
        v = novelty_test(inv)
        cases2 &= v.verdict == "new_per_prop"
        n1, n2 = inv.p1[inv.index("a_1")], inv.p1[inv.index("a_2")]
        g0 = math.gcd(n1, n2) or 1
        m = int(rng.integers(1, 6)) * int(rng.choice([1, -1]))
        lam1, lam2 = (m * n2 // g0, -m * n1 // g0) if (n1 or n2) else (m, int(rng.integers(-5, 6)))
        u = (lam1 * np.array(inv.basis_vector("a_1"), dtype=object)
             + lam2 * np.array(inv.basis_vector("a_2"), dtype=object)).tolist()
        assert sum(int(x) * y for x, y in zip(u, inv.p1)) == 0
        b = inv.basis_vector("b_1_1")
        witnesses += trilinear(inv, u, b, b) == lam1 * g
    inconclusive = novelty_test(s3s3()).verdict == "inconclusive"
    dt = time.perf_counter() - t0
    ok = (case1.verdict == "new_per_prop" and case1.case == 1 and cases2 and witnesses == 20
          and inconclusive and dt < 1.0)
    report(8, ok, f"case 1 {case1.verdict}; case 2 {cases2}; witnesses {witnesses}/20; "
                  f"s3s3 inconclusive {inconclusive}; runtime {dt:.3f}s")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v", "-p", "no:cacheprovider"]))
