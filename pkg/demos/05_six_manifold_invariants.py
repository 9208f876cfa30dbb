"""
Invariants of 6-manifolds from sphere bundles
=============================================

Compute (b2, b3, mu, w2, p1) for S^2-bundles over connected sums of CP^2
and run the novelty test on a few sums.
"""

from surgerybench.invariants6 import (
    BundleData,
    bundle_over_connected_sum,
    classify_bundle,
    novelty_test,
    proposition_manifold,
    s3s3,
)

# k = 0 recovers CP^3
cp3 = bundle_over_connected_sum(BundleData((), 1, ()))
print("CP3:", cp3.to_json())

xi = BundleData(gamma=(1, -1), alpha=3, beta=(1, 0))
inv = bundle_over_connected_sum(xi)
print("mu(b1, b1, a) =", inv.mu_entry("b1", "b1", "a"))
print("mu(a, a, a)   =", inv.mu_entry("a", "a", "a"))
print("p1 =", inv.p1, " w2 =", inv.w2)
print("alpha recovered from p1:", classify_bundle(xi.gamma, xi.beta, xi.p1_xi))

for label, m in [
    ("one bundle plus S3xS3", proposition_manifold(1, [BundleData((), 1, ())])),
    ("two bundles", proposition_manifold(0, [BundleData((1,), 0, (1,)),
                                             BundleData((-1,), 2, (0,))])),
    ("S3xS3", s3s3()),
]:
    v = novelty_test(m)
    print(f"{label:22s} {v.verdict:14s} case={v.case}")
