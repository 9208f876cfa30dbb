"""Exact invariants of simply-connected 6-manifolds with torsion-free homology.

An invariant system is ``(b2, b3, mu, w2, p1)``: second and third Betti
numbers, the cup-product trilinear form on ``H^2``, the second
Stiefel-Whitney class mod 2 and the first Pontryagin class as a covector.
Everything is carried in a fixed basis with Python integers, so all
comparisons are exact.
"""

import itertools
import json
from dataclasses import dataclass, field

import numpy as np

from .errors import NoSuchBundleError, NotALinearBundleError


def _int(v, what):
    if isinstance(v, bool) or int(v) != v:
        raise ValueError(f"{what} must be an integer, got {v!r}")
    return int(v)


def _tensor(n, entries):
    """Symmetric 3-tensor from ``{(i, j, k): value}`` given on any ordering."""
    mu = np.zeros((n, n, n), dtype=object)
    mu[...] = 0
    for (i, j, k), v in entries.items():
        for perm in set(itertools.permutations((i, j, k))):
            mu[perm] = int(v)
    return mu


@dataclass(frozen=True, eq=False)
class SixManifoldInvariants:
    """Basis-carried invariant system.

    ``mu`` is a fully symmetric ``(b2, b2, b2)`` object array of ints.
    Equality compares ``b2, b3, mu, w2, p1`` and ignores labels and
    provenance.
    """

    b2: int
    b3: int
    mu: np.ndarray
    w2: tuple
    p1: tuple
    labels: tuple = None
    provenance: tuple = field(default=())

    def __post_init__(self):
        b2 = _int(self.b2, "b2")
        b3 = _int(self.b3, "b3")
        if b2 < 0 or b3 < 0:
            raise ValueError("Betti numbers are non-negative")
        if b3 % 2:
            raise ValueError(f"b3 must be even, got {b3}")
        mu = np.empty((b2, b2, b2), dtype=object)
        src = np.asarray(self.mu, dtype=object).reshape((b2, b2, b2))
        for idx in np.ndindex(mu.shape):
            mu[idx] = _int(src[idx], "mu entry")
        for axes in ((1, 0, 2), (0, 2, 1), (2, 1, 0)):
            if not np.array_equal(mu, mu.transpose(axes)):
                raise ValueError("mu must be fully symmetric")
        w2 = tuple(_int(x, "w2 entry") % 2 for x in self.w2)
        p1 = tuple(_int(x, "p1 entry") for x in self.p1)
        if len(w2) != b2 or len(p1) != b2:
            raise ValueError("w2 and p1 need one entry per basis element")
        labels = tuple(self.labels) if self.labels is not None else tuple(
            f"x{i + 1}" for i in range(b2))
        if len(labels) != b2:
            raise ValueError("need one label per basis element")
        for name, v in (("b2", b2), ("b3", b3), ("mu", mu), ("w2", w2), ("p1", p1),
                        ("labels", labels), ("provenance", tuple(self.provenance))):
            object.__setattr__(self, name, v)

    def __eq__(self, other):
        if not isinstance(other, SixManifoldInvariants):
            return NotImplemented
        return (self.b2 == other.b2 and self.b3 == other.b3 and self.w2 == other.w2
                and self.p1 == other.p1 and np.array_equal(self.mu, other.mu))

    def __hash__(self):
        return hash((self.b2, self.b3, self.w2, self.p1, tuple(self.mu.ravel())))

    def index(self, label):
        return self.labels.index(label)

    def mu_entry(self, *labels):
        return self.mu[tuple(self.index(x) for x in labels)]

    def basis_vector(self, label):
        v = [0] * self.b2
        v[self.index(label)] = 1
        return v

    def permuted(self, order):
        """Same invariants in the basis ``order`` (a permutation of indices)."""
        order = list(order)
        mu = self.mu[np.ix_(order, order, order)]
        return SixManifoldInvariants(
            self.b2, self.b3, mu, [self.w2[i] for i in order], [self.p1[i] for i in order],
            [self.labels[i] for i in order], self.provenance)

    def to_dict(self):
        entries = [[i, j, k, int(self.mu[i, j, k])]
                   for i in range(self.b2) for j in range(i, self.b2)
                   for k in range(j, self.b2)]
        return {"b2": self.b2, "b3": self.b3, "mu": entries,
                "w2": list(self.w2), "p1": list(self.p1),
                "basis_labels": list(self.labels)}

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, d):
        n = int(d["b2"])
        mu = _tensor(n, {(i, j, k): v for i, j, k, v in d["mu"]})
        return cls(n, d["b3"], mu, d["w2"], d["p1"], d.get("basis_labels"))


def _bareiss_det(rows):
    n = len(rows)
    if n == 0:
        return 1
    m = [list(r) for r in rows]
    sign, prev = 1, 1
    for k in range(n - 1):
        if m[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if m[i][k] != 0), None)
            if swap is None:
                return 0
            m[k], m[swap] = m[swap], m[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


@dataclass(frozen=True)
class FourManifoldData:
    """Intersection form, ``w2`` and ``<p1, [B]>`` of a closed simply-connected 4-manifold."""

    Q: tuple
    w2_B: tuple
    p1_B: int

    def __post_init__(self):
        Q = tuple(tuple(_int(x, "Q entry") for x in row) for row in self.Q)
        n = len(Q)
        if any(len(row) != n for row in Q):
            raise ValueError("Q must be square")
        if any(Q[i][j] != Q[j][i] for i in range(n) for j in range(n)):
            raise ValueError("Q must be symmetric")
        if abs(_bareiss_det(Q)) != 1:
            raise ValueError("Q must be unimodular (determinant +-1)")
        w2 = tuple(_int(x, "w2_B entry") % 2 for x in self.w2_B)
        if len(w2) != n:
            raise ValueError("w2_B needs one entry per basis element")
        object.__setattr__(self, "Q", Q)
        object.__setattr__(self, "w2_B", w2)
        object.__setattr__(self, "p1_B", _int(self.p1_B, "p1_B"))

    @property
    def rank(self):
        return len(self.Q)

    @classmethod
    def sphere(cls):
        return cls((), (), 0)

    @classmethod
    def cp2_sum(cls, gamma):
        """``#_i (gamma_i CP^2)``: diagonal form, every class odd, ``p1 = 3 sum(gamma)``."""
        gamma = tuple(_int(g, "gamma entry") for g in gamma)
        k = len(gamma)
        Q = tuple(tuple(gamma[i] if i == j else 0 for j in range(k)) for i in range(k))
        return cls(Q, (1,) * k, 3 * sum(gamma))


@dataclass(frozen=True)
class BundleData:
    """Linear ``S^2``-bundle over ``#_i (gamma_i CP^2)`` with parameters ``(alpha, beta)``."""

    gamma: tuple
    alpha: int
    beta: tuple

    def __post_init__(self):
        gamma = tuple(_int(g, "gamma entry") for g in self.gamma)
        beta = tuple(_int(b, "beta entry") for b in self.beta)
        if any(g not in (1, -1) for g in gamma):
            raise ValueError("gamma entries must be +1 or -1")
        if any(b not in (0, 1) for b in beta):
            raise ValueError("beta entries must be 0 or 1")
        if len(gamma) != len(beta):
            raise ValueError("gamma and beta must have the same length")
        object.__setattr__(self, "gamma", gamma)
        object.__setattr__(self, "beta", beta)
        object.__setattr__(self, "alpha", _int(self.alpha, "alpha"))

    @property
    def k(self):
        return len(self.gamma)

    @property
    def p1_xi(self):
        return 4 * self.alpha + sum(g * b for g, b in zip(self.gamma, self.beta))


def _qform(Q, u, v):
    return sum(Q[i][j] * u[i] * v[j] for i in range(len(u)) for j in range(len(v)))


def sphere_bundle_invariants(base, W, p1_xi, labels=None):
    """Invariants of the ``S^2``-bundle of a rank-3 bundle ``xi`` over ``base``.

    ``W`` is an integral lift of ``w2(xi)`` in the basis of ``H^2(base)`` and
    ``p1_xi = <p1(xi), [B]>``. The basis of ``H^2`` of the total space is the
    pulled-back basis followed by one extra class ``a``.

    Raises
    ------
    NotALinearBundleError
        If ``W.Q.W`` and ``p1_xi`` differ mod 4.
    """
    n = base.rank
    W = [_int(w, "W entry") for w in W]
    if len(W) != n:
        raise ValueError(f"W needs {n} entries")
    p1_xi = _int(p1_xi, "p1_xi")
    X2 = _qform(base.Q, W, W)
    if (X2 - p1_xi) % 4:
        raise NotALinearBundleError(
            f"W.Q.W = {X2} and p1 = {p1_xi} differ mod 4; no such rank-3 bundle")
    QW = [sum(base.Q[i][j] * W[j] for j in range(n)) for i in range(n)]
    entries = {(n, n, n): (3 * X2 + p1_xi) // 4}
    for i in range(n):
        entries[(i, n, n)] = QW[i]
        for j in range(i, n):
            entries[(i, j, n)] = base.Q[i][j]
    mu = _tensor(n + 1, entries)
    w2 = [(base.w2_B[i] + W[i]) % 2 for i in range(n)] + [0]
    p1 = [0] * n + [p1_xi + base.p1_B]
    if labels is None:
        labels = [f"x{i + 1}" for i in range(n)] + ["a"]
    return SixManifoldInvariants(n + 1, 0, mu, w2, p1, labels,
                                 (f"S2-bundle(p1_xi={p1_xi})",))


def bundle_over_connected_sum(data, labels=None):
    """Invariants of the ``S^2``-bundle described by ``data`` in the basis ``(b_1..b_k, a)``."""
    k = data.k
    g, b = data.gamma, data.beta
    gb = sum(gi * bi for gi, bi in zip(g, b))
    entries = {(k, k, k): data.alpha + gb}
    for i in range(k):
        entries[(i, i, k)] = g[i]
        entries[(i, k, k)] = b[i] * g[i]
    mu = _tensor(k + 1, entries)
    w2 = [(1 - bi) % 2 for bi in b] + [0]
    p1 = [0] * k + [4 * data.alpha + sum((3 + bi) * gi for gi, bi in zip(g, b))]
    if labels is None:
        labels = [f"b{i + 1}" for i in range(k)] + ["a"]
    tag = f"M(alpha={data.alpha}, beta={list(b)}, gamma={list(g)})"
    return SixManifoldInvariants(k + 1, 0, mu, w2, p1, labels, (tag,))


def as_sphere_bundle_input(data):
    """``(base, W, p1_xi)`` feeding :func:`sphere_bundle_invariants` for ``data``."""
    return FourManifoldData.cp2_sum(data.gamma), list(data.beta), data.p1_xi


def classify_bundle(gamma, beta, p1_total):
    """The ``alpha`` with ``4 alpha + sum(gamma_i beta_i) = p1_total``.

    Raises :class:`NoSuchBundleError` when no integer solution exists.
    """
    gamma = [_int(g, "gamma entry") for g in gamma]
    beta = [_int(b, "beta entry") for b in beta]
    if len(gamma) != len(beta):
        raise ValueError("gamma and beta must have the same length")
    rest = _int(p1_total, "p1_total") - sum(g * b for g, b in zip(gamma, beta))
    if rest % 4:
        raise NoSuchBundleError(
            f"p1 = {p1_total} is not 4 alpha + {p1_total - rest} for any integer alpha")
    return rest // 4


def connected_sum(x, y):
    """Block sum: Betti numbers add, mixed cup products vanish."""
    n, m = x.b2, y.b2
    mu = np.zeros((n + m,) * 3, dtype=object)
    mu[...] = 0
    mu[:n, :n, :n] = x.mu
    mu[n:, n:, n:] = y.mu
    return SixManifoldInvariants(n + m, x.b3 + y.b3, mu, x.w2 + y.w2, x.p1 + y.p1,
                                 x.labels + y.labels, x.provenance + y.provenance)


def s3s3():
    return SixManifoldInvariants(0, 2, np.zeros((0, 0, 0), dtype=object), (), (), (),
                                 ("S3xS3",))


def is_spin(inv):
    return not any(inv.w2)


def trilinear(inv, u, v, w):
    """``mu(u, v, w)`` for integer coefficient vectors."""
    n = inv.b2
    total = 0
    for i in range(n):
        if u[i]:
            for j in range(n):
                if v[j]:
                    for k in range(n):
                        if w[k] and inv.mu[i, j, k]:
                            total += inv.mu[i, j, k] * u[i] * v[j] * w[k]
    return int(total)


def _xgcd(a, b):
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    return a, x0, y0


def p1_kernel_subspace(inv):
    """Integer basis of ``{x : <p1, x> = 0}`` as a list of column vectors.

    Unimodular column operations reduce the covector to ``(g, 0, ..., 0)``;
    the transformed columns 2..n then span the kernel lattice. Each vector
    is normalised so its first non-zero entry is positive.
    """
    n = inv.b2
    row = list(inv.p1)
    cols = [[int(i == j) for i in range(n)] for j in range(n)]
    if not any(row):
        return cols
    # move a non-zero entry to position 0
    first = next(j for j in range(n) if row[j])
    row[0], row[first] = row[first], row[0]
    cols[0], cols[first] = cols[first], cols[0]
    for j in range(1, n):
        a, b = row[0], row[j]
        if b == 0:
            continue
        g, s, t = _xgcd(a, b)
        c0, cj = cols[0], cols[j]
        cols[0] = [s * x + t * y for x, y in zip(c0, cj)]
        cols[j] = [(-b // g) * x + (a // g) * y for x, y in zip(c0, cj)]
        row[0], row[j] = g, 0
    out = []
    for c in cols[1:]:
        lead = next(x for x in c if x)
        out.append([-x for x in c] if lead < 0 else c)
    return out


def mu_restricted_trivial(inv, basis):
    """True iff ``mu`` vanishes on every triple drawn from ``basis``."""
    basis = [list(v) for v in basis]
    for u, v, w in itertools.combinations_with_replacement(basis, 3):
        if trilinear(inv, u, v, w):
            return False
    return True


@dataclass(frozen=True)
class NoveltyVerdict:
    verdict: str
    case: int
    reasons: tuple

    def as_dict(self):
        return {"verdict": self.verdict, "case": self.case, "reasons": list(self.reasons)}


def novelty_test(inv):
    """Sufficient test that ``inv`` differs from every manifold in :data:`KNOWN_MANIFOLDS`.

    Case 1: ``b3 >= 2`` with non-trivial ``mu``. Among the catalogue entries
    only ones with trivial ``mu`` have ``b3 > 0``.
    Case 2: ``b2 >= 4`` with ``mu`` non-trivial on the kernel of ``p1``.
    Among the catalogue entries with ``b2 >= 4`` this restriction is trivial.
    Anything else is ``"inconclusive"``.
    """
    reasons = []
    mu_nontrivial = any(inv.mu.ravel())
    if inv.b3 >= 2 and mu_nontrivial:
        reasons.append(f"b3 = {inv.b3} >= 2 and mu is non-trivial")
        return NoveltyVerdict("new_per_prop", 1, tuple(reasons))
    reasons.append(f"case 1 not met (b3 = {inv.b3}, mu non-trivial: {mu_nontrivial})")
    if inv.b2 >= 4:
        U = p1_kernel_subspace(inv)
        if not mu_restricted_trivial(inv, U):
            reasons.append(f"b2 = {inv.b2} >= 4 and mu is non-trivial on ker p1 "
                           f"(rank {len(U)})")
            return NoveltyVerdict("new_per_prop", 2, tuple(reasons))
        reasons.append("case 2 not met (mu trivial on ker p1)")
    else:
        reasons.append(f"case 2 not met (b2 = {inv.b2} < 4)")
    return NoveltyVerdict("inconclusive", 0, tuple(reasons))


def proposition_manifold(m, bundles):
    """``#_m (S^3 x S^3) # M_1 # ... # M_l`` with labels ``b_i_j`` and ``a_i``."""
    if _int(m, "m") < 0:
        raise ValueError("m must be non-negative")
    out = SixManifoldInvariants(0, 0, np.zeros((0, 0, 0), dtype=object), (), (), ())
    for _ in range(m):
        out = connected_sum(out, s3s3())
    for i, data in enumerate(bundles, start=1):
        labels = [f"b_{i}_{j + 1}" for j in range(data.k)] + [f"a_{i}"]
        out = connected_sum(out, bundle_over_connected_sum(data, labels))
    return out


#: closed simply-connected 6-manifolds already known to carry positive Ricci
#: curvature; reporting only, ``novelty_test`` does not consult it
KNOWN_MANIFOLDS = (
    {"item": 1, "name": "linear S2-bundles over #k(+-CP2) or #k(S2xS2)", "b3": 0},
    {"item": 2, "name": "S3xS3", "b3": 2, "mu_trivial": True},
    {"item": 3, "name": "nontrivial linear S4-bundle over S2", "b3": 0},
    {"item": 4, "name": "CP2-bundles over S2", "b3": 0},
    {"item": 5, "name": "S6", "b3": 0},
    {"item": 6, "name": "oriented Grassmannian SO(5)/(SO(3)xSO(2))", "b3": 0},
    {"item": 7, "name": "SU(3)/T2 and the biquotient SU(3)//T2", "b3": 0},
    {"item": 8, "name": "biquotients (S3)^3//T3", "b3": 0},
    {"item": 9, "name": "#k(S2xS4) #l(S3xS3)", "mu_trivial": True},
    {"item": 10, "name": "(S2 x~ S4) #k(S2xS4) #k+2(S3xS3)", "mu_trivial": True},
)


__all__ = [
    "SixManifoldInvariants", "FourManifoldData", "BundleData", "NoveltyVerdict",
    "sphere_bundle_invariants", "bundle_over_connected_sum", "as_sphere_bundle_input",
    "classify_bundle", "connected_sum", "s3s3", "is_spin", "trilinear",
    "p1_kernel_subspace", "mu_restricted_trivial", "novelty_test",
    "proposition_manifold", "KNOWN_MANIFOLDS",
]
