"""Plumbing graphs of disc bundles and the surgery radius cascade.

A node is a linear disc bundle ``D^fiber -> E -> B^base``. Plumbing two
bundles identifies a trivialised ``D^p x D^q`` in each with the factors
swapped, so an edge needs ``fiber(u) = base(v)`` and ``base(u) = fiber(v)``.
"""

import json
import math
from collections import deque
from dataclasses import dataclass, field, replace

from .errors import PreconditionError, ScheduleError, WorkbenchError
from .neck_solver import SurgeryInput, solve_neck

BASE_KINDS = ("core_metric", "positive_ricci_only", "sphere", "explicit")

NOT_A_TREE = "not a tree"
LOW_BASE_DIM = "dim(B_i) ≥ 3 violated"
ROOT_NOT_POSITIVE = "root base does not admit positive Ricci curvature"
NONROOT_NOT_CORE = "non-root base without a core metric"
ROOT_NOT_CORE = "root base has no core metric"
ROOT_FIBER_LOW = "root fiber dimension < 4"


@dataclass(frozen=True)
class DiscBundleNode:
    """One disc bundle.

    ``base_kind="explicit"`` means the base is a connected sum of copies of
    ``CP^2`` with orientations ``gamma``. ``trivial`` marks a product bundle.
    """

    name: str
    base_dim: int
    fiber_dim: int
    base_kind: str = "core_metric"
    gamma: tuple = None
    trivial: bool = False

    def __post_init__(self):
        if not isinstance(self.name, str) or not self.name:
            raise ValueError("node name must be a non-empty string")
        for attr in ("base_dim", "fiber_dim"):
            v = getattr(self, attr)
            if isinstance(v, bool) or int(v) != v or v < 2:
                raise ValueError(f"{self.name}: {attr} must be an integer >= 2, got {v!r}")
            object.__setattr__(self, attr, int(v))
        if self.base_kind not in BASE_KINDS:
            raise ValueError(f"{self.name}: unknown base_kind {self.base_kind!r}")
        if self.base_kind == "explicit":
            if not self.gamma or any(g not in (1, -1) for g in self.gamma):
                raise ValueError(f"{self.name}: explicit base needs gamma entries in {{+1, -1}}")
            if self.base_dim != 4:
                raise ValueError(f"{self.name}: a sum of CP^2's has dimension 4")
            object.__setattr__(self, "gamma", tuple(int(g) for g in self.gamma))
        elif self.gamma is not None:
            raise ValueError(f"{self.name}: gamma only applies to explicit bases")

    @property
    def total_dim(self):
        return self.base_dim + self.fiber_dim

    @property
    def base_positive_ricci(self):
        return True

    @property
    def base_core_metric(self):
        if self.base_kind == "sphere":
            return self.base_dim >= 3
        return self.base_kind in ("core_metric", "explicit")

    def to_dict(self):
        d = {"name": self.name, "base_dim": self.base_dim,
             "fiber_dim": self.fiber_dim, "base_kind": self.base_kind}
        if self.gamma is not None:
            d["gamma"] = list(self.gamma)
        if self.trivial:
            d["trivial"] = True
        return d

    @classmethod
    def from_dict(cls, d):
        gamma = d.get("gamma")
        return cls(name=d["name"], base_dim=d["base_dim"], fiber_dim=d["fiber_dim"],
                   base_kind=d.get("base_kind", "core_metric"),
                   gamma=tuple(gamma) if gamma is not None else None,
                   trivial=bool(d.get("trivial", False)))


@dataclass(frozen=True)
class Edge:
    u: str
    v: str
    sign: int = 1


@dataclass(frozen=True)
class PlumbingGraph:
    nodes: tuple
    edges: tuple = ()

    def __post_init__(self):
        nodes = tuple(self.nodes)
        edges = tuple(e if isinstance(e, Edge) else Edge(*e) for e in self.edges)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "edges", edges)
        if not nodes:
            raise ValueError("a plumbing graph needs at least one node")
        names = [n.name for n in nodes]
        if len(set(names)) != len(names):
            raise ValueError("node names must be unique")
        dims = {n.total_dim for n in nodes}
        if len(dims) != 1:
            raise ValueError(f"nodes have different total dimensions {sorted(dims)}")
        by_name = self.by_name
        for e in edges:
            if e.u not in by_name or e.v not in by_name:
                raise ValueError(f"edge {e.u}-{e.v} refers to an unknown node")
            if e.sign not in (1, -1):
                raise ValueError(f"edge {e.u}-{e.v}: sign must be +1 or -1")
            a, b = by_name[e.u], by_name[e.v]
            if a.fiber_dim != b.base_dim or a.base_dim != b.fiber_dim:
                raise ValueError(
                    f"edge {e.u}-{e.v}: plumbing needs fiber({e.u}) = base({e.v}) "
                    f"and base({e.u}) = fiber({e.v})")

    @property
    def by_name(self):
        return {n.name: n for n in self.nodes}

    def neighbours(self, name):
        out = []
        for e in self.edges:
            if e.u == name:
                out.append(e.v)
            elif e.v == name:
                out.append(e.u)
        return sorted(out)

    def to_dict(self):
        return {"nodes": [n.to_dict() for n in self.nodes],
                "edges": [{"from": e.u, "to": e.v, "sign": e.sign} for e in self.edges]}

    @classmethod
    def from_dict(cls, d):
        nodes = tuple(DiscBundleNode.from_dict(n) for n in d["nodes"])
        edges = tuple(Edge(e["from"], e["to"], int(e.get("sign", 1))) for e in d.get("edges", ()))
        return cls(nodes, edges)

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))


def is_tree(graph):
    """Connected with exactly ``|V| - 1`` edges (multi-edges count separately)."""
    if len(graph.edges) != len(graph.nodes) - 1:
        return False
    start = graph.nodes[0].name
    seen = {start}
    todo = [start]
    while todo:
        for nb in graph.neighbours(todo.pop()):
            if nb not in seen:
                seen.add(nb)
                todo.append(nb)
    return len(seen) == len(graph.nodes)


@dataclass(frozen=True)
class ValidationReport:
    boundary_positive_ricci: bool
    boundary_core_metric: bool
    reasons: tuple = ()
    details: tuple = ()

    def as_dict(self):
        return {"boundary_positive_ricci": self.boundary_positive_ricci,
                "boundary_core_metric": self.boundary_core_metric,
                "reasons": list(self.reasons), "details": list(self.details)}


def validate_theorem_b(graph, root):
    """Check whether the boundary of the plumbing carries positive Ricci curvature.

    ``boundary_positive_ricci`` needs a tree, every base of dimension at
    least 3, a root base with positive Ricci curvature and core metrics on
    every other base. ``boundary_core_metric`` also needs a core metric on
    the root base and root fiber dimension at least 4.
    """
    nodes = graph.by_name
    if root not in nodes:
        raise ValueError(f"root {root!r} is not a node of the graph")
    reasons, details = [], []

    def fail(reason, detail):
        if reason not in reasons:
            reasons.append(reason)
        details.append(detail)

    if not is_tree(graph):
        fail(NOT_A_TREE, f"{len(graph.nodes)} nodes, {len(graph.edges)} edges")
    for n in graph.nodes:
        if n.base_dim < 3:
            fail(LOW_BASE_DIM, f"{n.name}: base_dim = {n.base_dim}")
    r = nodes[root]
    if not r.base_positive_ricci:
        fail(ROOT_NOT_POSITIVE, root)
    for n in graph.nodes:
        if n.name != root and not n.base_core_metric:
            fail(NONROOT_NOT_CORE, f"{n.name}: base_kind = {n.base_kind}")
    positive = not reasons

    core_reasons = []
    if not r.base_core_metric:
        core_reasons.append((ROOT_NOT_CORE, f"{root}: base_kind = {r.base_kind}"))
    if r.fiber_dim < 4:
        core_reasons.append((ROOT_FIBER_LOW, f"{root}: fiber_dim = {r.fiber_dim}"))
    for reason, detail in core_reasons:
        fail(reason, detail)
    return ValidationReport(positive, positive and not core_reasons,
                          tuple(reasons), tuple(details))


def boundary_decomposition(e1, e2, sign):
    """Symbolic description of the boundary of ``e1`` plumbed with ``e2``.

    With ``p = base(e1)`` and ``q = fiber(e1)`` the boundary is the union of
    the two sphere bundles, each minus the preimage of an open disc in its
    base, glued along ``S^{p-1} x S^{q-1}``.
    """
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    if e1.fiber_dim != e2.base_dim or e1.base_dim != e2.fiber_dim:
        raise ValueError(f"{e1.name} and {e2.name} have incompatible dimensions")
    p, q = e1.base_dim, e1.fiber_dim
    if p % 2 and q % 2:
        orientation = f"oriented compatibly with {e1.name} and -{e2.name}"
    else:
        orientation = f"oriented compatibly with {e1.name} and {e2.name}"
    pieces = [
        f"E({e1.name}) minus pi^-1(D^{p}), S^{q - 1}-bundle over B^{p} minus a disc",
        f"E({e2.name}) minus pi^-1(D^{q}), S^{p - 1}-bundle over B^{q} minus a disc",
    ]
    surgery = None
    if e2.trivial and e2.base_kind == "sphere":
        surgery = f"surgery along a fiber sphere of E({e1.name})"
    elif e1.trivial and e1.base_kind == "sphere":
        surgery = f"surgery along a fiber sphere of E({e2.name})"
    return {
        "bundles": [e1.name, e2.name],
        "sign": sign,
        "pieces": pieces,
        "gluing_region": f"S^{p - 1} x S^{q - 1}",
        "orientation": orientation,
        "surgery": surgery,
    }


def theorem_c_chain(direction, dim):
    """The two standard plumbing graphs for bundles with 2-dimensional pieces.

    ``"s2_fiber_over_base"`` with ``dim = q >= 4`` gives the chain
    ``E - S^3 x D^q - S^q x D^3`` (``E`` a ``D^3``-bundle over a ``q``-dimensional
    base with a core metric). ``"s2_base"`` with ``dim = n >= 4`` gives
    ``CP^2 x D^(n-1) - S^(n-1) x D^4``. All signs are ``+1``.
    """
    if direction == "s2_fiber_over_base":
        q = int(dim)
        if q < 4:
            raise ValueError(f"the chain needs q >= 4, got {dim!r}")
        nodes = (
            DiscBundleNode("E", q, 3, "core_metric"),
            DiscBundleNode(f"S3xD{q}", 3, q, "sphere", trivial=True),
            DiscBundleNode(f"S{q}xD3", q, 3, "sphere", trivial=True),
        )
        edges = (Edge("E", f"S3xD{q}", 1), Edge(f"S3xD{q}", f"S{q}xD3", 1))
        return PlumbingGraph(nodes, edges)
    if direction == "s2_base":
        n = int(dim)
        if n < 4:
            raise ValueError(f"the CP^2 graph needs n >= 4, got {dim!r}")
        nodes = (
            DiscBundleNode(f"CP2xD{n - 1}", 4, n - 1, "explicit", gamma=(1,), trivial=True),
            DiscBundleNode(f"S{n - 1}xD4", n - 1, 4, "sphere", trivial=True),
        )
        return PlumbingGraph(nodes, (Edge(nodes[0].name, nodes[1].name, 1),))
    raise ValueError(f"unknown direction {direction!r}")


@dataclass(frozen=True)
class SurgeryStep:
    node: str
    parent: str
    fiber_radius: float
    radius_cap: float
    kappa_used: float
    rho_over_N: float
    parent_kappa: float
    min_ricci_margin: float
    certificate: object = field(repr=False, compare=False)

    def to_dict(self, csv_points=0):
        return {
            "node": self.node, "parent": self.parent,
            "fiber_radius": self.fiber_radius,
            "radius_cap": None if math.isinf(self.radius_cap) else self.radius_cap,
            "kappa_used": self.kappa_used, "rho_over_N": self.rho_over_N,
            "parent_kappa": self.parent_kappa,
            "min_ricci_margin": self.min_ricci_margin,
            "certificate": self.certificate.to_dict(csv_points=csv_points),
        }


@dataclass(frozen=True)
class SurgerySchedule:
    root: str
    steps: tuple

    @property
    def radii(self):
        return {s.node: s.fiber_radius for s in self.steps}

    def paths_decreasing(self):
        by = {s.node: s for s in self.steps}
        return all(s.parent is None or s.fiber_radius < by[s.parent].fiber_radius
                   for s in self.steps)

    def to_dict(self, csv_points=0):
        return {"root": self.root,
                "steps": [s.to_dict(csv_points=csv_points) for s in self.steps]}


def _bfs_order(graph, root):
    order, parent = [], {root: None}
    todo = deque([root])
    while todo:
        name = todo.popleft()
        order.append(name)
        for nb in graph.neighbours(name):
            if nb not in parent:
                parent[nb] = name
                todo.append(nb)
    return order, parent


def _solve_step(node, inp, solve_kwargs):
    try:
        first = solve_neck(inp, **solve_kwargs)
        rho = first.kappa / 2
        cert = solve_neck(replace(inp, rho_over_N=rho), **solve_kwargs)
    except WorkbenchError as exc:
        raise ScheduleError(f"neck solve failed at node {node!r}: {exc}", node,
                            exc.to_dict()) from exc
    return cert, rho


def schedule_radii(graph, root, base_neck_inputs, radius_caps=None, **solve_kwargs):
    """Breadth-first radius cascade from ``root``.

    Children are visited in name order. A child's fiber radius is the
    smallest of half its parent's radius, the radius in its own input and
    its cap. Each node is solved twice: once to find its ``kappa`` and
    again with ``rho/N = kappa/2``.
    """
    report = validate_theorem_b(graph, root)
    if not report.boundary_positive_ricci:
        raise PreconditionError(
            "graph fails the positive-Ricci boundary check: " + "; ".join(report.reasons))
    caps = dict(radius_caps or {})
    nodes = graph.by_name
    missing = sorted(set(nodes) - set(base_neck_inputs))
    if missing:
        raise ValueError(f"no neck input for nodes {missing}")
    for name, inp in base_neck_inputs.items():
        n = nodes.get(name)
        if n is None:
            raise ValueError(f"neck input for unknown node {name!r}")
        if (inp.p, inp.q) != (n.base_dim, n.fiber_dim):
            raise ValueError(
                f"{name}: neck input (p, q) = ({inp.p}, {inp.q}) does not match "
                f"(base_dim, fiber_dim) = ({n.base_dim}, {n.fiber_dim})")

    order, parent = _bfs_order(graph, root)
    steps, done = [], {}
    for name in order:
        inp = base_neck_inputs[name]
        cap = float(caps.get(name, math.inf))
        par = parent[name]
        radius = min(inp.r, cap)
        if par is not None:
            radius = min(radius, done[par].fiber_radius / 2)
        cert, rho = _solve_step(name, replace(inp, r=radius, rho_over_N=None), solve_kwargs)
        step = SurgeryStep(
            node=name, parent=par, fiber_radius=radius, radius_cap=cap,
            kappa_used=cert.kappa, rho_over_N=rho,
            parent_kappa=None if par is None else done[par].kappa_used,
            min_ricci_margin=cert.min_ricci_margin, certificate=cert)
        done[name] = step
        steps.append(step)
    return SurgerySchedule(root, tuple(steps))


__all__ = [
    "BASE_KINDS", "DiscBundleNode", "Edge", "PlumbingGraph", "ValidationReport",
    "SurgeryStep", "SurgerySchedule", "is_tree", "validate_theorem_b",
    "boundary_decomposition", "theorem_c_chain", "schedule_radii",
]
