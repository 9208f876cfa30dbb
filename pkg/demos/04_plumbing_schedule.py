"""
Plumbing graphs and the radius cascade
======================================

Validate the boundary hypotheses for a chain of disc bundles and
schedule the fiber radii from the root outward.
"""

from surgerybench.neck_solver import SurgeryInput
from surgerybench.plumbing import (
    DiscBundleNode,
    Edge,
    PlumbingGraph,
    boundary_decomposition,
    schedule_radii,
    theorem_c_chain,
    validate_theorem_b,
)

chain = theorem_c_chain("s2_fiber_over_base", 4)
print(chain.to_json())
print(validate_theorem_b(chain, "S3xD4").as_dict())

cycle = PlumbingGraph(tuple(DiscBundleNode(x, 3, 3) for x in "ABC"),
                      (Edge("A", "B"), Edge("B", "C"), Edge("C", "A")))
print("cycle:", validate_theorem_b(cycle, "A").reasons)

a, b = chain.nodes[0], chain.nodes[1]
print(boundary_decomposition(a, b, +1))

graph = PlumbingGraph(
    (DiscBundleNode("R", 3, 4), DiscBundleNode("L1", 4, 3), DiscBundleNode("L2", 4, 3),
     DiscBundleNode("G", 3, 4)),
    (Edge("R", "L1"), Edge("R", "L2", -1), Edge("L1", "G")))
inputs = {n.name: SurgeryInput(n.base_dim, n.fiber_dim, 1.56, 0.5, 4.0) for n in graph.nodes}
sched = schedule_radii(graph, "R", inputs)
for step in sched.steps:
    print(f"{step.node:3s} parent={step.parent!s:5s} radius={step.fiber_radius:<6g} "
          f"kappa={step.kappa_used:.5f} margin={step.min_ricci_margin:.2e}")
print("radii decrease along every path:", sched.paths_decreasing())
