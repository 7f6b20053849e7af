"""Linear blood-flow assignment over the rooted artery tree.

A unit of flow enters at the basilar origin and divides at every
bifurcation: a child's share is proportional to its mean width and
inversely proportional to (one plus) its height above the ring plane.
Ring-level and inflow chains sit at height zero.  A blocked edge zeroes
itself and everything downstream without redistributing its share
upstream; the model has no pressure feedback.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import UnknownEdge
from .vessel import INFLOW_LABELS, LabeledNetwork

RGB = tuple[int, int, int]


@dataclass(frozen=True)
class FlowAssignment:
    flows: dict[int, float]
    total_inflow: float = 1.0
    blocked_edges: frozenset[int] = field(default_factory=frozenset)

    def flow(self, edge_id: int) -> float | None:
        return self.flows.get(edge_id)

    @property
    def max_flow(self) -> float:
        return max(self.flows.values(), default=1.0)


def edge_depths(network: LabeledNetwork) -> dict[int, int]:
    """Tree depth above the ring; ring and inflow chains are depth 0."""
    flat = set(network.cow_cycle)
    flat.update(
        eid
        for eid, lab in network.labels.items()
        if lab in INFLOW_LABELS or lab == "AComm"
    )
    for anatomy in network.sides.values():
        for eid in (
            anatomy.junction_edge,
            anatomy.pcomm_edge,
            anatomy.terminus_edge,
            anatomy.aca_link_edge,
        ):
            if eid is not None:
                flat.add(eid)

    graph = network.graph
    depths: dict[int, int] = {}
    stack = [(eid, 0) for eid in reversed(graph.child_edges(graph.root_node))]
    while stack:
        eid, parent_depth = stack.pop()
        depth = 0 if eid in flat else parent_depth + 1
        depths[eid] = depth
        far = graph.edges[eid].far_node
        for child in reversed(graph.child_edges(far)):
            stack.append((child, depth))
    return depths


def _metric_heights(network: LabeledNetwork) -> dict[int, float]:
    base_y = (
        network.graph.node_position(network.ba_bifurcation)[1]
        if network.ba_bifurcation is not None
        else 0.0
    )
    out = {}
    for eid, edge in network.graph.edges.items():
        if edge.dashed:
            continue
        out[eid] = max(0.0, edge.centroid[1] - base_y)
    return out


def compute_flow(
    network: LabeledNetwork,
    blocked: set[int] | frozenset[int] = frozenset(),
    divisor: str = "depth",
) -> FlowAssignment:
    """Distribute a unit inflow over the data tree.

    ``divisor`` selects the dilution denominator: ``"depth"`` uses tree
    depth above the ring, ``"height"`` the metric height of the edge
    centroid above the basilar bifurcation.
    """
    graph = network.graph
    for eid in blocked:
        if eid not in graph.edges:
            raise UnknownEdge(eid)

    if divisor == "height":
        height = _metric_heights(network)

        def weight(eid: int) -> float:
            return graph.edges[eid].mean_radius / (1.0 + height[eid])

    else:
        depths = edge_depths(network)

        def weight(eid: int) -> float:
            return graph.edges[eid].mean_radius / (1.0 + depths[eid])

    flows: dict[int, float] = {}
    roots = [e for e in graph.child_edges(graph.root_node) if not graph.edges[e].dashed]
    stack: list[tuple[int, float]] = []
    if len(roots) == 1:
        stack.append((roots[0], 1.0))
    elif roots:
        total = sum(weight(e) for e in roots)
        for e in roots:
            stack.append((e, weight(e) / total if total > 0 else 1.0 / len(roots)))

    while stack:
        eid, incoming = stack.pop()
        flows[eid] = incoming
        children = [
            c
            for c in graph.child_edges(graph.edges[eid].far_node)
            if not graph.edges[c].dashed
        ]
        if not children:
            continue
        if len(children) == 1:
            stack.append((children[0], incoming))
            continue
        weights = [weight(c) for c in children]
        total = sum(weights)
        for child, w in zip(children, weights):
            share = w / total if total > 0 else 1.0 / len(children)
            stack.append((child, incoming * share))

    blocked = frozenset(blocked)
    zeroed = set()
    for eid in sorted(blocked):
        for downstream in graph.descendant_edges(eid):
            zeroed.add(downstream)
    for eid in zeroed:
        if eid in flows:
            flows[eid] = 0.0

    return FlowAssignment(flows=flows, total_inflow=1.0, blocked_edges=blocked)


def flow_color(flow_value: float, scan_max_flow: float, base_hue: RGB) -> RGB:
    """Linear white-to-hue ramp; inputs clamped to the valid range."""
    if scan_max_flow <= 0:
        t = 0.0
    else:
        t = min(max(flow_value, 0.0), scan_max_flow) / scan_max_flow
    return (
        round(255 + (base_hue[0] - 255) * t),
        round(255 + (base_hue[1] - 255) * t),
        round(255 + (base_hue[2] - 255) * t),
    )
