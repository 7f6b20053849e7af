"""Constrained 2D layout of a labeled artery network.

The scene space puts the hemisphere midline at x = 0 with y growing
downward: the six cerebral trees rise in layered bands above the ring
baseline, the ring itself runs along the baseline with the anterior
communicating artery arcing up and the posterior communicating arteries
arcing down, and the carotid/basilar inflows descend as bend-preserving
wave curves into the band below.

Constraints realized here:

* trees of one hemisphere never cross the midline, and within a hemisphere
  occupy disjoint bands ordered PCA, ACA, MCA from the midline outward;
* equal tree depth means equal y everywhere in the scene;
* sibling subtrees are ordered left-to-right by the mean lateral position
  of their source segments, so on-screen order matches anatomical order;
* directed edges run vertically monotone, undirected ring edges run
  between baseline endpoints.
"""

from __future__ import annotations

from dataclasses import dataclass

from .config import EngineConfig, config_echo
from .errors import InvariantViolation
from .flow import FlowAssignment
from .geometry import Cubic, Pt, path_arc_length, straight_cubic, arc_cubic
from .swc import SegmentForest
from .vessel import (
    LabeledNetwork,
    TREE_LABELS,
    count_bends,
    label_side,
)

RGB = tuple[int, int, int]

SCENE_VERSION = 1

BAND_ORDER = ("PCA", "ACA", "MCA")  # midline outward
PROJECTION_VIEWS = ("front", "top", "side")


@dataclass
class EdgePath:
    edge_id: int
    label: str
    path: tuple[Cubic, ...]
    stroke_width: float
    dashed: bool
    segment_ids: tuple[int, ...]
    mean_radius: float
    color: RGB = (0, 0, 0)
    flow: float | None = None

    @property
    def side(self) -> str:
        return label_side(self.label)

    def points(self) -> list[Pt]:
        """Control points without duplicated shared endpoints."""
        pts: list[Pt] = [self.path[0][0]]
        for seg in self.path:
            pts.extend(seg[1:])
        return pts


@dataclass
class SceneNode:
    node_id: int
    x: float
    y: float
    depth: int


@dataclass
class ProjectionLine:
    edge_id: int
    polyline: tuple[Pt, ...]


@dataclass
class LayoutScene:
    version: int
    scan_id: str
    config: dict
    nodes: list[SceneNode]
    edge_paths: list[EdgePath]
    projections: dict[str, list[ProjectionLine]]
    radius_range: tuple[float, float]

    def edge_path(self, edge_id: int) -> EdgePath:
        for ep in self.edge_paths:
            if ep.edge_id == edge_id:
                return ep
        raise KeyError(edge_id)


# --- per-tree structure ----------------------------------------------------------


@dataclass
class TreeShape:
    """Bottom-up statistics and child ordering for one cerebral tree."""

    label: str
    attachment: int
    members: tuple[int, ...]
    child_edges: dict[int, list[int]]  # node -> ordered member edges
    leaf_counts: dict[int, int]  # per member edge
    mean_x: dict[int, float]  # per member edge, over owned source segments


def tree_shape(network: LabeledNetwork, label: str) -> TreeShape | None:
    tree = network.cerebral_trees.get(label)
    if tree is None or not tree.edge_ids:
        return None
    graph = network.graph
    forest = graph.forest
    members = set(tree.edge_ids)

    child_edges: dict[int, list[int]] = {}
    for eid in tree.edge_ids:
        node = graph.edges[eid].near_node
        child_edges.setdefault(node, [])
    for node in child_edges:
        child_edges[node] = [e for e in graph.child_edges(node) if e in members]

    leaf_counts: dict[int, int] = {}
    sums: dict[int, tuple[float, int]] = {}
    for eid in reversed(tree.edge_ids):  # preorder reversed = children first
        edge = graph.edges[eid]
        own = edge.segment_ids[1:]
        total = sum(forest.position(s)[0] for s in own)
        count = len(own)
        kids = [e for e in graph.child_edges(edge.far_node) if e in members]
        leaves = 1 if not kids else 0
        for kid in kids:
            ksum, kcount = sums[kid]
            total += ksum
            count += kcount
            leaves += leaf_counts[kid]
        sums[eid] = (total, count)
        leaf_counts[eid] = leaves

    mean_x = {eid: (s / c if c else 0.0) for eid, (s, c) in sums.items()}
    return TreeShape(
        label=label,
        attachment=tree.attachment_node,
        members=tree.edge_ids,
        child_edges=child_edges,
        leaf_counts=leaf_counts,
        mean_x=mean_x,
    )


def order_subtrees(network: LabeledNetwork, label: str) -> dict[int, list[int]]:
    """Left-to-right child order per node of one cerebral tree.

    Children sort ascending by the mean lateral coordinate of all source
    segments in their subtree; ties break by descending subtree leaf count,
    then by original child order.
    """
    shape = tree_shape(network, label)
    if shape is None:
        return {}
    ordered: dict[int, list[int]] = {}
    for node, kids in shape.child_edges.items():
        ranked = sorted(
            range(len(kids)),
            key=lambda i: (shape.mean_x[kids[i]], -shape.leaf_counts[kids[i]], i),
        )
        ordered[node] = [kids[i] for i in ranked]
    return ordered


# --- slots -----------------------------------------------------------------------


def assign_slots(network: LabeledNetwork, config: EngineConfig) -> dict[str, tuple[float, float]]:
    """Disjoint horizontal bands per cerebral tree, PCA/ACA/MCA outward.

    Band widths are proportional to tree leaf counts (an absent or empty
    tree weighs one leaf, giving it a minimum-width band); bands are
    separated by the configured gutter and never touch the midline.
    """
    layout = config.layout
    gutter = layout.band_gutter
    half = layout.canvas_width / 2.0
    usable = half - 0.5 * gutter - gutter - (len(BAND_ORDER) - 1) * gutter
    if usable <= 0:
        raise InvariantViolation("canvas too narrow for the configured gutters")

    slots: dict[str, tuple[float, float]] = {}
    for side, sign in (("L", -1.0), ("R", 1.0)):
        weights = []
        for family in BAND_ORDER:
            tree = network.cerebral_trees.get(f"{family}_{side}")
            leaves = 0
            if tree is not None and tree.edge_ids:
                leaves = _tree_leaf_total(network, f"{family}_{side}")
            weights.append(max(1, leaves))
        unit = usable / sum(weights)
        cursor = 0.5 * gutter
        for family, weight in zip(BAND_ORDER, weights):
            lo = cursor
            hi = cursor + weight * unit
            cursor = hi + gutter
            if sign > 0:
                slots[f"{family}_{side}"] = (lo, hi)
            else:
                slots[f"{family}_{side}"] = (-hi, -lo)
    return slots


def _tree_leaf_total(network: LabeledNetwork, label: str) -> int:
    tree = network.cerebral_trees[label]
    members = set(tree.edge_ids)
    graph = network.graph
    leaves = 0
    for eid in tree.edge_ids:
        kids = [e for e in graph.child_edges(graph.edges[eid].far_node) if e in members]
        if not kids:
            leaves += 1
    return leaves


# --- tree drawing ----------------------------------------------------------------


def _tree_edge_cubic(parent: Pt, child: Pt) -> Cubic:
    # small arc bulging toward the child: control points at 1/3 and 2/3 of the
    # vertical span, pushed 25% of the horizontal span toward the child,
    # which keeps x within the span and y strictly monotone
    dx = child[0] - parent[0]
    dy = child[1] - parent[1]
    c1 = (parent[0] + dx * (1.0 / 3.0 + 0.25), parent[1] + dy / 3.0)
    c2 = (parent[0] + dx * (2.0 / 3.0 + 0.25), parent[1] + 2.0 * dy / 3.0)
    return (parent, c1, c2, child)


def layout_trees(
    network: LabeledNetwork,
    slots: dict[str, tuple[float, float]],
    orders: dict[str, dict[int, list[int]]],
    config: EngineConfig,
):
    """Place all cerebral trees; returns (node_pos, node_depth, paths)."""
    layout = config.layout
    baseline = layout.cow_baseline_y
    node_pos: dict[int, Pt] = {}
    node_depth: dict[int, int] = {}
    paths: dict[int, tuple[Cubic, ...]] = {}

    for label in TREE_LABELS:
        shape = tree_shape(network, label)
        if shape is None:
            continue
        order = orders.get(label, {})
        band = slots[label]
        graph = network.graph

        def place(node: int, lo: float, hi: float, depth: int):
            x = (lo + hi) / 2.0
            y = baseline - depth * layout.layer_height
            node_pos[node] = (x, y)
            node_depth[node] = depth
            kids = order.get(node, [])
            if not kids:
                return
            weights = [shape.leaf_counts[k] for k in kids]
            unit = (hi - lo) / sum(weights)
            cursor = lo
            for eid, weight in zip(kids, weights):
                k_lo = cursor
                k_hi = cursor + weight * unit
                cursor = k_hi
                child_node = graph.edges[eid].far_node
                child_x = (k_lo + k_hi) / 2.0
                child_y = baseline - (depth + 1) * layout.layer_height
                paths[eid] = (_tree_edge_cubic((x, y), (child_x, child_y)),)
                place(child_node, k_lo, k_hi, depth + 1)

        place(shape.attachment, band[0], band[1], 0)
    return node_pos, node_depth, paths


# --- inflow abstraction ----------------------------------------------------------


def _wave_path(attach: Pt, drop: float, n_waves: int, amplitude: float, initial_sign: float):
    segs: list[Cubic] = []
    x_c, y0 = attach
    for i in range(n_waves):
        ya = y0 + drop * i / n_waves
        yb = y0 + drop * (i + 1) / n_waves
        sign = initial_sign * (1.0 if i % 2 == 0 else -1.0)
        cx = x_c + sign * amplitude * 4.0 / 3.0
        segs.append(((x_c, ya), (cx, ya + (yb - ya) / 3.0), (cx, ya + 2.0 * (yb - ya) / 3.0), (x_c, yb)))
    return tuple(segs)


def abstract_inflow(
    attach: Pt,
    bend_count: int,
    length_ratio: float,
    config: EngineConfig,
    initial_sign: float = 1.0,
) -> tuple[Cubic, ...]:
    """Descending wave curve standing in for a carotid or basilar chain.

    One alternating lateral half-wave per bend (at least one); the total
    arc length is ``length_ratio`` of the carotid band height, solved by
    bisection on the vertical drop, so inflow lengths stay comparable at a
    glance.  The amplitude is reduced if the requested arc is too short to
    fit the waves.
    """
    layout = config.layout
    n = max(1, bend_count)
    target = max(length_ratio, 1e-6) * layout.carotid_band_height
    amplitude = layout.carotid_amplitude

    def arclen(drop: float, amp: float) -> float:
        return path_arc_length(_wave_path(attach, drop, n, amp, initial_sign), n=32)

    flat = arclen(1e-9, amplitude)
    if flat > target:
        amplitude *= 0.95 * target / flat

    lo, hi = 0.0, layout.carotid_band_height
    for _ in range(60):
        mid = (lo + hi) / 2.0
        if arclen(mid, amplitude) < target:
            lo = mid
        else:
            hi = mid
    return _wave_path(attach, (lo + hi) / 2.0, n, amplitude, initial_sign)


# --- ring ------------------------------------------------------------------------


def layout_cow(
    network: LabeledNetwork,
    slots: dict[str, tuple[float, float]],
    node_pos: dict[int, Pt],
    config: EngineConfig,
) -> dict[int, tuple[Cubic, ...]]:
    """Draw the ring along the baseline and register its node positions.

    The anterior communicating artery arcs upward between the ACA roots;
    each posterior communicating artery arcs downward from its PCA-side
    junction out to the carotid junction; remaining ring chains run
    horizontally.
    """
    layout = config.layout
    baseline = layout.cow_baseline_y
    if not network.cow_cycle:
        raise InvariantViolation("ring not reconstructed; no cow_cycle to draw")

    if network.ba_bifurcation is not None:
        node_pos[network.ba_bifurcation] = (0.0, baseline)

    for side, sign in (("L", -1.0), ("R", 1.0)):
        anatomy = network.sides.get(side)
        if anatomy is None:
            continue
        pca_band = slots[f"PCA_{side}"]
        aca_band = slots[f"ACA_{side}"]
        mca_band = slots[f"MCA_{side}"]
        outer = mca_band[0] if sign < 0 else mca_band[1]

        if anatomy.split_node is not None and anatomy.split_node not in node_pos:
            node_pos[anatomy.split_node] = ((pca_band[0] + pca_band[1]) / 2.0, baseline)
        if anatomy.terminus_node is not None and anatomy.terminus_node not in node_pos:
            node_pos[anatomy.terminus_node] = ((mca_band[0] + mca_band[1]) / 2.0, baseline)
        if anatomy.aca_root is not None and anatomy.aca_root not in node_pos:
            node_pos[anatomy.aca_root] = ((aca_band[0] + aca_band[1]) / 2.0, baseline)
        if anatomy.ic_junction is not None and anatomy.ic_junction not in node_pos:
            if anatomy.terminus_node is not None:
                inner_x = node_pos[anatomy.terminus_node][0]
            else:
                inner_x = (mca_band[0] + mca_band[1]) / 2.0
            node_pos[anatomy.ic_junction] = ((inner_x + outer) / 2.0, baseline)

    paths: dict[int, tuple[Cubic, ...]] = {}
    for eid in network.cow_cycle:
        edge = network.graph.edges[eid]
        role = network.ring_roles.get(eid, "junction")
        a = node_pos[edge.near_node]
        b = node_pos[edge.far_node]
        if role == "pcomm":
            paths[eid] = (arc_cubic(a, b, layout.pcomm_arc_drop),)
        elif role == "acomm":
            paths[eid] = (arc_cubic(a, b, -layout.acomm_arc_rise),)
        else:
            paths[eid] = (straight_cubic(a, b),)
    return paths


# --- widths ----------------------------------------------------------------------


def scale_widths(network: LabeledNetwork, config: EngineConfig):
    """Linear radius-to-stroke map; returns (strokes, (r_lo, r_hi)).

    The normalization range is the per-scan min/max mean radius over real
    (non-dashed) edges unless the config pins a corpus range.  Dashed
    edges pass through the same map with their borrowed radii, clamped.
    """
    layout = config.layout
    radii = [
        e.mean_radius for e in network.graph.edges.values() if not e.dashed
    ]
    r_lo = config.radius_lo if config.radius_lo is not None else min(radii)
    r_hi = config.radius_hi if config.radius_hi is not None else max(radii)

    def stroke(radius: float) -> float:
        if r_hi == r_lo:
            return (layout.stroke_min + layout.stroke_max) / 2.0
        t = (radius - r_lo) / (r_hi - r_lo)
        t = min(max(t, 0.0), 1.0)
        return layout.stroke_min + t * (layout.stroke_max - layout.stroke_min)

    strokes = {eid: stroke(e.mean_radius) for eid, e in network.graph.edges.items()}
    return strokes, (r_lo, r_hi)


# --- scene assembly --------------------------------------------------------------


def _projection_polyline(forest: SegmentForest, segment_ids, view: str) -> tuple[Pt, ...]:
    pts = []
    for sid in segment_ids:
        x, y, z = forest.position(sid)
        if view == "front":
            pts.append((x, y))
        elif view == "top":
            pts.append((x, z))
        else:
            pts.append((z, y))
    return tuple(pts)


def _initial_wave_sign(network: LabeledNetwork, edge_id: int) -> float:
    """Which way the first inflow half-wave bulges, derived from the data."""
    edge = network.graph.edges[edge_id]
    attach_x = network.graph.node_position(edge.near_node)[0]
    return 1.0 if edge.centroid[0] >= attach_x else -1.0


def compose_scene(
    network: LabeledNetwork,
    config: EngineConfig,
    scan_id: str = "scan",
    flows: FlowAssignment | None = None,
) -> LayoutScene:
    """Assemble the full 2D scene from a reconstructed network."""
    layout = config.layout
    baseline = layout.cow_baseline_y
    graph = network.graph

    slots = assign_slots(network, config)
    orders = {label: order_subtrees(network, label) for label in TREE_LABELS}
    node_pos, node_depth, paths = layout_trees(network, slots, orders, config)
    paths.update(layout_cow(network, slots, node_pos, config))

    # inflows: basilar on the midline, carotids under their junctions
    inflow_chain_lengths = [
        graph.edges[eid].chain_length for eid in network.inflow_edges.values()
    ]
    longest = max(inflow_chain_lengths, default=1.0)
    for label in ("BA", "IC_L", "IC_R"):
        eid = network.inflow_edges.get(label)
        if eid is None:
            continue
        edge = graph.edges[eid]
        if label == "BA":
            attach = (0.0, baseline)
            anchor_node = edge.far_node  # basilar runs root -> bifurcation
            end_node = edge.near_node
        else:
            attach = node_pos.get(edge.near_node, (0.0, baseline))
            anchor_node = edge.near_node
            end_node = edge.far_node
        bends = count_bends(edge, graph.forest, config.bend_noise_fraction)
        ratio = edge.chain_length / longest if longest > 0 else 1.0
        path = abstract_inflow(
            attach,
            bends,
            ratio,
            config,
            initial_sign=_initial_wave_sign(network, eid),
        )
        paths[eid] = path
        node_pos.setdefault(anchor_node, attach)
        node_pos[end_node] = path[-1][3]
        node_depth[end_node] = -1

    # anything still unplaced (unlabeled subtrees on degraded scans) gets a
    # short monotone stub rising from its nearest placed ancestor
    remaining = [eid for eid in sorted(graph.edges) if eid not in paths]
    progress = True
    while remaining and progress:
        progress = False
        still = []
        for eid in remaining:
            edge = graph.edges[eid]
            if edge.near_node in node_pos:
                a = node_pos[edge.near_node]
                b = (a[0], a[1] - 0.5 * layout.layer_height)
                paths[eid] = (straight_cubic(a, b),)
                node_pos.setdefault(edge.far_node, b)
                progress = True
            else:
                still.append(eid)
        remaining = still
    for eid in remaining:  # disconnected leftovers: pin at the midline
        a = (0.0, baseline)
        paths[eid] = (straight_cubic(a, (a[0], a[1] - 0.5 * layout.layer_height)),)
        node_pos.setdefault(graph.edges[eid].far_node, a)

    strokes, radius_range = scale_widths(network, config)

    edge_paths = []
    for eid in sorted(graph.edges):
        edge = graph.edges[eid]
        flow_value = None
        if flows is not None and not edge.dashed:
            flow_value = flows.flow(eid)
        edge_paths.append(
            EdgePath(
                edge_id=eid,
                label=network.labels.get(eid, "Unlabeled_C_0"),
                path=paths[eid],
                stroke_width=strokes[eid],
                dashed=edge.dashed,
                segment_ids=edge.segment_ids,
                mean_radius=edge.mean_radius,
                flow=flow_value,
            )
        )

    projections: dict[str, list[ProjectionLine]] = {}
    for view in PROJECTION_VIEWS:
        lines = []
        for eid in sorted(graph.edges):
            edge = graph.edges[eid]
            if edge.dashed:
                continue
            lines.append(
                ProjectionLine(eid, _projection_polyline(graph.forest, edge.segment_ids, view))
            )
        projections[view] = lines

    nodes = []
    for node_id in sorted(node_pos):
        x, y = node_pos[node_id]
        nodes.append(SceneNode(node_id, x, y, node_depth.get(node_id, 0)))

    return LayoutScene(
        version=SCENE_VERSION,
        scan_id=scan_id,
        config=config_echo(config),
        nodes=nodes,
        edge_paths=edge_paths,
        projections=projections,
        radius_range=radius_range,
    )
