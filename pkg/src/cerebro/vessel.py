"""Vessel graph construction and anatomical labeling.

A parsed scan is a tree of point segments.  ``contract_chains`` collapses
runs of pass-through segments into artery edges between bifurcations,
producing the graph the rest of the pipeline works on.  ``classify_arteries``
then assigns anatomical labels with a deterministic geometric heuristic,
and ``reconstruct_cow`` closes the Circle of Willis ring, inserting dashed
stand-ins for arteries the segmentation dropped (always the anterior
communicating artery, sometimes more).

Node ids are the SWC ids of the bifurcation/endpoint segments; synthetic
ring nodes introduced during reconstruction get negative ids.  Each segment
is owned by exactly one edge: the chain in which it is interior or the far
endpoint.  The shared bifurcation segment at a chain's near end belongs to
the upstream chain.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

from .config import EngineConfig, default_config
from .errors import (
    CannotClose,
    ClassificationFailed,
    DegenerateChain,
    InvariantViolation,
    UnknownEdge,
    UnknownLabel,
)
from .swc import SegmentForest, Vec3

TOWARD_BRAIN = "toward_brain"
BIDIRECTIONAL = "bidirectional"

NAMED_LABELS = (
    "BA",
    "IC_L",
    "IC_R",
    "PComm_L",
    "PComm_R",
    "AComm",
    "PCA_L",
    "PCA_R",
    "MCA_L",
    "MCA_R",
    "ACA_L",
    "ACA_R",
)
TREE_LABELS = ("PCA_L", "PCA_R", "ACA_L", "ACA_R", "MCA_L", "MCA_R")
INFLOW_LABELS = ("BA", "IC_L", "IC_R")

# ring roles, used by the layout to pick arc shapes
ROLE_JUNCTION = "junction"
ROLE_PCOMM = "pcomm"
ROLE_ACA_LINK = "aca_link"
ROLE_ACOMM = "acomm"


def unlabeled(side: str, index: int) -> str:
    return f"Unlabeled_{side}_{index}"


def is_unlabeled(label: str) -> bool:
    return label.startswith("Unlabeled_")


def valid_label(label: str) -> bool:
    if label in NAMED_LABELS:
        return True
    parts = label.split("_")
    return (
        len(parts) == 3
        and parts[0] == "Unlabeled"
        and parts[1] in ("L", "R", "C")
        and parts[2].isdigit()
    )


def label_side(label: str) -> str:
    if label.endswith("_L"):
        return "L"
    if label.endswith("_R"):
        return "R"
    if is_unlabeled(label):
        return label.split("_")[1]
    return "C"


@dataclass
class ArteryEdge:
    """A contracted artery chain between two graph nodes."""

    edge_id: int
    segment_ids: tuple[int, ...]
    near_node: int
    far_node: int
    mean_radius: float
    chain_length: float
    centroid: Vec3
    directedness: str = TOWARD_BRAIN
    dashed: bool = False


@dataclass
class GraphWarning:
    kind: str
    node_id: int
    degree: int

    def __str__(self):
        return f"{self.kind}: node {self.node_id} has degree {self.degree}"


@dataclass
class VesselGraph:
    """Contracted artery graph, still rooted like the source data tree."""

    forest: SegmentForest
    edges: dict[int, ArteryEdge]
    node_parent_edge: dict[int, int | None]
    node_child_edges: dict[int, list[int]]
    root_node: int
    warnings: list[GraphWarning] = field(default_factory=list)

    def node_position(self, node_id: int) -> Vec3:
        return self.forest.position(node_id)

    def child_edges(self, node_id: int) -> list[int]:
        return self.node_child_edges.get(node_id, [])

    def edge_ids(self) -> list[int]:
        return sorted(self.edges)

    def descendant_edges(self, edge_id: int) -> list[int]:
        """The edge itself plus everything downstream, preorder."""
        out = []
        stack = [edge_id]
        while stack:
            eid = stack.pop()
            out.append(eid)
            children = self.node_child_edges.get(self.edges[eid].far_node, [])
            stack.extend(reversed(children))
        return out


def _chain_geometry(forest: SegmentForest, chain: tuple[int, ...]):
    """Length-weighted mean radius and centroid of a segment chain."""
    total = 0.0
    w_radius = 0.0
    cx = cy = cz = 0.0
    for a, b in zip(chain, chain[1:]):
        pa, pb = forest.position(a), forest.position(b)
        length = math.dist(pa, pb)
        total += length
        w_radius += length * (forest.radius(a) + forest.radius(b)) / 2.0
        cx += length * (pa[0] + pb[0]) / 2.0
        cy += length * (pa[1] + pb[1]) / 2.0
        cz += length * (pa[2] + pb[2]) / 2.0
    if total > 0:
        return w_radius / total, total, (cx / total, cy / total, cz / total)
    # zero-length chain (coincident points): fall back to unweighted means
    n = len(chain)
    radius = sum(forest.radius(s) for s in chain) / n
    px = sum(forest.position(s)[0] for s in chain) / n
    py = sum(forest.position(s)[1] for s in chain) / n
    pz = sum(forest.position(s)[2] for s in chain) / n
    return radius, 0.0, (px, py, pz)


def contract_chains(forest: SegmentForest) -> VesselGraph:
    """Collapse pass-through segments into artery edges between bifurcations.

    Segments with one child are chain interior; the root, leaves, and
    segments with two or more children become graph nodes.  Non-binary
    bifurcations are kept with all their children and reported as warnings.
    """
    edges: dict[int, ArteryEdge] = {}
    node_parent_edge: dict[int, int | None] = {forest.root_id: None}
    node_child_edges: dict[int, list[int]] = {}
    warnings: list[GraphWarning] = []
    next_id = 0

    stack = [forest.root_id]
    while stack:
        node = stack.pop()
        children = forest.children(node)
        node_child_edges.setdefault(node, [])
        if len(children) > 2:
            degree = len(children) + (0 if node == forest.root_id else 1)
            warnings.append(GraphWarning("NonBinaryBifurcation", node, degree))
        far_nodes = []
        for child in children:
            chain = [node, child]
            cur = child
            while len(forest.children(cur)) == 1:
                cur = forest.children(cur)[0]
                chain.append(cur)
            mean_radius, chain_length, centroid = _chain_geometry(forest, tuple(chain))
            edge = ArteryEdge(
                edge_id=next_id,
                segment_ids=tuple(chain),
                near_node=node,
                far_node=cur,
                mean_radius=mean_radius,
                chain_length=chain_length,
                centroid=centroid,
            )
            edges[next_id] = edge
            node_child_edges[node].append(next_id)
            node_parent_edge[cur] = next_id
            next_id += 1
            far_nodes.append(cur)
        stack.extend(reversed(far_nodes))

    return VesselGraph(
        forest=forest,
        edges=edges,
        node_parent_edge=node_parent_edge,
        node_child_edges=node_child_edges,
        root_node=forest.root_id,
        warnings=warnings,
    )


def count_bends(edge: ArteryEdge, forest: SegmentForest, noise_fraction: float = 0.05) -> int:
    """Count direction bends of a chain projected onto the lateral/vertical plane.

    Consecutive displacements are classed vertical (|dy| >= |dx|) or
    horizontal and merged into runs; runs shorter than ``noise_fraction``
    of the chain length are segmentation jitter and dropped.  Each
    surviving run counts as one bend, except that a chain consisting of a
    single vertical run is straight and counts zero.
    """
    positions = [forest.position(s) for s in edge.segment_ids]
    if len(set(positions)) < 2:
        raise DegenerateChain(edge.edge_id)

    runs: list[list] = []  # [class, accumulated 3D length]
    total = 0.0
    for a, b in zip(positions, positions[1:]):
        length = math.dist(a, b)
        total += length
        if length == 0.0:
            continue
        dx = abs(b[0] - a[0])
        dy = abs(b[1] - a[1])
        cls = "V" if dy >= dx else "H"
        if runs and runs[-1][0] == cls:
            runs[-1][1] += length
        else:
            runs.append([cls, length])

    threshold = noise_fraction * total
    merged: list[list] = []
    for cls, length in runs:
        if length < threshold:
            continue
        if merged and merged[-1][0] == cls:
            merged[-1][1] += length
        else:
            merged.append([cls, length])

    if not merged:
        return 0
    if len(merged) == 1:
        return 0 if merged[0][0] == "V" else 1
    return len(merged)


# --- subtree statistics --------------------------------------------------------


@dataclass
class SubtreeStats:
    seg_count: int
    sum_x: float
    sum_y: float
    sum_z: float
    min_y: float
    leaf_count: int

    @property
    def mean_x(self) -> float:
        return self.sum_x / self.seg_count

    @property
    def mean_z(self) -> float:
        return self.sum_z / self.seg_count


def subtree_stats(graph: VesselGraph) -> dict[int, SubtreeStats]:
    """Per-edge statistics over owned segments of the edge and its descendants."""
    stats: dict[int, SubtreeStats] = {}
    order = []
    stack = list(graph.node_child_edges.get(graph.root_node, []))
    while stack:
        eid = stack.pop()
        order.append(eid)
        stack.extend(graph.node_child_edges.get(graph.edges[eid].far_node, []))
    for eid in reversed(order):
        edge = graph.edges[eid]
        own = edge.segment_ids[1:]
        sum_x = sum(graph.forest.position(s)[0] for s in own)
        sum_y = sum(graph.forest.position(s)[1] for s in own)
        sum_z = sum(graph.forest.position(s)[2] for s in own)
        min_y = min(graph.forest.position(s)[1] for s in own)
        count = len(own)
        children = graph.node_child_edges.get(edge.far_node, [])
        leaves = 1 if not children else 0
        for cid in children:
            sub = stats[cid]
            count += sub.seg_count
            sum_x += sub.sum_x
            sum_y += sub.sum_y
            sum_z += sub.sum_z
            min_y = min(min_y, sub.min_y)
            leaves += sub.leaf_count
        stats[eid] = SubtreeStats(count, sum_x, sum_y, sum_z, min_y, leaves)
    return stats


# --- labeled network -----------------------------------------------------------


@dataclass
class CerebralTree:
    label: str
    attachment_node: int
    edge_ids: tuple[int, ...]  # preorder below the attachment


@dataclass
class SideAnatomy:
    """Resolved landmarks of one hemisphere; None where the scan lacks them."""

    side: str
    junction_edge: int | None = None  # ring chain from the BA bifurcation
    split_node: int | None = None  # PCA origin / P. Comm. takeoff
    pcomm_edge: int | None = None
    ic_junction: int | None = None
    terminus_edge: int | None = None  # ring chain from IC junction to the terminus
    terminus_node: int | None = None
    aca_link_edge: int | None = None
    aca_root: int | None = None


@dataclass
class LabeledNetwork:
    graph: VesselGraph
    labels: dict[int, str]
    cerebral_trees: dict[str, CerebralTree]
    inflow_edges: dict[str, int]
    ba_bifurcation: int | None
    sides: dict[str, SideAnatomy]
    classification_errors: list[ClassificationFailed] = field(default_factory=list)
    cow_cycle: tuple[int, ...] = ()
    ring_roles: dict[int, str] = field(default_factory=dict)
    synthetic_nodes: dict[int, str] = field(default_factory=dict)

    @property
    def forest(self) -> SegmentForest:
        return self.graph.forest

    def edge(self, edge_id: int) -> ArteryEdge:
        return self.graph.edges[edge_id]

    def label_of(self, edge_id: int) -> str:
        return self.labels[edge_id]

    def dashed_edges(self) -> list[int]:
        return [eid for eid in sorted(self.graph.edges) if self.graph.edges[eid].dashed]

    def tree_child_edges(self, label: str, node_id: int) -> list[int]:
        members = set(self.cerebral_trees[label].edge_ids)
        return [e for e in self.graph.child_edges(node_id) if e in members]


def _collect_subtree(graph: VesselGraph, edge_id: int) -> list[int]:
    return graph.descendant_edges(edge_id)


def classify_arteries(graph: VesselGraph, config: EngineConfig | None = None) -> LabeledNetwork:
    """Assign anatomical labels with a deterministic geometric walk.

    Failures at any stage are recorded (not raised) and the affected region
    falls back to the best anatomically consistent reading, so that a
    degraded scan still yields a renderable network.  Callers that require
    a complete labeling should inspect ``classification_errors``.
    """
    config = config or default_config()
    forest = graph.forest
    labels: dict[int, str] = {}
    errors: list[ClassificationFailed] = []
    trees: dict[str, CerebralTree] = {}
    inflow: dict[str, int] = {}
    sides: dict[str, SideAnatomy] = {}
    stats = subtree_stats(graph)
    ic_min_drop = config.ic_min_drop_fraction * forest.vertical_extent()

    def label_subtree(edge_id: int, label: str):
        for eid in _collect_subtree(graph, edge_id):
            labels[eid] = label

    def make_tree(label: str, attachment: int, root_edges: list[int]):
        members: list[int] = []
        for eid in root_edges:
            members.extend(_collect_subtree(graph, eid))
        trees[label] = CerebralTree(label, attachment, tuple(members))

    def pick_ic_child(node_id: int) -> int | None:
        """The child chain itself descending far enough to be a carotid.

        Tests the chain's own geometry, not its subtree: at the PCA/P.Comm
        split the communicating chain leads (transitively) to the carotid
        descent, but is not itself descending.
        """
        node_y = graph.node_position(node_id)[1]
        best, best_drop = None, 0.0
        for eid in graph.child_edges(node_id):
            own = graph.edges[eid].segment_ids[1:]
            low = min(forest.position(s)[1] for s in own)
            drop = node_y - low
            if drop > ic_min_drop and drop > best_drop:
                best, best_drop = eid, drop
        return best

    # stage 1: the basilar artery is the root chain up to the first bifurcation
    root_children = graph.child_edges(graph.root_node)
    ba_bif: int | None = None
    if len(root_children) != 1:
        errors.append(
            ClassificationFailed(1, graph.root_node, "root is not a single inflow chain")
        )
    else:
        ba_edge = root_children[0]
        far = graph.edges[ba_edge].far_node
        if len(graph.child_edges(far)) < 2:
            errors.append(ClassificationFailed(1, far, "basilar chain never bifurcates"))
        else:
            labels[ba_edge] = "BA"
            inflow["BA"] = ba_edge
            ba_bif = far

    ba_mean_x = graph.edges[inflow["BA"]].centroid[0] if "BA" in inflow else 0.0

    def side_of_edge(eid: int) -> str:
        return "R" if stats[eid].mean_x > ba_mean_x else "L"

    def process_side(side_edge: int, side: str):
        anatomy = SideAnatomy(side=side)
        sides[side] = anatomy
        first = graph.edges[side_edge].far_node

        ic_here = pick_ic_child(first)
        if ic_here is not None:
            # the PCA is missing from this side: the walked chain is the
            # (merged) posterior communicating artery and ``first`` is
            # already the carotid junction
            labels[side_edge] = f"PComm_{side}"
            anatomy.pcomm_edge = side_edge
            anatomy.ic_junction = first
            _continue_from_junction(first, side, ic_here, anatomy)
            return

        children = graph.child_edges(first)
        if len(children) < 2:
            errors.append(ClassificationFailed(2, first, f"side {side} never bifurcates"))
            label_subtree(side_edge, unlabeled(side, 0))
            return

        # split the PCA subtree from the P. Comm. chain: prefer the child
        # that verifiably leads to a descending carotid, fall back to the
        # posterior/anterior centroid comparison
        validated = [
            c for c in children if pick_ic_child(graph.edges[c].far_node) is not None
        ]
        if len(validated) == 1:
            pcomm = validated[0]
        else:
            pcomm = max(children, key=lambda c: (stats[c].mean_z, -c))
        rest = [c for c in children if c != pcomm]
        pca = min(rest, key=lambda c: (stats[c].mean_z, c))

        labels[side_edge] = f"PCA_{side}"
        anatomy.junction_edge = side_edge
        anatomy.split_node = first
        label_subtree(pca, f"PCA_{side}")
        make_tree(f"PCA_{side}", first, [pca])
        for extra in rest:
            if extra != pca and extra not in labels:
                label_subtree(extra, unlabeled(side, 0))

        pcomm_far = graph.edges[pcomm].far_node
        ic_edge = pick_ic_child(pcomm_far)
        if ic_edge is None:
            errors.append(
                ClassificationFailed(3, pcomm_far, f"no descending carotid on side {side}")
            )
            # the P. Comm. hypothesis was wrong; the whole side is the
            # posterior tree
            label_subtree(pcomm, f"PCA_{side}")
            make_tree(f"PCA_{side}", first, [pca, pcomm])
            anatomy.pcomm_edge = None
            return

        labels[pcomm] = f"PComm_{side}"
        anatomy.pcomm_edge = pcomm
        anatomy.ic_junction = pcomm_far
        _continue_from_junction(pcomm_far, side, ic_edge, anatomy)

    def _continue_from_junction(junction: int, side: str, ic_edge: int, anatomy: SideAnatomy):
        label_subtree(ic_edge, f"IC_{side}")
        inflow[f"IC_{side}"] = ic_edge

        others = [c for c in graph.child_edges(junction) if c != ic_edge]
        if not others:
            errors.append(
                ClassificationFailed(4, junction, f"side {side} ends at the carotid")
            )
            return
        term = max(others, key=lambda c: (stats[c].seg_count, -c))
        for extra in others:
            if extra != term:
                label_subtree(extra, unlabeled(side, 0))

        terminus = graph.edges[term].far_node
        kids = graph.child_edges(terminus)
        if len(kids) < 2:
            errors.append(
                ClassificationFailed(4, terminus, f"no ACA/MCA split on side {side}")
            )
            label_subtree(term, unlabeled(side, 0))
            return

        labels[term] = f"MCA_{side}"
        anatomy.terminus_edge = term
        anatomy.terminus_node = terminus

        aca = min(kids, key=lambda c: (abs(stats[c].mean_x), c))
        mca = max(kids, key=lambda c: (abs(stats[c].mean_x), -c))
        for extra in kids:
            if extra not in (aca, mca):
                label_subtree(extra, unlabeled(side, 0))

        label_subtree(mca, f"MCA_{side}")
        make_tree(f"MCA_{side}", terminus, [mca])

        labels[aca] = f"ACA_{side}"
        anatomy.aca_link_edge = aca
        aca_root = graph.edges[aca].far_node
        anatomy.aca_root = aca_root
        aca_branches = graph.child_edges(aca_root)
        for branch in aca_branches:
            label_subtree(branch, f"ACA_{side}")
        make_tree(f"ACA_{side}", aca_root, list(aca_branches))

    if ba_bif is not None:
        side_edges = graph.child_edges(ba_bif)
        chosen = side_edges
        if len(side_edges) > 2:
            chosen = sorted(side_edges, key=lambda e: -stats[e].seg_count)[:2]
            for extra in side_edges:
                if extra not in chosen:
                    label_subtree(extra, unlabeled(side_of_edge(extra), 0))
        # order deterministically: left first
        chosen = sorted(chosen, key=lambda e: stats[e].mean_x)
        assigned = {}
        if len(chosen) == 2:
            s0, s1 = side_of_edge(chosen[0]), side_of_edge(chosen[1])
            if s0 == s1:
                s0, s1 = "L", "R"  # both on one side of the BA: order by position
            assigned = {chosen[0]: s0, chosen[1]: s1}
        elif len(chosen) == 1:
            assigned = {chosen[0]: side_of_edge(chosen[0])}
        for side_edge, side in assigned.items():
            process_side(side_edge, side)

    # stage 6: everything not reached above, renumbered in edge-id order
    counters = {"L": 0, "R": 0, "C": 0}
    for eid in sorted(graph.edges):
        lab = labels.get(eid)
        if lab is None:
            side = side_of_edge(eid)
        elif is_unlabeled(lab):
            side = lab.split("_")[1]
        else:
            continue
        labels[eid] = unlabeled(side, counters[side])
        counters[side] += 1

    return LabeledNetwork(
        graph=graph,
        labels=labels,
        cerebral_trees=trees,
        inflow_edges=inflow,
        ba_bifurcation=ba_bif,
        sides=sides,
        classification_errors=errors,
    )


# --- label overrides -----------------------------------------------------------


def parse_label_overrides(text: str) -> dict[str, str]:
    """Parse a flat override document.

    Keys are edge ids (``12`` or ``edge:12``) or segment ids
    (``segment:340``); values are label names.
    """
    out: dict[str, str] = {}
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise InvariantViolation(f"override line {line_no}: expected key = label")
        key, value = (part.strip() for part in line.split("=", 1))
        out[key] = value
    return out


def _resolve_override_key(network: LabeledNetwork, key: str) -> int:
    kind, _, value = key.partition(":")
    if not value:
        kind, value = "edge", kind
    try:
        ident = int(value)
    except ValueError:
        raise UnknownEdge(key) from None
    if kind == "edge":
        if ident in network.graph.edges:
            return ident
        raise UnknownEdge(ident)
    if kind == "segment":
        for eid in sorted(network.graph.edges):
            edge = network.graph.edges[eid]
            if ident in edge.segment_ids[1:] or (
                edge.near_node == ident and network.graph.root_node == ident
            ):
                return eid
        raise UnknownEdge(ident)
    raise UnknownEdge(key)


def apply_label_overrides(
    network: LabeledNetwork, overrides: dict[str, str]
) -> LabeledNetwork:
    """Overlay explicit labels, then rebuild and re-validate the network."""
    if not overrides:
        return network
    labels = dict(network.labels)
    for key, label in overrides.items():
        if not valid_label(label):
            raise UnknownLabel(label)
        eid = _resolve_override_key(network, key)
        labels[eid] = label
    rebuilt = assemble_network(network.graph, labels)
    problems = validate_network(rebuilt)
    if problems:
        raise InvariantViolation("; ".join(problems))
    return rebuilt


def assemble_network(graph: VesselGraph, labels: dict[int, str]) -> LabeledNetwork:
    """Derive trees, inflows, and side anatomy purely from a label map."""
    trees: dict[str, CerebralTree] = {}
    inflow: dict[str, int] = {}
    sides = {"L": SideAnatomy("L"), "R": SideAnatomy("R")}
    by_label: dict[str, list[int]] = {}
    for eid in sorted(graph.edges):
        by_label.setdefault(labels.get(eid, ""), []).append(eid)

    ba_bif = None
    for eid in by_label.get("BA", []):
        if graph.edges[eid].near_node == graph.root_node:
            inflow["BA"] = eid
            ba_bif = graph.edges[eid].far_node

    for side in ("L", "R"):
        anatomy = sides[side]
        pca_set = set(by_label.get(f"PCA_{side}", []))
        for eid in sorted(pca_set):
            if graph.edges[eid].near_node == ba_bif:
                anatomy.junction_edge = eid
                anatomy.split_node = graph.edges[eid].far_node
        pcomm_candidates = by_label.get(f"PComm_{side}", [])
        real_pcomms = [e for e in pcomm_candidates if not graph.edges[e].dashed]
        if real_pcomms:
            anatomy.pcomm_edge = real_pcomms[0]
            anatomy.ic_junction = graph.edges[real_pcomms[0]].far_node
        ic_set = by_label.get(f"IC_{side}", [])
        for eid in ic_set:
            if graph.edges[eid].near_node == anatomy.ic_junction:
                inflow[f"IC_{side}"] = eid
        if f"IC_{side}" not in inflow and ic_set:
            inflow[f"IC_{side}"] = ic_set[0]

        mca_set = set(by_label.get(f"MCA_{side}", []))
        for eid in sorted(mca_set):
            if graph.edges[eid].near_node == anatomy.ic_junction:
                anatomy.terminus_edge = eid
                anatomy.terminus_node = graph.edges[eid].far_node
        aca_set = set(by_label.get(f"ACA_{side}", []))
        for eid in sorted(aca_set):
            if not graph.edges[eid].dashed and graph.edges[eid].near_node == anatomy.terminus_node:
                anatomy.aca_link_edge = eid
                anatomy.aca_root = graph.edges[eid].far_node

        def build_tree(label: str, members: set[int], attachment: int | None, excluded):
            body = {m for m in members if m not in excluded and not graph.edges[m].dashed}
            if not body:
                return
            if attachment is None:
                # near-most member: one whose parent edge is outside the set
                tops = sorted(
                    m
                    for m in body
                    if graph.node_parent_edge.get(graph.edges[m].near_node) not in body
                )
                attachment = graph.edges[tops[0] if tops else min(body)].near_node
            ordered: list[int] = []
            stack = [e for e in graph.child_edges(attachment) if e in body]
            while stack:
                eid = stack.pop(0)
                ordered.append(eid)
                stack = [
                    e for e in graph.child_edges(graph.edges[eid].far_node) if e in body
                ] + stack
            # anything disconnected from the attachment stays out of the tree
            trees[label] = CerebralTree(label, attachment, tuple(ordered))

        build_tree(
            f"PCA_{side}", pca_set, anatomy.split_node, {anatomy.junction_edge}
        )
        build_tree(
            f"MCA_{side}", mca_set, anatomy.terminus_node, {anatomy.terminus_edge}
        )
        build_tree(f"ACA_{side}", aca_set, anatomy.aca_root, {anatomy.aca_link_edge})

    return LabeledNetwork(
        graph=graph,
        labels=labels,
        cerebral_trees=trees,
        inflow_edges=inflow,
        ba_bifurcation=ba_bif,
        sides=sides,
    )


def validate_network(network: LabeledNetwork) -> list[str]:
    """Check label-set connectivity and tree decomposition; returns problems."""
    problems: list[str] = []
    graph = network.graph
    by_label: dict[str, list[int]] = {}
    for eid in sorted(graph.edges):
        by_label.setdefault(network.labels.get(eid, ""), []).append(eid)

    for label in NAMED_LABELS:
        members = by_label.get(label, [])
        if len(members) < 2:
            continue
        # connectivity over shared nodes
        parent: dict[int, int] = {}

        def find(x: int) -> int:
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for eid in members:
            e = graph.edges[eid]
            for n in (e.near_node, e.far_node):
                parent.setdefault(n, n)
            ra, rb = find(e.near_node), find(e.far_node)
            if ra != rb:
                parent[ra] = rb
        roots = {find(graph.edges[eid].near_node) for eid in members}
        if len(roots) > 1:
            problems.append(f"label {label} assigned to {len(roots)} disconnected edge sets")

    for label in TREE_LABELS:
        tree = network.cerebral_trees.get(label)
        if tree is None:
            continue
        members = set(tree.edge_ids)
        labeled = {
            e
            for e in by_label.get(label, [])
            if not graph.edges[e].dashed
        }
        anatomy = network.sides.get(label_side(label))
        ring_members = set()
        if anatomy:
            ring_members = {
                anatomy.junction_edge,
                anatomy.terminus_edge,
                anatomy.aca_link_edge,
            }
        stray = labeled - members - ring_members
        if stray:
            problems.append(f"label {label}: edges {sorted(stray)} unreachable from the tree root")
    return problems


# --- Circle of Willis reconstruction --------------------------------------------


def reconstruct_cow(network: LabeledNetwork) -> LabeledNetwork:
    """Close the ring: insert the dashed A. Comm. and any missing members.

    Idempotent.  Raises :class:`CannotClose` when even dashed insertion
    cannot produce a cycle (no basilar bifurcation, or a hemisphere with
    nothing to anchor to).
    """
    if any(lab == "AComm" for lab in network.labels.values()):
        return network

    if network.ba_bifurcation is None:
        raise CannotClose(["BA"])

    graph = network.graph
    edges = dict(graph.edges)
    node_parent_edge = dict(graph.node_parent_edge)
    node_child_edges = {k: list(v) for k, v in graph.node_child_edges.items()}
    labels = dict(network.labels)
    sides = {s: replace(a) for s, a in network.sides.items()}
    synthetic_nodes = dict(network.synthetic_nodes)

    next_edge_id = max(edges) + 1
    next_node_id = min([0] + list(synthetic_nodes)) - 1

    def add_dashed(label: str, a: int, b: int, radius: float) -> int:
        nonlocal next_edge_id
        eid = next_edge_id
        next_edge_id += 1
        edges[eid] = ArteryEdge(
            edge_id=eid,
            segment_ids=(),
            near_node=a,
            far_node=b,
            mean_radius=radius,
            chain_length=0.0,
            centroid=(0.0, 0.0, 0.0),
            directedness=BIDIRECTIONAL,
            dashed=True,
        )
        labels[eid] = label
        return eid

    missing: list[str] = []
    for side in ("L", "R"):
        anatomy = sides.setdefault(side, SideAnatomy(side))
        if anatomy.pcomm_edge is None:
            anchor = anatomy.split_node
            if anchor is None:
                anchor = network.ba_bifurcation
            if anchor is None:
                missing.append(f"PComm_{side}")
                continue
            synth = next_node_id
            next_node_id -= 1
            synthetic_nodes[synth] = f"terminus_{side}"
            neighbor = node_parent_edge.get(anchor)
            radius = edges[neighbor].mean_radius if neighbor is not None else 1.0
            eid = add_dashed(f"PComm_{side}", anchor, synth, radius)
            node_child_edges.setdefault(anchor, []).append(eid)
            node_parent_edge[synth] = eid
            node_child_edges[synth] = []
            anatomy.pcomm_edge = eid
            anatomy.ic_junction = synth
    if missing:
        raise CannotClose(missing)

    def acomm_anchor(anatomy: SideAnatomy) -> int | None:
        for candidate in (
            anatomy.aca_root,
            anatomy.terminus_node,
            anatomy.ic_junction,
        ):
            if candidate is not None:
                return candidate
        return None

    anchor_l = acomm_anchor(sides["L"])
    anchor_r = acomm_anchor(sides["R"])
    if anchor_l is None or anchor_r is None:
        raise CannotClose([s for s, a in (("L", anchor_l), ("R", anchor_r)) if a is None])

    neighbor_radii = []
    for anatomy in (sides["L"], sides["R"]):
        for eid in (anatomy.aca_link_edge, anatomy.pcomm_edge):
            if eid is not None and not edges[eid].dashed:
                neighbor_radii.append(edges[eid].mean_radius)
                break
    acomm_radius = (
        sum(neighbor_radii) / len(neighbor_radii) if neighbor_radii else 1.0
    )
    acomm = add_dashed("AComm", anchor_l, anchor_r, acomm_radius)

    # assemble the ordered ring path: out the left side, across the top, back
    # up the right side to the basilar bifurcation
    ring_roles: dict[int, str] = {}

    def side_part(anatomy: SideAnatomy) -> list[tuple[int, str]]:
        part: list[tuple[int, str]] = []
        if anatomy.junction_edge is not None:
            part.append((anatomy.junction_edge, ROLE_JUNCTION))
        if anatomy.pcomm_edge is not None:
            part.append((anatomy.pcomm_edge, ROLE_PCOMM))
        if anatomy.terminus_edge is not None:
            part.append((anatomy.terminus_edge, ROLE_JUNCTION))
        if anatomy.aca_link_edge is not None:
            part.append((anatomy.aca_link_edge, ROLE_ACA_LINK))
        return part

    left_part = side_part(sides["L"])
    right_part = side_part(sides["R"])
    cycle = [eid for eid, _ in left_part]
    cycle.append(acomm)
    cycle.extend(eid for eid, _ in reversed(right_part))
    for eid, role in left_part + right_part:
        ring_roles[eid] = role
    ring_roles[acomm] = ROLE_ACOMM

    for eid in cycle:
        edge = edges[eid]
        if edge.directedness != BIDIRECTIONAL:
            edges[eid] = replace(edge, directedness=BIDIRECTIONAL)

    new_graph = VesselGraph(
        forest=graph.forest,
        edges=edges,
        node_parent_edge=node_parent_edge,
        node_child_edges=node_child_edges,
        root_node=graph.root_node,
        warnings=list(graph.warnings),
    )
    return LabeledNetwork(
        graph=new_graph,
        labels=labels,
        cerebral_trees=dict(network.cerebral_trees),
        inflow_edges=dict(network.inflow_edges),
        ba_bifurcation=network.ba_bifurcation,
        sides=sides,
        classification_errors=list(network.classification_errors),
        cow_cycle=tuple(cycle),
        ring_roles=ring_roles,
        synthetic_nodes=synthetic_nodes,
    )
