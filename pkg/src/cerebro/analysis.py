"""Test-data synthesis and analytic support.

``generate_synthetic_scan`` builds anatomically plausible scans with known
ground-truth labels, standing in for a real scan corpus on a developer
machine.  ``inject_stenosis`` narrows an artery the way the evaluation
stimuli were produced; ``detect_width_outliers`` automates the visual
taper-deviation cue; ``validate_batch`` runs whole directories through
the pipeline and checks machine-checkable analogs of the three robustness
criteria (ring shape, spatial constraints, view linkage).
"""

from __future__ import annotations

import json
import math
import random
import time
from dataclasses import dataclass, field
from pathlib import Path

from .config import EngineConfig, default_config
from .errors import CerebroError, SeverityOutOfRange, UnknownEdge
from .flow import FlowAssignment
from .geometry import flatten_path, polylines_intersect
from .layout import (
    LayoutScene,
    assign_slots,
    compose_scene,
    tree_shape,
)
from .swc import AxisConvention, SegmentForest, SwcRecord, apply_axis_map, parse_swc
from .vessel import (
    LabeledNetwork,
    TREE_LABELS,
    VesselGraph,
    apply_label_overrides,
    classify_arteries,
    contract_chains,
    reconstruct_cow,
)

Vec3 = tuple[float, float, float]


# --- synthetic scan generation -----------------------------------------------------


@dataclass(frozen=True)
class GeneratorParams:
    depth_min: int = 3
    depth_max: int = 4
    branch_prob: float = 0.9
    taper: float = 0.85
    step: float = 1.5
    jitter: float = 0.2
    radius_noise: float = 0.02
    symmetric: bool = False
    ablate: frozenset = frozenset()


class _ScanBuilder:
    def __init__(self):
        self.records: list[SwcRecord] = []
        self.ground_truth: dict[int, str] = {}
        self._next = 1

    def add(self, pos: Vec3, radius: float, parent: int, label: str) -> int:
        sid = self._next
        self._next += 1
        self.records.append(SwcRecord(sid, 2, pos, radius, parent))
        self.ground_truth[sid] = label
        return sid

    def chain(
        self,
        rng: random.Random,
        params: GeneratorParams,
        parent: int,
        start: Vec3,
        end,
        r_start: float,
        label: str,
        sign: float,
    ) -> tuple[int, Vec3, float]:
        """Append one artery chain tapering linearly from start to its end.

        ``end`` is a waypoint or a list of waypoints; the radius tapers by
        the configured factor over the whole arc regardless of waypoint
        count, so every chain-over-chain mean ratio equals the taper.
        Returns (tip id, end position, end radius).
        """
        waypoints = [end] if isinstance(end, tuple) else list(end)
        r_end = r_start * params.taper
        legs = []
        total = 0.0
        prev = start
        for wp in waypoints:
            dist = math.dist(prev, wp)
            legs.append((prev, wp, dist))
            total += dist
            prev = wp
        cur = parent
        walked = 0.0
        for leg_index, (a, b, dist) in enumerate(legs):
            steps = max(3, math.ceil(dist / params.step))
            last_leg = leg_index == len(legs) - 1
            for i in range(1, steps + 1):
                t = i / steps
                px = a[0] + (b[0] - a[0]) * t
                py = a[1] + (b[1] - a[1]) * t
                pz = a[2] + (b[2] - a[2]) * t
                if not (last_leg and i == steps):
                    px += rng.uniform(-params.jitter, params.jitter)
                    py += rng.uniform(-params.jitter, params.jitter)
                    pz += rng.uniform(-params.jitter, params.jitter)
                frac = (walked + dist * t) / total if total > 0 else 1.0
                radius = (r_start + (r_end - r_start) * frac) * (
                    1.0 + rng.uniform(-params.radius_noise, params.radius_noise)
                )
                cur = self.add((sign * px, py, pz), radius, cur, label)
            walked += dist
        return cur, waypoints[-1], r_end


def _grow_tree(
    builder: _ScanBuilder,
    rng: random.Random,
    params: GeneratorParams,
    parent: int,
    base: Vec3,
    radius: float,
    depth_left: int,
    label: str,
    half_spread: float,
    rise: float,
    drift_z: float,
    sign: float,
    first: bool = True,
):
    # strictly binary growth: a node either bifurcates or is a leaf, so
    # contraction never merges chains and taper ratios stay uniform
    if depth_left <= 0:
        return
    if not first and rng.random() > params.branch_prob:
        return
    for direction in (-1.0, 1.0):
        dx = direction * half_spread * rng.uniform(0.8, 1.2)
        dy = rise * rng.uniform(0.85, 1.15)
        dz = drift_z * rng.uniform(0.7, 1.3)
        end = (base[0] + dx, base[1] + dy, base[2] + dz)
        tip, _, r_end = builder.chain(rng, params, parent, base, end, radius, label, sign)
        _grow_tree(
            builder,
            rng,
            params,
            tip,
            end,
            r_end,
            depth_left - 1,
            label,
            half_spread * 0.55,
            rise,
            drift_z,
            sign,
            first=False,
        )


def _build_side(
    builder: _ScanBuilder,
    rng: random.Random,
    params: GeneratorParams,
    side: str,
    sign: float,
    ba_bif: int,
    ba_bif_pos: Vec3,
    r_at_bif: float,
):
    skip = params.ablate

    # ring chain out to the PCA origin
    split_pos = (7.0, 0.5, -11.0)
    split, _, r_split = builder.chain(
        rng, params, ba_bif, (0.0, ba_bif_pos[1], ba_bif_pos[2]), split_pos, r_at_bif,
        f"PCA_{side}", sign,
    )

    if f"PCA_{side}" not in skip:
        depth = rng.randint(params.depth_min, params.depth_max)
        root_end = (10.5, 3.5, -17.0)
        tip, _, r = builder.chain(
            rng, params, split, split_pos, root_end, r_split, f"PCA_{side}", sign
        )
        _grow_tree(
            builder, rng, params, tip, root_end, r, depth - 1, f"PCA_{side}",
            3.5, 2.6, -1.2, sign,
        )

    if f"PComm_{side}" in skip:
        return

    junction_pos = (19.0, 0.0, 0.5)
    junction, _, r_junction = builder.chain(
        rng, params, split, split_pos, junction_pos, r_split, f"PComm_{side}", sign
    )

    if f"IC_{side}" not in skip:
        # vertical descent, lateral jog, vertical descent: three bends
        waypoints = [(19.6, -18.0, 1.0), (26.5, -19.6, 1.5), (27.1, -42.0, 2.0)]
        builder.chain(
            rng, params, junction, junction_pos, waypoints, r_junction, f"IC_{side}", sign
        )

    terminus_pos = (21.0, 1.5, 3.0)
    terminus, _, r_term = builder.chain(
        rng, params, junction, junction_pos, terminus_pos, r_junction, f"MCA_{side}", sign
    )

    if f"MCA_{side}" not in skip:
        depth = rng.randint(params.depth_min, params.depth_max)
        root_end = (28.0, 4.0, 2.0)
        tip, _, r = builder.chain(
            rng, params, terminus, terminus_pos, root_end, r_term, f"MCA_{side}", sign
        )
        _grow_tree(
            builder, rng, params, tip, root_end, r, depth - 1, f"MCA_{side}",
            5.0, 2.6, 0.8, sign,
        )

    if f"ACA_{side}" not in skip:
        aca_root_pos = (8.0, 3.0, 7.0)
        aca_root, _, r_aca = builder.chain(
            rng, params, terminus, terminus_pos, aca_root_pos, r_term, f"ACA_{side}", sign
        )
        depth = rng.randint(params.depth_min, params.depth_max)
        # the root of the ACA tree is a bifurcation: both branches grow
        for direction in (-1.0, 1.0):
            dx = direction * 2.8 * rng.uniform(0.8, 1.2)
            end = (aca_root_pos[0] + dx, aca_root_pos[1] + 2.6, aca_root_pos[2] + 2.2)
            tip, _, r = builder.chain(
                rng, params, aca_root, aca_root_pos, end, r_aca, f"ACA_{side}", sign
            )
            _grow_tree(
                builder, rng, params, tip, end, r, depth - 2, f"ACA_{side}",
                2.2, 2.6, 1.4, sign,
            )


def generate_synthetic_scan(
    seed: int, params: GeneratorParams | None = None
) -> tuple[SegmentForest, dict[int, str]]:
    """Deterministic anatomically plausible scan with ground-truth labels.

    Returns the forest plus a per-segment label map (ring chains carry the
    label of the artery they feed: the basilar-to-PCA chain is PCA, the
    junction-to-terminus chain is MCA, the terminus-to-ACA-root chain is
    ACA, matching the classifier's conventions).
    """
    params = params or GeneratorParams()
    builder = _ScanBuilder()

    rng_ba = random.Random(seed * 4 + 1)
    rng_l = random.Random(seed * 4 + 2)
    rng_r = random.Random(seed * 4 + 2 if params.symmetric else seed * 4 + 3)

    root_pos = (0.0, -24.0, -16.0)
    bif_pos = (0.0, 0.0, -10.0)
    root = builder.add(root_pos, 2.2, -1, "BA")
    ba_bif, _, r_bif = builder.chain(
        rng_ba, params, root, root_pos, bif_pos, 2.2, "BA", 1.0
    )

    _build_side(builder, rng_l, params, "L", -1.0, ba_bif, bif_pos, r_bif)
    _build_side(builder, rng_r, params, "R", 1.0, ba_bif, bif_pos, r_bif)

    return SegmentForest(builder.records), builder.ground_truth


def ground_truth_edge_labels(graph: VesselGraph, gt_segments: dict[int, str]) -> dict[int, str]:
    """Lift per-segment ground truth onto contracted edges."""
    out = {}
    for eid, edge in graph.edges.items():
        if edge.segment_ids:
            out[eid] = gt_segments[edge.segment_ids[-1]]
    return out


# --- stenosis injection --------------------------------------------------------------


def inject_stenosis(
    forest: SegmentForest, target_edge: int, severity: float
) -> SegmentForest:
    """Scale radii over the central half of one artery chain by (1 - severity).

    Only radius fields change; positions, ids, and ordering are untouched,
    so serialized output differs from the input in those numbers alone.
    """
    if not (0.0 < severity < 1.0):
        raise SeverityOutOfRange(severity)
    graph = contract_chains(forest)
    if target_edge not in graph.edges:
        raise UnknownEdge(target_edge)
    chain = graph.edges[target_edge].segment_ids

    total = 0.0
    arc: dict[int, float] = {chain[0]: 0.0}
    for a, b in zip(chain, chain[1:]):
        total += math.dist(forest.position(a), forest.position(b))
        arc[b] = total
    lo, hi = 0.25 * total, 0.75 * total
    affected = {sid for sid, s in arc.items() if lo <= s <= hi}

    records = [
        SwcRecord(r.id, r.type_code, r.position, r.radius * (1.0 - severity), r.parent_id)
        if r.id in affected
        else r
        for r in forest.records
    ]
    return SegmentForest(records)


# --- width outliers ------------------------------------------------------------------


@dataclass(frozen=True)
class OutlierFlag:
    edge_id: int
    kind: str  # narrowing | widening
    taper_ratio: float


@dataclass
class OutlierReport:
    narrowing_threshold: float
    widening_threshold: float
    flags: list[OutlierFlag] = field(default_factory=list)

    def narrowings(self) -> list[OutlierFlag]:
        return [f for f in self.flags if f.kind == "narrowing"]

    def widenings(self) -> list[OutlierFlag]:
        return [f for f in self.flags if f.kind == "widening"]


def detect_width_outliers(
    network: LabeledNetwork,
    narrowing_threshold: float = 0.5,
    widening_threshold: float = 1.5,
) -> OutlierReport:
    """Flag edges whose width deviates from their parent's beyond thresholds.

    Ratios are child mean radius over parent mean radius; report sorted by
    deviation magnitude, largest first.
    """
    graph = network.graph
    flags = []
    for eid in sorted(graph.edges):
        edge = graph.edges[eid]
        if edge.dashed:
            continue
        parent = graph.node_parent_edge.get(edge.near_node)
        if parent is None or graph.edges[parent].dashed:
            continue
        ratio = edge.mean_radius / graph.edges[parent].mean_radius
        if ratio < narrowing_threshold:
            flags.append(OutlierFlag(eid, "narrowing", ratio))
        elif ratio > widening_threshold:
            flags.append(OutlierFlag(eid, "widening", ratio))
    flags.sort(key=lambda f: (-abs(f.taper_ratio - 1.0), f.edge_id))
    return OutlierReport(narrowing_threshold, widening_threshold, flags)


# --- symmetry metrics ----------------------------------------------------------------


@dataclass(frozen=True)
class PairSymmetry:
    family: str
    present_l: bool
    present_r: bool
    depth_l: int
    depth_r: int
    leaves_l: int
    leaves_r: int
    depth_delta: int
    leaf_delta: int
    asymmetry_index: float


@dataclass
class SymmetryReport:
    pairs: dict[str, PairSymmetry]
    missing: list[str]

    def to_json_dict(self) -> dict:
        return {
            "pairs": {
                family: {
                    "presentL": p.present_l,
                    "presentR": p.present_r,
                    "depthL": p.depth_l,
                    "depthR": p.depth_r,
                    "leavesL": p.leaves_l,
                    "leavesR": p.leaves_r,
                    "depthDelta": p.depth_delta,
                    "leafDelta": p.leaf_delta,
                    "asymmetryIndex": p.asymmetry_index,
                }
                for family, p in self.pairs.items()
            },
            "missing": self.missing,
        }


def _tree_depth_and_leaves(network: LabeledNetwork, label: str) -> tuple[int, int] | None:
    shape = tree_shape(network, label)
    if shape is None:
        return None
    graph = network.graph
    members = set(shape.members)
    max_depth = 0
    leaves = 0
    stack = [(e, 1) for e in graph.child_edges(shape.attachment) if e in members]
    while stack:
        eid, depth = stack.pop()
        max_depth = max(max_depth, depth)
        kids = [e for e in graph.child_edges(graph.edges[eid].far_node) if e in members]
        if not kids:
            leaves += 1
        stack.extend((k, depth + 1) for k in kids)
    return max_depth, leaves


def symmetry_metrics(network: LabeledNetwork) -> SymmetryReport:
    pairs: dict[str, PairSymmetry] = {}
    missing: list[str] = []
    for family in ("PCA", "ACA", "MCA"):
        left = _tree_depth_and_leaves(network, f"{family}_L")
        right = _tree_depth_and_leaves(network, f"{family}_R")
        if left is None:
            missing.append(f"{family}_L")
        if right is None:
            missing.append(f"{family}_R")
        if left is None or right is None:
            pairs[family] = PairSymmetry(
                family, left is not None, right is not None,
                left[0] if left else -1, right[0] if right else -1,
                left[1] if left else -1, right[1] if right else -1,
                -1, -1, 0.0,
            )
            continue
        depth_delta = abs(left[0] - right[0])
        leaf_delta = abs(left[1] - right[1])
        pairs[family] = PairSymmetry(
            family, True, True, left[0], right[0], left[1], right[1],
            depth_delta, leaf_delta, leaf_delta / max(1, left[1] + right[1]),
        )
    return SymmetryReport(pairs, missing)


# --- pipeline + robustness batch ----------------------------------------------------


def process_scan(
    forest: SegmentForest,
    config: EngineConfig | None = None,
    scan_id: str = "scan",
    overrides: dict[str, str] | None = None,
    flows: FlowAssignment | None = None,
) -> tuple[LabeledNetwork, LayoutScene]:
    """Contract, classify, reconstruct, and lay out one scan."""
    config = config or default_config()
    conv = AxisConvention.from_string(config.axis)
    if conv != AxisConvention.identity():
        forest = apply_axis_map(forest, conv)
    graph = contract_chains(forest)
    network = classify_arteries(graph, config)
    if overrides:
        network = apply_label_overrides(network, overrides)
    network = reconstruct_cow(network)
    scene = compose_scene(network, config, scan_id=scan_id, flows=flows)
    return network, scene


def check_scene_invariants(
    network: LabeledNetwork, scene: LayoutScene, config: EngineConfig
) -> list[str]:
    """Layout invariant violations: layer alignment, hemisphere separation,
    slot order, within-hemisphere planarity, directed-edge monotonicity."""
    problems: list[str] = []
    layout = config.layout
    baseline = layout.cow_baseline_y

    # layer alignment
    by_depth: dict[int, list[float]] = {}
    for node in scene.nodes:
        if node.depth >= 0:
            by_depth.setdefault(node.depth, []).append(node.y)
    for depth, ys in sorted(by_depth.items()):
        if max(ys) - min(ys) >= 1e-9:
            problems.append(f"layer {depth}: y spread {max(ys) - min(ys):.3e}")

    tree_edges: dict[str, list] = {"L": [], "R": []}
    slots = assign_slots(network, config)
    for label in TREE_LABELS:
        tree = network.cerebral_trees.get(label)
        if tree is None:
            continue
        side = "L" if label.endswith("_L") else "R"
        lo, hi = slots[label]
        for eid in tree.edge_ids:
            path = scene.edge_path(eid)
            xs = [p[0] for p in path.points()]
            if side == "L" and max(xs) >= -layout.band_gutter / 2.0 + 1e-12:
                problems.append(f"edge {eid}: crosses the midline gutter (left)")
            if side == "R" and min(xs) <= layout.band_gutter / 2.0 - 1e-12:
                problems.append(f"edge {eid}: crosses the midline gutter (right)")
            if min(xs) < lo - 1e-9 or max(xs) > hi + 1e-9:
                problems.append(f"edge {eid}: leaves its {label} band")
            tree_edges[side].append((eid, path))

    # slot order: bands strictly nested outward per hemisphere
    for side, sign in (("L", -1.0), ("R", 1.0)):
        extents = []
        for family in ("PCA", "ACA", "MCA"):
            lo, hi = slots[f"{family}_{side}"]
            extents.append((min(abs(lo), abs(hi)), max(abs(lo), abs(hi))))
        for (inner_lo, inner_hi), (outer_lo, outer_hi) in zip(extents, extents[1:]):
            if not inner_hi < outer_lo:
                problems.append(f"slot order violated on side {side}")

    # planarity within each hemisphere
    node_xy = {n.node_id: (n.x, n.y) for n in scene.nodes}
    for side in ("L", "R"):
        edges = tree_edges[side]
        flat = []
        for eid, path in edges:
            pts = flatten_path(path.path, n=12)
            ends = {network.graph.edges[eid].near_node, network.graph.edges[eid].far_node}
            flat.append((eid, pts, ends))
        for i in range(len(flat)):
            for j in range(i + 1, len(flat)):
                eid_a, pts_a, ends_a = flat[i]
                eid_b, pts_b, ends_b = flat[j]
                shared = [node_xy[n] for n in ends_a & ends_b if n in node_xy]
                hit = polylines_intersect(pts_a, pts_b, ignore_near=shared, eps=1e-6)
                if hit is not None:
                    problems.append(
                        f"edges {eid_a} and {eid_b} cross at ({hit[0]:.2f}, {hit[1]:.2f})"
                    )

    # monotone direction rule
    ring = set(network.cow_cycle)
    for path in scene.edge_paths:
        ys = [p[1] for seg in path.path for p in seg]
        if path.edge_id in ring:
            y0 = path.path[0][0][1]
            y1 = path.path[-1][3][1]
            if abs(y0 - baseline) > 1e-9 or abs(y1 - baseline) > 1e-9:
                problems.append(f"ring edge {path.edge_id}: endpoints off the baseline")
            continue
        diffs = [b - a for a, b in zip(ys, ys[1:])]
        if not (all(d <= 1e-9 for d in diffs) or all(d >= -1e-9 for d in diffs)):
            problems.append(f"edge {path.edge_id}: not vertically monotone")
    return problems


def _check_ring(network: LabeledNetwork, scene: LayoutScene, config: EngineConfig) -> list[str]:
    problems = []
    baseline = config.layout.cow_baseline_y
    cycle = network.cow_cycle
    if not cycle:
        return ["no ring reconstructed"]

    acomm_ids = [e for e, lab in network.labels.items() if lab == "AComm"]
    if len(acomm_ids) != 1 or not network.graph.edges[acomm_ids[0]].dashed:
        problems.append("expected exactly one dashed A. Comm.")

    # the cycle closes: consecutive members share nodes, ends meet
    def nodes_of(eid):
        e = network.graph.edges[eid]
        return {e.near_node, e.far_node}

    for a, b in zip(cycle, cycle[1:]):
        if not nodes_of(a) & nodes_of(b):
            problems.append(f"ring edges {a} and {b} do not touch")
    close_node = network.ba_bifurcation
    if close_node is not None and len(cycle) > 1:
        if close_node not in nodes_of(cycle[0]) or close_node not in nodes_of(cycle[-1]):
            problems.append("ring does not close at the basilar bifurcation")

    for eid in acomm_ids:
        ys = [p[1] for p in flatten_path(scene.edge_path(eid).path, n=16)]
        if min(ys) >= baseline:
            problems.append("A. Comm. does not arc above the baseline")
    for side in ("L", "R"):
        anatomy = network.sides.get(side)
        if anatomy is None or anatomy.pcomm_edge is None:
            continue
        ys = [p[1] for p in flatten_path(scene.edge_path(anatomy.pcomm_edge).path, n=16)]
        if max(ys) <= baseline:
            problems.append(f"P. Comm. {side} does not arc below the baseline")

    ring_xs = []
    for eid in cycle:
        path = scene.edge_path(eid)
        ring_xs.extend([path.path[0][0][0], path.path[-1][3][0]])
    ext_l = abs(min(ring_xs))
    ext_r = abs(max(ring_xs))
    limit = config.ring_extent_tolerance * max(ext_l, ext_r)
    if abs(ext_l - ext_r) > limit:
        problems.append(
            f"ring extents differ beyond tolerance: L {ext_l:.1f} vs R {ext_r:.1f}"
        )
    return problems


def _check_linkage(network: LabeledNetwork, scene: LayoutScene) -> list[str]:
    problems = []
    forest = network.graph.forest
    non_dashed = [
        eid for eid in sorted(network.graph.edges) if not network.graph.edges[eid].dashed
    ]
    for view in ("front", "top", "side"):
        lines = {l.edge_id: l for l in scene.projections.get(view, [])}
        if sorted(lines) != non_dashed:
            problems.append(f"projection {view}: edge ids do not match the scene")
            continue
        for eid in non_dashed:
            edge = network.graph.edges[eid]
            polyline = lines[eid].polyline
            if len(polyline) != len(edge.segment_ids):
                problems.append(f"projection {view}: edge {eid} vertex count mismatch")
                continue
            for sid, pt in zip(edge.segment_ids, polyline):
                x, y, z = forest.position(sid)
                expect = {"front": (x, y), "top": (x, z), "side": (z, y)}[view]
                if pt != expect:
                    problems.append(f"projection {view}: edge {eid} polyline drift")
                    break
    return problems


@dataclass
class ScanResult:
    file: str
    ok: bool
    error: str | None = None
    criteria: dict = field(default_factory=dict)
    diagnostics: list[str] = field(default_factory=list)


@dataclass
class BatchReport:
    results: list[ScanResult]
    elapsed_seconds: float = 0.0

    @property
    def total(self) -> int:
        return len(self.results)

    @property
    def passed(self) -> int:
        return sum(1 for r in self.results if r.ok)

    def to_json_dict(self) -> dict:
        return {
            "passed": self.passed,
            "total": self.total,
            "elapsedSeconds": self.elapsed_seconds,
            "scans": [
                {
                    "file": r.file,
                    "ok": r.ok,
                    "error": r.error,
                    "criteria": r.criteria,
                    "diagnostics": r.diagnostics,
                }
                for r in self.results
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), indent=2) + "\n"

    def to_text(self) -> str:
        lines = [f"{self.passed}/{self.total} pass"]
        for r in self.results:
            status = "PASS" if r.ok else "FAIL"
            detail = "" if r.ok else f"  ({r.error or '; '.join(r.diagnostics[:3])})"
            lines.append(f"  {status} {r.file}{detail}")
        return "\n".join(lines) + "\n"


def validate_scan(forest: SegmentForest, config: EngineConfig, name: str) -> ScanResult:
    try:
        network, scene = process_scan(forest, config, scan_id=name)
    except CerebroError as exc:
        return ScanResult(file=name, ok=False, error=f"{type(exc).__name__}: {exc}")
    c1 = _check_ring(network, scene, config)
    c2 = check_scene_invariants(network, scene, config)
    c3 = _check_linkage(network, scene)
    diagnostics = c1 + c2 + c3
    if network.classification_errors:
        diagnostics = [str(e) for e in network.classification_errors] + diagnostics
    ok = not diagnostics
    return ScanResult(
        file=name,
        ok=ok,
        criteria={"c1": not c1, "c2": not c2, "c3": not c3},
        diagnostics=diagnostics,
    )


def validate_batch(
    directory: str | Path, config: EngineConfig | None = None, pattern: str = "*.swc"
) -> BatchReport:
    """Run every scan in a directory through the pipeline and the three
    robustness criteria.  Per-file failures are recorded; the batch never
    aborts, and results are independent of file discovery order."""
    config = config or default_config()
    start = time.perf_counter()
    results = []
    for path in sorted(Path(directory).glob(pattern)):
        try:
            forest = parse_swc(path.read_text())
        except CerebroError as exc:
            results.append(
                ScanResult(file=path.name, ok=False, error=f"{type(exc).__name__}: {exc}")
            )
            continue
        results.append(validate_scan(forest, config, path.name))
    results.sort(key=lambda r: r.file)
    return BatchReport(results=results, elapsed_seconds=time.perf_counter() - start)
