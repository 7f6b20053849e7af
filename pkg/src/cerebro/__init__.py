"""Cerebral artery network layout engine.

Converts segmented artery scans (SWC centerlines) into an abstract but
spatially contextualized 2D network scene: layered cerebral trees over a
reconstructed Circle of Willis ring with bend-preserving inflow curves,
plus linear blood-flow simulation, abnormality synthesis and detection,
batch robustness validation, and SVG/JSON export for the linked-view
dashboard.
"""

from .config import EngineConfig, LayoutConfig, default_config, resolve_config
from .errors import CerebroError
from .flow import FlowAssignment, compute_flow, flow_color
from .layout import LayoutScene, assign_slots, compose_scene, order_subtrees
from .render import (
    ColorScheme,
    color_for_edge,
    colorize_scene,
    export_scene_json,
    render_svg,
    scene_from_json,
)
from .swc import AxisConvention, SegmentForest, SwcRecord, apply_axis_map, parse_swc, serialize_swc
from .vessel import (
    ArteryEdge,
    LabeledNetwork,
    VesselGraph,
    apply_label_overrides,
    classify_arteries,
    contract_chains,
    count_bends,
    reconstruct_cow,
)
from .analysis import (
    GeneratorParams,
    generate_synthetic_scan,
    inject_stenosis,
    detect_width_outliers,
    process_scan,
    symmetry_metrics,
    validate_batch,
)

__version__ = "0.1.0"

__all__ = [
    "ArteryEdge",
    "AxisConvention",
    "CerebroError",
    "ColorScheme",
    "EngineConfig",
    "FlowAssignment",
    "GeneratorParams",
    "LabeledNetwork",
    "LayoutConfig",
    "LayoutScene",
    "SegmentForest",
    "SwcRecord",
    "VesselGraph",
    "apply_axis_map",
    "apply_label_overrides",
    "assign_slots",
    "classify_arteries",
    "color_for_edge",
    "colorize_scene",
    "compose_scene",
    "compute_flow",
    "contract_chains",
    "count_bends",
    "default_config",
    "detect_width_outliers",
    "export_scene_json",
    "flow_color",
    "generate_synthetic_scan",
    "inject_stenosis",
    "order_subtrees",
    "parse_swc",
    "process_scan",
    "reconstruct_cow",
    "render_svg",
    "resolve_config",
    "scene_from_json",
    "serialize_swc",
    "symmetry_metrics",
    "validate_batch",
]
