"""Color system, SVG rendering, and the canonical JSON scene document.

The scene JSON is the contract between the engine and the dashboard:
versioned, fixed key order, numbers written with Python ``repr`` so a
parse round trip is lossless.  SVG output is deterministic byte-for-byte
for identical inputs; every path carries the edge id so external tooling
can link marks back to the scene.
"""

from __future__ import annotations

import colorsys
import json
from dataclasses import dataclass, field, replace

from .errors import MalformedScene, SchemaMismatch
from .flow import flow_color
from .layout import (
    EdgePath,
    LayoutScene,
    ProjectionLine,
    SceneNode,
    SCENE_VERSION,
)
from .vessel import label_side

RGB = tuple[int, int, int]

MODE_CATEGORICAL = "categorical"
MODE_FLOW = "flow"
MODE_BLACKWHITE = "blackwhite"


def _hsv(h: float, s: float, v: float) -> RGB:
    r, g, b = colorsys.hsv_to_rgb(h, s, v)
    return (round(r * 255), round(g * 255), round(b * 255))


# hue per hemisphere; saturation encodes front-to-back depth, darkest for
# the anterior arteries and lightest for the posterior ones
_LEFT_HUE = 0.58  # blue
_RIGHT_HUE = 0.075  # orange
_SATURATION = {"ACA": 0.90, "MCA": 0.65, "PCA": 0.40}
_VALUE = 0.84


def _default_label_colors() -> dict[str, RGB]:
    colors: dict[str, RGB] = {}
    for family, sat in _SATURATION.items():
        colors[f"{family}_L"] = _hsv(_LEFT_HUE, sat, _VALUE)
        colors[f"{family}_R"] = _hsv(_RIGHT_HUE, sat, _VALUE)
    colors["PComm_L"] = (0xD0, 0x34, 0x2C)
    colors["PComm_R"] = (0xD0, 0x34, 0x2C)
    colors["AComm"] = (0x8C, 0x8C, 0x8C)
    colors["BA"] = (0x3E, 0x7C, 0x59)
    colors["IC_L"] = (0x7A, 0x5F, 0xA0)
    colors["IC_R"] = (0x7A, 0x5F, 0xA0)
    return colors


@dataclass(frozen=True)
class ColorScheme:
    label_colors: dict[str, RGB] = field(default_factory=_default_label_colors)
    flow_base: dict[str, RGB] = field(
        default_factory=lambda: {
            "L": _hsv(_LEFT_HUE, 0.9, 0.8),
            "R": _hsv(_RIGHT_HUE, 0.9, 0.8),
            "C": (0x4A, 0x4A, 0x5E),
        }
    )
    pcomm_accent: RGB = (0xD0, 0x34, 0x2C)
    foreground: RGB = (0x11, 0x11, 0x11)
    unlabeled: RGB = (0xA9, 0xA9, 0xA9)


def color_for_edge(
    label: str,
    scheme: ColorScheme,
    mode: str = MODE_CATEGORICAL,
    flow: float | None = None,
    scan_max_flow: float = 1.0,
) -> RGB:
    if mode == MODE_BLACKWHITE:
        return scheme.foreground
    if mode == MODE_FLOW:
        base = scheme.flow_base[label_side(label)]
        return flow_color(flow if flow is not None else 0.0, scan_max_flow, base)
    return scheme.label_colors.get(label, scheme.unlabeled)


def colorize_scene(
    scene: LayoutScene, scheme: ColorScheme | None = None, mode: str = MODE_CATEGORICAL
) -> LayoutScene:
    """Return a copy of the scene recolored under the given mode."""
    scheme = scheme or ColorScheme()
    max_flow = max(
        (ep.flow for ep in scene.edge_paths if ep.flow is not None), default=1.0
    )
    recolored = [
        replace(
            ep,
            color=color_for_edge(ep.label, scheme, mode, flow=ep.flow, scan_max_flow=max_flow),
        )
        for ep in scene.edge_paths
    ]
    return replace(scene, edge_paths=recolored)


# --- SVG -------------------------------------------------------------------------


def _fmt(value: float) -> str:
    text = f"{value:.3f}".rstrip("0").rstrip(".")
    return "0" if text in ("-0", "") else text


def _hex(color: RGB) -> str:
    return "#{:02X}{:02X}{:02X}".format(*color)


def _path_d(edge_path: EdgePath) -> str:
    p0 = edge_path.path[0][0]
    parts = [f"M {_fmt(p0[0])} {_fmt(p0[1])}"]
    for seg in edge_path.path:
        _, c1, c2, p1 = seg
        parts.append(
            "C "
            + " ".join(_fmt(v) for v in (c1[0], c1[1], c2[0], c2[1], p1[0], p1[1]))
        )
    return " ".join(parts)


def render_svg(scene: LayoutScene, legend: bool = False, background: str = "#FFFFFF") -> str:
    """Deterministic standalone SVG; one path per edge, ids stable."""
    xs: list[float] = []
    ys: list[float] = []
    for ep in scene.edge_paths:
        for x, y in ep.points():
            xs.append(x)
            ys.append(y)
    pad = 24.0
    min_x, max_x = min(xs) - pad, max(xs) + pad
    min_y, max_y = min(ys) - pad, max(ys) + pad
    width = max_x - min_x
    height = max_y - min_y

    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="{_fmt(min_x)} {_fmt(min_y)} '
        f'{_fmt(width)} {_fmt(height)}" width="{_fmt(width)}" height="{_fmt(height)}">',
        f'<rect x="{_fmt(min_x)}" y="{_fmt(min_y)}" width="{_fmt(width)}" '
        f'height="{_fmt(height)}" fill="{background}"/>',
        f'<g id="scene-{scene.scan_id}" fill="none" stroke-linecap="round">',
    ]
    for ep in scene.edge_paths:
        dash = ' stroke-dasharray="6 4"' if ep.dashed else ""
        lines.append(
            f'<path id="e{ep.edge_id}" data-edge-id="{ep.edge_id}" data-label="{ep.label}" '
            f'stroke="{_hex(ep.color)}" stroke-width="{_fmt(ep.stroke_width)}"{dash} '
            f'd="{_path_d(ep)}"/>'
        )
    lines.append("</g>")

    if legend:
        seen: list[str] = []
        for ep in scene.edge_paths:
            if ep.label not in seen and not ep.label.startswith("Unlabeled"):
                seen.append(ep.label)
        lines.append('<g font-family="sans-serif" font-size="12">')
        for i, label in enumerate(seen):
            color = next(ep.color for ep in scene.edge_paths if ep.label == label)
            y = min_y + pad + 16.0 * i
            lines.append(
                f'<rect x="{_fmt(min_x + pad)}" y="{_fmt(y)}" width="12" height="12" '
                f'fill="{_hex(color)}"/>'
            )
            lines.append(
                f'<text x="{_fmt(min_x + pad + 18)}" y="{_fmt(y + 10)}">{label}</text>'
            )
        lines.append("</g>")

    lines.append("</svg>")
    return "\n".join(lines) + "\n"


# --- JSON scene ------------------------------------------------------------------


def export_scene_json(scene: LayoutScene) -> str:
    """Serialize to the versioned scene schema with a fixed key order."""
    doc = {
        "version": scene.version,
        "scan_id": scene.scan_id,
        "config": dict(scene.config, radius_range=list(scene.radius_range)),
        "nodes": [
            {"id": n.node_id, "x": n.x, "y": n.y, "depth": n.depth} for n in scene.nodes
        ],
        "edges": [],
        "projections": {},
    }
    for ep in scene.edge_paths:
        entry = {
            "id": ep.edge_id,
            "label": ep.label,
            "side": ep.side,
            "dashed": ep.dashed,
            "strokeWidth": ep.stroke_width,
            "color": _hex(ep.color),
        }
        if ep.flow is not None:
            entry["flow"] = ep.flow
        entry["meanRadius"] = ep.mean_radius
        entry["controlPoints"] = [[x, y] for x, y in ep.points()]
        entry["segmentIds"] = list(ep.segment_ids)
        doc["edges"].append(entry)
    for view, lines in scene.projections.items():
        doc["projections"][view] = [
            {"edgeId": line.edge_id, "polyline": [[x, y] for x, y in line.polyline]}
            for line in lines
        ]
    return json.dumps(doc, indent=None, separators=(",", ":")) + "\n"


def _points_to_path(points: list[list[float]]) -> tuple:
    pts = [tuple(p) for p in points]
    segs = []
    for i in range(0, len(pts) - 1, 3):
        segs.append((pts[i], pts[i + 1], pts[i + 2], pts[i + 3]))
    return tuple(segs)


def _parse_hex(text: str) -> RGB:
    text = text.lstrip("#")
    return (int(text[0:2], 16), int(text[2:4], 16), int(text[4:6], 16))


def scene_from_json(text: str) -> LayoutScene:
    """Parse a scene document; raises SchemaMismatch on version drift."""
    try:
        doc = json.loads(text)
    except ValueError as exc:
        raise MalformedScene(str(exc)) from None
    if not isinstance(doc, dict):
        raise MalformedScene("top level is not an object")
    version = doc.get("version")
    if version != SCENE_VERSION:
        raise SchemaMismatch(version, SCENE_VERSION)
    config = dict(doc["config"])
    radius_range = tuple(config.pop("radius_range", (0.0, 1.0)))
    try:
        nodes = [SceneNode(n["id"], n["x"], n["y"], n["depth"]) for n in doc["nodes"]]
    except (KeyError, TypeError) as exc:
        raise MalformedScene(f"bad nodes table: {exc}") from None
    edge_paths = []
    for e in doc["edges"]:
        edge_paths.append(
            EdgePath(
                edge_id=e["id"],
                label=e["label"],
                path=_points_to_path(e["controlPoints"]),
                stroke_width=e["strokeWidth"],
                dashed=e["dashed"],
                segment_ids=tuple(e["segmentIds"]),
                mean_radius=e["meanRadius"],
                color=_parse_hex(e["color"]),
                flow=e.get("flow"),
            )
        )
    projections = {}
    for view, lines in doc["projections"].items():
        projections[view] = [
            ProjectionLine(line["edgeId"], tuple(tuple(p) for p in line["polyline"]))
            for line in lines
        ]
    return LayoutScene(
        version=version,
        scan_id=doc["scan_id"],
        config=config,
        nodes=nodes,
        edge_paths=edge_paths,
        projections=projections,
        radius_range=radius_range,
    )
