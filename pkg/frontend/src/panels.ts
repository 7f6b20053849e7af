/**
 * SVG panel rendering. Every drawn edge carries data-edge-id, which is the
 * linkage key between the abstract network panel and the projection panel:
 * highlighting is a pure function of the selection store, applied to both
 * panels by attribute lookup, never by positional coupling.
 */

import { edgeColor } from "./colors.js";
import {
  maxFlow,
  ProjectionLine,
  SceneDocument,
  SceneEdge,
  ViewName,
} from "./scene.js";
import { SelectionState } from "./state.js";

const SVG_NS = "http://www.w3.org/2000/svg";

export interface PanelHandlers {
  onSelect(edgeId: number | null): void;
  onHover(edgeId: number | null, event?: MouseEvent): void;
}

function bounds(points: Iterable<[number, number]>): [number, number, number, number] {
  let minX = Infinity;
  let minY = Infinity;
  let maxX = -Infinity;
  let maxY = -Infinity;
  for (const [x, y] of points) {
    if (x < minX) minX = x;
    if (y < minY) minY = y;
    if (x > maxX) maxX = x;
    if (y > maxY) maxY = y;
  }
  if (minX > maxX) return [0, 0, 1, 1];
  const pad = 0.05 * Math.max(maxX - minX, maxY - minY, 1);
  return [minX - pad, minY - pad, maxX - minX + 2 * pad, maxY - minY + 2 * pad];
}

function bezierPathD(points: [number, number][]): string {
  const parts = [`M ${points[0][0]} ${points[0][1]}`];
  for (let i = 1; i + 2 < points.length; i += 3) {
    const [c1, c2, p] = [points[i], points[i + 1], points[i + 2]];
    parts.push(`C ${c1[0]} ${c1[1]} ${c2[0]} ${c2[1]} ${p[0]} ${p[1]}`);
  }
  return parts.join(" ");
}

function polylinePathD(points: [number, number][]): string {
  // projection coordinates have y growing upward; SVG wants it downward
  const parts = [`M ${points[0][0]} ${-points[0][1]}`];
  for (let i = 1; i < points.length; i++) {
    parts.push(`L ${points[i][0]} ${-points[i][1]}`);
  }
  return parts.join(" ");
}

function wireEdgeEvents(path: SVGPathElement, edgeId: number, handlers: PanelHandlers): void {
  path.addEventListener("click", (event) => {
    event.stopPropagation();
    handlers.onSelect(edgeId);
  });
  path.addEventListener("mouseenter", (event) => handlers.onHover(edgeId, event as MouseEvent));
  path.addEventListener("mouseleave", () => handlers.onHover(null));
}

function clearPanel(svg: SVGSVGElement, handlers: PanelHandlers): void {
  while (svg.firstChild) svg.removeChild(svg.firstChild);
  svg.onclick = () => handlers.onSelect(null);
}

/** Draw the abstract network layout from the exported Bezier control points. */
export function renderNetworkPanel(
  svg: SVGSVGElement,
  scene: SceneDocument,
  state: SelectionState,
  handlers: PanelHandlers,
): void {
  clearPanel(svg, handlers);
  const all: [number, number][] = [];
  for (const edge of scene.edges) all.push(...edge.controlPoints);
  const [x, y, w, h] = bounds(all);
  svg.setAttribute("viewBox", `${x} ${y} ${w} ${h}`);
  const sceneMax = maxFlow(scene);
  for (const edge of scene.edges) {
    const path = svg.ownerDocument.createElementNS(SVG_NS, "path") as SVGPathElement;
    path.setAttribute("d", bezierPathD(edge.controlPoints));
    path.setAttribute("fill", "none");
    path.setAttribute("stroke", edgeColor(edge, state.mode, sceneMax));
    path.setAttribute("stroke-width", String(edge.strokeWidth));
    path.setAttribute("stroke-linecap", "round");
    path.setAttribute("data-edge-id", String(edge.id));
    path.setAttribute("data-label", edge.label);
    if (edge.dashed) path.setAttribute("stroke-dasharray", "6 4");
    wireEdgeEvents(path, edge.id, handlers);
    svg.appendChild(path);
  }
  applyHighlights(svg, state);
}

/** Draw the active orthographic projection from the raw segment polylines. */
export function renderProjectionPanel(
  svg: SVGSVGElement,
  scene: SceneDocument,
  state: SelectionState,
  handlers: PanelHandlers,
): void {
  clearPanel(svg, handlers);
  const lines: ProjectionLine[] = scene.projections[state.view];
  const flipped: [number, number][] = [];
  for (const line of lines) for (const [px, py] of line.polyline) flipped.push([px, -py]);
  const [x, y, w, h] = bounds(flipped);
  svg.setAttribute("viewBox", `${x} ${y} ${w} ${h}`);
  const widthByEdge = new Map(scene.edges.map((e) => [e.id, e.strokeWidth]));
  const edgeById = new Map(scene.edges.map((e) => [e.id, e]));
  const sceneMax = maxFlow(scene);
  for (const line of lines) {
    const edge = edgeById.get(line.edgeId) as SceneEdge;
    const path = svg.ownerDocument.createElementNS(SVG_NS, "path") as SVGPathElement;
    path.setAttribute("d", polylinePathD(line.polyline));
    path.setAttribute("fill", "none");
    path.setAttribute("stroke", edgeColor(edge, state.mode, sceneMax));
    path.setAttribute(
      "stroke-width",
      String(Math.max(0.4, (widthByEdge.get(line.edgeId) ?? 1) * 0.12)),
    );
    path.setAttribute("stroke-linecap", "round");
    path.setAttribute("data-edge-id", String(line.edgeId));
    path.setAttribute("data-label", edge.label);
    wireEdgeEvents(path, line.edgeId, handlers);
    svg.appendChild(path);
  }
  applyHighlights(svg, state);
}

/**
 * Reflect selection/hover onto already-rendered marks: thicker stroke plus
 * a class hook for the stylesheet outline. Clears previous highlights.
 */
export function applyHighlights(svg: SVGSVGElement, state: SelectionState): void {
  const paths = svg.querySelectorAll<SVGPathElement>("path[data-edge-id]");
  paths.forEach((path) => {
    const id = Number(path.getAttribute("data-edge-id"));
    const base = path.getAttribute("data-base-width") ?? path.getAttribute("stroke-width") ?? "1";
    path.setAttribute("data-base-width", base);
    const selected = state.selected === id;
    const hovered = state.hovered === id;
    path.classList.toggle("selected", selected);
    path.classList.toggle("hovered", hovered && !selected);
    if (selected) {
      path.setAttribute("data-selected", "true");
      path.setAttribute("stroke-width", String(Number(base) * 1.8));
    } else {
      path.removeAttribute("data-selected");
      path.setAttribute("stroke-width", base);
    }
  });
}

export function highlightedIds(svg: SVGSVGElement): number[] {
  const out: number[] = [];
  svg.querySelectorAll<SVGPathElement>("path[data-selected]").forEach((path) => {
    out.push(Number(path.getAttribute("data-edge-id")));
  });
  return out;
}
