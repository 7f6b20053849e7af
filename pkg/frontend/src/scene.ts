/**
 * Scene document: the engine's versioned JSON export, the dashboard's only
 * data input. The dashboard performs no layout computation of its own.
 */

export const SUPPORTED_VERSION = 1;

export type ViewName = "front" | "top" | "side";
export const VIEWS: ViewName[] = ["front", "top", "side"];

export interface SceneNode {
  id: number;
  x: number;
  y: number;
  depth: number;
}

export interface SceneEdge {
  id: number;
  label: string;
  side: "L" | "R" | "C";
  dashed: boolean;
  strokeWidth: number;
  color: string;
  flow?: number;
  meanRadius: number;
  controlPoints: [number, number][];
  segmentIds: number[];
}

export interface ProjectionLine {
  edgeId: number;
  polyline: [number, number][];
}

export interface SceneDocument {
  version: number;
  scan_id: string;
  config: Record<string, unknown>;
  nodes: SceneNode[];
  edges: SceneEdge[];
  projections: Record<ViewName, ProjectionLine[]>;
}

export class SceneFormatError extends Error {}

function fail(reason: string): never {
  throw new SceneFormatError(reason);
}

function isPointList(value: unknown): value is [number, number][] {
  return (
    Array.isArray(value) &&
    value.every(
      (p) =>
        Array.isArray(p) &&
        p.length === 2 &&
        typeof p[0] === "number" &&
        typeof p[1] === "number",
    )
  );
}

/** Validate an untrusted parsed JSON value into a SceneDocument. */
export function parseScene(doc: unknown): SceneDocument {
  if (typeof doc !== "object" || doc === null) fail("top level is not an object");
  const d = doc as Record<string, unknown>;
  if (d.version !== SUPPORTED_VERSION) {
    fail(`unsupported scene version ${String(d.version)}`);
  }
  if (typeof d.scan_id !== "string") fail("missing scan_id");
  if (!Array.isArray(d.edges) || d.edges.length === 0) fail("missing edges");
  if (!Array.isArray(d.nodes)) fail("missing nodes");
  const projections = d.projections as Record<string, unknown> | undefined;
  if (typeof projections !== "object" || projections === null) fail("missing projections");

  const edges: SceneEdge[] = (d.edges as unknown[]).map((raw, i) => {
    const e = raw as Record<string, unknown>;
    if (typeof e.id !== "number") fail(`edge ${i}: missing id`);
    if (typeof e.label !== "string") fail(`edge ${i}: missing label`);
    if (typeof e.strokeWidth !== "number") fail(`edge ${i}: missing strokeWidth`);
    if (typeof e.color !== "string") fail(`edge ${i}: missing color`);
    if (!isPointList(e.controlPoints) || (e.controlPoints as unknown[]).length < 2) {
      fail(`edge ${i}: bad controlPoints`);
    }
    return {
      id: e.id,
      label: e.label,
      side: (e.side as "L" | "R" | "C") ?? "C",
      dashed: Boolean(e.dashed),
      strokeWidth: e.strokeWidth,
      color: e.color,
      flow: typeof e.flow === "number" ? e.flow : undefined,
      meanRadius: typeof e.meanRadius === "number" ? e.meanRadius : 0,
      controlPoints: e.controlPoints as [number, number][],
      segmentIds: Array.isArray(e.segmentIds) ? (e.segmentIds as number[]) : [],
    };
  });

  const ids = new Set(edges.map((e) => e.id));
  if (ids.size !== edges.length) fail("duplicate edge ids");

  const views = {} as Record<ViewName, ProjectionLine[]>;
  for (const view of VIEWS) {
    const lines = (projections as Record<string, unknown>)[view];
    if (!Array.isArray(lines)) fail(`missing projection ${view}`);
    views[view] = lines.map((raw, i) => {
      const line = raw as Record<string, unknown>;
      if (typeof line.edgeId !== "number" || !ids.has(line.edgeId)) {
        fail(`projection ${view}[${i}]: unknown edgeId`);
      }
      if (!isPointList(line.polyline)) fail(`projection ${view}[${i}]: bad polyline`);
      return { edgeId: line.edgeId, polyline: line.polyline as [number, number][] };
    });
  }

  return {
    version: d.version as number,
    scan_id: d.scan_id,
    config: (d.config as Record<string, unknown>) ?? {},
    nodes: d.nodes as SceneNode[],
    edges,
    projections: views,
  };
}

export function sceneHasFlow(scene: SceneDocument): boolean {
  return scene.edges.some((e) => typeof e.flow === "number");
}

export function maxFlow(scene: SceneDocument): number {
  let max = 0;
  for (const e of scene.edges) if (typeof e.flow === "number" && e.flow > max) max = e.flow;
  return max > 0 ? max : 1;
}
