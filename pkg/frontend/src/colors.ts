/**
 * Client-side color modes. Categorical colors come straight from the scene
 * document; flow and black-and-white are recomputed here with the same
 * ramps the engine uses, so toggling modes needs no re-export.
 */

import { ColorMode } from "./state.js";
import { SceneEdge } from "./scene.js";

export const FOREGROUND = "#111111";

type Rgb = [number, number, number];

function hsv(h: number, s: number, v: number): Rgb {
  const i = Math.floor(h * 6);
  const f = h * 6 - i;
  const p = v * (1 - s);
  const q = v * (1 - f * s);
  const t = v * (1 - (1 - f) * s);
  const pick: Rgb[] = [
    [v, t, p],
    [q, v, p],
    [p, v, t],
    [p, q, v],
    [t, p, v],
    [v, p, q],
  ];
  const [r, g, b] = pick[((i % 6) + 6) % 6];
  return [Math.round(r * 255), Math.round(g * 255), Math.round(b * 255)];
}

// hemisphere base hues, matching the engine's flow ramp
const FLOW_BASE: Record<"L" | "R" | "C", Rgb> = {
  L: hsv(0.58, 0.9, 0.8),
  R: hsv(0.075, 0.9, 0.8),
  C: [74, 74, 94],
};

function hex([r, g, b]: Rgb): string {
  const two = (v: number) => v.toString(16).padStart(2, "0").toUpperCase();
  return `#${two(r)}${two(g)}${two(b)}`;
}

export function flowColor(value: number, max: number, base: Rgb): string {
  const t = max > 0 ? Math.min(Math.max(value, 0), max) / max : 0;
  return hex([
    Math.round(255 + (base[0] - 255) * t),
    Math.round(255 + (base[1] - 255) * t),
    Math.round(255 + (base[2] - 255) * t),
  ]);
}

export function edgeColor(edge: SceneEdge, mode: ColorMode, sceneMaxFlow: number): string {
  if (mode === "bw") return FOREGROUND;
  if (mode === "flow") {
    return flowColor(edge.flow ?? 0, sceneMaxFlow, FLOW_BASE[edge.side] ?? FLOW_BASE.C);
  }
  return edge.color;
}
