/**
 * Dashboard assembly: a network panel and a projection panel linked through
 * one selection store, plus view/color toolbars, a legend, a hover tooltip,
 * and an error banner for rejected documents (no partial renders).
 */

import { applyHighlights, renderNetworkPanel, renderProjectionPanel } from "./panels.js";
import {
  parseScene,
  SceneDocument,
  SceneFormatError,
  sceneHasFlow,
  ViewName,
  VIEWS,
} from "./scene.js";
import { ColorMode, SelectionStore } from "./state.js";

const MODES: ColorMode[] = ["categorical", "flow", "bw"];

export class Dashboard {
  readonly store = new SelectionStore();
  readonly networkSvg: SVGSVGElement;
  readonly projectionSvg: SVGSVGElement;
  private banner: HTMLElement;
  private tooltip: HTMLElement;
  private legend: HTMLElement;
  private viewButtons = new Map<ViewName, HTMLButtonElement>();
  private modeButtons = new Map<ColorMode, HTMLButtonElement>();
  private scene: SceneDocument | null = null;
  private lastRendered: { view: ViewName; mode: ColorMode } | null = null;

  constructor(root: HTMLElement) {
    const doc = root.ownerDocument;
    root.classList.add("cerebro-dashboard");

    this.banner = doc.createElement("div");
    this.banner.className = "banner";
    this.banner.hidden = true;
    root.appendChild(this.banner);

    const toolbar = doc.createElement("div");
    toolbar.className = "toolbar";
    for (const view of VIEWS) {
      const button = doc.createElement("button");
      button.textContent = view;
      button.dataset.view = view;
      button.addEventListener("click", () => this.store.setView(view));
      this.viewButtons.set(view, button);
      toolbar.appendChild(button);
    }
    for (const mode of MODES) {
      const button = doc.createElement("button");
      button.textContent = mode;
      button.dataset.mode = mode;
      button.addEventListener("click", () => this.store.setMode(mode));
      this.modeButtons.set(mode, button);
      toolbar.appendChild(button);
    }
    root.appendChild(toolbar);

    const panels = doc.createElement("div");
    panels.className = "panels";
    this.networkSvg = doc.createElementNS("http://www.w3.org/2000/svg", "svg") as SVGSVGElement;
    this.networkSvg.setAttribute("class", "panel network");
    this.projectionSvg = doc.createElementNS("http://www.w3.org/2000/svg", "svg") as SVGSVGElement;
    this.projectionSvg.setAttribute("class", "panel projection");
    panels.appendChild(this.networkSvg);
    panels.appendChild(this.projectionSvg);
    root.appendChild(panels);

    this.legend = doc.createElement("div");
    this.legend.className = "legend";
    root.appendChild(this.legend);

    this.tooltip = doc.createElement("div");
    this.tooltip.className = "tooltip";
    this.tooltip.hidden = true;
    root.appendChild(this.tooltip);

    this.store.subscribe((state) => this.onStateChange());
  }

  /** Load an untrusted parsed JSON document; false (and a banner) on rejection. */
  loadScene(documentJson: unknown): boolean {
    try {
      const scene = parseScene(documentJson);
      this.scene = scene;
      this.banner.hidden = true;
      this.banner.textContent = "";
      this.store.setScene(scene.edges.map((e) => e.id));
      this.lastRendered = null;
      this.renderAll();
      this.renderLegend();
      return true;
    } catch (error) {
      this.scene = null;
      this.lastRendered = null;
      this.clearPanels();
      this.legend.textContent = "";
      this.banner.hidden = false;
      this.banner.textContent =
        error instanceof SceneFormatError
          ? `Cannot load scene: ${error.message}`
          : `Cannot load scene: ${String(error)}`;
      return false;
    }
  }

  loadSceneText(text: string): boolean {
    try {
      return this.loadScene(JSON.parse(text));
    } catch (error) {
      return this.loadScene(undefined);
    }
  }

  get hasScene(): boolean {
    return this.scene !== null;
  }

  get sceneEdgeCount(): number {
    return this.scene ? this.scene.edges.length : 0;
  }

  panelEdgeIds(panel: "network" | "projection"): number[] {
    const svg = panel === "network" ? this.networkSvg : this.projectionSvg;
    const ids: number[] = [];
    svg.querySelectorAll("path[data-edge-id]").forEach((p) => {
      ids.push(Number(p.getAttribute("data-edge-id")));
    });
    return ids;
  }

  private clearPanels(): void {
    while (this.networkSvg.firstChild) this.networkSvg.removeChild(this.networkSvg.firstChild);
    while (this.projectionSvg.firstChild) {
      this.projectionSvg.removeChild(this.projectionSvg.firstChild);
    }
  }

  private handlers = {
    onSelect: (edgeId: number | null) => this.store.select(edgeId),
    onHover: (edgeId: number | null, event?: MouseEvent) => {
      this.store.hover(edgeId);
      this.updateTooltip(edgeId, event);
    },
  };

  private renderAll(): void {
    if (!this.scene) return;
    const state = this.store.snapshot;
    renderNetworkPanel(this.networkSvg, this.scene, state, this.handlers);
    renderProjectionPanel(this.projectionSvg, this.scene, state, this.handlers);
    this.lastRendered = { view: state.view, mode: state.mode };
    this.updateToolbar();
  }

  private onStateChange(): void {
    if (!this.scene) return;
    const state = this.store.snapshot;
    const stale =
      this.lastRendered === null ||
      this.lastRendered.view !== state.view ||
      this.lastRendered.mode !== state.mode;
    if (stale) {
      this.renderAll();
      return;
    }
    applyHighlights(this.networkSvg, state);
    applyHighlights(this.projectionSvg, state);
    this.updateToolbar();
  }

  private updateToolbar(): void {
    const state = this.store.snapshot;
    this.viewButtons.forEach((button, view) => {
      button.classList.toggle("active", view === state.view);
    });
    const flowAvailable = this.scene ? sceneHasFlow(this.scene) : false;
    this.modeButtons.forEach((button, mode) => {
      button.classList.toggle("active", mode === state.mode);
      button.disabled = mode === "flow" && !flowAvailable;
    });
  }

  private renderLegend(): void {
    this.legend.textContent = "";
    if (!this.scene) return;
    const doc = this.legend.ownerDocument;
    const seen = new Set<string>();
    for (const edge of this.scene.edges) {
      if (edge.label.startsWith("Unlabeled") || seen.has(edge.label)) continue;
      seen.add(edge.label);
      const item = doc.createElement("span");
      item.className = "legend-item";
      const swatch = doc.createElement("span");
      swatch.className = "swatch";
      swatch.style.backgroundColor = edge.color;
      const name = doc.createElement("span");
      name.textContent = edge.label;
      item.appendChild(swatch);
      item.appendChild(name);
      this.legend.appendChild(item);
    }
  }

  private updateTooltip(edgeId: number | null, event?: MouseEvent): void {
    if (edgeId === null || !this.scene) {
      this.tooltip.hidden = true;
      return;
    }
    const edge = this.scene.edges.find((e) => e.id === edgeId);
    if (!edge) {
      this.tooltip.hidden = true;
      return;
    }
    const flow = typeof edge.flow === "number" ? `, flow ${edge.flow.toFixed(3)}` : "";
    this.tooltip.textContent = `${edge.label}: mean radius ${edge.meanRadius.toFixed(2)}${flow}`;
    this.tooltip.hidden = false;
    if (event) {
      this.tooltip.style.left = `${event.clientX + 12}px`;
      this.tooltip.style.top = `${event.clientY + 12}px`;
    }
  }
}

/** Browser bootstrap: build the dashboard and load ?scene=... if present. */
export async function bootstrap(root: HTMLElement): Promise<Dashboard> {
  const dashboard = new Dashboard(root);
  const params = new URLSearchParams(root.ownerDocument.defaultView?.location.search ?? "");
  const sceneUrl = params.get("scene");
  if (sceneUrl) {
    try {
      const response = await fetch(sceneUrl);
      dashboard.loadSceneText(await response.text());
    } catch (error) {
      dashboard.loadScene(undefined);
    }
  }
  const picker = root.ownerDocument.querySelector<HTMLInputElement>("input[type=file]#scene-file");
  picker?.addEventListener("change", async () => {
    const file = picker.files?.[0];
    if (file) dashboard.loadSceneText(await file.text());
  });
  return dashboard;
}
