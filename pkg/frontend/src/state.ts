/**
 * Selection state shared by both panels. The store guarantees the spec's
 * invariants: a selected id always exists in the loaded scene, and the
 * active view is always valid.
 */

import { ViewName, VIEWS } from "./scene.js";

export type ColorMode = "categorical" | "flow" | "bw";

export interface SelectionState {
  selected: number | null;
  hovered: number | null;
  view: ViewName;
  mode: ColorMode;
}

export type Listener = (state: SelectionState) => void;

export class SelectionStore {
  private state: SelectionState = {
    selected: null,
    hovered: null,
    view: "front",
    mode: "categorical",
  };
  private validIds: Set<number> = new Set();
  private listeners: Listener[] = [];

  get snapshot(): SelectionState {
    return { ...this.state };
  }

  /** Reset valid ids when a scene loads; stale selection is dropped. */
  setScene(edgeIds: Iterable<number>): void {
    this.validIds = new Set(edgeIds);
    if (this.state.selected !== null && !this.validIds.has(this.state.selected)) {
      this.state.selected = null;
    }
    if (this.state.hovered !== null && !this.validIds.has(this.state.hovered)) {
      this.state.hovered = null;
    }
    this.emit();
  }

  select(edgeId: number | null): void {
    if (edgeId !== null && !this.validIds.has(edgeId)) return;
    if (this.state.selected === edgeId) return;
    this.state.selected = edgeId;
    this.emit();
  }

  hover(edgeId: number | null): void {
    if (edgeId !== null && !this.validIds.has(edgeId)) return;
    if (this.state.hovered === edgeId) return;
    this.state.hovered = edgeId;
    this.emit();
  }

  setView(view: ViewName): void {
    if (!VIEWS.includes(view) || this.state.view === view) return;
    this.state.view = view;
    this.emit();
  }

  setMode(mode: ColorMode): void {
    if (this.state.mode === mode) return;
    this.state.mode = mode;
    this.emit();
  }

  subscribe(listener: Listener): () => void {
    this.listeners.push(listener);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== listener);
    };
  }

  private emit(): void {
    const snapshot = this.snapshot;
    for (const listener of this.listeners) listener(snapshot);
  }
}
