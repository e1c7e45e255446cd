/** Rendering for server rejections and unexpected failures. */

import { ApiError } from "./api.js";
import { el } from "./dom.js";

export interface ErrorParts {
  name: string;
  detail: string;
  /** Item lists the server attached, e.g. uncovered (segment, system) pairs. */
  items: string[];
}

export function describeError(err: unknown): ErrorParts {
  if (err instanceof ApiError) {
    const items: string[] = [];
    const uncovered = err.payload.uncovered;
    if (Array.isArray(uncovered)) {
      for (const entry of uncovered) items.push(String(entry));
    }
    return { name: err.error, detail: err.detail, items };
  }
  if (err instanceof Error) return { name: err.name, detail: err.message, items: [] };
  return { name: "Error", detail: String(err), items: [] };
}

/** Banner naming the violated rule, with any offending items listed below. */
export function errorPanel(err: unknown, onDismiss?: () => void): HTMLElement {
  const parts = describeError(err);
  const panel = el(
    "div",
    { class: "error-panel", role: "alert" },
    el("strong", { class: "error-name" }, parts.name),
    el("p", { class: "error-detail" }, parts.detail),
  );
  if (parts.items.length > 0) {
    panel.append(
      el("ul", { class: "error-items" }, ...parts.items.map((item) => el("li", {}, item))),
    );
  }
  if (onDismiss) {
    const btn = el("button", { class: "btn-dismiss", type: "button" }, "Dismiss");
    btn.addEventListener("click", onDismiss);
    panel.append(btn);
  }
  return panel;
}
