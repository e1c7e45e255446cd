import { inject } from "vitest";
import { ApiClient } from "../src/api.js";
import type { Walkthrough } from "../src/walkthrough.js";

export function apiBase(): string {
  return inject("apiBase");
}

export function client(): ApiClient {
  return new ApiClient(apiBase());
}

/** A fresh mount point attached to the test document. */
export function freshRoot(): HTMLElement {
  const root = document.createElement("div");
  document.body.append(root);
  return root;
}

export function press(key: string): void {
  document.dispatchEvent(new KeyboardEvent("keydown", { key, bubbles: true }));
}

/** Send one key, then wait for the triggered request chain to finish. */
export async function drive(view: Walkthrough, keys: string[]): Promise<void> {
  for (const key of keys) {
    press(key);
    await view.settle();
  }
}

/** The currently rendered screen section, with its data- attributes. */
export function screen(root: HTMLElement): HTMLElement {
  const found = root.querySelector<HTMLElement>("[data-phase]");
  if (!found) throw new Error("no screen rendered");
  return found;
}

export function texts(root: ParentNode, selector: string): string[] {
  return [...root.querySelectorAll(selector)].map((node) => node.textContent ?? "");
}
