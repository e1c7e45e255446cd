/** Application shell: connect form, tab navigation, view mounting.
 *
 * The page is static; everything it shows comes from the annotation service
 * over HTTP. The service origin is taken from the "api" query parameter and
 * falls back to the default development port.
 */

import { ApiClient } from "./api.js";
import { Dashboard } from "./dashboard.js";
import { clear, el } from "./dom.js";
import { errorPanel } from "./feedback.js";
import { Walkthrough } from "./walkthrough.js";

export interface AppOptions {
  apiBase: string;
  storage?: Storage;
}

type Tab = "annotate" | "reports";

export class App {
  private readonly api: ApiClient;
  private readonly viewEl: HTMLElement;
  private readonly statusEl: HTMLElement;
  private readonly projectInput: HTMLInputElement;
  private readonly annotatorInput: HTMLInputElement;
  private tab: Tab = "annotate";
  private connected: { project: string; annotator: string } | null = null;
  private walkthrough: Walkthrough | null = null;

  constructor(
    private readonly root: HTMLElement,
    private readonly opts: AppOptions,
  ) {
    this.api = new ApiClient(opts.apiBase);

    this.projectInput = el("input", {
      class: "project-input",
      list: "project-list",
      placeholder: "project id",
    }) as HTMLInputElement;
    this.annotatorInput = el("input", {
      class: "annotator-input",
      placeholder: "annotator id",
    }) as HTMLInputElement;
    this.statusEl = el("span", { class: "connect-status" });
    this.viewEl = el("main", { class: "view" });

    const connectBtn = el("button", { class: "primary btn-connect", type: "button" }, "Connect");
    connectBtn.addEventListener("click", () => void this.connect());

    const tabs = el(
      "nav",
      { class: "tabs" },
      this.tabButton("annotate", "Annotate"),
      this.tabButton("reports", "Reports"),
    );

    root.append(
      el(
        "header",
        { class: "top" },
        el("h1", {}, "posteval"),
        el(
          "div",
          { class: "connect" },
          this.projectInput,
          el("datalist", { id: "project-list" }),
          this.annotatorInput,
          connectBtn,
          this.statusEl,
        ),
        tabs,
      ),
      this.viewEl,
    );

    const stored = this.opts.storage?.getItem("posteval/connect");
    if (stored) {
      try {
        const prefs = JSON.parse(stored) as { project: string; annotator: string };
        this.projectInput.value = prefs.project;
        this.annotatorInput.value = prefs.annotator;
      } catch {
        // stale prefs are not worth reporting
      }
    }
    void this.loadProjectList();
  }

  destroy(): void {
    this.walkthrough?.destroy();
    clear(this.root);
  }

  private tabButton(tab: Tab, label: string): HTMLElement {
    const btn = el("button", { class: `tab tab-${tab}`, type: "button" }, label);
    btn.addEventListener("click", () => {
      this.tab = tab;
      void this.mount();
    });
    return btn;
  }

  private async loadProjectList(): Promise<void> {
    try {
      const { projects } = await this.api.listProjects();
      const list = this.root.querySelector("#project-list");
      if (!list) return;
      clear(list);
      for (const p of projects) list.append(el("option", { value: p.id }));
    } catch {
      // the connect step will surface unreachable-service errors
    }
  }

  async connect(): Promise<void> {
    const project = this.projectInput.value.trim();
    const annotator = this.annotatorInput.value.trim();
    if (!project || !annotator) {
      this.statusEl.textContent = "enter a project id and an annotator id";
      return;
    }
    try {
      await this.api.registerAnnotator(project, annotator);
    } catch (err) {
      clear(this.viewEl);
      this.viewEl.append(errorPanel(err));
      this.statusEl.textContent = "not connected";
      return;
    }
    this.connected = { project, annotator };
    this.opts.storage?.setItem("posteval/connect", JSON.stringify(this.connected));
    this.statusEl.textContent = `connected to ${project} as ${annotator}`;
    await this.mount();
  }

  private async mount(): Promise<void> {
    this.walkthrough?.destroy();
    this.walkthrough = null;
    clear(this.viewEl);
    if (!this.connected) {
      this.viewEl.append(el("p", { class: "muted" }, "Connect to a project to begin."));
      return;
    }
    if (this.tab === "annotate") {
      this.walkthrough = new Walkthrough(this.viewEl, this.api, {
        project: this.connected.project,
        annotator: this.connected.annotator,
        storage: this.opts.storage,
      });
      await this.walkthrough.start();
    } else {
      const dash = new Dashboard(this.viewEl, this.api, this.connected.project);
      await dash.load();
    }
  }
}

export function createApp(root: HTMLElement, opts: AppOptions): App {
  return new App(root, opts);
}

// Boot only when the page shell is present (not under tests).
const rootEl = typeof document !== "undefined" ? document.getElementById("app") : null;
if (rootEl) {
  const params = new URLSearchParams(window.location.search);
  createApp(rootEl, {
    apiBase: params.get("api") ?? "http://127.0.0.1:8787",
    storage: window.localStorage,
  });
}
