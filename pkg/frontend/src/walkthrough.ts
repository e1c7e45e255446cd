/** Guided annotation view: one decision-tree question per screen.
 *
 * The screen order enforces the working protocol: the annotator reads the
 * dialect source and the gold reference first, and only then reveals the
 * system translation and walks the tree. The server owns the walk state;
 * this view renders whatever node the service says is current and sends
 * back single answers. It still mirrors the ADP gate defensively: once a
 * meaning-transfer severity is recorded, an ADP node would be auto-answered
 * "no" instead of rendered, so the screen is unreachable on this side too.
 *
 * Sessions survive reloads: the session id is kept in storage and the walk
 * is re-fetched from the server, which replays it from the recorded trail.
 */

import {
  AnnotationRecord,
  ApiClient,
  OpenItem,
  SessionState,
} from "./api.js";
import { arabicField, clear, el } from "./dom.js";
import { errorPanel } from "./feedback.js";

export const CATEGORY_ORDER = ["FLU", "PRN", "TRM", "GSMIS", "ADP"];
export const MEANING_TRANSFER = new Set(["PRN", "TRM", "GSMIS"]);

const SEVERITY_LABELS: Record<number, string> = { 0: "none", 1: "minor", 2: "major" };
const GATED_ADP_TEXT = "not assessed (meaning-transfer error recorded)";

type Phase = "loading" | "context" | "question" | "summary" | "saved" | "done";

export interface WalkthroughOptions {
  project: string;
  annotator: string;
  storage?: Storage;
}

interface StoredSession {
  session_id: string;
  segment_id: string;
  system_id: string;
  partial: Record<string, number>;
  mtHit: boolean;
}

export class Walkthrough {
  private phase: Phase = "loading";
  private item: OpenItem | null = null;
  private session: SessionState | null = null;
  /** Client mirror of the answers given so far, for the summary screen only. */
  private partial: Record<string, number> = {};
  private mtHit = false;
  private saved: AnnotationRecord | null = null;
  private lastError: unknown = null;
  private alive = true;
  private queue: Promise<void> = Promise.resolve();

  /** Node ids in the order they were actually put on screen (for inspection). */
  readonly shownNodes: string[] = [];
  readonly shownCategories: string[] = [];

  /** The annotation record the server returned for the last submission. */
  get lastSaved(): AnnotationRecord | null {
    return this.saved;
  }

  private readonly work: HTMLElement;
  private readonly aside: HTMLElement;
  private readonly storage: Storage | null;

  constructor(
    private readonly root: HTMLElement,
    private readonly api: ApiClient,
    private readonly opts: WalkthroughOptions,
  ) {
    this.storage = opts.storage ?? null;
    this.work = el("div", { class: "work" });
    this.aside = el("aside", { class: "progress-panel" });
    const wrap = el("div", { class: "walkthrough" }, this.work, this.aside);
    root.append(wrap);
    this.root.ownerDocument.addEventListener("keydown", this.onKey);
    this.render();
  }

  destroy(): void {
    this.alive = false;
    this.root.ownerDocument.removeEventListener("keydown", this.onKey);
    clear(this.root);
  }

  /** Wait until every queued action (including follow-ups) has finished. */
  async settle(): Promise<void> {
    let seen: Promise<void>;
    do {
      seen = this.queue;
      await seen;
    } while (seen !== this.queue);
  }

  private run(action: () => Promise<void>): Promise<void> {
    this.queue = this.queue.then(async () => {
      if (!this.alive) return;
      try {
        await action();
      } catch (err) {
        if (!this.alive) return;
        this.lastError = err;
        this.render();
      }
    });
    return this.queue;
  }

  // -- storage ----------------------------------------------------------------

  private get storageKey(): string {
    return `posteval/${this.opts.project}/${this.opts.annotator}`;
  }

  private readStored(): StoredSession | null {
    const raw = this.storage?.getItem(this.storageKey);
    if (!raw) return null;
    try {
      return JSON.parse(raw) as StoredSession;
    } catch {
      return null;
    }
  }

  private writeStored(): void {
    if (!this.storage || !this.session) return;
    const data: StoredSession = {
      session_id: this.session.session_id,
      segment_id: this.session.segment_id,
      system_id: this.session.system_id,
      partial: this.partial,
      mtHit: this.mtHit,
    };
    this.storage.setItem(this.storageKey, JSON.stringify(data));
  }

  private clearStored(): void {
    this.storage?.removeItem(this.storageKey);
  }

  // -- actions ----------------------------------------------------------------

  start(): Promise<void> {
    return this.run(async () => {
      this.phase = "loading";
      this.session = null;
      this.partial = {};
      this.mtHit = false;
      this.saved = null;
      this.render();

      const next = await this.api.nextItem(this.opts.project, this.opts.annotator);
      if (next.done) {
        this.item = null;
        this.phase = "done";
        this.render();
        await this.loadProgress();
        return;
      }
      this.item = next;

      // A stored session for the same item is resumed from the server's trail.
      const stored = this.readStored();
      if (stored && stored.segment_id === next.segment_id && stored.system_id === next.system_id) {
        const live = await this.fetchStoredSession(stored.session_id);
        if (live && !live.finalized) {
          this.session = live;
          this.partial = stored.partial ?? {};
          this.mtHit = stored.mtHit ?? false;
          this.phase = live.done ? "summary" : "question";
          this.render();
          await this.loadProgress();
          return;
        }
      }
      this.clearStored();
      this.phase = "context";
      this.render();
      await this.loadProgress();
    });
  }

  private async fetchStoredSession(sessionId: string): Promise<SessionState | null> {
    try {
      return await this.api.getSession(this.opts.project, sessionId);
    } catch {
      return null; // gone (e.g. service restart); fall back to a fresh walk
    }
  }

  reveal(): Promise<void> {
    return this.run(async () => {
      if (this.phase !== "context" || !this.item) return;
      this.session = await this.api.startSession(
        this.opts.project,
        this.opts.annotator,
        this.item.segment_id,
        this.item.system_id,
      );
      this.writeStored();
      this.phase = this.session.done ? "summary" : "question";
      this.render();
    });
  }

  answer(value: string | number): Promise<void> {
    const expected = this.session?.node?.node_id;
    return this.run(async () => {
      const node = this.session?.node;
      if (this.phase !== "question" || !this.session || !node) return;
      if (node.node_id !== expected) return; // stale keypress after a transition
      this.session = await this.api.answer(this.opts.project, this.session.session_id, value);
      if (node.kind === "severity" && node.category) {
        const sev = Number(value);
        // the protocol keeps the maximum when a category prompts twice
        this.partial[node.category] = Math.max(this.partial[node.category] ?? 0, sev);
        if (MEANING_TRANSFER.has(node.category) && sev > 0) this.mtHit = true;
      }
      this.writeStored();
      this.phase = this.session.done ? "summary" : "question";
      this.render();
    });
  }

  submit(): Promise<void> {
    return this.run(async () => {
      if (this.phase !== "summary" || !this.session) return;
      const res = await this.api.finalize(this.opts.project, this.session.session_id);
      this.saved = res.annotation;
      this.clearStored();
      this.phase = "saved";
      this.render();
      await this.loadProgress();
    });
  }

  /** Leave the saved screen and pull the next open item. */
  advance(): Promise<void> {
    return this.start();
  }

  private async loadProgress(): Promise<void> {
    const doc = await this.api.progress(this.opts.project);
    if (!this.alive) return;
    clear(this.aside);
    const table = el("table", { class: "progress-table" });
    table.append(
      el("tr", {}, el("th", {}, "Annotator"), el("th", {}, "Done"), el("th", {}, "Total"), el("th", {}, "%")),
    );
    for (const row of doc.annotators) {
      table.append(
        el(
          "tr",
          { class: "progress-row", "data-annotator": row.annotator_id },
          el("td", {}, row.annotator_id),
          el("td", { class: "completed" }, String(row.completed)),
          el("td", { class: "total" }, String(row.total)),
          el("td", { class: "percent" }, String(row.percent)),
        ),
      );
    }
    this.aside.append(el("h3", {}, "Progress"), table);
  }

  // -- keyboard ---------------------------------------------------------------

  private readonly onKey = (event: KeyboardEvent): void => {
    const target = event.target as HTMLElement | null;
    if (target && (target.tagName === "INPUT" || target.tagName === "TEXTAREA")) return;
    switch (this.phase) {
      case "context":
        if (event.key === "Enter" || event.key === " ") {
          event.preventDefault();
          void this.reveal();
        }
        break;
      case "question": {
        const node = this.session?.node;
        if (!node) break;
        if (node.kind === "question") {
          if (event.key === "y" || event.key === "Y") void this.answer("yes");
          else if (event.key === "n" || event.key === "N") void this.answer("no");
        } else if (node.kind === "severity") {
          if (event.key === "1") void this.answer(1);
          else if (event.key === "2") void this.answer(2);
        }
        break;
      }
      case "summary":
        if (event.key === "Enter") void this.submit();
        break;
      case "saved":
        if (event.key === "Enter") void this.advance();
        break;
      default:
        break;
    }
  };

  // -- rendering ---------------------------------------------------------------

  private render(): void {
    clear(this.work);
    if (this.lastError !== null) {
      const err = this.lastError;
      this.work.append(
        errorPanel(err, () => {
          this.lastError = null;
          this.render();
        }),
      );
    }
    switch (this.phase) {
      case "loading":
        this.work.append(el("p", { class: "muted" }, "Loading..."));
        break;
      case "context":
        this.renderContext();
        break;
      case "question":
        this.renderQuestion();
        break;
      case "summary":
        this.renderSummary();
        break;
      case "saved":
        this.renderSaved();
        break;
      case "done":
        this.work.append(
          el(
            "section",
            { class: "screen done", "data-phase": "done" },
            el("h2", {}, "All assigned items are annotated"),
            el("p", {}, "There is nothing left in your queue for this project."),
          ),
        );
        break;
    }
  }

  private itemLabel(): HTMLElement {
    const item = this.item;
    if (!item) return el("p", { class: "item-label" });
    return el(
      "p",
      { class: "item-label" },
      "Item ",
      el("span", { class: "seg-id" }, item.segment_id),
      " / ",
      el("span", { class: "sys-id" }, item.system_id),
      `, ${item.remaining} in queue`,
    );
  }

  /** Source and reference only; the hypothesis is not in the DOM yet. */
  private renderContext(): void {
    const item = this.item;
    if (!item) return;
    const btn = el("button", { class: "primary btn-reveal", type: "button" }, "Show the translation (Enter)");
    btn.addEventListener("click", () => void this.reveal());
    this.work.append(
      el(
        "section",
        { class: "screen context", "data-phase": "context" },
        el("h2", {}, "Read the source and the reference first"),
        arabicField("Dialect source", item.source_da, "seg-source"),
        arabicField("Reference (MSA)", item.gold_msa, "seg-gold"),
        el("p", { class: "hint" }, "Settle on the intended meaning before the system translation appears."),
        btn,
        this.itemLabel(),
      ),
    );
  }

  private renderQuestion(): void {
    const item = this.item;
    const node = this.session?.node;
    if (!item || !node) return;

    // Mirror of the server-side ADP gate: after a meaning-transfer hit this
    // node is answered "no" (severity 0) instead of ever being rendered.
    // A well-formed tree never gets here; the server skips it first.
    if (this.mtHit && node.category === "ADP") {
      void this.answer(node.kind === "severity" ? 0 : "no");
      return;
    }

    this.shownNodes.push(node.node_id);
    if (node.category) this.shownCategories.push(node.category);

    const answers = el("div", { class: "answers" });
    if (node.kind === "question") {
      const yes = el("button", { class: "btn-yes", type: "button" }, "Yes (y)");
      const no = el("button", { class: "btn-no", type: "button" }, "No (n)");
      yes.addEventListener("click", () => void this.answer("yes"));
      no.addEventListener("click", () => void this.answer("no"));
      answers.append(yes, no);
    } else {
      const minor = el("button", { class: "btn-minor", type: "button" }, "Minor (1)");
      const major = el("button", { class: "btn-major", type: "button" }, "Major (2)");
      minor.addEventListener("click", () => void this.answer(1));
      major.addEventListener("click", () => void this.answer(2));
      answers.append(minor, major);
    }

    this.work.append(
      el(
        "section",
        {
          class: "screen question",
          "data-phase": "question",
          "data-node-id": node.node_id,
          "data-kind": node.kind,
          "data-category": node.category ?? "",
        },
        arabicField("Dialect source", item.source_da, "seg-source"),
        arabicField("Reference (MSA)", item.gold_msa, "seg-gold"),
        arabicField("System translation", item.hypothesis, "hypothesis"),
        el("p", { class: "question-text" }, node.question),
        answers,
        this.itemLabel(),
      ),
    );
  }

  private renderSummary(): void {
    const item = this.item;
    if (!item) return;
    const table = el("table", { class: "summary-table" });
    for (const cat of CATEGORY_ORDER) {
      const sev = this.partial[cat] ?? 0;
      const gated = cat === "ADP" && this.mtHit;
      table.append(
        el(
          "tr",
          { "data-category": cat },
          el("th", {}, cat),
          el(
            "td",
            { class: gated ? "sev gated" : "sev", "data-severity": String(gated ? 0 : sev) },
            gated ? GATED_ADP_TEXT : SEVERITY_LABELS[sev] ?? String(sev),
          ),
        ),
      );
    }
    const btn = el("button", { class: "primary btn-submit", type: "button" }, "Submit (Enter)");
    btn.addEventListener("click", () => void this.submit());
    this.work.append(
      el(
        "section",
        { class: "screen summary", "data-phase": "summary" },
        el("h2", {}, "Review and submit"),
        arabicField("Dialect source", item.source_da, "seg-source"),
        arabicField("Reference (MSA)", item.gold_msa, "seg-gold"),
        arabicField("System translation", item.hypothesis, "hypothesis"),
        table,
        btn,
        this.itemLabel(),
      ),
    );
  }

  private renderSaved(): void {
    const saved = this.saved;
    if (!saved) return;
    const table = el("table", { class: "stored-table" });
    for (const cat of CATEGORY_ORDER) {
      if (!(cat in saved.severities)) continue;
      table.append(
        el(
          "tr",
          { "data-category": cat },
          el("th", {}, cat),
          el("td", { class: "sev" }, SEVERITY_LABELS[saved.severities[cat]] ?? String(saved.severities[cat])),
        ),
      );
    }
    table.append(
      el(
        "tr",
        { "data-category": "adp_applicable" },
        el("th", {}, "ADP assessed"),
        el("td", { class: "adp-applicable" }, saved.adp_applicable ? "yes" : "no"),
      ),
    );
    const btn = el("button", { class: "primary btn-continue", type: "button" }, "Next item (Enter)");
    btn.addEventListener("click", () => void this.advance());
    this.work.append(
      el(
        "section",
        { class: "screen saved", "data-phase": "saved" },
        el("h2", {}, "Annotation stored"),
        el(
          "p",
          {},
          "Revision ",
          el("span", { class: "revision" }, String(saved.revision)),
          " for ",
          el("span", { class: "seg-id" }, saved.segment),
          " / ",
          el("span", { class: "sys-id" }, saved.system),
          ".",
        ),
        table,
        btn,
      ),
    );
  }
}
