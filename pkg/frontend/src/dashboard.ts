/** Report dashboard: three charts and an agreement grid.
 *
 * Every displayed value is lifted verbatim from a structured report document
 * and wrapped in an element with class "val"; the client does no arithmetic
 * on scores. Numbers are parsed only to size bars, never to produce text,
 * and the charts carry no computed axis ticks for the same reason. Identifier
 * text (annotator ids and the like) is marked "id-text".
 */

import {
  AgreementDoc,
  ApiClient,
  BUCKETS,
  PatternDoc,
  ReportKind,
  ScoresDoc,
  SeverityDoc,
} from "./api.js";
import { clear, el, svg } from "./dom.js";
import { describeError } from "./feedback.js";

export const PANEL_TITLES: Record<ReportKind, string> = {
  severity: "Post-edit severity per system",
  pattern: "Accumulated error score per category",
  scores: "Aggregated segment scores",
  agreement: "Inter-annotator agreement (quadratic weighted kappa)",
};

const BUCKET_CLASSES = { NoEdit: "bucket-noedit", Minor: "bucket-minor", Major: "bucket-major" } as const;

/** CSS class for a Landis-Koch band name from the report (null when undefined). */
export function bandClass(band: string | null): string {
  return band === null ? "band-undefined" : `band-${band.toLowerCase().replace(/ /g, "-")}`;
}

function panel(kind: ReportKind, ...children: (Node | string)[]): HTMLElement {
  return el(
    "section",
    { class: "panel chart-panel", "data-kind": kind },
    el("h3", {}, PANEL_TITLES[kind]),
    ...children,
  );
}

function notes(doc: { notes: string[] }): HTMLElement | null {
  if (doc.notes.length === 0) return null;
  return el("div", { class: "notes" }, ...doc.notes.map((n) => el("p", { class: "note" }, n)));
}

// -- severity: one stacked bar per system --------------------------------------

export function severityChart(doc: SeverityDoc): HTMLElement {
  const ROW_H = 36;
  const LABEL_W = 96;
  const SCALE = 4; // 100 percent = 400 units
  const height = doc.systems.length * ROW_H;

  const chart = svg("svg", {
    class: "severity-svg",
    viewBox: `0 0 640 ${height}`,
    width: 640,
    height,
    role: "img",
  });
  doc.systems.forEach((system, i) => {
    const y = i * ROW_H;
    chart.append(
      svg("text", { x: LABEL_W - 8, y: y + 22, "text-anchor": "end", class: "sys-label id-text" }, system.system),
    );
    let x = LABEL_W;
    for (const bucket of BUCKETS) {
      const pct = system.percentages[bucket];
      if (pct === 0) continue;
      const w = pct * SCALE;
      chart.append(
        svg("rect", { x, y: y + 6, width: w, height: 22, class: BUCKET_CLASSES[bucket] }),
        svg(
          "text",
          { x: x + w / 2, y: y + 22, "text-anchor": "middle", class: "val pct", "data-bucket": bucket },
          String(pct),
        ),
      );
      x += w;
    }
    chart.append(
      svg(
        "text",
        { x: LABEL_W + 100 * SCALE + 10, y: y + 22, class: "count-label" },
        "n=",
        svg("tspan", { class: "val seg-count" }, String(system.segments)),
      ),
    );
  });

  const legend = el(
    "p",
    { class: "legend" },
    el("span", { class: "swatch bucket-noedit" }), " no edit ",
    el("span", { class: "swatch bucket-minor" }), " minor edit ",
    el("span", { class: "swatch bucket-major" }), " major edit ",
    "(bar labels are percentages of segments)",
  );
  return panel("severity", chart, legend, notes(doc) ?? "");
}

// -- pattern: grouped bars, one per category within each system -----------------

export function patternChart(doc: PatternDoc): HTMLElement {
  const BAR_W = 40;
  const GAP = 8;
  const GROUP_GAP = 44;
  const TOP = 18;
  const CHART_H = 150;
  const X0 = 16;

  const groupW = doc.categories.length * (BAR_W + GAP) - GAP;
  const width = 2 * X0 + doc.systems.length * (groupW + GROUP_GAP) - GROUP_GAP;
  const height = TOP + CHART_H + 64;
  const max = Math.max(
    1e-9,
    ...doc.systems.flatMap((s) => doc.categories.map((c) => Number(s.totals[c]))),
  );

  const chart = svg("svg", {
    class: "pattern-svg",
    viewBox: `0 0 ${width} ${height}`,
    width,
    height,
    role: "img",
  });
  doc.systems.forEach((system, i) => {
    const gx = X0 + i * (groupW + GROUP_GAP);
    doc.categories.forEach((cat, j) => {
      const x = gx + j * (BAR_W + GAP);
      const value = Number(system.totals[cat]);
      const h = (value / max) * CHART_H;
      chart.append(
        svg("rect", { x, y: TOP + CHART_H - h, width: BAR_W, height: h, class: `cat-${cat.toLowerCase()}` }),
        svg(
          "text",
          {
            x: x + BAR_W / 2,
            y: TOP + CHART_H - h - 4,
            "text-anchor": "middle",
            class: "val cat-total",
            "data-category": cat,
          },
          system.totals[cat],
        ),
        svg(
          "text",
          { x: x + BAR_W / 2, y: TOP + CHART_H + 13, "text-anchor": "middle", class: "cat-label" },
          cat,
        ),
      );
    });
    chart.append(
      svg(
        "text",
        { x: gx + groupW / 2, y: TOP + CHART_H + 32, "text-anchor": "middle", class: "sys-label id-text" },
        system.system,
      ),
      svg(
        "text",
        { x: gx + groupW / 2, y: TOP + CHART_H + 50, "text-anchor": "middle", class: "group-totals" },
        "total ",
        svg("tspan", { class: "val grand-total" }, system.grand_total),
        ", TRM+GSMIS ",
        svg("tspan", { class: "val mt-share" }, String(system.trm_gsmis_share)),
      ),
    );
  });

  const caption = el(
    "p",
    { class: "legend" },
    "Bar labels are accumulated severity scores; TRM+GSMIS is the share of the meaning-transfer categories in percent.",
  );
  return panel("pattern", chart, caption, notes(doc) ?? "");
}

// -- scores: mean and total per system, as plain horizontal bars ----------------

export function scoresChart(doc: ScoresDoc): HTMLElement {
  const max = Math.max(1e-9, ...doc.systems.map((s) => Number(s.mean)));
  const rows = doc.systems.map((system) => {
    const widthPct = (Number(system.mean) / max) * 100;
    const fill = el("span", { class: "bar-fill", style: `width: ${widthPct}%` });
    return el(
      "div",
      { class: "score-row", "data-system": system.system },
      el("span", { class: "sys-label id-text" }, system.system),
      el("span", { class: "bar-track" }, fill),
      el(
        "span",
        { class: "score-labels" },
        "mean ",
        el("span", { class: "val mean" }, system.mean),
        ", total ",
        el("span", { class: "val total" }, system.total),
      ),
    );
  });
  const caption = el("p", { class: "legend" }, "Mean and summed per-segment scores; lower is better.");
  return panel("scores", ...rows, caption, notes(doc) ?? "");
}

// -- agreement: dimension x system grid with band coloring ----------------------

export function agreementGrid(doc: AgreementDoc): HTMLElement {
  const byKey = new Map(doc.cells.map((c) => [`${c.dimension}\n${c.system}`, c]));

  const head = el("tr", {}, el("th", {}, "Dimension"));
  for (const system of doc.systems) head.append(el("th", { class: "id-text" }, system));

  const table = el("table", { class: "agreement-grid" }, el("thead", {}, head));
  const body = el("tbody", {});
  for (const dim of doc.dimensions) {
    const row = el("tr", { "data-dimension": dim }, el("th", {}, dim));
    for (const system of doc.systems) {
      const cell = byKey.get(`${dim}\n${system}`);
      if (!cell) {
        row.append(el("td", { class: "cell band-undefined" }, ""));
        continue;
      }
      row.append(
        el(
          "td",
          { class: `cell ${bandClass(cell.band)}`, "data-band": cell.band ?? "" },
          el("span", { class: "val kappa" }, cell.kappa),
          el("span", { class: "band-label" }, cell.band ?? ""),
          el("span", { class: "items" }, "n=", el("span", { class: "val item-count" }, String(cell.items))),
        ),
      );
    }
    body.append(row);
  }
  table.append(body);

  const annotators = el(
    "p",
    { class: "annotators" },
    "Annotators: ",
    ...doc.annotators.flatMap((a, i) => {
      const span = el("span", { class: "id-text" }, a);
      return i === 0 ? [span] : [", ", span];
    }),
  );

  const extras: HTMLElement[] = [];
  if (doc.excluded.length > 0) {
    extras.push(
      el(
        "div",
        { class: "excluded" },
        el("p", {}, "Items rated by only one annotator (excluded):"),
        el(
          "ul",
          { class: "excluded-items" },
          ...doc.excluded.map((e) => el("li", { class: "id-text" }, `${e.system} / ${e.segment}`)),
        ),
      ),
    );
  }
  return panel("agreement", table, annotators, ...extras, notes(doc) ?? "");
}

// -- the dashboard view ----------------------------------------------------------

const PANEL_ORDER: ReportKind[] = ["severity", "pattern", "scores", "agreement"];

function failedPanel(kind: ReportKind, err: unknown): HTMLElement {
  const parts = describeError(err);
  const body = el(
    "div",
    { class: "panel-error" },
    el("strong", { class: "error-name" }, parts.name),
    el("p", { class: "error-detail" }, parts.detail),
  );
  if (parts.items.length > 0) {
    body.append(
      el("ul", { class: "missing-items" }, ...parts.items.map((item) => el("li", { class: "id-text" }, item))),
      el("p", { class: "hint" }, "Annotate the items listed above, then reload this page."),
    );
  } else {
    body.append(el("p", { class: "hint" }, "Collect the missing annotations, then reload this page."));
  }
  return panel(kind, body);
}

export class Dashboard {
  constructor(
    private readonly root: HTMLElement,
    private readonly api: ApiClient,
    private readonly project: string,
  ) {}

  /** Fetch all four report documents and render a panel per report. */
  async load(): Promise<void> {
    const results = await Promise.allSettled(
      PANEL_ORDER.map((kind) => this.api.report<unknown>(this.project, kind)),
    );
    clear(this.root);
    const wrap = el("div", { class: "dashboard" });
    PANEL_ORDER.forEach((kind, i) => {
      const result = results[i];
      if (result.status === "rejected") {
        wrap.append(failedPanel(kind, result.reason));
        return;
      }
      switch (kind) {
        case "severity":
          wrap.append(severityChart(result.value as SeverityDoc));
          break;
        case "pattern":
          wrap.append(patternChart(result.value as PatternDoc));
          break;
        case "scores":
          wrap.append(scoresChart(result.value as ScoresDoc));
          break;
        case "agreement":
          wrap.append(agreementGrid(result.value as AgreementDoc));
          break;
      }
    });
    this.root.append(wrap);
  }
}
