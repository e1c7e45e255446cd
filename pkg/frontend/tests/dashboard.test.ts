/** Dashboard fidelity: everything on screen comes from the report documents.
 *
 * The headline check renders the dashboard for the demo project and compares
 * the DOM against the structured reports field by field, then sweeps the
 * whole tree to prove no displayed digit exists outside a report-sourced
 * value, a server note, or an identifier.
 */

import { beforeAll, describe, expect, it } from "vitest";
import type {
  AgreementDoc,
  PatternDoc,
  ScoresDoc,
  SeverityDoc,
} from "../src/api.js";
import { BUCKETS } from "../src/api.js";
import {
  agreementGrid,
  bandClass,
  Dashboard,
  severityChart,
} from "../src/dashboard.js";
import { client, freshRoot, texts } from "./helpers.js";

const api = client();

describe("dashboard on the demo project", () => {
  let root: HTMLElement;
  let severity: SeverityDoc;
  let pattern: PatternDoc;
  let scores: ScoresDoc;
  let agreement: AgreementDoc;

  beforeAll(async () => {
    [severity, pattern, scores, agreement] = await Promise.all([
      api.report<SeverityDoc>("dash-demo", "severity"),
      api.report<PatternDoc>("dash-demo", "pattern"),
      api.report<ScoresDoc>("dash-demo", "scores"),
      api.report<AgreementDoc>("dash-demo", "agreement"),
    ]);
    root = freshRoot();
    await new Dashboard(root, api, "dash-demo").load();
  });

  it("renders three charts and one grid", () => {
    const panels = [...root.querySelectorAll(".panel")].map((p) => p.getAttribute("data-kind"));
    expect(panels).toEqual(["severity", "pattern", "scores", "agreement"]);
    expect(root.querySelectorAll("svg").length).toBe(2);
    expect(root.querySelectorAll(".score-row").length).toBe(scores.systems.length);
    expect(root.querySelector("table.agreement-grid")).not.toBeNull();
  });

  it("severity chart shows exactly the document's percentages and counts", () => {
    const panel = root.querySelector('[data-kind="severity"]')!;
    const expected = severity.systems.flatMap((s) =>
      BUCKETS.map((b) => s.percentages[b]).filter((p) => p > 0).map(String),
    );
    expect(texts(panel, ".val.pct")).toEqual(expected);
    expect(texts(panel, ".val.seg-count")).toEqual(severity.systems.map((s) => String(s.segments)));
  });

  it("pattern chart shows exactly the document's totals and shares", () => {
    const panel = root.querySelector('[data-kind="pattern"]')!;
    expect(texts(panel, ".val.cat-total")).toEqual(
      pattern.systems.flatMap((s) => pattern.categories.map((c) => s.totals[c])),
    );
    expect(texts(panel, ".val.grand-total")).toEqual(pattern.systems.map((s) => s.grand_total));
    expect(texts(panel, ".val.mt-share")).toEqual(
      pattern.systems.map((s) => String(s.trm_gsmis_share)),
    );
  });

  it("scores chart shows exactly the document's means and totals", () => {
    const panel = root.querySelector('[data-kind="scores"]')!;
    expect(texts(panel, ".val.mean")).toEqual(scores.systems.map((s) => s.mean));
    expect(texts(panel, ".val.total")).toEqual(scores.systems.map((s) => s.total));
  });

  it("agreement grid shows every cell's kappa, band, and item count", () => {
    const panel = root.querySelector('[data-kind="agreement"]')!;
    for (const cell of agreement.cells) {
      const row = panel.querySelector(`tr[data-dimension="${cell.dimension}"]`)!;
      const col = agreement.systems.indexOf(cell.system);
      const td = row.querySelectorAll("td.cell")[col]!;
      expect(td.querySelector(".val.kappa")?.textContent).toBe(cell.kappa);
      expect(td.querySelector(".band-label")?.textContent).toBe(cell.band ?? "");
      expect(td.querySelector(".val.item-count")?.textContent).toBe(String(cell.items));
      expect(td.classList.contains(bandClass(cell.band))).toBe(true);
    }
    const annotators = panel.querySelector(".annotators")!.textContent!;
    for (const a of agreement.annotators) expect(annotators).toContain(a);
  });

  it("every value element equals a report field; no stray digits elsewhere", () => {
    const fieldValues = new Set<string>([
      ...severity.systems.flatMap((s) => [
        String(s.segments),
        ...BUCKETS.map((b) => String(s.percentages[b])),
        ...BUCKETS.map((b) => String(s.counts[b])),
      ]),
      ...pattern.systems.flatMap((s) => [
        ...pattern.categories.map((c) => s.totals[c]),
        s.grand_total,
        String(s.trm_gsmis_share),
        ...pattern.categories.map((c) => String(s.shares[c])),
      ]),
      ...scores.systems.flatMap((s) => [s.total, s.mean]),
      ...agreement.cells.flatMap((c) => [c.kappa, String(c.items)]),
    ]);
    const vals = [...root.querySelectorAll(".val")];
    expect(vals.length).toBeGreaterThan(20);
    for (const val of vals) {
      expect(fieldValues.has(val.textContent ?? "")).toBe(true);
    }

    // Any digit on screen must sit inside a report value, a note, or an id.
    const walker = document.createTreeWalker(root, NodeFilter.SHOW_TEXT);
    const offenders: string[] = [];
    for (let node = walker.nextNode(); node; node = walker.nextNode()) {
      const text = node.textContent ?? "";
      if (!/[0-9]/.test(text)) continue;
      const holder = node.parentElement?.closest(".val, .note, .id-text");
      if (!holder) offenders.push(text.trim());
    }
    expect(offenders).toEqual([]);
  });
});

describe("chart builders on fixed documents", () => {
  const severityFixture: SeverityDoc = {
    schema: "posteval-report/1",
    kind: "severity",
    systems: [
      {
        system: "sys-a",
        segments: 200,
        counts: { NoEdit: 72, Minor: 68, Major: 60 },
        percentages: { NoEdit: 36, Minor: 34, Major: 30 },
      },
      {
        system: "sys-b",
        segments: 200,
        counts: { NoEdit: 78, Minor: 52, Major: 70 },
        percentages: { NoEdit: 39, Minor: 26, Major: 35 },
      },
      {
        system: "sys-c",
        segments: 200,
        counts: { NoEdit: 38, Minor: 38, Major: 124 },
        percentages: { NoEdit: 19, Minor: 19, Major: 62 },
      },
    ],
    notes: [],
  };

  it("stacks severity bars with widths proportional to the percentages", () => {
    const panel = severityChart(severityFixture);
    expect(texts(panel, ".val.pct")).toEqual(["36", "34", "30", "39", "26", "35", "19", "19", "62"]);

    for (const [i, system] of severityFixture.systems.entries()) {
      const rects = [...panel.querySelectorAll("rect")].filter(
        (r) => Number(r.getAttribute("y")) === i * 36 + 6,
      );
      const widths = rects.map((r) => Number(r.getAttribute("width")));
      expect(widths).toEqual(BUCKETS.map((b) => system.percentages[b] * 4));
      // segments are laid end to end
      let x = 96;
      for (const rect of rects) {
        expect(Number(rect.getAttribute("x"))).toBe(x);
        x += Number(rect.getAttribute("width"));
      }
    }
  });

  it("drops the label and bar for a zero percentage", () => {
    const doc: SeverityDoc = {
      schema: "posteval-report/1",
      kind: "severity",
      systems: [
        {
          system: "only",
          segments: 4,
          counts: { NoEdit: 0, Minor: 1, Major: 3 },
          percentages: { NoEdit: 0, Minor: 25, Major: 75 },
        },
      ],
      notes: [],
    };
    const panel = severityChart(doc);
    expect(texts(panel, ".val.pct")).toEqual(["25", "75"]);
    expect(panel.querySelectorAll("rect").length).toBe(2);
  });

  it("colors agreement cells by the band named in the document", () => {
    const doc: AgreementDoc = {
      schema: "posteval-report/1",
      kind: "agreement",
      annotators: ["r1", "r2"],
      systems: ["sys-a"],
      dimensions: ["Fluency", "MeaningTransfer", "Adaptation", "Overall"],
      cells: [
        { dimension: "Fluency", system: "sys-a", kappa: "0.507", band: "Moderate", items: 200 },
        { dimension: "MeaningTransfer", system: "sys-a", kappa: "0.529", band: "Moderate", items: 200 },
        { dimension: "Adaptation", system: "sys-a", kappa: "0.171", band: "Slight", items: 58 },
        { dimension: "Overall", system: "sys-a", kappa: "0.608", band: "Substantial", items: 200 },
      ],
      excluded: [],
      notes: [],
    };
    const panel = agreementGrid(doc);
    expect(texts(panel, ".val.kappa")).toEqual(["0.507", "0.529", "0.171", "0.608"]);
    const cells = [...panel.querySelectorAll("td.cell")];
    expect(cells.map((c) => c.className)).toEqual([
      "cell band-moderate",
      "cell band-moderate",
      "cell band-slight",
      "cell band-substantial",
    ]);
  });

  it("marks a degenerate kappa as undefined without inventing a number", () => {
    const doc: AgreementDoc = {
      schema: "posteval-report/1",
      kind: "agreement",
      annotators: ["r1", "r2"],
      systems: ["sys-a"],
      dimensions: ["Adaptation"],
      cells: [
        {
          dimension: "Adaptation",
          system: "sys-a",
          kappa: "n/a (degenerate)",
          band: null,
          items: 3,
        },
      ],
      excluded: [],
      notes: [],
    };
    const panel = agreementGrid(doc);
    const cell = panel.querySelector("td.cell")!;
    expect(cell.classList.contains("band-undefined")).toBe(true);
    expect(cell.querySelector(".val.kappa")?.textContent).toBe("n/a (degenerate)");
    expect(cell.querySelector(".band-label")?.textContent).toBe("");
  });
});

describe("incomplete project", () => {
  it("renders an actionable message listing the missing items", async () => {
    const { segments } = await api.segments("partial-demo");
    const gapSegment = segments[0].id;

    const root = freshRoot();
    await new Dashboard(root, api, "partial-demo").load();

    for (const kind of ["severity", "pattern", "scores"]) {
      const panel = root.querySelector(`[data-kind="${kind}"]`)!;
      const error = panel.querySelector(".panel-error");
      expect(error, `${kind} should report missing annotations`).not.toBeNull();
      expect(error!.querySelector(".error-name")?.textContent).toBe("MissingAnnotations");
      const items = texts(error!, ".missing-items li");
      expect(items).toContain(gapSegment);
      expect(error!.querySelector(".hint")?.textContent).toContain("reload");
    }

    // Both annotators still cover the remaining items, so agreement renders.
    const agreementPanel = root.querySelector('[data-kind="agreement"]')!;
    expect(agreementPanel.querySelector(".panel-error")).toBeNull();
    expect(agreementPanel.querySelector("table.agreement-grid")).not.toBeNull();
  });
});
