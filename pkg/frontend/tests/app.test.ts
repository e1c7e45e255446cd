/** Shell flow: connect, annotate tab, reports tab. */

import { afterEach, describe, expect, it } from "vitest";
import { createApp, type App } from "../src/main.js";
import { apiBase, freshRoot } from "./helpers.js";

let app: App | null = null;
let root: HTMLElement;

afterEach(() => {
  app?.destroy();
  app = null;
  root?.remove();
});

describe("application shell", () => {
  it("connects and mounts the walkthrough, then the dashboard", async () => {
    root = freshRoot();
    app = createApp(root, { apiBase: apiBase(), storage: window.localStorage });

    (root.querySelector(".project-input") as HTMLInputElement).value = "walk-demo";
    (root.querySelector(".annotator-input") as HTMLInputElement).value = "shell-tester";
    await app.connect();

    expect(root.querySelector(".connect-status")?.textContent).toContain("walk-demo");
    expect(root.querySelector(".walkthrough")).not.toBeNull();
    expect(root.querySelector("[data-phase]")).not.toBeNull();

    (root.querySelector(".tab-reports") as HTMLButtonElement).click();
    // tab mounting is async; wait for the dashboard panels to land
    for (let i = 0; i < 100 && !root.querySelector(".dashboard"); i++) {
      await new Promise((r) => setTimeout(r, 50));
    }
    const panels = root.querySelectorAll(".dashboard .panel");
    expect(panels.length).toBe(4);
  });

  it("refuses to connect without both ids", async () => {
    root = freshRoot();
    app = createApp(root, { apiBase: apiBase(), storage: window.localStorage });
    (root.querySelector(".project-input") as HTMLInputElement).value = "walk-demo";
    (root.querySelector(".annotator-input") as HTMLInputElement).value = "  ";
    await app.connect();
    expect(root.querySelector(".connect-status")?.textContent).toContain("enter a project id");
    expect(root.querySelector(".walkthrough")).toBeNull();
  });

  it("shows the server error when the project does not exist", async () => {
    root = freshRoot();
    app = createApp(root, { apiBase: apiBase(), storage: window.localStorage });
    (root.querySelector(".project-input") as HTMLInputElement).value = "ghost-project";
    (root.querySelector(".annotator-input") as HTMLInputElement).value = "nobody";
    await app.connect();
    expect(root.querySelector(".error-panel .error-name")?.textContent).toBe("UnknownProject");
  });
});
