/** Boots the real annotation service for the test run.
 *
 * The UI is exercised against an actual server process, not a mock: a
 * temporary data directory, a free port, and three seeded projects
 * (two demo copies plus one with a deliberate coverage gap).
 */

import { execFileSync, spawn, type ChildProcess } from "node:child_process";
import { mkdtempSync, rmSync } from "node:fs";
import { createServer } from "node:net";
import { tmpdir } from "node:os";
import { join } from "node:path";
import type { TestProject } from "vitest/node";

declare module "vitest" {
  interface ProvidedContext {
    apiBase: string;
  }
}

const BOOT = `
import sys
import uvicorn
from posteval.service import create_app

uvicorn.run(create_app(sys.argv[1]), host="127.0.0.1", port=int(sys.argv[2]), log_level="warning")
`;

// Demo project minus every annotation for one (segment, system) pair, so the
// scoring reports fail with an uncovered-items list while agreement still works.
const PARTIAL = `
import sys
from posteval.demo import demo_project
from posteval.store import save_project

project = demo_project()
project.name = "partial-demo"
gap = (project.segments[0].id, "alpha")
project.annotations = [
    a for a in project.annotations
    if (a.segment_id, a.system_id) != gap
]
save_project(project, sys.argv[1])
`;

function freePort(): Promise<number> {
  return new Promise((resolve, reject) => {
    const probe = createServer();
    probe.on("error", reject);
    probe.listen(0, "127.0.0.1", () => {
      const addr = probe.address();
      if (addr && typeof addr === "object") {
        const port = addr.port;
        probe.close(() => resolve(port));
      } else {
        reject(new Error("could not allocate a port"));
      }
    });
  });
}

async function waitReady(base: string, child: ChildProcess): Promise<void> {
  const deadline = Date.now() + 60_000;
  while (Date.now() < deadline) {
    if (child.exitCode !== null) {
      throw new Error(`service exited early with code ${child.exitCode}`);
    }
    try {
      const res = await fetch(`${base}/projects`);
      if (res.ok) return;
    } catch {
      // not listening yet
    }
    await new Promise((r) => setTimeout(r, 150));
  }
  throw new Error("annotation service did not come up in time");
}

async function seedDemo(base: string, name: string): Promise<void> {
  const res = await fetch(`${base}/projects`, {
    method: "POST",
    headers: { "content-type": "application/json" },
    body: JSON.stringify({ name, demo: true }),
  });
  if (res.status !== 201) {
    throw new Error(`failed to seed ${name}: HTTP ${res.status} ${await res.text()}`);
  }
}

export default async function setup(project: TestProject): Promise<() => Promise<void>> {
  const dataDir = mkdtempSync(join(tmpdir(), "posteval-ui-"));
  const port = await freePort();
  const base = `http://127.0.0.1:${port}`;

  const child = spawn("python3", ["-c", BOOT, dataDir, String(port)], {
    stdio: ["ignore", "inherit", "inherit"],
  });
  await waitReady(base, child);

  await seedDemo(base, "dash-demo");
  await seedDemo(base, "walk-demo");
  execFileSync("python3", ["-c", PARTIAL, join(dataDir, "partial-demo.json")]);

  project.provide("apiBase", base);

  return async () => {
    const gone = new Promise<void>((resolve) => child.once("exit", () => resolve()));
    child.kill("SIGTERM");
    await Promise.race([gone, new Promise((r) => setTimeout(r, 3000))]);
    if (child.exitCode === null) child.kill("SIGKILL");
    rmSync(dataDir, { recursive: true, force: true });
  };
}
