// Spawns the real diagram service (mock provider, seeded fixtures) for the
// contract and end-to-end tests, so the frontend is exercised against the
// actual HTTP surface rather than a hand-written stub.

import { spawn, spawnSync, type ChildProcess } from "node:child_process";
import { mkdtempSync, rmSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

export interface ServiceHandle {
  baseUrl: string;
  stop: () => void;
}

/** A hypothesis whose scripted "generation" flips one polarity and drops one
 *  link relative to the new-car-inventory ground truth. */
export const VARIANT_DH =
  "Car production builds up dealer inventory. A larger inventory pushes the " +
  "market price down. A higher price encourages more production and also " +
  "lifts retail sales.";

export const VARIANT_DIGRAPH = [
  "digraph {",
  '"car production" -> "inventory" [arrowhead = vee]',
  '"inventory" -> "market price" [arrowhead = tee]',
  '"market price" -> "car production" [arrowhead = vee]',
  '"market price" -> "retail sales" [arrowhead = vee]',
  "}",
].join("\n");

/** A hypothesis whose scripted reply is prose with no diagram block. */
export const PROSE_DH = "Please describe the feedback structure in plain words.";

const SEED_SCRIPT = `
import sys
from cldforge.client import store_fixture, write_golden_fixtures
from cldforge.corpus import bundled_goldens
from cldforge.prompting import Strategy, build_prompt

fixture_dir, variant_dh, variant_digraph, prose_dh = sys.argv[1:5]
write_golden_fixtures(fixture_dir, bundled_goldens(), k=3)
store_fixture(fixture_dir,
              build_prompt(Strategy.BASELINE, variant_dh, []).stages[0].body,
              variant_digraph)
store_fixture(fixture_dir,
              build_prompt(Strategy.BASELINE, prose_dh, []).stages[0].body,
              "I would rather sketch this by hand; the loop is self-reinforcing.")
`;

function seedFixtures(): string {
  const fixtureDir = mkdtempSync(join(tmpdir(), "cldforge-web-"));
  const seeded = spawnSync(
    "python3",
    ["-c", SEED_SCRIPT, fixtureDir, VARIANT_DH, VARIANT_DIGRAPH, PROSE_DH],
    { encoding: "utf-8" },
  );
  if (seeded.status !== 0) {
    throw new Error(`fixture seeding failed:\n${seeded.stderr}`);
  }
  return fixtureDir;
}

const sleep = (ms: number) => new Promise((resolve) => setTimeout(resolve, ms));

async function waitForHealth(child: ChildProcess, baseUrl: string, log: () => string): Promise<boolean> {
  for (let i = 0; i < 150; i++) {
    if (child.exitCode !== null) return false;
    try {
      const response = await fetch(`${baseUrl}/health`);
      if (response.ok) return true;
    } catch {
      // not listening yet
    }
    await sleep(100);
  }
  throw new Error(`service never became healthy:\n${log()}`);
}

export async function startService(): Promise<ServiceHandle> {
  const fixtureDir = seedFixtures();
  for (let attempt = 0; attempt < 4; attempt++) {
    const port = 8700 + Math.floor(Math.random() * 900);
    const baseUrl = `http://127.0.0.1:${port}`;
    const child = spawn(
      "python3",
      [
        "-m", "cldforge", "serve",
        "--listen", `127.0.0.1:${port}`,
        "--provider", "mock",
        "--fixtures", fixtureDir,
      ],
      { stdio: ["ignore", "pipe", "pipe"] },
    );
    let output = "";
    child.stdout?.on("data", (chunk) => (output += chunk));
    child.stderr?.on("data", (chunk) => (output += chunk));

    if (await waitForHealth(child, baseUrl, () => output)) {
      return {
        baseUrl,
        stop: () => {
          child.kill("SIGTERM");
          rmSync(fixtureDir, { recursive: true, force: true });
        },
      };
    }
    // port already taken (startup races another suite) — try a fresh one
    child.kill("SIGKILL");
  }
  throw new Error("could not find a free port for the service");
}

/** Polls until the probe stops throwing/returning falsy; for UI settling. */
export async function waitFor<T>(
  probe: () => T | null | undefined | false,
  timeoutMs = 10000,
): Promise<T> {
  const deadline = Date.now() + timeoutMs;
  let lastError: unknown = null;
  while (Date.now() < deadline) {
    try {
      const value = probe();
      if (value) return value;
    } catch (error) {
      lastError = error;
    }
    await sleep(40);
  }
  throw new Error(`condition not met within ${timeoutMs}ms${lastError ? `: ${lastError}` : ""}`);
}
