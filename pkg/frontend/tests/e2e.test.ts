// End-to-end: the real wizard controller against the real Python service,
// on the bundled smarthome family. Requires the lattice-elicit package to be
// installed in the active python3 environment (the repo's editable install).

import { spawn, spawnSync, type ChildProcess } from "node:child_process";
import { mkdtempSync } from "node:fs";
import { createServer } from "node:net";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { bannerLines } from "../src/render.js";
import { WizardController } from "../src/wizard.js";

let service: ChildProcess | null = null;
let baseUrl = "";

function freePort(): Promise<number> {
  return new Promise((resolve, reject) => {
    const probe = createServer();
    probe.listen(0, "127.0.0.1", () => {
      const address = probe.address();
      if (address && typeof address === "object") {
        const port = address.port;
        probe.close(() => resolve(port));
      } else {
        reject(new Error("no port assigned"));
      }
    });
  });
}

async function waitForService(url: string, timeoutMs = 20_000): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  while (Date.now() < deadline) {
    try {
      const response = await fetch(`${url}/families`);
      if (response.ok) return;
    } catch {
      // not up yet
    }
    await new Promise((r) => setTimeout(r, 200));
  }
  throw new Error(`service at ${url} did not come up in time`);
}

beforeAll(async () => {
  const port = await freePort();
  baseUrl = `http://127.0.0.1:${port}`;
  service = spawn(
    "python3",
    [
      "-m", "uvicorn", "--factory", "lattice_elicit.service:create_app",
      "--host", "127.0.0.1", "--port", String(port), "--log-level", "warning",
    ],
    {
      env: {
        ...process.env,
        LATTICE_ELICIT_DATA_DIR: mkdtempSync(join(tmpdir(), "elicit-e2e-")),
      },
      stdio: "ignore",
    },
  );
  await waitForService(baseUrl);
}, 30_000);

afterAll(() => {
  service?.kill();
});

function validateThroughEngine(familyId: string, ids: string[]) {
  const probe = spawnSync(
    "python3",
    [
      "-c",
      [
        "import json, sys",
        "from lattice_elicit import load_registry, validate_global, is_complete",
        "ids = set(json.load(sys.stdin))",
        "lattice = load_registry().get(sys.argv[1])",
        "violations = [v.to_dict() for v in validate_global(lattice, ids)]",
        "print(json.dumps({'violations': violations, 'complete': is_complete(lattice, ids)}))",
      ].join("\n"),
      familyId,
    ],
    { input: JSON.stringify(ids), encoding: "utf-8" },
  );
  expect(probe.status, probe.stderr).toBe(0);
  return JSON.parse(probe.stdout) as {
    violations: { message: string }[];
    complete: boolean;
  };
}

describe("interactive flow on the smarthome family", () => {
  it(
    "expert-mode double selection shows the server's XOR message verbatim, " +
      "and the completed spec's id set validates cleanly",
    async () => {
      const wizard = new WizardController(new ApiClient(baseUrl));
      await wizard.start({ familyId: "smarthome" });
      expect(wizard.state.phase).toBe("question");

      let misbehaved = false;
      for (let step = 0; step < 40 && wizard.state.phase === "question"; step++) {
        const question = wizard.state.question!;
        const kind = question.decision_kind;
        const children = question.children.map((c) => c.id);

        if (kind === "single_adaptor" && !misbehaved) {
          // Expert mode lifts the radio constraint; the server must reject.
          misbehaved = true;
          wizard.setExpertMode(true);
          wizard.toggleChoice(children[0]!);
          wizard.toggleChoice(children[1]!);
          await wizard.submit();
          expect(wizard.state.phase).toBe("question");
          expect(bannerLines(wizard.state.violations)).toContain(
            `Violation: Multiple children selected for XOR node ${question.node.id}`,
          );
          // Clear the bad picks and answer properly.
          wizard.toggleChoice(children[0]!);
          wizard.toggleChoice(children[1]!);
          wizard.setExpertMode(false);
        }

        if (kind === "single_adaptor" || kind === "multiple_adaptor") {
          wizard.toggleChoice(children[0]!);
        }
        expect(wizard.canSubmit()).toBe(true);
        await wizard.submit();
        expect(wizard.state.networkError).toBeNull();
      }

      expect(misbehaved).toBe(true);
      expect(wizard.state.phase).toBe("completed");
      const sidecar = wizard.state.spec!.sidecar;
      expect(sidecar.family_id).toBe("smarthome");
      expect(wizard.state.spec!.markdown).toContain("# smarthome specification");

      // The downloaded sidecar's id set passes the engine's own global
      // validation: the guardrail held end to end.
      const verdict = validateThroughEngine("smarthome", sidecar.ids);
      expect(verdict.violations).toEqual([]);
      expect(verdict.complete).toBe(true);
    },
    30_000,
  );

  it("a fresh session routed from a vision reaches a question", async () => {
    const wizard = new WizardController(new ApiClient(baseUrl));
    await wizard.start({
      vision: "sensors and automatic fall detection for an elderly parent at home",
    });
    expect(wizard.state.familyId).toBe("smarthome");
    expect(wizard.state.routed).toBe(true);
    expect(wizard.state.phase).toBe("question");
    expect(wizard.state.progress?.total_discriminants).toBeGreaterThan(0);
  });
});
