// Starts the real wlac service through its CLI for the editor tests:
// trains a small model into a temp directory, spawns `wlac serve` on a free
// port, and waits for /health before any test runs.

import { spawn, spawnSync, ChildProcess } from "node:child_process";
import { mkdtempSync, rmSync } from "node:fs";
import { createServer } from "node:net";
import { tmpdir } from "node:os";
import { join, resolve } from "node:path";
import type { TestProject } from "vitest/node";

const REPO_ROOT = resolve(__dirname, "..", "..");
const PYTHON = process.env.WLAC_PYTHON ?? "python3";

const MAKE_CORPUS = `
import sys
sys.path.insert(0, ${JSON.stringify(join(REPO_ROOT, "tests"))})
from conftest import make_parallel_pairs
from wlac.cli import main

out = sys.argv[1]
pairs = make_parallel_pairs(1200, seed=7)
with open(out + "/src.txt", "w") as fh:
    fh.write("\\n".join(s for s, _ in pairs) + "\\n")
with open(out + "/tgt.txt", "w") as fh:
    fh.write("\\n".join(t for _, t in pairs) + "\\n")
code = main(["train", "--source-corpus", out + "/src.txt",
             "--target-corpus", out + "/tgt.txt",
             "--src-lang", "toy", "--tgt-lang", "en",
             "--vocab-size", "400", "--em-iterations", "10",
             "--out-dir", out + "/model"])
sys.exit(code)
`;

function freePort(): Promise<number> {
  return new Promise((resolvePort, reject) => {
    const server = createServer();
    server.listen(0, "127.0.0.1", () => {
      const address = server.address();
      if (address && typeof address === "object") {
        const port = address.port;
        server.close(() => resolvePort(port));
      } else {
        reject(new Error("could not allocate a port"));
      }
    });
  });
}

async function waitForHealth(baseUrl: string, child: ChildProcess): Promise<void> {
  const deadline = Date.now() + 60_000;
  while (Date.now() < deadline) {
    if (child.exitCode !== null) {
      throw new Error(`service exited early with code ${child.exitCode}`);
    }
    try {
      const response = await fetch(`${baseUrl}/health`);
      if (response.ok) return;
    } catch {
      // not up yet
    }
    await new Promise((r) => setTimeout(r, 150));
  }
  throw new Error("service did not become healthy in time");
}

export default async function setup(project: TestProject) {
  const workDir = mkdtempSync(join(tmpdir(), "wlac-editor-"));
  const train = spawnSync(PYTHON, ["-c", MAKE_CORPUS, workDir], {
    cwd: REPO_ROOT,
    encoding: "utf-8",
  });
  if (train.status !== 0) {
    throw new Error(`model training failed:\n${train.stdout}\n${train.stderr}`);
  }

  const port = await freePort();
  const child = spawn(
    PYTHON,
    ["-m", "wlac.cli", "serve", "--model-dir", join(workDir, "model"),
     "--port", String(port), "--seed", "0"],
    { cwd: REPO_ROOT, stdio: ["ignore", "pipe", "pipe"] }
  );
  child.stderr?.on("data", () => undefined);

  const baseUrl = `http://127.0.0.1:${port}`;
  await waitForHealth(baseUrl, child);
  project.provide("wlacBaseUrl", baseUrl);

  return async () => {
    child.kill("SIGTERM");
    await new Promise((r) => setTimeout(r, 200));
    if (child.exitCode === null) child.kill("SIGKILL");
    rmSync(workDir, { recursive: true, force: true });
  };
}

declare module "vitest" {
  export interface ProvidedContext {
    wlacBaseUrl: string;
  }
}
