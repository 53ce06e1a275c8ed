// End-to-end: a live session against the real engine server, driven by the
// recorded pointer trace. Completes the Panel scenario, verifies snapshot
// cadence (one per two ticks) and checklist updates, then replays the
// session log byte-for-byte through the engine's replay verifier.

import { describe, expect, it } from "vitest";
import { spawn, spawnSync } from "node:child_process";
import { mkdtempSync, readFileSync, readdirSync } from "node:fs";
import { tmpdir } from "node:os";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

import { SessionClient } from "../src/client.js";
import { PointerFrame, PointerMapper } from "../src/pointer.js";
import { TcpLineTransport } from "../src/transport.js";
import { SnapshotMessage } from "../src/protocol.js";

const here = dirname(fileURLToPath(import.meta.url));
const repoRoot = join(here, "..", "..");

const PYTHON = process.env.OMG_PYTHON ?? "python3";

function pythonAvailable(): boolean {
  const probe = spawnSync(PYTHON, ["-c", "import omg"], {
    cwd: repoRoot,
    env: { ...process.env, PYTHONPATH: join(repoRoot, "src") },
  });
  return probe.status === 0;
}

async function waitForPort(readPort: () => number | null, ms: number): Promise<number> {
  const deadline = Date.now() + ms;
  while (Date.now() < deadline) {
    const port = readPort();
    if (port !== null) return port;
    await new Promise((r) => setTimeout(r, 50));
  }
  throw new Error("server did not report its port in time");
}

describe.skipIf(!pythonAvailable())("live loop against the engine", () => {
  it(
    "completes Panel via pointer input and the log replays cleanly",
    async () => {
      const outDir = mkdtempSync(join(tmpdir(), "omg-e2e-"));
      let reportedPort: number | null = null;
      const server = spawn(
        PYTHON,
        [
          "-c",
          "from omg.server import OmgServer\n" +
            `srv = OmgServer(port=0, out_dir=${JSON.stringify(outDir)})\n` +
            "print(srv.port, flush=True)\n" +
            "srv.serve_forever(max_sessions=1)\n",
        ],
        { cwd: repoRoot, env: { ...process.env, PYTHONPATH: join(repoRoot, "src") } },
      );
      server.stdout.on("data", (chunk: Buffer) => {
        const m = chunk.toString().match(/^(\d+)/);
        if (m) reportedPort = Number(m[1]);
      });
      try {
        const port = await waitForPort(() => reportedPort, 10_000);
        const transport = await TcpLineTransport.connect("127.0.0.1", port);
        const snapshots: SnapshotMessage[] = [];
        const client = new SessionClient(transport, {
          onSnapshot: (s) => snapshots.push(s),
        });
        const welcome = await client.hello();
        expect(welcome.version).toBe(1);
        expect(welcome.catalog.length).toBeGreaterThanOrEqual(9);
        client.start("panel", 0);

        const doc = JSON.parse(
          readFileSync(join(here, "fixtures", "panel_pointer_trace.json"), "utf-8"),
        );
        const mapper = new PointerMapper(doc.config);
        let sent = 0;
        for (const frame of doc.frames as PointerFrame[]) {
          client.sendInput([mapper.step(frame)]);
          sent += 1;
        }
        // wait until the final even tick's snapshot arrives
        const lastEven = sent - (sent % 2);
        const deadline = Date.now() + 30_000;
        while (Date.now() < deadline) {
          const latest = client.latestSnapshot;
          if (latest && latest.tick >= lastEven) break;
          await new Promise((r) => setTimeout(r, 25));
        }

        // cadence: one snapshot per two ticks, none skipped, none duplicated
        const runTicks = snapshots.filter((s) => s.tick > 0).map((s) => s.tick);
        expect(runTicks.length).toBe(lastEven / 2);
        runTicks.forEach((tick, i) => expect(tick).toBe(2 * (i + 1)));

        // the checklist completed via engine events
        expect(client.taskChecklist().map((t) => t.done)).toEqual([true, true, true]);
        expect(client.eventsOfType("scenario_completed")).toHaveLength(1);
        expect(client.eventsOfType("button_pressed")).toHaveLength(1);

        client.close();
        // server flushes the session files on disconnect
        let logFile: string | null = null;
        let inputsFile: string | null = null;
        const flushDeadline = Date.now() + 10_000;
        while (Date.now() < flushDeadline) {
          const files = readdirSync(outDir);
          const log = files.find((f) => f.endsWith(".log.jsonl"));
          const inputs = files.find((f) => f.endsWith(".inputs.jsonl"));
          if (log && inputs) {
            logFile = join(outDir, log);
            inputsFile = join(outDir, inputs);
            break;
          }
          await new Promise((r) => setTimeout(r, 50));
        }
        expect(logFile).not.toBeNull();

        const replay = spawnSync(
          PYTHON,
          ["-m", "omg.cli", "replay", "--log", logFile!, "--script", inputsFile!],
          { cwd: repoRoot, env: { ...process.env, PYTHONPATH: join(repoRoot, "src") } },
        );
        expect(replay.stdout.toString()).toContain("replay OK");
        expect(replay.status).toBe(0);
      } finally {
        server.kill();
      }
    },
    60_000,
  );
});
