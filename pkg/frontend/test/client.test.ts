import { describe, expect, it } from "vitest";

import { SessionClient } from "../src/client.js";
import { LineTransport } from "../src/transport.js";
import { TonePlayer, ToneContext } from "../src/audio.js";
import { audioPayloadOf, decodeMessage, encodeMessage } from "../src/protocol.js";

class MockTransport implements LineTransport {
  sent: string[] = [];
  private lineHandler: ((line: string) => void) | null = null;
  private closeHandler: (() => void) | null = null;

  send(line: string): void {
    this.sent.push(line);
  }
  onLine(handler: (line: string) => void): void {
    this.lineHandler = handler;
  }
  onClose(handler: () => void): void {
    this.closeHandler = handler;
  }
  close(): void {
    this.closeHandler?.();
  }
  inject(obj: unknown): void {
    this.lineHandler?.(JSON.stringify(obj));
  }
}

describe("SessionClient", () => {
  it("performs the hello/welcome handshake", async () => {
    const transport = new MockTransport();
    const client = new SessionClient(transport);
    const promise = client.hello();
    expect(JSON.parse(transport.sent[0])).toEqual({ type: "hello", version: 1 });
    transport.inject({ type: "welcome", version: 1, catalog: [], scenarios: ["panel"] });
    const welcome = await promise;
    expect(welcome.version).toBe(1);
    expect(client.phase).toBe("ready");
  });

  it("numbers input ticks sequentially, one per frame", () => {
    const transport = new MockTransport();
    const client = new SessionClient(transport);
    client.start("panel", 0);
    for (let k = 0; k < 5; k++) {
      client.sendInput([
        { position: [0, 1.1, 0.45], aperture: 1.0, dropPose: false, side: "right" },
      ]);
    }
    const ticks = transport.sent
      .map((line) => JSON.parse(line))
      .filter((m) => m.type === "input")
      .map((m) => m.tick);
    expect(ticks).toEqual([1, 2, 3, 4, 5]);
  });

  it("tracks checklist state from snapshots (engine is authoritative)", () => {
    const transport = new MockTransport();
    const client = new SessionClient(transport);
    transport.inject({
      type: "snapshot", tick: 2, t: 2 / 60, objects: [], hands: [],
      tasks: [{ name: "press_button", done: false }], completed: false,
    });
    expect(client.taskChecklist()).toEqual([{ name: "press_button", done: false }]);
    transport.inject({
      type: "snapshot", tick: 4, t: 4 / 60, objects: [], hands: [],
      tasks: [{ name: "press_button", done: true }], completed: true,
    });
    expect(client.taskChecklist()[0].done).toBe(true);
  });

  it("collects engine events and surfaces errors", () => {
    const transport = new MockTransport();
    const errors: string[] = [];
    const client = new SessionClient(transport, { onError: (m) => errors.push(m) });
    transport.inject({
      type: "event",
      event: { tick: 3, t: 0.05, type: "button_pressed", data: { object: "button" } },
    });
    expect(client.eventsOfType("button_pressed")).toHaveLength(1);
    transport.inject({ type: "error", message: "bad input" });
    expect(errors).toEqual(["bad input"]);
    expect(client.lastError).toBe("bad input");
  });

  it("reports connection loss without crashing", () => {
    const transport = new MockTransport();
    const phases: string[] = [];
    const client = new SessionClient(transport, { onPhase: (p) => phases.push(p) });
    transport.close();
    expect(phases).toContain("closed");
    expect(client.phase).toBe("closed");
  });
});

describe("protocol encode/decode", () => {
  it("round-trips client messages as single JSON lines", () => {
    const line = encodeMessage({ type: "input", tick: 7, hands: [] });
    expect(line).not.toContain("\n");
    expect(JSON.parse(line).tick).toBe(7);
  });

  it("rejects malformed server lines", () => {
    expect(() => decodeMessage("{{{")).toThrow();
    expect(() => decodeMessage('{"no_type": 1}')).toThrow();
  });
});

describe("TonePlayer", () => {
  it("uses the event payload's frequency/attack/amplitude verbatim", () => {
    const calls: Record<string, unknown[]> = { freq: [], ramp: [], target: [] };
    const ctx: ToneContext = {
      currentTime: 10.0,
      destination: {},
      createOscillator: () => ({
        frequency: {
          set value(v: number) {
            calls.freq.push(v);
          },
          get value() {
            return 0;
          },
        } as unknown as { value: number },
        connect: () => ({}),
        start: () => undefined,
        stop: () => undefined,
      }),
      createGain: () => ({
        gain: {
          setValueAtTime: () => ({}),
          linearRampToValueAtTime: (value: number, time: number) => {
            calls.ramp.push([value, time]);
            return {};
          },
          setTargetAtTime: (value: number, time: number, tau: number) => {
            calls.target.push([value, time, tau]);
            return {};
          },
        },
        connect: () => ({}),
      }),
    };
    const player = new TonePlayer(ctx);
    const payload = audioPayloadOf({
      tick: 1,
      t: 0.1,
      type: "audio",
      data: { frequency: 293.66, attack_ms: 30, decay_ms: 250, amplitude: 0.5 },
    });
    expect(payload).not.toBeNull();
    player.play(payload!);
    expect(calls.freq).toEqual([293.66]);
    expect(calls.ramp).toEqual([[0.5, 10.0 + 0.03]]);
    expect(calls.target).toEqual([[0.0, 10.0 + 0.03, 0.25]]);
  });

  it("ignores non-audio events", () => {
    expect(
      audioPayloadOf({ tick: 1, t: 0, type: "contact", data: {} }),
    ).toBeNull();
  });
});
