// Session client: handshake, one input per rendered frame, snapshot and
// event bookkeeping. The UI never simulates anything itself; everything
// rendered comes from the engine's snapshots and events.

import {
  CommandMessage,
  EngineEvent,
  HandInput,
  PROTOCOL_VERSION,
  ServerMessage,
  SnapshotMessage,
  TaskState,
  WelcomeMessage,
  decodeMessage,
  encodeMessage,
} from "./protocol.js";
import { LineTransport } from "./transport.js";
import { PointerHandState } from "./pointer.js";

export type ClientPhase = "connecting" | "ready" | "running" | "closed" | "error";

export interface SessionCallbacks {
  onSnapshot?: (snap: SnapshotMessage) => void;
  onEvent?: (event: EngineEvent) => void;
  onMetric?: (report: Record<string, unknown>) => void;
  onError?: (message: string) => void;
  onPhase?: (phase: ClientPhase) => void;
}

export class SessionClient {
  phase: ClientPhase = "connecting";
  welcome: WelcomeMessage | null = null;
  latestSnapshot: SnapshotMessage | null = null;
  tasks: TaskState[] = [];
  events: EngineEvent[] = [];
  lastError = "";
  private tick = 0;
  private pendingWelcome: ((w: WelcomeMessage) => void)[] = [];

  constructor(
    private transport: LineTransport,
    private callbacks: SessionCallbacks = {},
  ) {
    transport.onLine((line) => this.handleLine(line));
    transport.onClose(() => this.setPhase("closed"));
  }

  private setPhase(phase: ClientPhase): void {
    this.phase = phase;
    this.callbacks.onPhase?.(phase);
  }

  private handleLine(line: string): void {
    let msg: ServerMessage;
    try {
      msg = decodeMessage(line);
    } catch (err) {
      this.lastError = String(err);
      this.callbacks.onError?.(this.lastError);
      return;
    }
    switch (msg.type) {
      case "welcome":
        this.welcome = msg;
        this.setPhase("ready");
        for (const resolve of this.pendingWelcome.splice(0)) resolve(msg);
        break;
      case "snapshot":
        this.latestSnapshot = msg;
        this.tasks = msg.tasks;
        this.callbacks.onSnapshot?.(msg);
        break;
      case "event":
        this.events.push(msg.event);
        this.callbacks.onEvent?.(msg.event);
        break;
      case "metric":
        this.callbacks.onMetric?.(msg.report);
        break;
      case "error":
        this.lastError = msg.message;
        this.callbacks.onError?.(msg.message);
        break;
    }
  }

  hello(): Promise<WelcomeMessage> {
    this.transport.send(encodeMessage({ type: "hello", version: PROTOCOL_VERSION }));
    return new Promise((resolve) => {
      if (this.welcome) resolve(this.welcome);
      else this.pendingWelcome.push(resolve);
    });
  }

  start(scenario: string, seed = 0): void {
    const cmd: CommandMessage = { type: "command", action: "start", scenario, seed };
    this.transport.send(encodeMessage(cmd));
    this.tick = 0;
    this.events = [];
    this.latestSnapshot = null;
    this.setPhase("running");
  }

  /** Send exactly one input (one engine tick) for this rendered frame. */
  sendInput(hands: PointerHandState[]): number {
    this.tick += 1;
    const payload: HandInput[] = hands.map((h) => ({
      side: h.side,
      position: h.position,
      aperture: h.aperture,
      drop_pose: h.dropPose,
    }));
    this.transport.send(
      encodeMessage({ type: "input", tick: this.tick, hands: payload }),
    );
    return this.tick;
  }

  taskChecklist(): TaskState[] {
    return this.tasks;
  }

  eventsOfType(type: string): EngineEvent[] {
    return this.events.filter((e) => e.type === type);
  }

  close(): void {
    this.transport.close();
  }
}
