// Session protocol v1: newline-delimited JSON messages, one object per line.
// The engine is authoritative; the client renders snapshots and events and
// only ever sends hello / command / input.

export const PROTOCOL_VERSION = 1;

export interface HandInput {
  side: "left" | "right";
  position: [number, number, number];
  aperture: number;
  drop_pose?: boolean;
}

export interface HelloMessage {
  type: "hello";
  version: number;
}

export interface CommandMessage {
  type: "command";
  action: "start" | "reset";
  scenario: string;
  seed: number;
}

export interface InputMessage {
  type: "input";
  tick: number;
  hands: HandInput[];
}

export type ClientMessage = HelloMessage | CommandMessage | InputMessage;

export interface CatalogEntry {
  kind: string;
  mass: number | null;
  hardness: number;
  graspable: boolean;
}

export interface WelcomeMessage {
  type: "welcome";
  version: number;
  catalog: CatalogEntry[];
  scenarios: string[];
}

export interface ObjectSnapshot {
  id: string;
  kind: string;
  position: [number, number, number];
  orientation: [number, number, number, number];
  depression?: number;
  index?: number;
  angle_deg?: number;
  blade_deg?: number;
  plunger_m?: number;
  stretch?: number;
  wrap_progress?: number;
  cut?: boolean;
  lift_deg?: number;
}

export interface HandSnapshot {
  side: string;
  landmarks: [number, number, number][];
  aperture: number;
  attach: string;
  attached_object: string | null;
  tool: string | null;
  actuation: number | null;
}

export interface TaskState {
  name: string;
  done: boolean;
}

export interface SnapshotMessage {
  type: "snapshot";
  tick: number;
  t: number;
  objects: ObjectSnapshot[];
  hands: HandSnapshot[];
  tasks: TaskState[];
  completed: boolean;
}

export interface EngineEvent {
  tick: number;
  t: number;
  type: string;
  data: Record<string, unknown>;
}

export interface EventMessage {
  type: "event";
  event: EngineEvent;
}

export interface MetricMessage {
  type: "metric";
  report: Record<string, unknown>;
}

export interface ErrorMessage {
  type: "error";
  message: string;
}

export type ServerMessage =
  | WelcomeMessage
  | SnapshotMessage
  | EventMessage
  | MetricMessage
  | ErrorMessage;

export function encodeMessage(msg: ClientMessage): string {
  return JSON.stringify(msg);
}

export function decodeMessage(line: string): ServerMessage {
  const obj = JSON.parse(line);
  if (typeof obj !== "object" || obj === null || typeof obj.type !== "string") {
    throw new Error(`malformed server message: ${line.slice(0, 120)}`);
  }
  return obj as ServerMessage;
}

export interface AudioPayload {
  frequency: number;
  attack_ms: number;
  decay_ms: number;
  amplitude: number;
}

export function audioPayloadOf(event: EngineEvent): AudioPayload | null {
  if (event.type !== "audio") return null;
  const d = event.data as Record<string, number>;
  return {
    frequency: d.frequency,
    attack_ms: d.attack_ms,
    decay_ms: d.decay_ms,
    amplitude: d.amplitude,
  };
}
