// Client-side tone synthesis from engine audio events. The payload's
// frequency / attack / decay / amplitude are used verbatim: a sine
// oscillator under a linear-attack, exponential-decay gain envelope.

import { AudioPayload } from "./protocol.js";

interface GainParamLike {
  setValueAtTime(value: number, time: number): unknown;
  linearRampToValueAtTime(value: number, time: number): unknown;
  setTargetAtTime(value: number, time: number, tau: number): unknown;
}

interface OscillatorLike {
  frequency: { value: number };
  connect(node: unknown): unknown;
  start(when?: number): void;
  stop(when?: number): void;
}

export interface ToneContext {
  currentTime: number;
  destination: unknown;
  createOscillator(): OscillatorLike;
  createGain(): { gain: GainParamLike; connect(node: unknown): unknown };
}

export class TonePlayer {
  constructor(private ctx: ToneContext) {}

  play(payload: AudioPayload): void {
    const now = this.ctx.currentTime;
    const attack = payload.attack_ms / 1000.0;
    const tau = payload.decay_ms / 1000.0;
    const osc = this.ctx.createOscillator();
    osc.frequency.value = payload.frequency;
    const gain = this.ctx.createGain();
    gain.gain.setValueAtTime(0.0, now);
    gain.gain.linearRampToValueAtTime(payload.amplitude, now + attack);
    gain.gain.setTargetAtTime(0.0, now + attack, tau);
    osc.connect(gain);
    gain.connect(this.ctx.destination);
    osc.start(now);
    osc.stop(now + attack + 5 * tau);
  }
}
