import { describe, expect, it } from "vitest";
import { readFileSync } from "node:fs";
import { fileURLToPath } from "node:url";
import { dirname, join } from "node:path";

import {
  DEFAULT_POINTER_CONFIG,
  PointerFrame,
  PointerMapper,
} from "../src/pointer.js";

const here = dirname(fileURLToPath(import.meta.url));

function idleFrame(partial: Partial<PointerFrame> = {}): PointerFrame {
  return {
    px: DEFAULT_POINTER_CONFIG.originXPx,
    py: DEFAULT_POINTER_CONFIG.originYPx,
    wheelDelta: 0,
    buttonDown: false,
    dropKey: false,
    ...partial,
  };
}

describe("PointerMapper", () => {
  it("ramps the aperture closed at 4.0/s while the button is held", () => {
    const mapper = new PointerMapper();
    let state = mapper.step(idleFrame());
    expect(state.aperture).toBe(1.0);
    // 0.1 s = 6 frames at 60 Hz
    for (let k = 0; k < 6; k++) {
      state = mapper.step(idleFrame({ buttonDown: true }));
    }
    expect(state.aperture).toBeCloseTo(0.6, 9);
    // released: ramps back open at the same rate
    for (let k = 0; k < 3; k++) {
      state = mapper.step(idleFrame());
    }
    expect(state.aperture).toBeCloseTo(0.8, 9);
  });

  it("clamps wheel depth at the scenario bounds", () => {
    const mapper = new PointerMapper();
    let state = mapper.step(idleFrame({ wheelDelta: -1e9 }));
    expect(state.position[2]).toBe(DEFAULT_POINTER_CONFIG.bounds.z[1]);
    state = mapper.step(idleFrame({ wheelDelta: 2e9 }));
    expect(state.position[2]).toBe(DEFAULT_POINTER_CONFIG.bounds.z[0]);
  });

  it("clamps x/y to the scenario bounds", () => {
    const mapper = new PointerMapper();
    const state = mapper.step(idleFrame({ px: -10_000, py: 10_000 }));
    expect(state.position[0]).toBe(DEFAULT_POINTER_CONFIG.bounds.x[0]);
    expect(state.position[1]).toBe(DEFAULT_POINTER_CONFIG.bounds.y[0]);
  });

  it("maps the origin pixel to the world center", () => {
    const mapper = new PointerMapper();
    const state = mapper.step(idleFrame());
    expect(state.position[0]).toBeCloseTo(0.0, 12);
    expect(state.position[1]).toBeCloseTo(DEFAULT_POINTER_CONFIG.centerY, 12);
    expect(state.position[2]).toBeCloseTo(DEFAULT_POINTER_CONFIG.baseDepth, 12);
  });

  it("drop key forces the release pose with a fully open hand", () => {
    const mapper = new PointerMapper();
    for (let k = 0; k < 10; k++) mapper.step(idleFrame({ buttonDown: true }));
    const state = mapper.step(idleFrame({ dropKey: true }));
    expect(state.dropPose).toBe(true);
    expect(state.aperture).toBe(1.0);
  });

  it("replays a recorded trace to identical hand-state sequences", () => {
    const doc = JSON.parse(
      readFileSync(join(here, "fixtures", "panel_pointer_trace.json"), "utf-8"),
    );
    const run = () => {
      const mapper = new PointerMapper(doc.config);
      return doc.frames.map((f: PointerFrame) => mapper.step(f));
    };
    expect(JSON.stringify(run())).toBe(JSON.stringify(run()));
  });
});
