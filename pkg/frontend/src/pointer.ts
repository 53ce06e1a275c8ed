// Pointer -> virtual hand mapping: cursor moves the palm in x/y, the wheel
// pushes depth, holding the primary button ramps the hand closed, and
// holding the drop key forces the palm-down spread release pose. The
// mapping is a pure function of the event sequence and frame count, so
// identical recorded traces produce identical input messages.

export interface PointerConfig {
  originXPx: number; // pixel that maps to world x = 0
  originYPx: number; // pixel that maps to world y = centerY
  metersPerPixel: number;
  centerY: number; // world y at originYPx
  baseDepth: number; // world z before any wheel input
  metersPerWheel: number; // world z per wheel deltaY unit (negative: push in)
  closeRate: number; // aperture units per second while the button is held
  frameRate: number;
  bounds: {
    x: [number, number];
    y: [number, number];
    z: [number, number];
  };
}

export const DEFAULT_POINTER_CONFIG: PointerConfig = {
  originXPx: 400,
  originYPx: 300,
  metersPerPixel: 0.002,
  centerY: 1.1,
  baseDepth: 0.45,
  metersPerWheel: -0.0001,
  closeRate: 4.0,
  frameRate: 60,
  bounds: {
    x: [-0.5, 0.6],
    y: [0.8, 1.5],
    z: [0.15, 0.7],
  },
};

export interface PointerFrame {
  px: number;
  py: number;
  wheelDelta: number; // deltaY accumulated since the previous frame
  buttonDown: boolean;
  dropKey: boolean;
}

export interface PointerHandState {
  position: [number, number, number];
  aperture: number;
  dropPose: boolean;
  side: "left" | "right";
}

const clamp = (v: number, lo: number, hi: number) => Math.min(Math.max(v, lo), hi);

export class PointerMapper {
  private aperture = 1.0;
  private wheelAccum = 0.0;

  constructor(
    private config: PointerConfig = DEFAULT_POINTER_CONFIG,
    private side: "left" | "right" = "right",
  ) {}

  /** Advance one rendered frame and produce the hand state to send. */
  step(frame: PointerFrame): PointerHandState {
    const c = this.config;
    const dt = 1.0 / c.frameRate;
    if (frame.buttonDown) {
      this.aperture = clamp(this.aperture - c.closeRate * dt, 0.0, 1.0);
    } else {
      this.aperture = clamp(this.aperture + c.closeRate * dt, 0.0, 1.0);
    }
    this.wheelAccum += frame.wheelDelta;
    const x = clamp(
      (frame.px - c.originXPx) * c.metersPerPixel,
      c.bounds.x[0],
      c.bounds.x[1],
    );
    const y = clamp(
      (c.originYPx - frame.py) * c.metersPerPixel + c.centerY,
      c.bounds.y[0],
      c.bounds.y[1],
    );
    const z = clamp(
      c.baseDepth + this.wheelAccum * c.metersPerWheel,
      c.bounds.z[0],
      c.bounds.z[1],
    );
    return {
      position: [x, y, z],
      aperture: frame.dropKey ? 1.0 : this.aperture,
      dropPose: frame.dropKey,
      side: this.side,
    };
  }

  reset(): void {
    this.aperture = 1.0;
    this.wheelAccum = 0.0;
  }
}
