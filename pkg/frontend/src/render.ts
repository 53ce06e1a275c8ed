// Canvas renderer: front view (world x right, y up), depth shown by scale.
// Pure function of the latest snapshot; nothing here owns simulation state.

import { HandSnapshot, ObjectSnapshot, SnapshotMessage } from "./protocol.js";
import { PointerConfig } from "./pointer.js";

const HAND_BONES: [number, number][] = [
  [0, 1], [1, 2], [2, 3], [3, 4],
  [0, 5], [5, 6], [6, 7], [7, 8],
  [0, 9], [9, 10], [10, 11], [11, 12],
  [0, 13], [13, 14], [14, 15], [15, 16],
  [0, 17], [17, 18], [18, 19], [19, 20],
];

const KIND_COLORS: Record<string, string> = {
  ball: "#e5c04b",
  bat: "#a9762f",
  push_button: "#d05050",
  lever_switch: "#5080d0",
  rotary_dial: "#50b080",
  scissors: "#c0c0d0",
  syringe: "#90d0e0",
  bandage: "#e8e0d0",
  patient_limb: "#d8a890",
};

export class SceneRenderer {
  constructor(
    private ctx: CanvasRenderingContext2D,
    private config: PointerConfig,
  ) {}

  private toPx(x: number, y: number): [number, number] {
    const c = this.config;
    return [
      c.originXPx + x / c.metersPerPixel,
      c.originYPx - (y - c.centerY) / c.metersPerPixel,
    ];
  }

  private depthScale(z: number): number {
    // nearer to the viewer (larger z) draws slightly larger
    return 1.0 + (z - this.config.baseDepth) * 0.8;
  }

  draw(snapshot: SnapshotMessage | null): void {
    const { ctx } = this;
    const canvas = ctx.canvas;
    ctx.clearRect(0, 0, canvas.width, canvas.height);
    ctx.fillStyle = "#14161c";
    ctx.fillRect(0, 0, canvas.width, canvas.height);
    if (!snapshot) {
      ctx.fillStyle = "#8a8f98";
      ctx.font = "16px system-ui";
      ctx.fillText("waiting for snapshots...", 24, 32);
      return;
    }
    for (const obj of snapshot.objects) {
      this.drawObject(obj);
    }
    for (const hand of snapshot.hands) {
      this.drawHand(hand);
    }
    ctx.fillStyle = "#8a8f98";
    ctx.font = "12px system-ui";
    ctx.fillText(`tick ${snapshot.tick}  t=${snapshot.t.toFixed(2)}s`, 12, canvas.height - 12);
  }

  private drawObject(obj: ObjectSnapshot): void {
    const { ctx } = this;
    const [px, py] = this.toPx(obj.position[0], obj.position[1]);
    const s = this.depthScale(obj.position[2]) / this.config.metersPerPixel;
    ctx.fillStyle = KIND_COLORS[obj.kind] ?? "#999999";
    ctx.strokeStyle = "#0a0b0e";
    ctx.lineWidth = 1.5;
    ctx.beginPath();
    switch (obj.kind) {
      case "ball":
        ctx.arc(px, py, 0.0335 * s, 0, Math.PI * 2);
        break;
      case "push_button": {
        const depressed = (obj.depression ?? 0) / 0.006;
        ctx.rect(px - 0.03 * s, py - 0.012 * s, 0.06 * s, 0.022 * s);
        ctx.fill();
        ctx.beginPath();
        ctx.fillStyle = depressed > 0.95 ? "#ff9a50" : "#e87070";
        ctx.arc(px, py - (0.02 - 0.006 * depressed) * s, 0.012 * s, 0, Math.PI * 2);
        break;
      }
      case "lever_switch": {
        ctx.rect(px - 0.025 * s, py - 0.025 * s, 0.05 * s, 0.05 * s);
        ctx.fill();
        ctx.beginPath();
        ctx.strokeStyle = "#dfe6ff";
        ctx.lineWidth = 4;
        const up = obj.index === 1 ? -1 : 1;
        ctx.moveTo(px, py);
        ctx.lineTo(px, py + up * 0.05 * s);
        ctx.stroke();
        return;
      }
      case "rotary_dial": {
        ctx.arc(px, py, 0.035 * s, 0, Math.PI * 2);
        ctx.fill();
        const angle = ((obj.angle_deg ?? 0) * Math.PI) / 180;
        ctx.beginPath();
        ctx.strokeStyle = "#0a0b0e";
        ctx.lineWidth = 3;
        ctx.moveTo(px, py);
        ctx.lineTo(px + 0.03 * s * Math.cos(angle), py - 0.03 * s * Math.sin(angle));
        ctx.stroke();
        return;
      }
      case "scissors":
        ctx.rect(px - 0.008 * s, py - 0.08 * s, 0.016 * s, 0.16 * s);
        break;
      case "syringe":
        ctx.rect(px - 0.009 * s, py - 0.06 * s, 0.018 * s, 0.12 * s);
        break;
      case "bandage":
        ctx.arc(px, py, 0.02 * s, 0, Math.PI * 2);
        if (obj.cut) ctx.fillStyle = "#b0a890";
        break;
      case "patient_limb":
        ctx.rect(px - 0.05 * s, py - 0.045 * s, 0.3 * s, 0.09 * s);
        break;
      case "bat":
        ctx.rect(px - 0.03 * s, py - 0.35 * s, 0.06 * s, 0.7 * s);
        break;
      default:
        ctx.arc(px, py, 0.02 * s, 0, Math.PI * 2);
    }
    ctx.fill();
    ctx.stroke();
  }

  private drawHand(hand: HandSnapshot): void {
    const { ctx } = this;
    const pts = hand.landmarks.map((p) => {
      const [px, py] = this.toPx(p[0], p[1]);
      return [px, py] as [number, number];
    });
    ctx.strokeStyle = hand.attach === "detached" ? "#7fd7a0" : "#ffd27f";
    ctx.lineWidth = 2;
    for (const [a, b] of HAND_BONES) {
      ctx.beginPath();
      ctx.moveTo(pts[a][0], pts[a][1]);
      ctx.lineTo(pts[b][0], pts[b][1]);
      ctx.stroke();
    }
    ctx.fillStyle = "#ffffff";
    for (const [px, py] of pts) {
      ctx.beginPath();
      ctx.arc(px, py, 2.2, 0, Math.PI * 2);
      ctx.fill();
    }
  }
}
