// Browser entry: wires pointer input, the session client, the canvas
// renderer and tone playback into the interactive playground loop. One
// input message goes out per animation frame; everything on screen comes
// back from the engine.

import { TonePlayer } from "./audio.js";
import { SessionClient } from "./client.js";
import { DEFAULT_POINTER_CONFIG, PointerFrame, PointerMapper } from "./pointer.js";
import { audioPayloadOf } from "./protocol.js";
import { SceneRenderer } from "./render.js";
import { WebSocketTransport } from "./transport.js";

const canvas = document.getElementById("scene") as HTMLCanvasElement;
const banner = document.getElementById("banner") as HTMLDivElement;
const checklistEl = document.getElementById("checklist") as HTMLUListElement;
const scenarioSelect = document.getElementById("scenario") as HTMLSelectElement;
const startButton = document.getElementById("start") as HTMLButtonElement;
const connectButton = document.getElementById("connect") as HTMLButtonElement;
const serverInput = document.getElementById("server") as HTMLInputElement;
const metricsEl = document.getElementById("metrics") as HTMLPreElement;

const ctx = canvas.getContext("2d")!;
const renderer = new SceneRenderer(ctx, DEFAULT_POINTER_CONFIG);
const mapper = new PointerMapper(DEFAULT_POINTER_CONFIG);

let client: SessionClient | null = null;
let tonePlayer: TonePlayer | null = null;
let running = false;

const pointer: PointerFrame = {
  px: DEFAULT_POINTER_CONFIG.originXPx,
  py: DEFAULT_POINTER_CONFIG.originYPx,
  wheelDelta: 0,
  buttonDown: false,
  dropKey: false,
};

canvas.addEventListener("pointermove", (ev) => {
  const rect = canvas.getBoundingClientRect();
  pointer.px = ev.clientX - rect.left;
  pointer.py = ev.clientY - rect.top;
});
canvas.addEventListener("pointerdown", () => (pointer.buttonDown = true));
window.addEventListener("pointerup", () => (pointer.buttonDown = false));
canvas.addEventListener(
  "wheel",
  (ev) => {
    pointer.wheelDelta += ev.deltaY;
    ev.preventDefault();
  },
  { passive: false },
);
window.addEventListener("keydown", (ev) => {
  if (ev.key === "d" || ev.key === "D") pointer.dropKey = true;
});
window.addEventListener("keyup", (ev) => {
  if (ev.key === "d" || ev.key === "D") pointer.dropKey = false;
});

function setBanner(text: string, isError = false): void {
  banner.textContent = text;
  banner.className = isError ? "banner error" : "banner";
}

function refreshChecklist(): void {
  checklistEl.innerHTML = "";
  for (const task of client?.taskChecklist() ?? []) {
    const li = document.createElement("li");
    li.textContent = `${task.done ? "[x]" : "[ ]"} ${task.name}`;
    li.className = task.done ? "done" : "";
    checklistEl.appendChild(li);
  }
}

async function connect(): Promise<void> {
  setBanner("connecting...");
  client?.close();
  running = false;
  try {
    const transport = await WebSocketTransport.connect(serverInput.value);
    client = new SessionClient(transport, {
      onSnapshot: () => refreshChecklist(),
      onEvent: (event) => {
        const payload = audioPayloadOf(event);
        if (payload && tonePlayer) tonePlayer.play(payload);
        if (event.type === "scenario_completed") {
          setBanner("scenario complete — start another?");
        }
      },
      onMetric: (report) => {
        metricsEl.textContent = JSON.stringify(report, null, 2);
      },
      onError: (message) => setBanner(`engine: ${message}`, true),
      onPhase: (phase) => {
        if (phase === "closed") {
          running = false;
          setBanner("connection lost — press Connect to retry", true);
        }
      },
    });
    const welcome = await client.hello();
    scenarioSelect.innerHTML = "";
    for (const name of welcome.scenarios) {
      const opt = document.createElement("option");
      opt.value = name;
      opt.textContent = name;
      scenarioSelect.appendChild(opt);
    }
    setBanner(`connected (protocol v${welcome.version}); pick a scenario`);
    startButton.disabled = false;
  } catch (err) {
    setBanner(String(err), true);
  }
}

function startScenario(): void {
  if (!client) return;
  const AudioCtx = (window as any).AudioContext ?? (window as any).webkitAudioContext;
  if (AudioCtx && !tonePlayer) tonePlayer = new TonePlayer(new AudioCtx());
  mapper.reset();
  client.start(scenarioSelect.value, 0);
  metricsEl.textContent = "";
  running = true;
  setBanner(`running ${scenarioSelect.value} — drive with the pointer; hold D to drop`);
}

function frame(): void {
  requestAnimationFrame(frame);
  if (client && running) {
    const hand = mapper.step({ ...pointer });
    pointer.wheelDelta = 0;
    client.sendInput([hand]);
  }
  renderer.draw(client?.latestSnapshot ?? null);
}

connectButton.addEventListener("click", () => void connect());
startButton.addEventListener("click", startScenario);
startButton.disabled = true;
setBanner("press Connect to reach the engine");
requestAnimationFrame(frame);
