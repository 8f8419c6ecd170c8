import { GameCore, MIN_VIEWPORT } from "./game.js";
import { toCanonicalLog, uploadLog } from "./export.js";

const params = new URLSearchParams(window.location.search);
const seed = Number(params.get("seed") ?? Date.now() % 0xffffffff) >>> 0;
const participant = params.get("participant") ?? "anonymous";
const endpoint = params.get("endpoint"); // e.g. http://127.0.0.1:8077

const canvas = document.getElementById("stage") as HTMLCanvasElement;
const hud = document.getElementById("hud") as HTMLDivElement;
const ctx = canvas.getContext("2d")!;

function fitCanvas(): void {
  canvas.width = window.innerWidth;
  canvas.height = window.innerHeight;
}
fitCanvas();

if (
  window.innerWidth < MIN_VIEWPORT.width ||
  window.innerHeight < MIN_VIEWPORT.height
) {
  hud.textContent =
    `This experiment needs a viewport of at least ` +
    `${MIN_VIEWPORT.width}×${MIN_VIEWPORT.height}; enlarge the window and reload.`;
  throw new Error("viewport too small");
}

const game = new GameCore({
  viewportWidth: canvas.width,
  viewportHeight: canvas.height,
  seed,
  participantId: participant,
});

function draw(): void {
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  ctx.fillStyle = "#f7f7f7";
  ctx.fillRect(0, 0, canvas.width, canvas.height);
  ctx.fillStyle = "#333";
  ctx.font = "16px system-ui, sans-serif";
  ctx.textAlign = "center";
  const cx = canvas.width / 2;
  const cy = canvas.height / 2;

  if (game.phase === "idle") {
    ctx.fillText("Pop all the balloons as they appear.", cx, cy - 20);
    ctx.fillText("Click anywhere to begin.", cx, cy + 10);
  } else if (game.phase === "target") {
    const target = game.target!;
    ctx.beginPath();
    ctx.arc(target.center[0], target.center[1], target.spec.widthPx / 2, 0, 2 * Math.PI);
    ctx.fillStyle = "#d6443c";
    ctx.fill();
    ctx.strokeStyle = "#8c2721";
    ctx.stroke();
    ctx.fillStyle = "#333";
    ctx.textAlign = "left";
    ctx.fillText(`${game.targetsCompleted + 1} / ${game.targetsTotal}`, 12, 22);
  } else if (game.phase === "rest") {
    ctx.fillText("Sublevel complete - take a short breath.", cx, cy - 20);
    ctx.fillText("Click anywhere to continue.", cx, cy + 10);
  } else {
    ctx.fillText("All done, thank you!", cx, cy - 30);
    ctx.fillText(`${game.trials.length} trials recorded.`, cx, cy);
  }
  requestAnimationFrame(draw);
}
requestAnimationFrame(draw);

canvas.addEventListener("pointermove", (event) => {
  game.pointerMove(event.pageX, event.pageY, performance.now());
});

canvas.addEventListener("pointerdown", (event) => {
  const now = performance.now();
  if (game.phase === "idle") {
    game.start(event.pageX, event.pageY, now);
    return;
  }
  game.click(event.pageX, event.pageY, now);
  if (game.phase === "done") {
    void finishSession();
  }
});

function downloadLog(body: string): void {
  const blob = new Blob([body], { type: "application/x-ndjson" });
  const link = document.createElement("a");
  link.href = URL.createObjectURL(blob);
  link.download = `${game.sessionId}.trials.jsonl`;
  link.click();
  URL.revokeObjectURL(link.href);
}

async function finishSession(): Promise<void> {
  const body = toCanonicalLog(game.trials);
  if (endpoint) {
    try {
      const reply = await uploadLog(endpoint, body);
      hud.textContent = `Uploaded: ${reply.accepted} trials accepted.`;
      return;
    } catch (error) {
      hud.textContent =
        "Upload failed - the log was downloaded instead. " + String(error);
    }
  }
  downloadLog(body);
  if (!endpoint) {
    hud.textContent = "Session exported as a download.";
  }
}
