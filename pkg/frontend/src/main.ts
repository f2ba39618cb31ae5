// Canvas drawing page: fainted background image, freehand strokes streamed to
// the scoring service, live score and flashes, undo, submit.

import { WsTransport } from "./api.js";
import { ClientSession } from "./session.js";

const BATCH_MS = 30; // pointer samples per stroke message
const FAINT_OPACITY = 0.3; // backdrop visibility under the player's ink

const canvas = document.getElementById("board") as HTMLCanvasElement;
const ctx = canvas.getContext("2d") as CanvasRenderingContext2D;
const scoreEl = document.getElementById("score") as HTMLSpanElement;
const statusEl = document.getElementById("status") as HTMLDivElement;
const toastEl = document.getElementById("toast") as HTMLDivElement;
const verdictEl = document.getElementById("verdict") as HTMLDivElement;
const undoBtn = document.getElementById("undo") as HTMLButtonElement;
const submitBtn = document.getElementById("submit") as HTMLButtonElement;
const nextBtn = document.getElementById("next") as HTMLButtonElement;

const transport = new WsTransport(window.location.origin, (url) => new WebSocket(url));
const session = new ClientSession(transport);

let background: HTMLImageElement | null = null;
let drawing = false;
let busy = false;

function setStatus(text: string, isError = false): void {
  statusEl.textContent = text;
  statusEl.className = isError ? "error" : "";
}

function redraw(): void {
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  if (background) {
    ctx.save();
    ctx.globalAlpha = FAINT_OPACITY;
    ctx.drawImage(background, 0, 0, canvas.width, canvas.height);
    ctx.restore();
  }
  ctx.strokeStyle = "#1a1a1a";
  ctx.lineWidth = 2;
  ctx.lineCap = "round";
  ctx.lineJoin = "round";
  for (const stroke of session.strokes) {
    if (stroke.length === 0) {
      continue;
    }
    ctx.beginPath();
    ctx.moveTo(stroke[0][0], stroke[0][1]);
    for (const [x, y] of stroke.slice(1)) {
      ctx.lineTo(x, y);
    }
    ctx.stroke();
  }
}

function flashEvents(): void {
  const last = session.toasts[session.toasts.length - 1];
  if (!last) {
    return;
  }
  toastEl.textContent = last.kind === "reward" ? `+${last.value}` : `-${last.value}`;
  toastEl.className = last.kind;
  window.setTimeout(() => {
    toastEl.className = "";
  }, 400);
}

session.onScore = (reply) => {
  scoreEl.textContent = session.score.toFixed(1);
  if (reply.events.length > 0) {
    flashEvents();
  }
};
session.onDeliveryFailure = () => setStatus("connection lost; stroke dropped", true);

function loadBackground(url: string): Promise<HTMLImageElement> {
  return new Promise((resolve, reject) => {
    const img = new Image();
    img.onload = () => resolve(img);
    img.onerror = () => reject(new Error("image failed to load"));
    img.src = url;
  });
}

async function startRound(): Promise<void> {
  busy = true;
  verdictEl.className = "hidden";
  setStatus("loading…");
  try {
    await session.start();
    canvas.width = session.width;
    canvas.height = session.height;
    background = await loadBackground(session.imageUrl).catch(() => null);
    scoreEl.textContent = "0.0";
    setStatus(`trace the contours of ${session.imageId}`);
    redraw();
  } catch (err) {
    setStatus(`cannot reach the game service — ${String(err)}; press Next to retry`, true);
  } finally {
    busy = false;
  }
}

function canvasPoint(ev: PointerEvent): [number, number] {
  const rect = canvas.getBoundingClientRect();
  return [
    ((ev.clientX - rect.left) / rect.width) * canvas.width,
    ((ev.clientY - rect.top) / rect.height) * canvas.height,
  ];
}

canvas.addEventListener("pointerdown", (ev) => {
  if (session.status !== "open" || busy) {
    return;
  }
  drawing = true;
  canvas.setPointerCapture(ev.pointerId);
  const [x, y] = canvasPoint(ev);
  session.beginStroke(x, y);
  redraw();
});

canvas.addEventListener("pointermove", (ev) => {
  if (!drawing || session.status !== "open") {
    return;
  }
  const [x, y] = canvasPoint(ev);
  session.extendStroke(x, y);
  redraw();
});

function endStroke(): void {
  if (drawing) {
    drawing = false;
    session.flush();
  }
}
canvas.addEventListener("pointerup", endStroke);
canvas.addEventListener("pointercancel", endStroke);

window.setInterval(() => {
  if (session.status === "open" && !busy) {
    session.flush();
  }
}, BATCH_MS);

undoBtn.addEventListener("click", async () => {
  if (session.status !== "open" || busy) {
    return;
  }
  busy = true;
  try {
    await session.undo();
    scoreEl.textContent = session.score.toFixed(1);
    redraw();
  } catch (err) {
    setStatus(`undo failed: ${String(err)}`, true);
  } finally {
    busy = false;
  }
});

submitBtn.addEventListener("click", async () => {
  if (session.status !== "open" || busy) {
    return; // double-submit guard
  }
  busy = true;
  try {
    const verdict = await session.submit();
    verdictEl.className = verdict.status;
    verdictEl.textContent =
      verdict.status === "accepted"
        ? `Accepted! You covered ${(verdict.score_fraction * 100).toFixed(0)}% of the contours.`
        : `Rejected — only ${(verdict.score_fraction * 100).toFixed(0)}% covered. Try the next one!`;
    setStatus("round finished; press Next to play again");
  } catch (err) {
    setStatus(`submit failed: ${String(err)}`, true);
  } finally {
    busy = false;
  }
});

nextBtn.addEventListener("click", () => {
  if (!busy) {
    void startRound();
  }
});

void startRound();
