// Client-side round state: the local stroke buffer, the batched stroke
// stream, live score, and the submit/undo lifecycle.
//
// Invariant: the point batches handed to the transport replay to exactly the
// strokes in the local buffer, so what the player sees is what the server
// scored. The server never sends field coordinates back.

import type {
  PointXY,
  ScoreEventFlash,
  ScoreReply,
  Transport,
  Verdict,
} from "./api.js";

export type RoundStatus = "idle" | "open" | "accepted" | "rejected";

interface Batch {
  points: PointXY[];
  newStroke: boolean;
}

export interface SessionOptions {
  /** ms between delivery retries after a dropped connection */
  retryDelayMs?: number;
  /** give up resending after this many consecutive failures */
  maxRetries?: number;
}

const MAX_TOASTS = 8;

function sleep(ms: number): Promise<void> {
  return new Promise((resolve) => setTimeout(resolve, ms));
}

export class ClientSession {
  imageId = "";
  imageUrl = "";
  sessionId = "";
  width = 0;
  height = 0;
  status: RoundStatus = "idle";
  score = 0;
  /** exactly the strokes rendered on the canvas */
  strokes: PointXY[][] = [];
  toasts: ScoreEventFlash[] = [];
  onScore?: (reply: ScoreReply) => void;
  onDeliveryFailure?: (err: Error) => void;

  private pending: PointXY[] = [];
  private pendingNewStroke = false;
  private sent: Batch[] = [];
  private outbox: Batch[] = [];
  private delivering: Promise<void> = Promise.resolve();
  private readonly retryDelayMs: number;
  private readonly maxRetries: number;

  constructor(
    private readonly transport: Transport,
    opts: SessionOptions = {},
  ) {
    this.retryDelayMs = opts.retryDelayMs ?? 500;
    this.maxRetries = opts.maxRetries ?? 20;
  }

  /** Fetch the next image and open a scoring session for it. */
  async start(): Promise<void> {
    if (this.status === "open") {
      throw new Error("round already open");
    }
    const image = await this.transport.nextImage();
    const info = await this.transport.openSession(image.image_id);
    this.imageId = image.image_id;
    this.imageUrl = this.transport.imageUrl(image.image_url);
    this.sessionId = info.session_id;
    this.width = info.width;
    this.height = info.height;
    this.status = "open";
    this.score = 0;
    this.strokes = [];
    this.toasts = [];
    this.pending = [];
    this.pendingNewStroke = false;
    this.sent = [];
    this.outbox = [];
  }

  private assertOpen(): void {
    if (this.status !== "open") {
      throw new Error(`round is ${this.status}`);
    }
  }

  beginStroke(x: number, y: number): void {
    this.assertOpen();
    this.flush(); // close out any unsent tail of the previous stroke
    const p: PointXY = [x, y];
    this.strokes.push([p]);
    this.pending = [p];
    this.pendingNewStroke = true;
  }

  extendStroke(x: number, y: number): void {
    this.assertOpen();
    if (this.strokes.length === 0) {
      this.beginStroke(x, y);
      return;
    }
    const p: PointXY = [x, y];
    this.strokes[this.strokes.length - 1].push(p);
    this.pending.push(p);
  }

  /** Hand buffered pointer samples to the delivery queue (the ~30 ms tick). */
  flush(): void {
    if (this.pending.length === 0) {
      return;
    }
    const batch: Batch = { points: this.pending, newStroke: this.pendingNewStroke };
    this.pending = [];
    this.pendingNewStroke = false;
    this.sent.push(batch);
    this.enqueue(batch);
  }

  private enqueue(batch: Batch): void {
    this.outbox.push(batch);
    this.delivering = this.delivering.then(() => this.deliverHead());
  }

  private async deliverHead(): Promise<void> {
    const batch = this.outbox[0];
    if (!batch) {
      return;
    }
    for (let attempt = 0; ; attempt++) {
      try {
        const reply = await this.transport.sendStroke(
          this.sessionId,
          batch.points,
          batch.newStroke,
        );
        this.outbox.shift();
        this.score = reply.score;
        for (const ev of reply.events) {
          this.toasts.push(ev);
        }
        if (this.toasts.length > MAX_TOASTS) {
          this.toasts.splice(0, this.toasts.length - MAX_TOASTS);
        }
        this.onScore?.(reply);
        return;
      } catch (err) {
        if (attempt >= this.maxRetries) {
          this.outbox.shift();
          this.onDeliveryFailure?.(err instanceof Error ? err : new Error(String(err)));
          return;
        }
        await sleep(this.retryDelayMs);
      }
    }
  }

  /** Resolves when every queued batch has been delivered. */
  async drain(): Promise<void> {
    this.flush();
    let tail;
    do {
      tail = this.delivering;
      await tail;
    } while (tail !== this.delivering); // new batches may have been queued meanwhile
  }

  /** The replay-fidelity invariant: sent + pending batches rebuild the strokes. */
  replaysToLocalBuffer(): boolean {
    const rebuilt: PointXY[][] = [];
    const batches = this.pending.length
      ? [...this.sent, { points: this.pending, newStroke: this.pendingNewStroke }]
      : this.sent;
    for (const b of batches) {
      if (b.newStroke || rebuilt.length === 0) {
        rebuilt.push([...b.points]);
      } else {
        rebuilt[rebuilt.length - 1].push(...b.points);
      }
    }
    return JSON.stringify(rebuilt) === JSON.stringify(this.strokes);
  }

  /**
   * Remove the last stroke. Server-side scores cannot be un-earned, so the
   * round is replayed: a fresh session is opened and the remaining strokes
   * are re-sent in order.
   */
  async undo(): Promise<void> {
    this.assertOpen();
    await this.drain();
    if (this.strokes.length === 0) {
      return;
    }
    this.strokes.pop();
    const info = await this.transport.openSession(this.imageId);
    this.sessionId = info.session_id;
    this.score = 0;
    this.toasts = [];
    this.sent = [];
    this.outbox = [];
    for (const stroke of this.strokes) {
      const batch: Batch = { points: [...stroke], newStroke: true };
      this.sent.push(batch);
      this.enqueue(batch);
    }
    await this.drain();
  }

  /** Close the round: deliver everything, then ask for the verdict. */
  async submit(): Promise<Verdict> {
    this.assertOpen();
    await this.drain();
    const verdict = await this.transport.submit(this.sessionId);
    this.status = verdict.status;
    return verdict;
  }
}
