// Typed client for the game service. Strokes stream over a WebSocket with an
// HTTP POST fallback; replies never contain field coordinates.

export type PointXY = [number, number];

export interface NextImage {
  image_id: string;
  image_url: string;
}

export interface SessionInfo {
  session_id: string;
  width: number;
  height: number;
}

export interface ScoreEventFlash {
  kind: "reward" | "penalty";
  value: number;
}

export interface ScoreReply {
  delta: number;
  score: number;
  events: ScoreEventFlash[];
}

export interface Verdict {
  status: "accepted" | "rejected";
  score_fraction: number;
}

export interface Transport {
  nextImage(): Promise<NextImage>;
  openSession(imageId: string): Promise<SessionInfo>;
  sendStroke(sessionId: string, points: PointXY[], newStroke: boolean): Promise<ScoreReply>;
  submit(sessionId: string): Promise<Verdict>;
  imageUrl(path: string): string;
  close(): void;
}

async function asJson<T>(resp: Response): Promise<T> {
  if (!resp.ok) {
    throw new Error(`HTTP ${resp.status}: ${await resp.text()}`);
  }
  return (await resp.json()) as T;
}

/** Plain fetch transport; strokes go through the POST fallback endpoint.
 * `onRaw` observes every parsed server payload (used by the schema tests). */
export class HttpTransport implements Transport {
  constructor(
    readonly baseUrl: string,
    protected readonly onRaw?: (payload: unknown) => void,
  ) {}

  private async get<T>(path: string): Promise<T> {
    const body = await asJson<T>(await fetch(this.baseUrl + path));
    this.onRaw?.(body);
    return body;
  }

  private async post<T>(path: string, payload?: unknown): Promise<T> {
    const body = await asJson<T>(
      await fetch(this.baseUrl + path, {
        method: "POST",
        headers: { "content-type": "application/json" },
        body: payload === undefined ? undefined : JSON.stringify(payload),
      }),
    );
    this.onRaw?.(body);
    return body;
  }

  nextImage(): Promise<NextImage> {
    return this.get("/images/next");
  }

  openSession(imageId: string): Promise<SessionInfo> {
    return this.post("/session", { image_id: imageId });
  }

  sendStroke(sessionId: string, points: PointXY[], newStroke: boolean): Promise<ScoreReply> {
    return this.post(`/session/${sessionId}/stroke`, { points, new_stroke: newStroke });
  }

  submit(sessionId: string): Promise<Verdict> {
    return this.post(`/session/${sessionId}/submit`);
  }

  imageUrl(path: string): string {
    return this.baseUrl + path;
  }

  close(): void {}
}

// the write-side surface both browser WebSocket and the `ws` package satisfy
interface WsLike {
  send(data: string): void;
  close(): void;
  onopen: ((ev: any) => void) | null;
  onmessage: ((ev: any) => void) | null;
  onerror: ((ev: any) => void) | null;
  onclose: ((ev: any) => void) | null;
}

export type WsFactory = (url: string) => WsLike;

/**
 * Streams stroke batches over one WebSocket per session. The server processes
 * a session's messages serially, so replies are matched FIFO. A dead socket is
 * reopened on the next send; unanswered batches are rejected so the caller's
 * outbox can resend them in order.
 */
export class WsTransport extends HttpTransport {
  private socket: WsLike | null = null;
  private socketSession = "";
  private waiting: {
    resolve: (r: ScoreReply) => void;
    reject: (e: Error) => void;
  }[] = [];

  constructor(
    baseUrl: string,
    private readonly wsFactory: WsFactory,
    onRaw?: (payload: unknown) => void,
  ) {
    super(baseUrl, onRaw);
  }

  private wsUrl(sessionId: string): string {
    return this.baseUrl.replace(/^http/, "ws") + `/session/${sessionId}/stream`;
  }

  private failAllWaiting(reason: string): void {
    const waiting = this.waiting;
    this.waiting = [];
    for (const w of waiting) {
      w.reject(new Error(reason));
    }
  }

  private connect(sessionId: string): Promise<WsLike> {
    return new Promise((resolve, reject) => {
      const ws = this.wsFactory(this.wsUrl(sessionId));
      ws.onopen = () => {
        this.socket = ws;
        this.socketSession = sessionId;
        resolve(ws);
      };
      ws.onerror = () => {
        if (this.socket === ws) {
          this.socket = null;
        }
        this.failAllWaiting("websocket error");
        reject(new Error("websocket connect failed"));
      };
      ws.onclose = () => {
        if (this.socket === ws) {
          this.socket = null;
        }
        this.failAllWaiting("websocket closed");
      };
      ws.onmessage = (ev) => {
        const payload = JSON.parse(String(ev.data)) as
          | ({ type: "score" } & ScoreReply)
          | { type: "error"; detail?: string };
        this.onRaw?.(payload);
        const next = this.waiting.shift();
        if (!next) {
          return;
        }
        if (payload.type === "score") {
          next.resolve({ delta: payload.delta, score: payload.score, events: payload.events });
        } else {
          next.reject(new Error(payload.detail ?? "server error"));
        }
      };
    });
  }

  override async sendStroke(
    sessionId: string,
    points: PointXY[],
    newStroke: boolean,
  ): Promise<ScoreReply> {
    let ws = this.socket;
    if (ws === null || this.socketSession !== sessionId) {
      this.socket?.close();
      ws = await this.connect(sessionId);
    }
    return new Promise<ScoreReply>((resolve, reject) => {
      this.waiting.push({ resolve, reject });
      try {
        ws.send(JSON.stringify({ type: "stroke_points", points, new_stroke: newStroke }));
      } catch (err) {
        this.waiting.pop();
        reject(err instanceof Error ? err : new Error(String(err)));
      }
    });
  }

  override close(): void {
    this.socket?.close();
    this.socket = null;
  }
}
