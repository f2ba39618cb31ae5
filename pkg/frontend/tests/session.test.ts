import { describe, expect, it } from "vitest";

import type {
  NextImage,
  PointXY,
  ScoreReply,
  SessionInfo,
  Transport,
  Verdict,
} from "../src/api.js";
import { ClientSession } from "../src/session.js";

interface SentRecord {
  sessionId: string;
  points: PointXY[];
  newStroke: boolean;
}

class MockTransport implements Transport {
  sent: SentRecord[] = [];
  sessionsOpened = 0;
  submitted: string[] = [];
  failNextSends = 0;
  scorePerBatch = 0.5;
  private runningScore = 0;

  async nextImage(): Promise<NextImage> {
    return { image_id: "img-1", image_url: "/images/img-1" };
  }

  async openSession(): Promise<SessionInfo> {
    this.sessionsOpened += 1;
    this.runningScore = 0;
    return { session_id: `s${this.sessionsOpened}`, width: 240, height: 200 };
  }

  async sendStroke(
    sessionId: string,
    points: PointXY[],
    newStroke: boolean,
  ): Promise<ScoreReply> {
    if (this.failNextSends > 0) {
      this.failNextSends -= 1;
      throw new Error("connection dropped");
    }
    this.sent.push({ sessionId, points, newStroke });
    this.runningScore += this.scorePerBatch;
    const kind = this.scorePerBatch >= 0 ? "reward" : "penalty";
    return {
      delta: this.scorePerBatch,
      score: this.runningScore,
      events: [{ kind, value: Math.abs(this.scorePerBatch) }],
    };
  }

  async submit(sessionId: string): Promise<Verdict> {
    this.submitted.push(sessionId);
    return { status: this.runningScore >= 1 ? "accepted" : "rejected", score_fraction: 0.8 };
  }

  imageUrl(path: string): string {
    return `http://test${path}`;
  }

  close(): void {}
}

class FailingTransport extends MockTransport {
  override async nextImage(): Promise<NextImage> {
    throw new Error("service down");
  }
}

function session(transport: Transport): ClientSession {
  return new ClientSession(transport, { retryDelayMs: 1, maxRetries: 3 });
}

describe("start_round", () => {
  it("opens a session sized to the image and zeroes the score", async () => {
    const t = new MockTransport();
    const s = session(t);
    await s.start();
    expect(s.status).toBe("open");
    expect([s.width, s.height]).toEqual([240, 200]);
    expect(s.score).toBe(0);
    expect(s.strokes).toEqual([]);
  });

  it("surfaces a service failure without corrupting state", async () => {
    const s = session(new FailingTransport());
    await expect(s.start()).rejects.toThrow("service down");
    expect(s.status).toBe("idle");
  });
});

describe("draw_and_score", () => {
  it("batches pointer samples per flush tick", async () => {
    const t = new MockTransport();
    const s = session(t);
    await s.start();
    s.beginStroke(1, 1);
    s.extendStroke(2, 1);
    s.extendStroke(3, 1);
    s.flush();
    s.extendStroke(4, 1);
    s.flush();
    await s.drain();
    expect(t.sent.length).toBe(2);
    expect(t.sent[0].newStroke).toBe(true);
    expect(t.sent[0].points).toEqual([[1, 1], [2, 1], [3, 1]]);
    expect(t.sent[1].newStroke).toBe(false);
    expect(t.sent[1].points).toEqual([[4, 1]]);
  });

  it("sends nothing while the pointer is idle", async () => {
    const t = new MockTransport();
    const s = session(t);
    await s.start();
    s.flush();
    s.flush();
    await s.drain();
    expect(t.sent.length).toBe(0);
  });

  it("tracks the server score and keeps event toasts", async () => {
    const t = new MockTransport();
    const s = session(t);
    await s.start();
    s.beginStroke(0, 0);
    s.extendStroke(5, 5);
    await s.drain();
    expect(s.score).toBe(0.5);
    expect(s.toasts).toEqual([{ kind: "reward", value: 0.5 }]);
  });

  it("buffers and resends in order after a dropped connection", async () => {
    const t = new MockTransport();
    const s = session(t);
    await s.start();
    t.failNextSends = 2;
    s.beginStroke(1, 1);
    s.extendStroke(2, 2);
    s.flush();
    s.beginStroke(9, 9);
    s.extendStroke(8, 8);
    await s.drain();
    expect(t.sent.map((r) => r.points[0])).toEqual([[1, 1], [9, 9]]);
  });

  it("replays to exactly the local stroke buffer however strokes are chunked", async () => {
    const t = new MockTransport();
    const s = session(t);
    await s.start();
    s.beginStroke(0, 0);
    for (let i = 1; i <= 7; i++) {
      s.extendStroke(i, 0);
      if (i % 3 === 0) {
        s.flush();
      }
    }
    s.beginStroke(10, 10);
    s.extendStroke(11, 11);
    expect(s.replaysToLocalBuffer()).toBe(true);
    await s.drain();
    expect(s.replaysToLocalBuffer()).toBe(true);
    const replayed: PointXY[][] = [];
    for (const rec of t.sent) {
      if (rec.newStroke) {
        replayed.push([...rec.points]);
      } else {
        replayed[replayed.length - 1].push(...rec.points);
      }
    }
    expect(replayed).toEqual(s.strokes);
  });

  it("reflects penalties as score decreases with penalty toasts", async () => {
    const t = new MockTransport();
    const s = session(t);
    await s.start();
    s.beginStroke(0, 0);
    s.extendStroke(1, 1);
    await s.drain();
    const before = s.score;
    t.scorePerBatch = -0.5; // the next batch strays near a penalty point
    s.beginStroke(50, 50);
    s.extendStroke(51, 51);
    await s.drain();
    expect(s.score).toBeLessThan(before);
    expect(s.toasts[s.toasts.length - 1].kind).toBe("penalty");
  });

  it("never stores reward coordinates from score replies", async () => {
    const t = new MockTransport();
    const s = session(t);
    await s.start();
    s.beginStroke(0, 0);
    s.extendStroke(1, 1);
    await s.drain();
    for (const toast of s.toasts) {
      expect(Object.keys(toast).sort()).toEqual(["kind", "value"]);
    }
  });
});

describe("undo", () => {
  it("opens a fresh session and replays the remaining strokes", async () => {
    const t = new MockTransport();
    const s = session(t);
    await s.start();
    s.beginStroke(0, 0);
    s.extendStroke(1, 0);
    s.flush();
    s.beginStroke(5, 5);
    s.extendStroke(6, 5);
    s.flush();
    await s.drain();
    expect(s.strokes.length).toBe(2);

    await s.undo();
    expect(s.strokes.length).toBe(1);
    expect(t.sessionsOpened).toBe(2);
    const replayBatches = t.sent.filter((r) => r.sessionId === "s2");
    expect(replayBatches.length).toBe(1);
    expect(replayBatches[0].points).toEqual([[0, 0], [1, 0]]);
    expect(s.replaysToLocalBuffer()).toBe(true);
    expect(s.score).toBe(0.5); // one batch rescored on the fresh session
  });

  it("is a no-op on an empty canvas", async () => {
    const t = new MockTransport();
    const s = session(t);
    await s.start();
    await s.undo();
    expect(t.sessionsOpened).toBe(1);
  });
});

describe("submit_round", () => {
  it("flushes the tail, submits once, and closes the round", async () => {
    const t = new MockTransport();
    const s = session(t);
    await s.start();
    s.beginStroke(0, 0);
    s.extendStroke(1, 1);
    s.beginStroke(2, 2);
    s.extendStroke(3, 3);
    const verdict = await s.submit();
    expect(t.sent.length).toBe(2); // unsent tail delivered before the verdict
    expect(verdict.status).toBe("accepted");
    expect(s.status).toBe("accepted");
  });

  it("guards against double submit", async () => {
    const t = new MockTransport();
    const s = session(t);
    await s.start();
    await s.submit();
    await expect(s.submit()).rejects.toThrow();
    expect(t.submitted.length).toBe(1);
  });

  it("rejects drawing after the round closed", async () => {
    const t = new MockTransport();
    const s = session(t);
    await s.start();
    await s.submit();
    expect(() => s.beginStroke(0, 0)).toThrow();
  });
});
