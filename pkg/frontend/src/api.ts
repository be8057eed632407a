/** Typed client for the run service plus a polling loop. */

import {
  Archive,
  ArchiveSchema,
  Rule,
  RuleSchema,
  RunState,
  RunStateSchema,
  RunSummary,
  RunSummarySchema,
  UserFeedback,
} from "./schema.js";
import { z } from "zod";

export class ApiError extends Error {
  constructor(readonly status: number, message: string) {
    super(message);
  }
}

async function request<T>(url: string, schema: z.ZodType<T>, init?: RequestInit): Promise<T> {
  const resp = await fetch(url, {
    headers: { "content-type": "application/json" },
    ...init,
  });
  if (!resp.ok) {
    throw new ApiError(resp.status, `${init?.method ?? "GET"} ${url}: ${resp.status}`);
  }
  return schema.parse(await resp.json());
}

export class ApiClient {
  constructor(readonly baseUrl: string) {}

  listRuns(): Promise<RunSummary[]> {
    return request(`${this.baseUrl}/runs`, z.array(RunSummarySchema));
  }

  createRun(config: unknown): Promise<{ id: string }> {
    return request(`${this.baseUrl}/runs`, z.object({ id: z.string() }), {
      method: "POST",
      body: JSON.stringify(config),
    });
  }

  state(runId: string): Promise<RunState> {
    return request(`${this.baseUrl}/runs/${runId}/state`, RunStateSchema);
  }

  rules(runId: string): Promise<Rule[]> {
    return request(`${this.baseUrl}/runs/${runId}/rules`, z.array(RuleSchema));
  }

  archive(runId: string): Promise<Archive> {
    return request(`${this.baseUrl}/runs/${runId}/archive`, ArchiveSchema);
  }

  async postFeedback(runId: string, feedback: UserFeedback): Promise<void> {
    await request(`${this.baseUrl}/runs/${runId}/feedback`,
      z.object({ status: z.string() }),
      { method: "POST", body: JSON.stringify(feedback) });
  }

  async pause(runId: string): Promise<void> {
    await request(`${this.baseUrl}/runs/${runId}/pause`,
      z.object({ status: z.string() }), { method: "POST", body: "{}" });
  }

  async resume(runId: string): Promise<void> {
    await request(`${this.baseUrl}/runs/${runId}/resume`,
      z.object({ status: z.string() }), { method: "POST", body: "{}" });
  }
}

export interface PollHandlers {
  onState(state: RunState): void;
  onError(err: unknown): void;
}

/** Polls run state on an interval; reports errors instead of failing silently. */
export class RunPoller {
  private timer: ReturnType<typeof setInterval> | null = null;

  constructor(
    private readonly client: ApiClient,
    private readonly runId: string,
    private readonly handlers: PollHandlers,
    readonly intervalMs = 1000,
  ) {}

  start(): void {
    if (this.timer !== null) return;
    const tick = async () => {
      try {
        this.handlers.onState(await this.client.state(this.runId));
      } catch (err) {
        this.handlers.onError(err);
      }
    };
    void tick();
    this.timer = setInterval(tick, this.intervalMs);
  }

  stop(): void {
    if (this.timer !== null) {
      clearInterval(this.timer);
      this.timer = null;
    }
  }
}
