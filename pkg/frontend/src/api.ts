import type {
  HintResponse,
  NewSessionRequest,
  SessionState,
} from "./types.js";
import { isSessionState } from "./types.js";

export class ApiError extends Error {
  constructor(readonly status: number, message: string) {
    super(message);
  }
}

/** Thin fetch wrapper for the session endpoints. */
export class ApiClient {
  constructor(readonly baseUrl: string) {}

  private async request(method: string, path: string, body?: unknown): Promise<unknown> {
    const resp = await fetch(this.baseUrl + path, {
      method,
      headers: { "Content-Type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    const raw = await resp.text();
    const payload: unknown = raw ? JSON.parse(raw) : null;
    if (!resp.ok) {
      const message =
        typeof payload === "object" && payload !== null && "error" in payload
          ? String((payload as { error: unknown }).error)
          : `${method} ${path} failed with ${resp.status}`;
      throw new ApiError(resp.status, message);
    }
    return payload;
  }

  async createSession(req: NewSessionRequest): Promise<SessionState> {
    const payload = await this.request("POST", "/api/session", req);
    if (!isSessionState(payload)) {
      throw new ApiError(500, "malformed session payload");
    }
    return payload;
  }

  async getSession(id: string): Promise<SessionState> {
    const payload = await this.request("GET", `/api/session/${id}`);
    if (!isSessionState(payload)) {
      throw new ApiError(500, "malformed session payload");
    }
    return payload;
  }

  async submitMove(id: string, choiceIndex: number): Promise<SessionState> {
    const payload = await this.request("POST", `/api/session/${id}/move`, { choiceIndex });
    if (!isSessionState(payload)) {
      throw new ApiError(500, "malformed session payload");
    }
    return payload;
  }

  async hint(id: string, budget: number): Promise<HintResponse> {
    return (await this.request("POST", `/api/session/${id}/hint`, { budget })) as HintResponse;
  }

  async deleteSession(id: string): Promise<void> {
    await this.request("DELETE", `/api/session/${id}`);
  }
}
