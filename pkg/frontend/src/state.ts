import type { ApiClient } from "./api.js";
import type {
  Choice,
  HintResponse,
  HistoryEntry,
  PositionPayload,
  RoleName,
  SessionConfig,
  TerminalName,
} from "./types.js";

/** JSON with recursively sorted object keys: the canonical serialization
 * used to compare what the UI displays against what the engine replays. */
export function canonicalize(value: unknown): string {
  if (Array.isArray(value)) {
    return "[" + value.map(canonicalize).join(",") + "]";
  }
  if (typeof value === "object" && value !== null) {
    const obj = value as Record<string, unknown>;
    const parts = Object.keys(obj)
      .sort()
      .map((k) => JSON.stringify(k) + ":" + canonicalize(obj[k]));
    return "{" + parts.join(",") + "}";
  }
  return JSON.stringify(value);
}

export interface LogEntry {
  by: "human" | "engine" | "auto";
  player: RoleName | null;
  text: string;
}

export interface ViewState {
  sessionId: string | null;
  position: PositionPayload | null;
  choices: Choice[];
  log: LogEntry[];
  terminal: TerminalName | null;
  pending: boolean;
  error: string | null;
  hint: HintResponse | null;
  humanRole: RoleName;
}

function describe(entry: HistoryEntry): string {
  const m = entry.move;
  switch (m.kind) {
    case "disjunct":
      return `picks the ${String(m.branch)} branch`;
    case "witness":
      return `lets ${String(m.var)} = ${String(m.element)}`;
    case "tuple":
      return `picks the tuple (${(m.elements as string[]).join(", ")})`;
    case "claim_binder":
      return `jumps back to claim binder ${String(m.binder)}`;
    case "descend":
      return "continues";
    default:
      return m.kind;
  }
}

/** Game session store.
 *
 * Holds exactly what the server last said: positions, choices, history and
 * terminals all come from response payloads, never from local rules.  One
 * request may be in flight at a time; submissions while pending are
 * rejected.  Every position the UI displays is also recorded in canonical
 * form so a test can replay the move log through the engine and compare.
 */
export class GameStore {
  state: ViewState = {
    sessionId: null,
    position: null,
    choices: [],
    log: [],
    terminal: null,
    pending: false,
    error: null,
    hint: null,
    humanRole: "eloise",
  };

  /** Canonical serialization of every position shown, in display order. */
  readonly displayedPositions: string[] = [];
  /** Choice indexes the human submitted, in order, for replay checks. */
  readonly submittedChoices: number[] = [];

  private listeners: Array<(s: ViewState) => void> = [];

  constructor(private readonly client: ApiClient) {}

  onChange(listener: (s: ViewState) => void): void {
    this.listeners.push(listener);
  }

  private emit(): void {
    for (const listener of this.listeners) {
      listener(this.state);
    }
  }

  private showPosition(position: PositionPayload): void {
    this.state.position = position;
    this.displayedPositions.push(canonicalize(position));
  }

  private appendLog(entries: HistoryEntry[]): void {
    for (const entry of entries) {
      this.state.log.push({ by: entry.by, player: entry.player, text: describe(entry) });
    }
  }

  async newGame(model: string | null, formula: string, role: RoleName,
                config?: SessionConfig): Promise<void> {
    if (this.state.pending) {
      throw new Error("a request is already in flight");
    }
    this.state = { ...this.state, pending: true, error: null, hint: null };
    this.emit();
    try {
      const session = await this.client.createSession({
        model, formula, humanRole: role, config,
      });
      this.displayedPositions.length = 0;
      this.submittedChoices.length = 0;
      this.state = {
        sessionId: session.id,
        position: null,
        choices: session.choices,
        log: [],
        terminal: session.terminal,
        pending: false,
        error: null,
        hint: null,
        humanRole: role,
      };
      this.appendLog(session.history);
      this.showPosition(session.position);
    } catch (err) {
      this.state = { ...this.state, pending: false, error: String(err) };
    }
    this.emit();
  }

  async submitChoice(index: number): Promise<void> {
    if (this.state.pending) {
      throw new Error("a request is already in flight");
    }
    const id = this.state.sessionId;
    if (id === null) {
      throw new Error("no active session");
    }
    if (!this.state.choices.some((c) => c.index === index)) {
      throw new Error(`choice ${index} is not on offer`);
    }
    this.state = { ...this.state, pending: true, error: null, hint: null };
    this.emit();
    try {
      const session = await this.client.submitMove(id, index);
      this.submittedChoices.push(index);
      this.state = {
        ...this.state,
        pending: false,
        choices: session.choices,
        terminal: session.terminal,
      };
      this.appendLog(session.engineReply ?? []);
      this.showPosition(session.position);
    } catch (err) {
      this.state = { ...this.state, pending: false, error: String(err) };
    }
    this.emit();
  }

  async requestHint(budget = 6): Promise<void> {
    if (this.state.pending) {
      throw new Error("a request is already in flight");
    }
    const id = this.state.sessionId;
    if (id === null) {
      throw new Error("no active session");
    }
    this.state = { ...this.state, pending: true, error: null };
    this.emit();
    try {
      const hint = await this.client.hint(id, budget);
      this.state = { ...this.state, pending: false, hint };
    } catch (err) {
      this.state = { ...this.state, pending: false, error: String(err) };
    }
    this.emit();
  }
}
