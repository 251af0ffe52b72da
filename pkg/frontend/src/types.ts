/** Wire types for the game session API. The browser never re-derives any
 * of this: every field is taken verbatim from the server. */

export type RoleName = "eloise" | "abelard";
export type TerminalName = RoleName | "neither";
export type TupleStatus = "+" | "-" | "?";

export interface RelationTuple {
  elems: string[];
  status: TupleStatus;
}

export interface RelationPayload {
  arity: number;
  mode: "partial" | "total";
  tuples: RelationTuple[];
}

export interface FunctionEntry {
  args: string[];
  value: string;
}

export interface FunctionPayload {
  arity: number;
  entries: FunctionEntry[];
}

export interface PositionPayload {
  hash: string;
  domain: string[];
  relations: Record<string, RelationPayload>;
  functions: Record<string, FunctionPayload>;
  constants: Record<string, string | null>;
  assignment: Record<string, string>;
  formulaText: string;
  activeRange: [number, number];
  activeText: string;
  nodeId: number;
  verifier: RoleName;
}

export interface MovePayload {
  mover: "verifier" | "falsifier" | "forced";
  kind: string;
  [key: string]: unknown;
}

export interface Choice {
  index: number;
  mover: string;
  player: RoleName;
  label: string;
  move: MovePayload;
}

export interface HistoryEntry {
  by: "human" | "engine" | "auto";
  player: RoleName | null;
  move: MovePayload;
  position: string;
}

export interface SessionState {
  id: string;
  position: PositionPayload;
  choices: Choice[];
  history: HistoryEntry[];
  terminal: TerminalName | null;
  enginePending: boolean;
  engineReply?: HistoryEntry[];
}

export interface HintResponse {
  verdict: "verified" | "falsified" | "indeterminate" | "unknown";
  depth: number | null;
  budgetUsed: number;
  suggestedChoice: number | null;
  basis: string | null;
}

export interface SessionConfig {
  deleteMiss?: "lose" | "ignore";
  claimUnbound?: "neither" | "lose";
  freshStatus?: "undefined" | "negative";
  engineBudget?: number;
}

export interface NewSessionRequest {
  model: string | null;
  formula: string;
  humanRole: RoleName;
  config?: SessionConfig;
}

export function isSessionState(value: unknown): value is SessionState {
  if (typeof value !== "object" || value === null) {
    return false;
  }
  const v = value as Record<string, unknown>;
  return (
    typeof v.id === "string" &&
    typeof v.position === "object" && v.position !== null &&
    Array.isArray(v.choices) &&
    Array.isArray(v.history) &&
    (v.terminal === null || typeof v.terminal === "string")
  );
}
