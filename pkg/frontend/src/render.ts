import type {
  PositionPayload,
  RelationPayload,
  TerminalName,
  TupleStatus,
} from "./types.js";
import type { ViewState } from "./state.js";

const SVG_NS = "http://www.w3.org/2000/svg";

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K, className?: string, text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) {
    node.className = className;
  }
  if (text !== undefined) {
    node.textContent = text;
  }
  return node;
}

export function statusClass(status: TupleStatus): string {
  return status === "+" ? "status-pos" : status === "-" ? "status-neg" : "status-undef";
}

function statusBadge(status: TupleStatus): HTMLElement {
  return el("span", `badge ${statusClass(status)}`, status);
}

/** Ring layout for the element graph. */
function ringPositions(n: number, radius: number, cx: number, cy: number): Array<[number, number]> {
  const out: Array<[number, number]> = [];
  for (let i = 0; i < n; i++) {
    const angle = (2 * Math.PI * i) / Math.max(n, 1) - Math.PI / 2;
    out.push([cx + radius * Math.cos(angle), cy + radius * Math.sin(angle)]);
  }
  return out;
}

function renderBinaryGraph(name: string, rel: RelationPayload, domain: string[]): SVGSVGElement {
  const size = 220;
  const svg = document.createElementNS(SVG_NS, "svg");
  svg.setAttribute("viewBox", `0 0 ${size} ${size}`);
  svg.setAttribute("class", "relation-graph");
  svg.setAttribute("data-relation", name);
  const coords = ringPositions(domain.length, size / 2 - 30, size / 2, size / 2);
  const at = new Map(domain.map((e, i) => [e, coords[i]] as const));
  for (const tuple of rel.tuples) {
    if (tuple.status === "?" && rel.mode === "partial" && domain.length > 4) {
      continue; // dense unknown grids stay readable as table rows instead
    }
    const [x1, y1] = at.get(tuple.elems[0])!;
    const [x2, y2] = at.get(tuple.elems[1])!;
    if (tuple.elems[0] === tuple.elems[1]) {
      const loop = document.createElementNS(SVG_NS, "circle");
      loop.setAttribute("cx", String(x1));
      loop.setAttribute("cy", String(y1 - 12));
      loop.setAttribute("r", "9");
      loop.setAttribute("class", `edge ${statusClass(tuple.status)}`);
      svg.appendChild(loop);
    } else {
      const line = document.createElementNS(SVG_NS, "line");
      line.setAttribute("x1", String(x1));
      line.setAttribute("y1", String(y1));
      line.setAttribute("x2", String(x2));
      line.setAttribute("y2", String(y2));
      line.setAttribute("class", `edge ${statusClass(tuple.status)}`);
      svg.appendChild(line);
    }
  }
  for (const e of domain) {
    const [x, y] = at.get(e)!;
    const dot = document.createElementNS(SVG_NS, "circle");
    dot.setAttribute("cx", String(x));
    dot.setAttribute("cy", String(y));
    dot.setAttribute("r", "6");
    dot.setAttribute("class", "element-node");
    svg.appendChild(dot);
    const label = document.createElementNS(SVG_NS, "text");
    label.setAttribute("x", String(x + 9));
    label.setAttribute("y", String(y + 4));
    label.textContent = e;
    svg.appendChild(label);
  }
  return svg;
}

function renderRelation(name: string, rel: RelationPayload, domain: string[]): HTMLElement {
  const box = el("div", "relation");
  box.appendChild(el("h4", undefined, `${name}/${rel.arity} (${rel.mode})`));
  if (rel.arity === 2 && domain.length > 0) {
    box.appendChild(renderBinaryGraph(name, rel, domain));
  }
  const table = el("table", "relation-table");
  for (const tuple of rel.tuples) {
    const row = el("tr", `tuple-row ${statusClass(tuple.status)}`);
    row.appendChild(el("td", undefined, `(${tuple.elems.join(", ")})`));
    const cell = el("td");
    cell.appendChild(statusBadge(tuple.status));
    row.appendChild(cell);
    table.appendChild(row);
  }
  box.appendChild(table);
  return box;
}

function renderModel(position: PositionPayload): HTMLElement {
  const panel = el("div", "model-panel");
  const domainLine = el("div", "domain");
  domainLine.appendChild(el("strong", undefined, "domain: "));
  if (position.domain.length === 0) {
    domainLine.appendChild(el("em", undefined, "(empty)"));
  }
  for (const e of position.domain) {
    domainLine.appendChild(el("span", "element-chip", e));
  }
  panel.appendChild(domainLine);
  for (const name of Object.keys(position.relations).sort()) {
    panel.appendChild(renderRelation(name, position.relations[name], position.domain));
  }
  const funcNames = Object.keys(position.functions).sort();
  for (const name of funcNames) {
    const fn = position.functions[name];
    const entries = fn.entries
      .map((entry) => `(${entry.args.join(", ")}) -> ${entry.value}`)
      .join("  ");
    panel.appendChild(el("div", "function-line", `${name}/${fn.arity}: ${entries || "(empty)"}`));
  }
  const constNames = Object.keys(position.constants).sort();
  if (constNames.length > 0) {
    const line = constNames
      .map((c) => `${c} = ${position.constants[c] ?? "undef"}`)
      .join(", ");
    panel.appendChild(el("div", "constants-line", line));
  }
  return panel;
}

function renderFormula(position: PositionPayload): HTMLElement {
  const [start, end] = position.activeRange;
  const text = position.formulaText;
  const line = el("div", "formula-line");
  line.appendChild(el("span", undefined, text.slice(0, start)));
  line.appendChild(el("mark", "active-subformula", text.slice(start, end)));
  line.appendChild(el("span", undefined, text.slice(end)));
  return line;
}

function renderAssignment(position: PositionPayload): HTMLElement {
  const entries = Object.keys(position.assignment).sort();
  const text = entries.length
    ? entries.map((v) => `${v} = ${position.assignment[v]}`).join(", ")
    : "(empty)";
  return el("div", "assignment-panel", `assignment: ${text}`);
}

export function terminalText(terminal: TerminalName): string {
  if (terminal === "eloise") {
    return "Eloise wins";
  }
  if (terminal === "abelard") {
    return "Abelard wins";
  }
  return "Neither wins";
}

export interface RenderCallbacks {
  onChoice: (index: number) => void;
  onHint: () => void;
}

/** Rebuild the game panels from the current state.  Pure projection of
 * what the server sent; no game rules are evaluated here. */
export function render(state: ViewState, root: HTMLElement, callbacks: RenderCallbacks): void {
  root.textContent = "";
  if (state.error) {
    root.appendChild(el("div", "error-banner", state.error));
  }
  if (state.position === null) {
    root.appendChild(el("div", "placeholder", "no game yet"));
    return;
  }
  if (state.terminal !== null) {
    root.appendChild(el("div", `terminal-banner winner-${state.terminal}`,
                        terminalText(state.terminal)));
  }
  root.appendChild(renderFormula(state.position));
  root.appendChild(el("div", "verifier-line", `verifier: ${state.position.verifier}`));
  root.appendChild(renderAssignment(state.position));
  root.appendChild(renderModel(state.position));

  const choicesBox = el("div", "choices-panel");
  if (state.terminal === null) {
    for (const choice of state.choices) {
      const button = el("button", "choice-button", choice.label);
      button.disabled = state.pending;
      button.addEventListener("click", () => callbacks.onChoice(choice.index));
      choicesBox.appendChild(button);
    }
    const hintButton = el("button", "hint-button", "hint");
    hintButton.disabled = state.pending || state.choices.length === 0;
    hintButton.addEventListener("click", () => callbacks.onHint());
    choicesBox.appendChild(hintButton);
  }
  root.appendChild(choicesBox);

  if (state.hint) {
    const text = state.hint.suggestedChoice === null
      ? `solver says: ${state.hint.verdict}`
      : `solver says: ${state.hint.verdict}; try option ${state.hint.suggestedChoice + 1} (${state.hint.basis})`;
    root.appendChild(el("div", "hint-line", text));
  }

  const logBox = el("ol", "play-log");
  for (const entry of state.log) {
    const who = entry.player ? `${entry.player} (${entry.by})` : entry.by;
    logBox.appendChild(el("li", `log-${entry.by}`, `${who}: ${entry.text}`));
  }
  root.appendChild(logBox);
}
