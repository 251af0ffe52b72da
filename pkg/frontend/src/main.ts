import { ApiClient } from "./api.js";
import { GameStore } from "./state.js";
import { render } from "./render.js";
import type { RoleName } from "./types.js";

const DEFAULT_MODEL = `domain: a b
relation R/1 partial
  + (a)
`;

function field<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) {
    throw new Error(`missing #${id}`);
  }
  return node as T;
}

function boot(): void {
  const serverInput = field<HTMLInputElement>("server-url");
  const modelInput = field<HTMLTextAreaElement>("model-text");
  const formulaInput = field<HTMLInputElement>("formula-text");
  const roleSelect = field<HTMLSelectElement>("role-select");
  const startButton = field<HTMLButtonElement>("start-button");
  const gameRoot = field<HTMLDivElement>("game-root");

  serverInput.value = serverInput.value || window.location.origin;
  modelInput.value = modelInput.value || DEFAULT_MODEL;
  formulaInput.value = formulaInput.value || "exists x. R(x)";

  let store = new GameStore(new ApiClient(serverInput.value));
  const callbacks = {
    onChoice: (index: number) => void store.submitChoice(index),
    onHint: () => void store.requestHint(6),
  };

  function rewire(): void {
    store = new GameStore(new ApiClient(serverInput.value.replace(/\/$/, "")));
    store.onChange((state) => render(state, gameRoot, callbacks));
  }

  rewire();
  startButton.addEventListener("click", () => {
    if (store.state.pending) {
      return;
    }
    rewire();
    const model = modelInput.value.trim() ? modelInput.value : null;
    void store.newGame(model, formulaInput.value, roleSelect.value as RoleName);
  });
}

boot();
