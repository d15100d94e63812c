/** Wire the panels to one live session. */

import {
  createSession,
  getState,
  sendConfirmation,
  sendMessage,
  sendUndo,
  subscribe,
  WrongModeError,
} from "./api.js";
import { bootstrap, fold, UiState } from "./fold.js";
import {
  renderChat,
  renderConfirmation,
  renderGrid,
  renderKnowledge,
  renderMilestones,
} from "./render.js";

const byId = (id: string): HTMLElement => {
  const el = document.getElementById(id);
  if (!el) {
    throw new Error(`missing #${id}`);
  }
  return el;
};

async function start(): Promise<void> {
  const { id, state: snapshot } = await createSession();
  let state: UiState = bootstrap(snapshot);
  let connected = false;
  let busy = false;

  const input = byId("message") as HTMLInputElement;
  const send = byId("send") as HTMLButtonElement;
  const undo = byId("undo") as HTMLButtonElement;
  const status = byId("status");

  const handlers = {
    onMessage: (text: string) => submit(() => sendMessage(id, text)),
    onApprove: () => submit(() => sendConfirmation(id, "approve")),
    onCorrect: (value: string) => submit(() => sendConfirmation(id, "correct", value)),
    onUndo: () => submit(() => sendUndo(id)),
  };

  function draw(): void {
    renderChat(byId("chat"), state);
    renderKnowledge(byId("knowledge"), state);
    renderGrid(byId("grid"), state.world);
    renderMilestones(byId("milestones"), state.world);
    renderConfirmation(byId("confirmation"), state.pending, connected && !busy, handlers);
    const accepting = state.pending === null && connected && !busy;
    input.disabled = !accepting;
    send.disabled = !accepting;
    undo.disabled = !connected || busy;
    input.placeholder =
      state.mode === "awaiting_definition"
        ? "Explain the steps..."
        : 'Try "Make onion soup with one onion."';
    status.textContent = connected ? `session ${id}` : "reconnecting...";
    status.className = connected ? "ok" : "down";
  }

  async function submit(action: () => Promise<void>): Promise<void> {
    busy = true;
    draw();
    try {
      await action();
    } catch (error) {
      if (error instanceof WrongModeError) {
        state = bootstrap(await getState(id)); // resync rather than guess
      } else {
        throw error;
      }
    } finally {
      busy = false;
      draw();
    }
  }

  send.onclick = () => {
    const text = input.value.trim();
    if (text) {
      input.value = "";
      handlers.onMessage(text);
    }
  };
  input.onkeydown = (keyboard) => {
    if (keyboard.key === "Enter") {
      send.click();
    }
  };
  undo.onclick = () => handlers.onUndo();

  subscribe(
    id,
    state.lastSeq,
    (event) => {
      state = fold(state, event);
      if (state.desynced) {
        // A gap means we missed events; rebuild from the authoritative state.
        getState(id).then((fresh) => {
          state = bootstrap(fresh);
          draw();
        });
        return;
      }
      draw();
    },
    (isConnected) => {
      connected = isConnected;
      draw();
    }
  );
  draw();
}

start().catch((error) => {
  byId("status").textContent = String(error);
});
