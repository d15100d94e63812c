/** HTTP + SSE client for the session service. */

import type { DialogEvent, StateSnapshot } from "./types.js";

export class WrongModeError extends Error {}

async function post(path: string, body: unknown): Promise<unknown> {
  const response = await fetch(path, {
    method: "POST",
    headers: { "Content-Type": "application/json" },
    body: JSON.stringify(body),
  });
  if (response.status === 409) {
    throw new WrongModeError("input not accepted in the current mode");
  }
  if (!response.ok) {
    throw new Error(`${path}: HTTP ${response.status}`);
  }
  return response.json();
}

export async function createSession(): Promise<{ id: string; state: StateSnapshot }> {
  return (await post("/sessions", {})) as { id: string; state: StateSnapshot };
}

export async function getState(id: string): Promise<StateSnapshot> {
  const response = await fetch(`/sessions/${id}/state`);
  if (!response.ok) {
    throw new Error(`state: HTTP ${response.status}`);
  }
  return (await response.json()) as StateSnapshot;
}

export async function sendMessage(id: string, text: string): Promise<void> {
  await post(`/sessions/${id}/message`, { text });
}

export async function sendConfirmation(
  id: string,
  verdict: "approve" | "correct",
  correction?: string
): Promise<void> {
  await post(`/sessions/${id}/confirm`, { verdict, correction });
}

export async function sendUndo(id: string): Promise<void> {
  await post(`/sessions/${id}/undo`, {});
}

export interface StreamHandle {
  close(): void;
}

/**
 * Subscribe to the event stream from a sequence number. The browser's
 * EventSource reconnects on drops; we always pass the last seen sequence so
 * the server replays exactly the gap.
 */
export function subscribe(
  id: string,
  since: number,
  onEvent: (event: DialogEvent) => void,
  onStatus: (connected: boolean) => void
): StreamHandle {
  let lastSeq = since;
  let source: EventSource | null = null;
  let closed = false;

  const open = () => {
    if (closed) {
      return;
    }
    source = new EventSource(`/sessions/${id}/events?since=${lastSeq}`);
    source.onopen = () => onStatus(true);
    source.onmessage = (message) => {
      const event = JSON.parse(message.data) as DialogEvent;
      lastSeq = Math.max(lastSeq, event.seq);
      onEvent(event);
    };
    source.onerror = () => {
      onStatus(false);
      source?.close();
      if (!closed) {
        setTimeout(open, 1000);
      }
    };
  };
  open();
  return {
    close() {
      closed = true;
      source?.close();
    },
  };
}
