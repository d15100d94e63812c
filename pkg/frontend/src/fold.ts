/**
 * Pure fold of the server event stream into UI state.
 *
 * The UI holds no game or learning logic: every state transition comes from
 * an event's own payload (dispatch events carry world summaries, undo events
 * carry the rolled-back knowledge/world/pending), so replaying a stream
 * always converges to the server's view.
 */

import type {
  ChatLine,
  DialogEvent,
  KnowledgeEntry,
  PendingConfirmation,
  StateSnapshot,
  WorldRender,
  WorldSummary,
} from "./types.js";

export interface UiState {
  mode: string;
  chat: ChatLine[];
  knowledge: KnowledgeEntry[];
  world: WorldRender;
  pending: PendingConfirmation | null;
  lastSeq: number;
  /** True when a sequence gap was observed; the client must resync. */
  desynced: boolean;
}

export function bootstrap(snapshot: StateSnapshot): UiState {
  return {
    mode: snapshot.mode,
    chat: [],
    knowledge: snapshot.knowledge,
    world: snapshot.world,
    pending: snapshot.pending,
    lastSeq: snapshot.last_seq,
    desynced: false,
  };
}

function withSummary(world: WorldRender, summary: WorldSummary): WorldRender {
  return { ...world, ...summary };
}

export function fold(state: UiState, event: DialogEvent): UiState {
  if (event.seq <= state.lastSeq) {
    return state; // replayed duplicate from a reconnect
  }
  const next: UiState = { ...state, chat: [...state.chat], lastSeq: event.seq };
  if (event.seq !== state.lastSeq + 1) {
    next.desynced = true;
  }
  switch (event.type) {
    case "user_message":
      next.chat.push({ who: "user", text: String(event.text) });
      break;
    case "agent_message": {
      const text = String(event.text);
      next.chat.push({ who: "agent", text });
      const inferred = modeFromAgentText(text);
      if (inferred !== null && next.pending === null) {
        next.mode = inferred;
      }
      break;
    }
    case "confirmation_issued":
      next.pending = {
        kind: event.kind,
        question: event.question,
        payload: event.payload,
        options: event.options,
      } as PendingConfirmation;
      next.mode = "awaiting_confirmation";
      next.chat.push({ who: "agent", text: String(event.question) });
      break;
    case "confirmation_resolved": {
      next.pending = null;
      const verdict = String(event.verdict);
      const suffix =
        verdict === "corrected" ? ` -> ${formatValue(event.value)}` : "";
      next.chat.push({ who: "user", text: `[${verdict}]${suffix}` });
      break;
    }
    case "action_dispatched": {
      const args = (event.args as string[]) ?? [];
      next.world = withSummary(next.world, event.world as WorldSummary);
      next.chat.push({
        who: "system",
        text: `> ${String(event.action)}(${args.join(", ")})`,
      });
      break;
    }
    case "milestone":
      next.chat.push({ who: "system", text: `milestone: ${String(event.name)}` });
      break;
    case "action_learned": {
      const entry: KnowledgeEntry = {
        name: String(event.name),
        params: (event.params as string[]) ?? [],
        kind: "learned",
      };
      next.knowledge = [...next.knowledge, entry];
      next.chat.push({
        who: "system",
        text: `learned: ${entry.name}(${entry.params.join(", ")})`,
      });
      break;
    }
    case "undo_applied":
      next.knowledge = event.knowledge as KnowledgeEntry[];
      next.world = withSummary(next.world, event.world as WorldSummary);
      next.pending = (event.pending as PendingConfirmation | null) ?? null;
      next.mode = String(event.mode);
      next.chat.push({ who: "system", text: "undo applied" });
      break;
    case "error":
      next.chat.push({ who: "system", text: `error: ${String(event.message)}` });
      break;
    default:
      break; // input records and exchanges are transcript plumbing
  }
  return next;
}

/**
 * Modes are explicit on confirmation and undo events. Plain agent messages
 * move the mode only when their text is decisive: a definition question, or
 * one of the command-closing phrases. Anything else (notices, rewind
 * acknowledgements) leaves the mode alone.
 */
function modeFromAgentText(text: string): string | null {
  if (text.includes("How do I")) {
    return "awaiting_definition";
  }
  if (
    text === "Done." ||
    text.startsWith("Great,") ||
    text.startsWith("Noted,")
  ) {
    return "awaiting_command";
  }
  return null;
}

export function foldAll(state: UiState, events: DialogEvent[]): UiState {
  return events.reduce(fold, state);
}

function formatValue(value: unknown): string {
  if (value === null || value === undefined) {
    return "none";
  }
  if (Array.isArray(value)) {
    return value.map(String).join(", ") || "(empty)";
  }
  return String(value);
}
