/** Wire shapes shared with the session service. */

export interface KnowledgeEntry {
  name: string;
  params: string[];
  kind: "primitive" | "learned";
}

export interface PendingConfirmation {
  kind:
    | "segmentation"
    | "mapping"
    | "new_action"
    | "grounding"
    | "generalization"
    | "task_correctness";
  question: string;
  payload: Record<string, unknown>;
  options: string[] | null;
}

export interface AgentView {
  x: number;
  y: number;
  facing: string;
  holding: string | null;
}

export interface PotView {
  x: number;
  y: number;
  contents: string[];
  phase: string;
  ticks_left: number;
}

/** Server-computed world summary carried on events. */
export interface WorldSummary {
  agent: AgentView;
  pots: PotView[];
  milestones: string[];
  tick: number;
}

/** Full render from GET /state (summary plus the static grid). */
export interface WorldRender extends WorldSummary {
  width: number;
  height: number;
  rows: string[];
  objects: string[];
}

export interface DialogEvent {
  seq: number;
  type: string;
  [key: string]: unknown;
}

export interface StateSnapshot {
  mode: string;
  knowledge: KnowledgeEntry[];
  world: WorldRender;
  pending: PendingConfirmation | null;
  last_seq: number;
}

export interface ChatLine {
  who: "user" | "agent" | "system";
  text: string;
}
