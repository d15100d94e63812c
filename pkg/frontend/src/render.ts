/** DOM rendering for the three panels: chat, knowledge, kitchen grid. */

import type { UiState } from "./fold.js";
import type { PendingConfirmation, WorldRender } from "./types.js";
import { correctionValue, widgetModel, WidgetModel } from "./widgets.js";

const CELL_GLYPHS: Record<string, string> = {
  X: "",
  ".": "",
  O: "onion",
  T: "tomato",
  D: "plate",
  P: "pot",
  S: "serve",
};

export interface InputHandlers {
  onMessage(text: string): void;
  onApprove(): void;
  onCorrect(value: string): void;
  onUndo(): void;
}

export function renderChat(container: HTMLElement, state: UiState): void {
  container.replaceChildren(
    ...state.chat.map((line) => {
      const div = document.createElement("div");
      div.className = `line ${line.who}`;
      div.textContent = line.text;
      return div;
    })
  );
  container.scrollTop = container.scrollHeight;
}

export function renderKnowledge(container: HTMLElement, state: UiState): void {
  container.replaceChildren(
    ...state.knowledge.map((entry) => {
      const item = document.createElement("li");
      item.className = entry.kind;
      item.textContent = `${entry.name}(${entry.params.join(", ")})`;
      item.title = entry.kind;
      return item;
    })
  );
}

export function renderGrid(container: HTMLElement, world: WorldRender): void {
  container.style.gridTemplateColumns = `repeat(${world.width}, 28px)`;
  const cells: HTMLElement[] = [];
  for (let y = 0; y < world.height; y += 1) {
    for (let x = 0; x < world.width; x += 1) {
      const char = world.rows[y][x];
      const cell = document.createElement("div");
      cell.className = `cell k${char}`;
      const pot = world.pots.find((p) => p.x === x && p.y === y);
      if (pot) {
        cell.classList.add(`pot-${pot.phase}`);
        cell.textContent = pot.contents.length ? `${pot.contents.length}` : "";
        cell.title = `pot: ${pot.phase}`;
      } else {
        cell.textContent = "";
        cell.title = CELL_GLYPHS[char] ?? "";
      }
      if (world.agent.x === x && world.agent.y === y) {
        const agent = document.createElement("div");
        agent.className = `agent face-${world.agent.facing}`;
        if (world.agent.holding) {
          agent.classList.add("holding");
          agent.title = `holding ${world.agent.holding}`;
        }
        cell.appendChild(agent);
      }
      cells.push(cell);
    }
  }
  container.replaceChildren(...cells);
}

export function renderMilestones(container: HTMLElement, world: WorldRender): void {
  const all = [
    "PickedUpOnion",
    "OnionInPot",
    "PotTurnedOn",
    "SoupPlated",
    "SoupDelivered",
  ];
  container.replaceChildren(
    ...all.map((name) => {
      const badge = document.createElement("span");
      badge.className = world.milestones.includes(name) ? "badge done" : "badge";
      badge.textContent = name;
      return badge;
    })
  );
}

export function renderConfirmation(
  container: HTMLElement,
  pending: PendingConfirmation | null,
  connected: boolean,
  handlers: InputHandlers
): void {
  container.replaceChildren();
  if (pending === null) {
    container.classList.add("hidden");
    return;
  }
  container.classList.remove("hidden");
  const model = widgetModel(pending);
  const question = document.createElement("div");
  question.className = "question";
  question.textContent = pending.question;
  container.appendChild(question);

  const edited: { steps?: string[]; choice?: string; args?: string[]; subset?: string[] } = {};
  container.appendChild(buildEditor(model, edited));

  const buttons = document.createElement("div");
  buttons.className = "buttons";
  const approve = document.createElement("button");
  approve.textContent = model.type === "yes-no" ? "Yes" : "Approve";
  approve.disabled = !connected;
  approve.onclick = () => handlers.onApprove();
  buttons.appendChild(approve);
  const correct = document.createElement("button");
  correct.textContent = model.type === "yes-no" ? "No" : "Correct";
  correct.disabled = !connected;
  correct.onclick = () => handlers.onCorrect(correctionValue(model, edited));
  buttons.appendChild(correct);
  container.appendChild(buttons);
}

function buildEditor(
  model: WidgetModel,
  edited: { steps?: string[]; choice?: string; args?: string[]; subset?: string[] }
): HTMLElement {
  const holder = document.createElement("div");
  holder.className = "editor";
  if (model.type === "editable-steps") {
    edited.steps = [...model.steps];
    model.steps.forEach((step, index) => {
      const input = document.createElement("input");
      input.value = step;
      input.oninput = () => {
        edited.steps![index] = input.value;
      };
      holder.appendChild(input);
    });
  } else if (model.type === "pick-list") {
    const select = document.createElement("select");
    for (const option of model.options) {
      const el = document.createElement("option");
      el.value = option;
      el.textContent = option;
      el.selected = option === (model.current ?? "none");
      select.appendChild(el);
    }
    select.onchange = () => {
      edited.choice = select.value;
    };
    holder.appendChild(select);
  } else if (model.type === "arg-picker") {
    edited.args = [...model.args];
    model.params.forEach((param, index) => {
      const label = document.createElement("label");
      label.textContent = param;
      const select = document.createElement("select");
      for (const option of model.options) {
        const el = document.createElement("option");
        el.value = option;
        el.textContent = option;
        el.selected = option === model.args[index];
        select.appendChild(el);
      }
      select.onchange = () => {
        edited.args![index] = select.value;
      };
      label.appendChild(select);
      holder.appendChild(label);
    });
  } else if (model.type === "checkbox-subset") {
    edited.subset = [...model.checked];
    for (const option of model.options) {
      const label = document.createElement("label");
      const box = document.createElement("input");
      box.type = "checkbox";
      box.checked = model.checked.includes(option);
      box.onchange = () => {
        const set = new Set(edited.subset);
        if (box.checked) {
          set.add(option);
        } else {
          set.delete(option);
        }
        edited.subset = [...set];
      };
      label.appendChild(box);
      label.appendChild(document.createTextNode(option));
      holder.appendChild(label);
    }
  }
  return holder;
}
