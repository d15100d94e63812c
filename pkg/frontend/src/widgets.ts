/**
 * Confirmation widget models: pure descriptors the DOM layer renders.
 * Approve is always one click; the correction affordance depends on the
 * dialog kind (editable step list, pick list, argument picker, checkbox
 * subset, or plain yes/no).
 */

import type { PendingConfirmation } from "./types.js";

export type WidgetModel =
  | { type: "editable-steps"; steps: string[] }
  | { type: "pick-list"; options: string[]; current: string | null }
  | {
      type: "arg-picker";
      params: string[];
      args: string[];
      options: string[];
    }
  | { type: "checkbox-subset"; options: string[]; checked: string[] }
  | { type: "yes-no" };

export function widgetModel(pending: PendingConfirmation): WidgetModel {
  const payload = pending.payload;
  switch (pending.kind) {
    case "segmentation":
      return {
        type: "editable-steps",
        steps: (payload.segments as string[]) ?? [],
      };
    case "mapping":
      return {
        type: "pick-list",
        options: pending.options ?? [],
        current: (payload.action as string) ?? null,
      };
    case "new_action":
      return {
        type: "pick-list",
        options: pending.options ?? [],
        current: null,
      };
    case "grounding":
      return {
        type: "arg-picker",
        params: (payload.params as string[]) ?? [],
        args: (payload.args as string[]) ?? [],
        options: pending.options ?? [],
      };
    case "generalization":
      return {
        type: "checkbox-subset",
        options: (payload.used_args as string[]) ?? [],
        checked: (payload.proposal as string[]) ?? [],
      };
    case "task_correctness":
      return { type: "yes-no" };
  }
}

/** Serialize a widget's correction state into the service's correction value. */
export function correctionValue(
  model: WidgetModel,
  edited: { steps?: string[]; choice?: string; args?: string[]; subset?: string[] }
): string {
  switch (model.type) {
    case "editable-steps":
      return (edited.steps ?? model.steps).join(" | ");
    case "pick-list":
      return edited.choice ?? "none";
    case "arg-picker":
      return (edited.args ?? model.args).join(",");
    case "checkbox-subset":
      return (edited.subset ?? model.checked).join(",");
    case "yes-no":
      return "no";
  }
}
