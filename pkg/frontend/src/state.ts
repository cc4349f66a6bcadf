/** Screen state machine with local persistence.
 *
 * Navigation is forward-only and mirrors the service's session states:
 * a deep link cannot put the participant ahead of what the service has
 * recorded, and a reload restores exactly where they were (including
 * profile selections and unsubmitted answers).
 */

import type { Demographics, LikertAnswer, SessionState } from "./api.js";

export const STEPS = ["consent", "demographics", "profile", "comparison", "questions", "done"] as const;
export type Step = (typeof STEPS)[number];

export interface ScreenState {
  step: Step;
  sessionId: string | null;
  demographics: Demographics | null;
  selections: string[];
  answers: Partial<Record<number, LikertAnswer>>;
}

export const STORAGE_KEY = "pathx-trial-state";

export function initialState(): ScreenState {
  return { step: "consent", sessionId: null, demographics: null, selections: [], answers: {} };
}

export function stepIndex(step: Step): number {
  return STEPS.indexOf(step);
}

/** Forward-only transition; returns the unchanged state on an attempt to
 * move backwards or skip more than one phase boundary. */
export function advance(state: ScreenState, to: Step): ScreenState {
  if (stepIndex(to) <= stepIndex(state.step)) {
    return state;
  }
  return { ...state, step: to };
}

export function toggleSelection(state: ScreenState, item: string, limit = 10): ScreenState {
  if (state.selections.includes(item)) {
    return { ...state, selections: state.selections.filter((i) => i !== item) };
  }
  if (state.selections.length >= limit) {
    return state; // 11th pick is blocked, not FIFO-replaced
  }
  return { ...state, selections: [...state.selections, item] };
}

export function setAnswer(state: ScreenState, questionId: number, answer: LikertAnswer): ScreenState {
  return { ...state, answers: { ...state.answers, [questionId]: answer } };
}

export function allAnswered(state: ScreenState, questionIds: number[]): boolean {
  return questionIds.every((id) => state.answers[id] !== undefined);
}

/** Clamp a locally persisted step to what the service actually knows.
 * A deep link to the questions without a profiled session lands back on
 * the profile screen; a completed session always lands on done. */
export function reconcile(local: ScreenState, server: SessionState | null): ScreenState {
  if (local.sessionId === null || server === null) {
    const step = stepIndex(local.step) > stepIndex("demographics") ? "demographics" : local.step;
    return { ...local, step, sessionId: null };
  }
  if (server === "completed") {
    return { ...local, step: "done" };
  }
  if (server === "created" && stepIndex(local.step) > stepIndex("profile")) {
    return { ...local, step: "profile" };
  }
  if (server === "profiled" && stepIndex(local.step) < stepIndex("comparison")) {
    return { ...local, step: "comparison" };
  }
  return local;
}

export interface StateStore {
  load(): ScreenState;
  save(state: ScreenState): void;
  clear(): void;
}

export function browserStore(storage: Pick<Storage, "getItem" | "setItem" | "removeItem">): StateStore {
  return {
    load(): ScreenState {
      const raw = storage.getItem(STORAGE_KEY);
      if (!raw) return initialState();
      try {
        const parsed = JSON.parse(raw) as Partial<ScreenState>;
        const base = initialState();
        return {
          step: STEPS.includes(parsed.step as Step) ? (parsed.step as Step) : base.step,
          sessionId: typeof parsed.sessionId === "string" ? parsed.sessionId : null,
          demographics: parsed.demographics ?? null,
          selections: Array.isArray(parsed.selections) ? parsed.selections.filter((s) => typeof s === "string") : [],
          answers: parsed.answers && typeof parsed.answers === "object" ? parsed.answers : {},
        };
      } catch {
        return initialState();
      }
    },
    save(state: ScreenState): void {
      storage.setItem(STORAGE_KEY, JSON.stringify(state));
    },
    clear(): void {
      storage.removeItem(STORAGE_KEY);
    },
  };
}
