import type { AnswerBundle, Mode } from "./types.js";

// The whole UI derives from this state; render() is a pure function of it.
export interface AppState {
  mode: Mode;
  question: string;
  pending: boolean;
  bundle: AnswerBundle | null;
  error: { message: string; stage?: string; status: number } | null;
}

const MODE_KEY = "pragqa.mode";

export function initialState(storage: Pick<Storage, "getItem"> | null): AppState {
  return {
    mode: loadMode(storage),
    question: "",
    pending: false,
    bundle: null,
    error: null,
  };
}

export function loadMode(storage: Pick<Storage, "getItem"> | null): Mode {
  const saved = storage?.getItem(MODE_KEY);
  return saved === "augmented" ? "augmented" : "baseline";
}

/** Flip the mode for the next submission; the current view is untouched. */
export function toggleMode(
  state: AppState,
  storage: Pick<Storage, "setItem"> | null
): AppState {
  const mode: Mode = state.mode === "baseline" ? "augmented" : "baseline";
  storage?.setItem(MODE_KEY, mode);
  return { ...state, mode };
}

export function setQuestion(state: AppState, question: string): AppState {
  return { ...state, question };
}

export function canSubmit(state: AppState): boolean {
  // one in-flight request at a time; empty input never submits
  return !state.pending && state.question.trim().length > 0;
}

export function beginRequest(state: AppState): AppState {
  return { ...state, pending: true, error: null };
}

export function receiveBundle(state: AppState, bundle: AnswerBundle): AppState {
  return { ...state, pending: false, bundle, error: null };
}

export function receiveError(
  state: AppState,
  error: { message: string; stage?: string; status: number }
): AppState {
  return { ...state, pending: false, error };
}

export function dismissError(state: AppState): AppState {
  return { ...state, error: null };
}
