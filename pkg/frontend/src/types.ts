// Mirrors of the service's JSON wire shapes.

export type Mode = "baseline" | "augmented";

export interface Passage {
  id: string;
  doc_id: string;
  seq_index: number;
  text: string;
  token_count: number;
  url?: string; // not part of the bundle today; rendered as unavailable when absent
}

export interface AnswerBundle {
  question: string;
  mode: Mode;
  k: number;
  inferences_used: string[];
  reading_set: Passage[];
  prompt_text: string;
  answer_text: string;
  exemplar_seed: number | null;
  backend_ids: Record<string, string>;
  timing_ms?: Record<string, number>;
  question_id?: string | null;
}

export interface AskRequest {
  question: string;
  mode: Mode;
  k?: number;
  inferences?: string[];
}

export interface ServiceError {
  status: number;
  detail: string;
  stage?: string;
}
