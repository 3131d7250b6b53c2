import type { AppState } from "./state.js";
import { canSubmit } from "./state.js";
import type { AnswerBundle, Passage } from "./types.js";

// Pure DOM construction: every render rebuilds the view from the state, so
// the markup is a function of (last request, last response, toggle state).

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

function renderErrorBanner(state: AppState): HTMLElement | null {
  if (!state.error) return null;
  const banner = el("div", "error-banner");
  banner.setAttribute("role", "alert");
  const label =
    state.error.status === 422
      ? `invalid question: ${state.error.message}`
      : state.error.stage
        ? `stage '${state.error.stage}' failed: ${state.error.message}`
        : state.error.message;
  banner.appendChild(el("span", "error-text", label));
  const dismiss = el("button", "dismiss", "x");
  dismiss.setAttribute("data-action", "dismiss-error");
  banner.appendChild(dismiss);
  return banner;
}

function renderChips(bundle: AnswerBundle): HTMLElement {
  const wrap = el("div", "chips");
  for (const inference of bundle.inferences_used) {
    const chip = el("span", "chip", inference);
    chip.setAttribute("data-role", "inference-chip");
    wrap.appendChild(chip);
  }
  return wrap;
}

function renderEvidenceRow(passage: Passage, position: number): HTMLElement {
  const row = el("details", "evidence-row");
  row.setAttribute("data-role", "evidence-row");
  const summary = el("summary", "evidence-summary", `Source ${position}: ${passage.id}`);
  row.appendChild(summary);
  row.appendChild(el("p", "evidence-text", passage.text));
  const source = passage.url ?? "source url unavailable";
  row.appendChild(el("p", "evidence-url", source));
  return row;
}

function renderBundle(bundle: AnswerBundle): HTMLElement {
  const card = el("section", "answer-card");
  card.appendChild(el("h2", "answered-question", bundle.question));
  card.appendChild(el("span", "mode-tag", bundle.mode));
  card.appendChild(el("p", "answer-text", bundle.answer_text || "answer unavailable"));

  const chipsHeading = el("h3", undefined, `Assumptions addressed (${bundle.k})`);
  card.appendChild(chipsHeading);
  card.appendChild(renderChips(bundle));

  card.appendChild(el("h3", undefined, `Evidence (${bundle.reading_set.length})`));
  const evidence = el("div", "evidence-list");
  bundle.reading_set.forEach((passage, i) => {
    evidence.appendChild(renderEvidenceRow(passage, i + 1));
  });
  card.appendChild(evidence);

  const inspector = el("details", "prompt-inspector"); // collapsed by default
  inspector.setAttribute("data-role", "prompt-inspector");
  inspector.appendChild(el("summary", undefined, "Raw reader prompt"));
  inspector.appendChild(el("pre", "prompt-text", bundle.prompt_text));
  card.appendChild(inspector);

  const meta = el("p", "bundle-meta");
  const seed = bundle.exemplar_seed === null || bundle.exemplar_seed === undefined
    ? "exemplar seed unavailable"
    : `exemplar seed ${bundle.exemplar_seed}`;
  const backends = Object.entries(bundle.backend_ids)
    .map(([stage, model]) => `${stage}=${model}`)
    .join(" ");
  meta.textContent = `${seed} | ${backends}`;
  card.appendChild(meta);
  return card;
}

/** Render the whole ask view for a state; the caller owns event wiring. */
export function render(state: AppState): HTMLElement {
  const root = el("div", "ask-view");

  const banner = renderErrorBanner(state);
  if (banner) root.appendChild(banner);

  const form = el("form", "ask-form");
  const input = el("input", "question-input") as HTMLInputElement;
  input.type = "text";
  input.name = "question";
  input.placeholder = "Ask a maternal or infant health question";
  input.value = state.question;
  form.appendChild(input);

  const toggle = el("button", "mode-toggle", `mode: ${state.mode}`);
  toggle.type = "button";
  toggle.setAttribute("data-action", "toggle-mode");
  toggle.setAttribute("data-mode", state.mode);
  form.appendChild(toggle);

  const submit = el("button", "submit", state.pending ? "asking..." : "ask") as HTMLButtonElement;
  submit.type = "submit";
  submit.disabled = !canSubmit(state);
  form.appendChild(submit);
  root.appendChild(form);

  if (state.bundle) {
    root.appendChild(renderBundle(state.bundle));
  } else if (!state.pending) {
    root.appendChild(el("p", "empty-hint", "no answer yet"));
  }
  return root;
}
