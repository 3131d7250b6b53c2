import { ApiError, askQuestion } from "./api.js";
import {
  AppState,
  beginRequest,
  canSubmit,
  dismissError,
  initialState,
  receiveBundle,
  receiveError,
  setQuestion,
  toggleMode,
} from "./state.js";
import { render } from "./view.js";

export function mount(rootId = "app", fetchFn: typeof fetch = fetch): void {
  const host = document.getElementById(rootId);
  if (!host) throw new Error(`missing #${rootId} element`);
  // same-origin by default; override with <div id="app" data-api-base="http://host:port">
  const baseUrl = host.dataset.apiBase ?? "";
  let state: AppState = initialState(window.localStorage);

  const update = (next: AppState): void => {
    state = next;
    host.replaceChildren(render(state));
  };

  host.addEventListener("click", (event) => {
    const target = event.target as HTMLElement;
    const action = target.getAttribute("data-action");
    if (action === "toggle-mode") update(toggleMode(state, window.localStorage));
    if (action === "dismiss-error") update(dismissError(state));
  });

  host.addEventListener("input", (event) => {
    const target = event.target as HTMLInputElement;
    if (target.name === "question") {
      // keep the input live without a full re-render (focus preservation)
      state = setQuestion(state, target.value);
      const submit = host.querySelector<HTMLButtonElement>("button.submit");
      if (submit) submit.disabled = !canSubmit(state);
    }
  });

  host.addEventListener("submit", (event) => {
    event.preventDefault();
    if (!canSubmit(state)) return;
    void submit();
  });

  async function submit(): Promise<void> {
    update(beginRequest(state));
    try {
      const bundle = await askQuestion(baseUrl, {
        question: state.question,
        mode: state.mode,
      }, fetchFn);
      update(receiveBundle(state, bundle));
    } catch (err) {
      if (err instanceof ApiError) {
        update(receiveError(state, { message: err.message, stage: err.stage, status: err.status }));
      } else {
        update(receiveError(state, { message: String(err), status: 0 }));
      }
    }
  }

  update(state);
}

if (typeof document !== "undefined" && document.getElementById("app")) {
  mount();
}
