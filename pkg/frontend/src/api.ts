import type { AnswerBundle, AskRequest, ServiceError } from "./types.js";

export class ApiError extends Error {
  status: number;
  stage?: string;

  constructor(status: number, detail: string, stage?: string) {
    super(detail);
    this.status = status;
    this.stage = stage;
  }
}

/** POST /ask; throws ApiError on non-2xx (status 0 = network failure). */
export async function askQuestion(
  baseUrl: string,
  request: AskRequest,
  fetchFn: typeof fetch = fetch
): Promise<AnswerBundle> {
  let response: Response;
  try {
    response = await fetchFn(`${baseUrl}/ask`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(request),
    });
  } catch (err) {
    throw new ApiError(0, `network failure: ${String(err)}`);
  }
  if (!response.ok) {
    let detail = `HTTP ${response.status}`;
    let stage: string | undefined;
    try {
      const body = (await response.json()) as Partial<ServiceError>;
      if (typeof body.detail === "string") detail = body.detail;
      if (typeof body.stage === "string") stage = body.stage;
    } catch {
      // non-JSON error body; keep the status line
    }
    throw new ApiError(response.status, detail, stage);
  }
  return (await response.json()) as AnswerBundle;
}

export async function fetchHealth(
  baseUrl: string,
  fetchFn: typeof fetch = fetch
): Promise<{ status: string; index_size: number; backends: Record<string, boolean> }> {
  const response = await fetchFn(`${baseUrl}/health`);
  if (!response.ok) throw new ApiError(response.status, `HTTP ${response.status}`);
  return response.json();
}
