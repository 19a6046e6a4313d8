import type { Catalog, CreateResponse, ScenarioConfig, ScenarioDoc, SurfaceCollection } from './types';

/** Service errors arrive as {"error": ...} (or FastAPI's {"detail": ...}) with a 4xx/5xx status. */
async function request<T>(url: string, init?: RequestInit): Promise<T> {
  const res = await fetch(url, init);
  const body = await res.json().catch(() => ({}));
  if (!res.ok) {
    throw new Error(body.error || body.detail || `request failed (${res.status}) on ${url}`);
  }
  return body as T;
}

export function getCatalog(): Promise<Catalog> {
  return request('/api/catalog');
}

export function createScenario(config: ScenarioConfig): Promise<CreateResponse> {
  return request('/api/scenarios', {
    method: 'POST',
    headers: { 'Content-Type': 'application/json' },
    body: JSON.stringify(config),
  });
}

export function getScenario(id: string): Promise<ScenarioDoc> {
  return request(`/api/scenarios/${id}`);
}

// Always fetched with the dynamic legend; scale switching is client-side.
export function getSurface(id: string): Promise<SurfaceCollection> {
  return request(`/api/scenarios/${id}/surface?format=geojson`);
}

export interface PollOptions {
  initialDelayMs?: number;
  maxDelayMs?: number;
  factor?: number;
  onUpdate?: (doc: ScenarioDoc) => void;
  /** test seams */
  fetchDoc?: (id: string) => Promise<ScenarioDoc>;
  sleep?: (ms: number) => Promise<void>;
}

const wait = (ms: number) => new Promise<void>((resolve) => setTimeout(resolve, ms));

/**
 * Poll a scenario until it reaches a terminal state, backing off between
 * polls (300 ms growing 1.5x, capped at 3 s). Resolves with the terminal
 * document for both done and failed — the failure reason is in doc.reason.
 */
export async function pollScenario(id: string, opts: PollOptions = {}): Promise<ScenarioDoc> {
  const fetchDoc = opts.fetchDoc ?? getScenario;
  const sleep = opts.sleep ?? wait;
  const cap = opts.maxDelayMs ?? 3000;
  const factor = opts.factor ?? 1.5;
  let delay = opts.initialDelayMs ?? 300;
  for (;;) {
    const doc = await fetchDoc(id);
    opts.onUpdate?.(doc);
    if (doc.status === 'done' || doc.status === 'failed') {
      return doc;
    }
    await sleep(delay);
    delay = Math.min(delay * factor, cap);
  }
}
