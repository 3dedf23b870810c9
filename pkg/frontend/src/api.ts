// Typed client for the match-service HTTP API. All service interaction in
// the UI goes through this module; it does no scoring or reordering.

export interface Candidate {
  person_id: string;
  name: string;
  status: string;
  score: number;
  votes: number;
  total_distance: number;
}

export interface QueryResponse {
  candidates: Candidate[];
  model_version: string;
}

export interface PersonRecord {
  id: string;
  name: string;
  status: string;
  contact: string;
  enrolled_at: number;
  photo_refs: string[];
}

export interface EnrollMetadata {
  name: string;
  status: 'missing' | 'found';
  contact: string;
}

/** Service-reported failure; message is the service's text, verbatim. */
export class PortalError extends Error {
  constructor(public code: number, message: string) {
    super(message);
    this.name = 'PortalError';
  }
}

type FetchFn = typeof fetch;

async function parseError(res: Response): Promise<never> {
  let message = res.statusText;
  try {
    const body = await res.json();
    if (body && typeof body.message === 'string') message = body.message;
  } catch {
    // non-JSON error body; keep statusText
  }
  throw new PortalError(res.status, message);
}

export class PortalClient {
  constructor(
    private baseUrl: string = '',
    private fetchFn: FetchFn = globalThis.fetch,
  ) {}

  async enroll(photo: Blob, metadata: EnrollMetadata): Promise<string> {
    const form = new FormData();
    form.append('photo', photo, 'photo');
    form.append('metadata', JSON.stringify(metadata));
    const res = await this.fetchFn(`${this.baseUrl}/api/persons`, {
      method: 'POST',
      body: form,
    });
    if (res.status !== 201) await parseError(res);
    const body = await res.json();
    return body.id as string;
  }

  async match(photo: Blob, k: number, status?: string): Promise<QueryResponse> {
    const params = new URLSearchParams({ k: String(k) });
    if (status) params.set('status', status);
    const form = new FormData();
    form.append('photo', photo, 'photo');
    const res = await this.fetchFn(`${this.baseUrl}/api/match?${params}`, {
      method: 'POST',
      body: form,
    });
    if (!res.ok) await parseError(res);
    return (await res.json()) as QueryResponse;
  }

  async getPerson(id: string): Promise<PersonRecord> {
    const res = await this.fetchFn(`${this.baseUrl}/api/persons/${encodeURIComponent(id)}`);
    if (!res.ok) await parseError(res);
    return (await res.json()) as PersonRecord;
  }

  async health(): Promise<{ model_version: string; gallery_size: number }> {
    const res = await this.fetchFn(`${this.baseUrl}/api/health`);
    if (!res.ok) await parseError(res);
    return await res.json();
  }
}
