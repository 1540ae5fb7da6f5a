// Typed client for the service endpoints.

import type {
  AssignmentDoc,
  ComparisonVote,
  GenerateResponse,
  PreferenceVote,
  SummaryResponse,
  TasksResponse,
} from './types.js';

export class ApiError extends Error {
  constructor(
    public status: number,
    public detail: string,
  ) {
    super(`HTTP ${status}: ${detail}`);
  }
}

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class StudioApi {
  constructor(
    public baseUrl: string,
    private fetchImpl: FetchLike = (...args) => fetch(...args),
  ) {
    this.baseUrl = baseUrl.replace(/\/+$/, '');
  }

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const init: RequestInit = { method, headers: { 'Content-Type': 'application/json' } };
    if (body !== undefined) {
      init.body = JSON.stringify(body);
    }
    const reply = await this.fetchImpl(`${this.baseUrl}${path}`, init);
    const text = await reply.text();
    let parsed: unknown = null;
    try {
      parsed = text ? JSON.parse(text) : null;
    } catch {
      parsed = text;
    }
    if (!reply.ok) {
      const detail =
        parsed && typeof parsed === 'object' && 'detail' in (parsed as Record<string, unknown>)
          ? JSON.stringify((parsed as Record<string, unknown>).detail)
          : String(parsed);
      throw new ApiError(reply.status, detail);
    }
    return parsed as T;
  }

  health(): Promise<{ status: string }> {
    return this.request('GET', '/v1/health');
  }

  tasks(): Promise<TasksResponse> {
    return this.request('GET', '/v1/tasks');
  }

  generate(body: {
    task: string;
    aspects: string[];
    condition?: string;
    runs?: number;
  }): Promise<GenerateResponse> {
    return this.request('POST', '/v1/generate', body);
  }

  datasetSummary(): Promise<SummaryResponse> {
    return this.request('GET', '/v1/dataset/summary');
  }

  submitPreference(vote: PreferenceVote): Promise<{ status: string; total_pieces: number }> {
    return this.request('POST', '/v1/preferences', vote);
  }

  assignment(participant: string): Promise<AssignmentDoc> {
    return this.request('GET', `/v1/experiment/assignment?participant=${encodeURIComponent(participant)}`);
  }

  submitSelection(vote: ComparisonVote): Promise<{ status: string }> {
    return this.request('POST', '/v1/experiment/selection', vote);
  }
}
