/** Thin typed client for the speech-analysis HTTP API. */

import {
  ALL_KINDS,
  SnippetDetail,
  SpeechListing,
  SummaryPayload,
} from "./types";

export interface HumorFocusFilter {
  minContext?: number;
  maxContext?: number;
  /** Any-of within a group, all-of across groups. */
  kindGroups?: string[][];
  keyword?: string;
}

/** Client-side mirror of the server's filter validation, so invalid
 * submissions are blocked before a request is made. */
export function validateFilter(filter: HumorFocusFilter): string | null {
  if (
    filter.minContext !== undefined &&
    filter.maxContext !== undefined &&
    filter.minContext > filter.maxContext
  ) {
    return "min context length exceeds max";
  }
  for (const group of filter.kindGroups ?? []) {
    for (const kind of group) {
      if (!(ALL_KINDS as readonly string[]).includes(kind)) {
        return `unknown annotation kind '${kind}'`;
      }
    }
  }
  return null;
}

export function snippetQuery(filter: HumorFocusFilter): URLSearchParams {
  const params = new URLSearchParams();
  if (filter.minContext !== undefined) {
    params.set("min_context", String(filter.minContext));
  }
  if (filter.maxContext !== undefined) {
    params.set("max_context", String(filter.maxContext));
  }
  for (const group of filter.kindGroups ?? []) {
    if (group.length) params.append("kinds", group.join(","));
  }
  if (filter.keyword) params.set("keyword", filter.keyword);
  return params;
}

type Fetch = typeof fetch;

export class ApiClient {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchImpl: Fetch = fetch,
  ) {}

  private async getJson<T>(path: string): Promise<T> {
    const resp = await this.fetchImpl(`${this.baseUrl}${path}`);
    if (!resp.ok) {
      const body = await resp.text();
      throw new Error(`GET ${path} -> ${resp.status}: ${body}`);
    }
    return (await resp.json()) as T;
  }

  listSpeeches(sort?: string): Promise<SpeechListing[]> {
    const suffix = sort ? `?sort=${encodeURIComponent(sort)}` : "";
    return this.getJson(`/speeches${suffix}`);
  }

  summary(speechId: string, mergeResolutionS?: number): Promise<SummaryPayload> {
    const suffix =
      mergeResolutionS !== undefined ? `?merge_resolution_s=${mergeResolutionS}` : "";
    return this.getJson(`/speeches/${speechId}/summary${suffix}`);
  }

  async filterSnippets(speechId: string, filter: HumorFocusFilter): Promise<number[]> {
    const problem = validateFilter(filter);
    if (problem) throw new Error(problem);
    const params = snippetQuery(filter);
    const qs = params.toString();
    const body = await this.getJson<{ snippets: number[] }>(
      `/speeches/${speechId}/snippets${qs ? `?${qs}` : ""}`,
    );
    return body.snippets;
  }

  snippet(speechId: string, index: number): Promise<SnippetDetail> {
    return this.getJson(`/speeches/${speechId}/snippets/${index}`);
  }

  /** Issues a recompute and resolves once the server has committed it;
   * callers refresh their views from the response revision. */
  async recompute(speechId: string, config: Record<string, number>): Promise<number> {
    const resp = await this.fetchImpl(`${this.baseUrl}/speeches/${speechId}/recompute`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(config),
    });
    if (!resp.ok) {
      const body = await resp.text();
      throw new Error(`recompute ${speechId} -> ${resp.status}: ${body}`);
    }
    const payload = (await resp.json()) as { revision: number };
    return payload.revision;
  }
}
