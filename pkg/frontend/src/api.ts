// Typed client for the annotation-service HTTP API.
// Shapes mirror api-schema.json; the UI never reshapes or recomputes
// the numbers it receives.

export interface CandidatePayload {
  surface: string;
  keyword: string;
  cosine_to_keyword: number;
  levenshtein: number;
  similarity_ratio: number;
  rule_decision: string;
  rule_fired: string;
}

export interface Progress {
  labeled: number;
  total: number;
}

export interface NextPending {
  done: false;
  candidate: CandidatePayload;
  examples: string[];
  progress: Progress;
}

export interface NextDone {
  done: true;
  waiting_for: string[];
  progress: Progress;
}

export type NextResponse = NextPending | NextDone;

export interface LabelAck {
  ok: boolean;
  progress: Record<string, Progress>;
}

export interface AgreementReport {
  kappa: number;
  confusion: {
    both_include: number;
    a_only: number;
    b_only: number;
    both_exclude: number;
  };
  doubly_labeled: number;
  total: number;
  complete: boolean;
  disagreements: string[];
}

export type Label = 'include' | 'exclude';

export class ApiError extends Error {
  constructor(
    readonly status: number,
    message: string,
  ) {
    super(message);
  }
}

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class AnnotationApi {
  constructor(
    private readonly base: string = '',
    private readonly fetchImpl: FetchLike = (url, init) => fetch(url, init),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchImpl(this.base + path, init);
    if (!response.ok) {
      let detail = `HTTP ${response.status}`;
      try {
        const body = (await response.json()) as { error?: string };
        if (body.error) detail = body.error;
      } catch {
        // non-JSON error body; keep the status text
      }
      throw new ApiError(response.status, detail);
    }
    return (await response.json()) as T;
  }

  next(sessionId: string, annotator: string): Promise<NextResponse> {
    const encoded = encodeURIComponent(annotator);
    return this.request(`/sessions/${sessionId}/next?annotator=${encoded}`);
  }

  submitLabel(
    sessionId: string,
    annotator: string,
    candidateId: string,
    label: Label,
  ): Promise<LabelAck> {
    return this.request(`/sessions/${sessionId}/labels`, {
      method: 'POST',
      headers: { 'Content-Type': 'application/json' },
      body: JSON.stringify({ annotator, candidate_id: candidateId, label }),
    });
  }

  agreement(sessionId: string): Promise<AgreementReport> {
    return this.request(`/sessions/${sessionId}/agreement`);
  }
}
