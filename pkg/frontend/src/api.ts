/** Typed client for the annotation service HTTP API.
 *
 * Every method maps 1:1 onto an endpoint and returns the response body
 * unchanged. Report documents in particular are passed through verbatim:
 * formatted values stay the strings the server produced, so views can
 * display them without touching the numbers.
 */

export type NodeKind = "question" | "severity" | "terminal";

export interface NodePayload {
  node_id: string;
  kind: NodeKind;
  question: string;
  category: string | null;
}

export interface SessionState {
  session_id: string;
  annotator_id: string;
  segment_id: string;
  system_id: string;
  done: boolean;
  finalized: boolean;
  node: NodePayload | null;
  trail: [string, string][];
}

export interface OpenItem {
  done: false;
  segment_id: string;
  system_id: string;
  source_da: string;
  gold_msa: string;
  hypothesis: string;
  remaining: number;
}

export type NextItem = { done: true } | OpenItem;

export interface AnnotationRecord {
  annotator: string;
  segment: string;
  system: string;
  severities: Record<string, number>;
  adp_applicable: boolean;
  revision: number;
}

export interface ProjectMeta {
  id: string;
  name: string;
  segments: number;
  systems: string[];
  annotators: string[];
  annotations: number;
  config: Record<string, unknown>;
}

export interface SegmentRow {
  id: string;
  source_da: string;
  gold_msa: string;
}

export interface ProgressRow {
  annotator_id: string;
  completed: number;
  total: number;
  percent: number;
}

export interface ProgressDoc {
  total_items: number;
  annotators: ProgressRow[];
}

// -- report documents (schema posteval-report/1) ------------------------------

export type BucketName = "NoEdit" | "Minor" | "Major";
export const BUCKETS: BucketName[] = ["NoEdit", "Minor", "Major"];

export interface SeverityDoc {
  schema: string;
  kind: "severity";
  systems: {
    system: string;
    segments: number;
    counts: Record<BucketName, number>;
    percentages: Record<BucketName, number>;
  }[];
  notes: string[];
}

export interface PatternDoc {
  schema: string;
  kind: "pattern";
  categories: string[];
  systems: {
    system: string;
    totals: Record<string, string>;
    grand_total: string;
    shares: Record<string, number>;
    trm_gsmis_share: number;
  }[];
  notes: string[];
}

export interface ScoresDoc {
  schema: string;
  kind: "scores";
  systems: {
    system: string;
    segments: { segment: string; segs: string; bucket: string }[];
    total: string;
    mean: string;
  }[];
  notes: string[];
}

export interface AgreementCell {
  dimension: string;
  system: string;
  kappa: string;
  band: string | null;
  items: number;
}

export interface AgreementDoc {
  schema: string;
  kind: "agreement";
  annotators: string[];
  systems: string[];
  dimensions: string[];
  cells: AgreementCell[];
  excluded: { system: string; segment: string }[];
  notes: string[];
}

export type ReportKind = "scores" | "severity" | "pattern" | "agreement";

/** A non-2xx response, carrying the structured error body from the server. */
export class ApiError extends Error {
  readonly status: number;
  /** Server-side error name, e.g. "GatingViolation"; names the violated rule. */
  readonly error: string;
  readonly detail: string;
  /** Full body; may hold extras such as an "uncovered" item list. */
  readonly payload: Record<string, unknown>;

  constructor(status: number, payload: Record<string, unknown>) {
    const error = typeof payload.error === "string" ? payload.error : `HTTP ${status}`;
    const detail = typeof payload.detail === "string" ? payload.detail : "";
    super(detail ? `${error}: ${detail}` : error);
    this.name = "ApiError";
    this.status = status;
    this.error = error;
    this.detail = detail;
    this.payload = payload;
  }

  static async from(res: Response): Promise<ApiError> {
    let payload: Record<string, unknown>;
    try {
      payload = (await res.json()) as Record<string, unknown>;
    } catch {
      payload = { error: `HTTP ${res.status}`, detail: res.statusText };
    }
    return new ApiError(res.status, payload);
  }
}

export class ApiClient {
  constructor(readonly base: string) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const init: RequestInit = { method };
    if (body !== undefined) {
      init.headers = { "content-type": "application/json" };
      init.body = JSON.stringify(body);
    }
    const res = await fetch(this.base + path, init);
    if (!res.ok) throw await ApiError.from(res);
    if (res.status === 204) return undefined as T;
    return (await res.json()) as T;
  }

  listProjects(): Promise<{ projects: ProjectMeta[] }> {
    return this.request("GET", "/projects");
  }

  createProject(name: string, demo = false): Promise<ProjectMeta> {
    return this.request("POST", "/projects", { name, demo });
  }

  getProject(id: string): Promise<ProjectMeta> {
    return this.request("GET", `/projects/${encodeURIComponent(id)}`);
  }

  deleteProject(id: string): Promise<void> {
    return this.request("DELETE", `/projects/${encodeURIComponent(id)}`);
  }

  segments(project: string): Promise<{ segments: SegmentRow[] }> {
    return this.request("GET", `/projects/${encodeURIComponent(project)}/segments`);
  }

  registerAnnotator(project: string, annotatorId: string): Promise<{ annotators: string[] }> {
    return this.request("POST", `/projects/${encodeURIComponent(project)}/annotators`, {
      annotator_id: annotatorId,
    });
  }

  nextItem(project: string, annotatorId: string): Promise<NextItem> {
    const qs = new URLSearchParams({ annotator_id: annotatorId });
    return this.request("GET", `/projects/${encodeURIComponent(project)}/next-item?${qs}`);
  }

  startSession(project: string, annotatorId: string, segmentId: string, systemId: string): Promise<SessionState> {
    return this.request("POST", `/projects/${encodeURIComponent(project)}/session/start`, {
      annotator_id: annotatorId,
      segment_id: segmentId,
      system_id: systemId,
    });
  }

  getSession(project: string, sessionId: string): Promise<SessionState> {
    return this.request("GET", `/projects/${encodeURIComponent(project)}/session/${sessionId}`);
  }

  answer(project: string, sessionId: string, response: string | number): Promise<SessionState> {
    return this.request("POST", `/projects/${encodeURIComponent(project)}/session/${sessionId}/answer`, {
      response,
    });
  }

  finalize(project: string, sessionId: string): Promise<{ annotation: AnnotationRecord }> {
    return this.request("POST", `/projects/${encodeURIComponent(project)}/session/${sessionId}/finalize`);
  }

  submitAnnotation(
    project: string,
    body: {
      annotator_id: string;
      segment_id: string;
      system_id: string;
      severities: Record<string, number>;
      adp_applicable: boolean;
    },
  ): Promise<{ annotation: AnnotationRecord }> {
    return this.request("POST", `/projects/${encodeURIComponent(project)}/annotations`, body);
  }

  progress(project: string): Promise<ProgressDoc> {
    return this.request("GET", `/projects/${encodeURIComponent(project)}/progress`);
  }

  report<T>(project: string, kind: ReportKind): Promise<T> {
    return this.request("GET", `/projects/${encodeURIComponent(project)}/reports/${kind}?format=structured`);
  }
}
