/**
 * Thin API client. One in-flight request per view channel: callers tag each
 * request with a channel name, and a response is dropped when a newer request
 * on the same channel has been issued since (stale-selection guard).
 */

import type {
  DetailPath,
  OverviewRow,
  ProblemTypePaths,
  QueryResult,
  TimelineBar,
} from "./types.js";

export class ApiError extends Error {
  constructor(readonly status: number, message: string) {
    super(message);
  }
}

export class StaleResponse extends Error {
  constructor() {
    super("superseded by a newer request");
  }
}

export class ApiClient {
  private sequence = new Map<string, number>();

  constructor(private readonly base: string = "") {}

  private async get<T>(channel: string, url: string): Promise<T> {
    const ticket = (this.sequence.get(channel) ?? 0) + 1;
    this.sequence.set(channel, ticket);
    const response = await fetch(this.base + url);
    if (this.sequence.get(channel) !== ticket) {
      throw new StaleResponse();
    }
    if (!response.ok) {
      throw new ApiError(response.status, `${url} -> ${response.status}`);
    }
    return (await response.json()) as T;
  }

  overview(): Promise<OverviewRow[]> {
    return this.get("overview", "/api/overview");
  }

  students(): Promise<string[]> {
    return this.get("students", "/api/students");
  }

  problemTypes(): Promise<string[]> {
    return this.get("problem_types", "/api/problem_types");
  }

  studentTimeline(userId: string, problemType?: string): Promise<TimelineBar[]> {
    const suffix = problemType ? `?problem_type=${encodeURIComponent(problemType)}` : "";
    return this.get(
      "student",
      `/api/students/${encodeURIComponent(userId)}/timeline${suffix}`,
    );
  }

  problemTypePaths(name: string): Promise<ProblemTypePaths> {
    return this.get("problem_type", `/api/problem_types/${encodeURIComponent(name)}/paths`);
  }

  attemptDetails(attemptId: string): Promise<DetailPath> {
    return this.get("details", `/api/attempts/${encodeURIComponent(attemptId)}`);
  }

  async query(pattern: string, scope: string, sameStep: boolean): Promise<QueryResult> {
    const response = await fetch(`${this.base}/api/query`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ pattern, scope, same_step: sameStep }),
    });
    if (!response.ok) {
      throw new ApiError(response.status, `query -> ${response.status}`);
    }
    return (await response.json()) as QueryResult;
  }
}
