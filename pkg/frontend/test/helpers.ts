/** Shared test scaffolding: golden fixtures and a fixture-backed fetch mock. */

import { readFileSync } from "node:fs";
import { join } from "node:path";

const FIXTURE_DIR = join(__dirname, "fixtures");

export function fixture<T>(name: string): T {
  return JSON.parse(readFileSync(join(FIXTURE_DIR, name), "utf-8")) as T;
}

export const meta = fixture<{ student: string; problem_type: string; attempt_id: string }>(
  "meta.json",
);

export function mountShell(): { view: HTMLElement; banner: HTMLElement; controls: HTMLElement } {
  document.body.innerHTML =
    '<div id="banner"></div><aside id="controls"></aside><section id="view"></section>';
  return {
    view: document.getElementById("view") as HTMLElement,
    banner: document.getElementById("banner") as HTMLElement,
    controls: document.getElementById("controls") as HTMLElement,
  };
}

export interface FetchLog {
  calls: string[];
}

/**
 * fetch stub serving the golden seed-7 payloads; records every URL so tests
 * can assert which requests happened (and which did not).
 */
export function fixtureFetch(log: FetchLog): typeof fetch {
  const routes: Array<[RegExp, () => unknown]> = [
    [/^\/api\/overview/, () => fixture("overview.json")],
    [/^\/api\/students$/, () => fixture("students.json")],
    [/^\/api\/problem_types$/, () => fixture("problem_types.json")],
    [new RegExp(`^/api/students/${meta.student}/timeline`), () => fixture("timeline.json")],
    [new RegExp(`^/api/problem_types/${meta.problem_type}/paths`), () => fixture("paths.json")],
    [new RegExp(`^/api/attempts/${meta.attempt_id}$`), () => fixture("details.json")],
    [/^\/api\/query$/, () => fixture("query.json")],
  ];
  return ((input: RequestInfo | URL) => {
    const url = String(input);
    log.calls.push(url);
    for (const [route, loader] of routes) {
      if (route.test(url)) {
        return Promise.resolve(jsonResponse(200, loader()));
      }
    }
    return Promise.resolve(jsonResponse(404, { detail: `unknown: ${url}` }));
  }) as typeof fetch;
}

export function jsonResponse(status: number, payload: unknown): Response {
  return {
    ok: status >= 200 && status < 300,
    status,
    json: () => Promise.resolve(payload),
  } as unknown as Response;
}

export function seriesColorsUsed(root: Element): Set<string> {
  const colors = new Set<string>();
  for (const node of root.querySelectorAll("[data-series]")) {
    const fill = node.getAttribute("fill");
    if (fill) {
      colors.add(fill);
    }
  }
  return colors;
}
