/**
 * Problem Type view: a step line chart. Steps run top-to-bottom on the
 * y-axis, elapsed minutes along x; every attempt is one clickable polyline
 * and incomplete attempts visibly stop mid-chart.
 */

import { minutesLabel, ticks } from "../format.js";
import { PALETTE } from "../palette.js";
import type { ProblemTypePaths, StepPath } from "../types.js";
import { clear, emptyState, html, svg, tooltip } from "./svg.js";

const LABEL_WIDTH = 170;
const PLOT_WIDTH = 620;
const ROW_HEIGHT = 34;
const AXIS_HEIGHT = 30;

export interface ProblemTypeHandlers {
  onSelectAttempt: (attemptId: string) => void;
}

export function renderProblemType(
  container: HTMLElement,
  payload: ProblemTypePaths,
  handlers: ProblemTypeHandlers,
): void {
  clear(container);
  container.appendChild(html("h2", {}, `Attempts of ${payload.problem_type}`));
  if (payload.paths.length === 0 || payload.step_order.length === 0) {
    renderAxesOnly(container, payload);
    return;
  }

  const maxSeconds = Math.max(
    ...payload.paths.map((p) => (p.points.length ? p.points[p.points.length - 1].cumulative_time : 0)),
    1,
  );
  const x = (seconds: number) => LABEL_WIDTH + (seconds / maxSeconds) * PLOT_WIDTH;
  const y = (stepIndex: number) => (stepIndex + 0.5) * ROW_HEIGHT;
  const height = payload.step_order.length * ROW_HEIGHT + AXIS_HEIGHT;
  const chart = svg("svg", {
    width: LABEL_WIDTH + PLOT_WIDTH + 30,
    height,
    role: "img",
    "data-view": "problem-type",
  });

  payload.step_order.forEach((selection, i) => {
    const label = svg("text", {
      x: LABEL_WIDTH - 8,
      y: y(i) + 4,
      "text-anchor": "end",
      class: "axis-label",
    });
    label.textContent = selection;
    chart.appendChild(label);
    chart.appendChild(
      svg("line", {
        x1: LABEL_WIDTH,
        y1: y(i),
        x2: LABEL_WIDTH + PLOT_WIDTH,
        y2: y(i),
        class: "grid-line",
        stroke: "#dddddd",
      }),
    );
  });

  for (const tick of ticks(maxSeconds, 5)) {
    const label = svg("text", {
      x: x(tick),
      y: height - 8,
      "text-anchor": "middle",
      class: "axis-label",
    });
    label.textContent = minutesLabel(tick);
    chart.appendChild(label);
  }

  for (const path of payload.paths) {
    if (path.points.length === 0) {
      continue; // a skipped attempt has no polyline to draw
    }
    const polyline = svg("polyline", {
      points: pathPoints(path, x, y),
      fill: "none",
      stroke: PALETTE.path,
      "stroke-width": 1.6,
      class: "attempt-path",
      "data-attempt-id": path.attempt_id,
      "data-terminal": path.terminal,
    });
    tooltip(
      polyline,
      `${path.user_id} — ${path.terminal} — ` +
        minutesLabel(path.points[path.points.length - 1].cumulative_time),
    );
    polyline.addEventListener("click", () => handlers.onSelectAttempt(path.attempt_id));
    chart.appendChild(polyline);
  }
  container.appendChild(chart);
  container.appendChild(
    html("p", { class: "hint-text" }, "Click a path to open its Details view."),
  );
}

function pathPoints(
  path: StepPath,
  x: (seconds: number) => number,
  y: (stepIndex: number) => number,
): string {
  const parts: string[] = [`${x(0)},${y(path.points[0].step_index)}`];
  let previous = 0;
  for (const point of path.points) {
    // horizontal run across the step, then drop to the next visited step
    parts.push(`${x(previous)},${y(point.step_index)}`);
    parts.push(`${x(point.cumulative_time)},${y(point.step_index)}`);
    previous = point.cumulative_time;
  }
  return parts.join(" ");
}

function renderAxesOnly(container: HTMLElement, payload: ProblemTypePaths): void {
  const chart = svg("svg", {
    width: LABEL_WIDTH + PLOT_WIDTH + 30,
    height: Math.max(payload.step_order.length, 1) * ROW_HEIGHT + AXIS_HEIGHT,
    "data-view": "problem-type",
  });
  payload.step_order.forEach((selection, i) => {
    const label = svg("text", {
      x: LABEL_WIDTH - 8,
      y: (i + 0.5) * ROW_HEIGHT + 4,
      "text-anchor": "end",
      class: "axis-label",
    });
    label.textContent = selection;
    chart.appendChild(label);
  });
  container.appendChild(chart);
  emptyState(container, "No attempts for this problem type yet.");
}
