/**
 * Details view: one attempt's step line fused with its per-step correctness
 * segments. The segment palette matches the Student view; the x-extent of
 * all segments equals the attempt's total duration.
 */

import { minutesLabel, secondsLabel, ticks } from "../format.js";
import { PALETTE, seriesColor } from "../palette.js";
import type { DetailPath } from "../types.js";
import { clear, emptyState, html, svg, tooltip } from "./svg.js";

const LABEL_WIDTH = 170;
const PLOT_WIDTH = 620;
const ROW_HEIGHT = 40;
const SEGMENT_HEIGHT = 16;
const AXIS_HEIGHT = 30;
const MIN_SEGMENT_PX = 1;

export function renderDetails(container: HTMLElement, detail: DetailPath): void {
  clear(container);
  container.appendChild(
    html(
      "h2",
      {},
      `${detail.user_id} on ${detail.problem_type} (${detail.terminal})`,
    ),
  );
  if (detail.step_order.length === 0) {
    emptyState(container, "This attempt has no recorded interactions.");
    return;
  }

  const maxSeconds = Math.max(detail.total_duration, 1e-9);
  const x = (seconds: number) => LABEL_WIDTH + (seconds / maxSeconds) * PLOT_WIDTH;
  const y = (stepIndex: number) => (stepIndex + 0.5) * ROW_HEIGHT;
  const height = detail.step_order.length * ROW_HEIGHT + AXIS_HEIGHT;
  const chart = svg("svg", {
    width: LABEL_WIDTH + PLOT_WIDTH + 30,
    height,
    role: "img",
    "data-view": "details",
    "data-attempt-id": detail.attempt_id,
  });

  detail.step_order.forEach((selection, i) => {
    const label = svg("text", {
      x: LABEL_WIDTH - 8,
      y: y(i) + 4,
      "text-anchor": "end",
      class: "axis-label",
    });
    label.textContent = selection;
    chart.appendChild(label);
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

  // per-step segment bands, laid out in path order so time is continuous
  const extents = new Map<number, { from: number; to: number }>();
  let previous = 0;
  for (const point of detail.points) {
    extents.set(point.step_index, { from: previous, to: point.cumulative_time });
    previous = point.cumulative_time;
  }
  for (const step of detail.steps) {
    const extent = extents.get(step.step_index);
    if (!extent) {
      continue;
    }
    let cursor = extent.from;
    for (const segment of step.segments) {
      const width = Math.max(x(cursor + segment.duration) - x(cursor), MIN_SEGMENT_PX);
      const rect = svg("rect", {
        x: x(cursor),
        y: y(step.step_index) - SEGMENT_HEIGHT / 2,
        width,
        height: SEGMENT_HEIGHT,
        fill: seriesColor(segment.kind),
        "data-series": segment.kind,
        "data-step": step.selection,
      });
      tooltip(
        rect,
        `${step.selection} · KC: ${segment.kc} · input: ${segment.input} · ` +
          `${segment.kind}, ${secondsLabel(segment.duration)}`,
      );
      chart.appendChild(rect);
      cursor += segment.duration;
    }
  }

  if (detail.points.length > 0) {
    const parts: string[] = [];
    let from = 0;
    for (const point of detail.points) {
      parts.push(`${x(from)},${y(point.step_index)}`);
      parts.push(`${x(point.cumulative_time)},${y(point.step_index)}`);
      from = point.cumulative_time;
    }
    chart.appendChild(
      svg("polyline", {
        points: parts.join(" "),
        fill: "none",
        stroke: PALETTE.path,
        "stroke-width": 1.2,
        "stroke-dasharray": "3,3",
        "data-marker": "detail-path",
      }),
    );
  }

  container.appendChild(chart);
  container.appendChild(
    html(
      "p",
      { class: "hint-text" },
      `Total time: ${minutesLabel(detail.total_duration)}`,
    ),
  );
}
