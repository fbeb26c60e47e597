/**
 * Student view: one stacked bar per attempt, segment widths proportional to
 * interaction durations, black lines between steps, an asterisk on completed
 * attempts, and hover tooltips carrying the KC and the student's input.
 */

import { minutesLabel, secondsLabel } from "../format.js";
import { PALETTE, seriesColor } from "../palette.js";
import type { TimelineBar } from "../types.js";
import { clear, emptyState, html, svg, tooltip } from "./svg.js";

const BAR_HEIGHT = 22;
const BAR_GAP = 12;
const LABEL_WIDTH = 150;
const PLOT_WIDTH = 640;
const MIN_SEGMENT_PX = 1;

export function renderStudent(
  container: HTMLElement,
  userId: string,
  bars: TimelineBar[],
): void {
  clear(container);
  container.appendChild(html("h2", {}, `Attempts by ${userId}`));
  if (bars.length === 0) {
    emptyState(container, "No attempts recorded for this student.");
    return;
  }

  const maxDuration = Math.max(...bars.map((b) => b.total_duration), 1);
  const scale = (seconds: number) => (seconds / maxDuration) * PLOT_WIDTH;
  const height = bars.length * (BAR_HEIGHT + BAR_GAP);
  const chart = svg("svg", {
    width: LABEL_WIDTH + PLOT_WIDTH + 40,
    height,
    role: "img",
    "data-view": "student",
  });

  bars.forEach((bar, i) => {
    const y = i * (BAR_HEIGHT + BAR_GAP);
    const label = svg("text", {
      x: LABEL_WIDTH - 8,
      y: y + BAR_HEIGHT / 2 + 4,
      "text-anchor": "end",
      class: "axis-label",
    });
    label.textContent = bar.start_state;
    tooltip(label, `${bar.interface} — started ${bar.start_time}`);
    chart.appendChild(label);

    // start marker: the attempt exists even when no step was touched
    chart.appendChild(
      svg("circle", {
        cx: LABEL_WIDTH,
        cy: y + BAR_HEIGHT / 2,
        r: 2.5,
        fill: PALETTE.stepBoundary,
        "data-marker": "start",
      }),
    );

    let x = LABEL_WIDTH;
    bar.steps.forEach((step, stepIndex) => {
      for (const segment of step.segments) {
        const width = Math.max(scale(segment.duration), MIN_SEGMENT_PX);
        const rect = svg("rect", {
          x,
          y,
          width,
          height: BAR_HEIGHT,
          fill: seriesColor(segment.kind),
          "data-series": segment.kind,
          "data-attempt-id": bar.attempt_id,
          "data-step": step.selection,
        });
        tooltip(
          rect,
          `${step.selection} · KC: ${segment.kc} · input: ${segment.input} · ` +
            `${segment.kind}, ${secondsLabel(segment.duration)}`,
        );
        chart.appendChild(rect);
        x += width;
      }
      if (step.segments.length > 0 && stepIndex < bar.steps.length - 1) {
        chart.appendChild(
          svg("line", {
            x1: x,
            y1: y,
            x2: x,
            y2: y + BAR_HEIGHT,
            stroke: PALETTE.stepBoundary,
            "stroke-width": 1.5,
            "data-marker": "step-boundary",
          }),
        );
      }
    });

    if (bar.completed) {
      const star = svg("text", {
        x: x + 5,
        y: y + BAR_HEIGHT / 2 + 5,
        class: "completed-marker",
        "data-marker": "completed",
      });
      star.textContent = "*";
      tooltip(star, `completed in ${minutesLabel(bar.total_duration)}`);
      chart.appendChild(star);
    }
  });
  container.appendChild(chart);
}
