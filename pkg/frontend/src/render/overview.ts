/**
 * Overview: horizontal stacked bars of attempt outcomes per problem type.
 * Legend entries toggle series visibility from the already-loaded payload;
 * toggling never refetches.
 */

import { seriesColor } from "../palette.js";
import type { LegendToggles, OverviewRow } from "../types.js";
import { clear, emptyState, html, svg, tooltip } from "./svg.js";

const BAR_HEIGHT = 26;
const BAR_GAP = 14;
const LABEL_WIDTH = 170;
const PLOT_WIDTH = 560;
const SERIES: (keyof LegendToggles)[] = ["correct", "incorrect", "skipped"];

export interface OverviewHandlers {
  onToggle: (series: keyof LegendToggles) => void;
}

export function renderOverview(
  container: HTMLElement,
  rows: OverviewRow[],
  legend: LegendToggles,
  handlers: OverviewHandlers,
): void {
  clear(container);
  container.appendChild(html("h2", {}, "Attempted problems by type"));
  container.appendChild(renderLegend(legend, handlers));
  if (rows.length === 0) {
    emptyState(container, "No attempts ingested yet.");
    return;
  }

  const maxTotal = Math.max(
    ...rows.map((r) => SERIES.reduce((acc, s) => acc + (legend[s] ? r[s] : 0), 0)),
    1,
  );
  const height = rows.length * (BAR_HEIGHT + BAR_GAP);
  const chart = svg("svg", {
    width: LABEL_WIDTH + PLOT_WIDTH + 60,
    height,
    role: "img",
    "data-view": "overview",
  });

  rows.forEach((row, i) => {
    const y = i * (BAR_HEIGHT + BAR_GAP);
    const label = svg("text", {
      x: LABEL_WIDTH - 8,
      y: y + BAR_HEIGHT / 2 + 4,
      "text-anchor": "end",
      class: "axis-label",
    });
    label.textContent = row.problem_type;
    chart.appendChild(label);

    let x = LABEL_WIDTH;
    for (const series of SERIES) {
      if (!legend[series]) {
        continue;
      }
      const count = row[series];
      const width = (count / maxTotal) * PLOT_WIDTH;
      if (count <= 0) {
        continue;
      }
      const rect = svg("rect", {
        x,
        y,
        width,
        height: BAR_HEIGHT,
        fill: seriesColor(series),
        "data-series": series,
        "data-problem-type": row.problem_type,
        "data-count": count,
      });
      tooltip(rect, `${row.problem_type}: ${count} ${series}`);
      chart.appendChild(rect);
      x += width;
    }
    const total = svg("text", {
      x: x + 6,
      y: y + BAR_HEIGHT / 2 + 4,
      class: "count-label",
    });
    total.textContent = String(
      SERIES.reduce((acc, s) => acc + (legend[s] ? row[s] : 0), 0),
    );
    chart.appendChild(total);
  });
  container.appendChild(chart);
}

function renderLegend(legend: LegendToggles, handlers: OverviewHandlers): HTMLElement {
  const box = html("div", { class: "legend" });
  for (const series of SERIES) {
    const entry = html("button", {
      class: `legend-entry${legend[series] ? "" : " legend-off"}`,
      "data-legend": series,
      type: "button",
    });
    const swatch = html("span", { class: "swatch" });
    swatch.style.backgroundColor = seriesColor(series);
    entry.appendChild(swatch);
    entry.appendChild(document.createTextNode(series));
    entry.addEventListener("click", () => handlers.onToggle(series));
    box.appendChild(entry);
  }
  return box;
}
