/**
 * View-state wiring for the four coordinated views.
 *
 * The UI is stateless with respect to data: every rendered number comes from
 * the most recent API payload. The only client-side state is the selection
 * (mode, student, problem type, attempt) and the legend toggles; toggling the
 * legend re-renders the cached overview payload and never refetches.
 */

import { ApiClient, ApiError, StaleResponse } from "./api.js";
import { renderDetails } from "./render/details.js";
import { renderOverview } from "./render/overview.js";
import { renderProblemType } from "./render/problemType.js";
import { renderStudent } from "./render/student.js";
import { clear, html } from "./render/svg.js";
import type { LegendToggles, OverviewRow, QueryResult, ViewMode, ViewState } from "./types.js";

export class App {
  readonly state: ViewState = {
    mode: "overview",
    studentId: null,
    problemType: null,
    attemptId: null,
    // skipped is deselected by default; the legend re-includes it
    legend: { correct: true, incorrect: true, skipped: false },
  };

  private overviewCache: OverviewRow[] | null = null;

  constructor(
    private readonly api: ApiClient,
    private readonly viewRoot: HTMLElement,
    private readonly bannerRoot: HTMLElement,
    private readonly controlsRoot: HTMLElement,
  ) {}

  async start(): Promise<void> {
    await this.buildControls();
    await this.showOverview();
  }

  // -- controls ------------------------------------------------------------

  private async buildControls(): Promise<void> {
    clear(this.controlsRoot);
    const nav = html("div", { class: "mode-nav" });
    const overviewButton = html("button", { "data-nav": "overview", type: "button" }, "Overview");
    overviewButton.addEventListener("click", () => void this.showOverview());
    nav.appendChild(overviewButton);
    this.controlsRoot.appendChild(nav);

    let students: string[] = [];
    let problemTypes: string[] = [];
    try {
      [students, problemTypes] = await Promise.all([
        this.api.students(),
        this.api.problemTypes(),
      ]);
    } catch (error) {
      this.showError(error);
    }

    this.controlsRoot.appendChild(
      this.dropdown("student-select", "Student", students, (value) => {
        void this.showStudent(value);
      }),
    );
    this.controlsRoot.appendChild(
      this.dropdown("problem-type-select", "Problem type", problemTypes, (value) => {
        void this.showProblemType(value);
      }),
    );
    this.controlsRoot.appendChild(this.queryBox());
  }

  private dropdown(
    id: string,
    label: string,
    options: string[],
    onPick: (value: string) => void,
  ): HTMLElement {
    const wrap = html("label", { class: "control" }, `${label}: `);
    const select = html("select", { id });
    select.appendChild(html("option", { value: "" }, "—"));
    for (const option of options) {
      select.appendChild(html("option", { value: option }, option));
    }
    select.addEventListener("change", () => {
      if (select.value) {
        onPick(select.value);
      }
    });
    wrap.appendChild(select);
    return wrap;
  }

  private queryBox(): HTMLElement {
    const wrap = html("div", { class: "control query-box" });
    const input = html("input", {
      id: "query-input",
      placeholder: "sequence query, e.g. I{3,}",
      type: "text",
    });
    const button = html("button", { id: "query-run", type: "button" }, "Search");
    const results = html("ul", { id: "query-results" });
    button.addEventListener("click", () => {
      void this.runQuery(input.value, results);
    });
    wrap.appendChild(input);
    wrap.appendChild(button);
    wrap.appendChild(results);
    return wrap;
  }

  private async runQuery(pattern: string, results: HTMLElement): Promise<void> {
    if (!pattern.trim()) {
      return;
    }
    clear(results);
    let payload: QueryResult;
    try {
      payload = await this.api.query(pattern, "attempt", false);
    } catch (error) {
      results.appendChild(html("li", { class: "query-error" }, String(error)));
      return;
    }
    if (payload.matches.length === 0) {
      results.appendChild(html("li", {}, "no matches"));
      return;
    }
    for (const match of payload.matches.slice(0, 50)) {
      const item = html(
        "li",
        { class: "query-match", "data-attempt-id": match.stream_id },
        `${match.symbols} @ ${match.start}–${match.end}`,
      );
      item.addEventListener("click", () => void this.showDetails(match.stream_id));
      results.appendChild(item);
    }
  }

  // -- view transitions ----------------------------------------------------

  async showOverview(): Promise<void> {
    this.setMode("overview");
    try {
      this.overviewCache = await this.api.overview();
    } catch (error) {
      this.showError(error);
      return;
    }
    this.renderOverviewFromCache();
  }

  /** Legend toggles re-render the cached payload; no network traffic. */
  toggleLegend(series: keyof LegendToggles): void {
    this.state.legend[series] = !this.state.legend[series];
    if (this.state.mode === "overview" && this.overviewCache !== null) {
      this.renderOverviewFromCache();
    }
  }

  private renderOverviewFromCache(): void {
    renderOverview(this.viewRoot, this.overviewCache ?? [], this.state.legend, {
      onToggle: (series) => this.toggleLegend(series),
    });
  }

  async showStudent(userId: string): Promise<void> {
    this.setMode("student");
    this.state.studentId = userId;
    try {
      const bars = await this.api.studentTimeline(userId);
      renderStudent(this.viewRoot, userId, bars);
    } catch (error) {
      this.showError(error);
    }
  }

  async showProblemType(name: string): Promise<void> {
    this.setMode("problem_type");
    this.state.problemType = name;
    try {
      const payload = await this.api.problemTypePaths(name);
      renderProblemType(this.viewRoot, payload, {
        onSelectAttempt: (attemptId) => void this.showDetails(attemptId),
      });
    } catch (error) {
      this.showError(error);
    }
  }

  async showDetails(attemptId: string): Promise<void> {
    this.setMode("details");
    this.state.attemptId = attemptId;
    try {
      const detail = await this.api.attemptDetails(attemptId);
      renderDetails(this.viewRoot, detail);
    } catch (error) {
      if (error instanceof ApiError && error.status === 404 && this.state.problemType) {
        await this.showProblemType(this.state.problemType);
        this.notice(`Attempt ${attemptId} no longer exists; returning to problem type.`);
        return;
      }
      this.showError(error);
    }
  }

  private setMode(mode: ViewMode): void {
    this.state.mode = mode;
    if (mode !== "details") {
      this.state.attemptId = null;
    }
    clear(this.bannerRoot);
  }

  private notice(message: string): void {
    clear(this.bannerRoot);
    this.bannerRoot.appendChild(html("div", { class: "notice" }, message));
  }

  private showError(error: unknown): void {
    if (error instanceof StaleResponse) {
      return; // a newer selection's response is already on its way
    }
    clear(this.bannerRoot);
    this.bannerRoot.appendChild(
      html("div", { class: "error-banner" }, `API error: ${String(error)}`),
    );
  }
}
