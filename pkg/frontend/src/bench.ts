import { ApiError, RequestGate } from "./api.js";
import type { AppContext } from "./context.js";
import { clear, el, errorBanner, num } from "./dom.js";
import { appendReport, iterateFrom, setCandidate, type CandidateDesign } from "./state.js";
import type { DesignReport, StyleInfo } from "./types.js";

/** Submit candidate feature vectors, read the score report, iterate.
 *
 * All numbers shown come straight out of the /score response; the panel
 * never recomputes probabilities, distances, or weights. Validation errors
 * from the API (400) land inline on the field that caused them.
 */
export class BenchPanel {
  private readonly ctx: AppContext;
  private readonly root: HTMLElement;
  private readonly nameInput: HTMLInputElement;
  private readonly featuresInput: HTMLTextAreaElement;
  private readonly kInput: HTMLInputElement;
  private readonly featuresError: HTMLElement;
  private readonly kError: HTMLElement;
  private readonly reportHost: HTMLElement;
  private readonly historyHost: HTMLElement;
  private readonly gate = new RequestGate();
  private styles: StyleInfo[] | null = null;

  constructor(ctx: AppContext) {
    this.ctx = ctx;
    this.nameInput = el("input", {
      type: "text",
      "data-testid": "candidate-name",
      value: ctx.getState().candidate.name,
    });
    this.featuresInput = el("textarea", {
      rows: 3,
      "data-testid": "candidate-features",
      placeholder: "[0.1, -0.4, ...] one number per model input",
    });
    this.kInput = el("input", { type: "text", "data-testid": "candidate-k", placeholder: "5" });
    this.featuresError = el("div", { class: "field-error", "data-testid": "features-error" });
    this.kError = el("div", { class: "field-error", "data-testid": "k-error" });
    this.reportHost = el("div", { "data-testid": "report" });
    this.historyHost = el("div", { "data-testid": "history" });

    const form = el(
      "form",
      {
        class: "bench-form",
        onsubmit: (event: Event) => {
          event.preventDefault();
          void this.submit();
        },
      },
      el("label", {}, "Name ", this.nameInput),
      el("label", {}, "Features (JSON array) ", this.featuresInput),
      this.featuresError,
      el("label", {}, "Neighbors to show (k) ", this.kInput),
      this.kError,
      el("button", { type: "submit", "data-testid": "submit-design" }, "Score design"),
    );
    this.root = el(
      "section",
      { class: "panel bench" },
      el("h2", {}, "Design bench"),
      form,
      this.reportHost,
      el("h3", {}, "Session history"),
      this.historyHost,
    );
  }

  mount(container: Element): void {
    container.append(this.root);
    this.fillFormFromState();
    this.renderHistory();
  }

  private fillFormFromState(): void {
    const candidate = this.ctx.getState().candidate;
    this.nameInput.value = candidate.name;
    if (candidate.features.length > 0) {
      this.featuresInput.value = JSON.stringify(candidate.features);
    }
  }

  private setFieldError(host: HTMLElement, message: string | null): void {
    host.textContent = message ?? "";
  }

  async submit(): Promise<void> {
    this.setFieldError(this.featuresError, null);
    this.setFieldError(this.kError, null);

    let parsed: unknown;
    try {
      parsed = JSON.parse(this.featuresInput.value);
    } catch {
      this.setFieldError(this.featuresError, "not valid JSON: expected an array of numbers");
      return;
    }
    const candidate: CandidateDesign = {
      name: this.nameInput.value || "candidate",
      features: parsed as number[],
    };
    const request: { features: number[]; k?: number } = { features: candidate.features };
    const kText = this.kInput.value.trim();
    if (kText !== "") {
      const kNum = Number(kText);
      // send garbage through so the API's own validation answers
      request.k = Number.isFinite(kNum) ? kNum : (kText as unknown as number);
    }

    const stamp = this.gate.stamp();
    try {
      const report = await this.ctx.client.score(request);
      if (!this.gate.isCurrent(stamp)) {
        return;
      }
      this.ctx.setState(setCandidate(this.ctx.getState(), candidate));
      this.ctx.setState(appendReport(this.ctx.getState(), candidate, report));
      await this.renderReport(report);
      this.renderHistory();
    } catch (error) {
      if (!this.gate.isCurrent(stamp)) {
        return;
      }
      if (error instanceof ApiError && error.status === 400) {
        const target = error.detail.startsWith("k must") ? this.kError : this.featuresError;
        this.setFieldError(target, error.detail);
        return;
      }
      clear(this.reportHost);
      this.reportHost.append(
        errorBanner(`Scoring failed: ${String(error)}`, () => void this.submit()),
      );
    }
  }

  private async styleNames(): Promise<string[]> {
    if (!this.styles) {
      try {
        this.styles = (await this.ctx.client.styles()).styles;
      } catch {
        return [];
      }
    }
    return this.styles.map((s) => s.name);
  }

  private async renderReport(report: DesignReport): Promise<void> {
    const names = await this.styleNames();
    clear(this.reportHost);

    const bars = el("div", { class: "prob-bars" });
    report.style_probs.forEach((p, i) => {
      bars.append(
        el(
          "div",
          { class: "prob-row", "data-style": names[i] ?? String(i) },
          el("span", { class: "prob-label" }, names[i] ?? `style ${i}`),
          el("div", { class: "prob-track" }, el("div", {
            class: "prob-fill",
            style: `width: ${(p * 100).toFixed(1)}%`,
          })),
          num(p, 3, `prob-${i}`),
        ),
      );
    });

    const gallery = el(
      "table",
      { class: "neighbors", "data-testid": "neighbor-gallery" },
      el(
        "thead",
        {},
        el("tr", {}, el("th", {}, "product"), el("th", {}, "group"), el("th", {}, "distance")),
      ),
      el(
        "tbody",
        {},
        ...report.top_neighbors.map((n, i) =>
          el(
            "tr",
            { "data-sku": n.sku },
            el("td", {}, n.sku),
            el("td", {}, n.group),
            el("td", {}, num(n.distance, 4, `neighbor-distance-${i}`)),
          ),
        ),
      ),
    );

    const connections = el("ul", { class: "connections", "data-testid": "group-connections" });
    for (const [group, weight] of Object.entries(report.group_connections)) {
      connections.append(
        el("li", { "data-group": group }, `${group}: `, num(weight, 3, `connection-${group}`)),
      );
    }
    if (connections.childElementCount === 0) {
      connections.append(el("li", { class: "muted" }, "no in-window connections"));
    }

    const flags = el("div", { class: "flags", "data-testid": "flags" });
    for (const flag of report.flags) {
      flags.append(el("span", { class: "flag" }, flag));
    }

    this.reportHost.append(
      el("h3", {}, "Report"),
      bars,
      el("p", {}, "similarity score: ", num(report.similarity_score, 3, "similarity-score")),
      el("h4", {}, "Nearest products"),
      gallery,
      el("h4", {}, "In-window connections by group"),
      connections,
      flags,
    );
  }

  private renderHistory(): void {
    clear(this.historyHost);
    const history = this.ctx.getState().history;
    if (history.length === 0) {
      this.historyHost.append(el("p", { class: "muted" }, "No submissions yet."));
      return;
    }
    const list = el("ol", { class: "history", "data-testid": "history-list" });
    history.forEach((entry, index) => {
      const prev = index > 0 ? history[index - 1] : undefined;
      const trend =
        prev === undefined
          ? ""
          : entry.report.similarity_score >= prev.report.similarity_score
            ? " ▲"
            : " ▼";
      const item = el(
        "li",
        { "data-entry-id": String(entry.id), "data-testid": `history-entry-${entry.id}` },
        `${entry.candidate.name}: score `,
        num(entry.report.similarity_score, 3, `history-score-${entry.id}`),
        prev === undefined
          ? ""
          : el("span", { class: "muted" }, ` (prev `, num(prev.report.similarity_score, 3), `)${trend}`),
        " ",
        el(
          "button",
          {
            type: "button",
            "data-testid": `iterate-${entry.id}`,
            onclick: () => this.iterate(entry.id),
          },
          "Iterate",
        ),
      );
      list.append(item);
    });
    this.historyHost.append(list);
  }

  /** Copy a past candidate back into the form for another round. */
  iterate(entryId: number): void {
    this.ctx.setState(iterateFrom(this.ctx.getState(), entryId));
    this.fillFormFromState();
    this.featuresInput.focus();
  }
}
