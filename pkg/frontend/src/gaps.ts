import type { AppContext } from "./context.js";
import { clear, el, errorBanner, num } from "./dom.js";
import type { GapsResponse } from "./types.js";

export interface GapRow {
  group: string;
  nodeCount: number;
  isolatedCount: number;
  isolatedSkus: string[];
  zeroPairCount: number;
  degreeMin: number;
  degreeMedian: number;
  degreeMax: number;
}

export type GapSortKey = "isolated" | "zeroPairs";

/** Flatten the API report into table rows; the zero-weight pair count for a
 * group is how many reported pairs mention it.
 */
export function gapRows(data: GapsResponse): GapRow[] {
  return data.groups.map((g) => ({
    group: g.group,
    nodeCount: g.node_count,
    isolatedCount: g.isolated_count,
    isolatedSkus: g.isolated_skus,
    zeroPairCount: data.zero_weight_pairs.filter((p) => p[0] === g.group || p[1] === g.group)
      .length,
    degreeMin: g.degree_min,
    degreeMedian: g.degree_median,
    degreeMax: g.degree_max,
  }));
}

/** Stable sort of rows by the chosen column. Ties keep their current order,
 * so toggling direction twice restores the original arrangement.
 */
export function sortRows(rows: readonly GapRow[], key: GapSortKey, descending: boolean): GapRow[] {
  const value = (row: GapRow) => (key === "isolated" ? row.isolatedCount : row.zeroPairCount);
  const sign = descending ? -1 : 1;
  return [...rows].sort((a, b) => sign * (value(a) - value(b)));
}

export function hasNoGaps(data: GapsResponse): boolean {
  return data.groups.every((g) => g.isolated_count === 0) && data.zero_weight_pairs.length === 0;
}

export class GapsPanel {
  private readonly ctx: AppContext;
  private readonly navigate: (group: string) => void;
  private readonly root: HTMLElement;
  private readonly tableHost: HTMLElement;
  private rows: GapRow[] = [];
  private sortKey: GapSortKey = "isolated";
  private descending = true;

  constructor(ctx: AppContext, navigate?: (group: string) => void) {
    this.ctx = ctx;
    this.navigate =
      navigate ??
      ((group: string) => {
        window.location.hash = `#explorer/${encodeURIComponent(group)}`;
      });
    this.tableHost = el("div", { "data-testid": "gaps-table-host" });
    this.root = el(
      "section",
      { class: "panel gaps" },
      el("h2", {}, "Gap browser"),
      el(
        "p",
        { class: "muted" },
        "Products with no in-window connections and group pairs with no cross edges.",
      ),
      this.tableHost,
    );
  }

  mount(container: Element): void {
    container.append(this.root);
  }

  async load(): Promise<void> {
    clear(this.tableHost);
    this.tableHost.append(el("p", { class: "muted" }, "Loading gap report..."));
    try {
      const data = await this.ctx.client.graphGaps();
      this.rows = gapRows(data);
      clear(this.tableHost);
      if (hasNoGaps(data)) {
        this.tableHost.append(
          el(
            "div",
            { class: "banner ok", "data-testid": "no-gaps" },
            "No gaps: every product has in-window connections and every group pair is connected.",
          ),
        );
      }
      this.renderTable();
    } catch (error) {
      clear(this.tableHost);
      this.tableHost.append(
        errorBanner(`Could not load the gap report: ${String(error)}`, () => void this.load()),
      );
    }
  }

  sortBy(key: GapSortKey): void {
    if (this.sortKey === key) {
      this.descending = !this.descending;
    } else {
      this.sortKey = key;
      this.descending = true;
    }
    this.renderTable();
  }

  private renderTable(): void {
    const existing = this.tableHost.querySelector("table");
    if (existing) {
      existing.remove();
    }
    const ordered = sortRows(this.rows, this.sortKey, this.descending);
    const arrow = (key: GapSortKey) =>
      this.sortKey === key ? (this.descending ? " ▼" : " ▲") : "";
    const header = el(
      "tr",
      {},
      el("th", {}, "group"),
      el("th", {}, "products"),
      el(
        "th",
        {
          class: "sortable",
          "data-testid": "sort-isolated",
          onclick: () => this.sortBy("isolated"),
        },
        `isolated${arrow("isolated")}`,
      ),
      el(
        "th",
        {
          class: "sortable",
          "data-testid": "sort-zero-pairs",
          onclick: () => this.sortBy("zeroPairs"),
        },
        `zero-weight pairs${arrow("zeroPairs")}`,
      ),
      el("th", {}, "degree min / median / max"),
    );
    const body = el("tbody", {});
    for (const row of ordered) {
      const cells = el(
        "tr",
        {
          class: "gap-row",
          "data-group": row.group,
          onclick: () => this.navigate(row.group),
        },
        el("td", {}, row.group),
        el("td", {}, String(row.nodeCount)),
        el(
          "td",
          { "data-testid": `isolated-${row.group}` },
          String(row.isolatedCount),
          row.isolatedSkus.length > 0
            ? el("span", { class: "muted" }, ` (${row.isolatedSkus.join(", ")})`)
            : "",
        ),
        el("td", { "data-testid": `zero-pairs-${row.group}` }, String(row.zeroPairCount)),
        el(
          "td",
          {},
          num(row.degreeMin, 2),
          " / ",
          num(row.degreeMedian, 2),
          " / ",
          num(row.degreeMax, 2),
        ),
      );
      body.append(cells);
    }
    this.tableHost.append(
      el("table", { class: "gaps-table", "data-testid": "gaps-table" }, el("thead", {}, header), body),
    );
  }
}
