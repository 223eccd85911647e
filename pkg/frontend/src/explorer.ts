import { RequestGate } from "./api.js";
import type { AppContext } from "./context.js";
import { clear, el, errorBanner, num, svg } from "./dom.js";
import { colorFor, forceLayout, radiusScale, strokeScale } from "./layout.js";
import { selectGroup, selectSku } from "./state.js";
import type { GraphGroupsResponse } from "./types.js";

const WIDTH = 760;
const HEIGHT = 520;

/** Draw the group graph. Circle radius follows each group's weighted degree
 * as reported by the API; a group with no crossing edges simply has no line
 * touching it. Pure DOM construction, so tests can inspect the geometry.
 */
export function renderGraphSvg(
  data: GraphGroupsResponse,
  width = WIDTH,
  height = HEIGHT,
): SVGSVGElement {
  const groups = data.nodes.map((n) => n.group);
  const positions = forceLayout(groups, data.edges, width, height);
  const radius = radiusScale(data.nodes.map((n) => n.degree_sum));
  const stroke = strokeScale(data.edges.map((e) => e.weight));
  const color = colorFor(groups);

  const root = svg("svg", {
    viewBox: `0 0 ${width} ${height}`,
    width,
    height,
    "data-testid": "group-graph",
  });
  for (const edge of data.edges) {
    const a = positions.get(edge.source);
    const b = positions.get(edge.target);
    if (!a || !b) {
      continue;
    }
    root.append(
      svg("line", {
        x1: a.x,
        y1: a.y,
        x2: b.x,
        y2: b.y,
        stroke: "#999",
        "stroke-opacity": 0.55,
        "stroke-width": stroke(edge.weight),
        "data-source": edge.source,
        "data-target": edge.target,
        "data-weight": edge.weight,
      }),
    );
  }
  for (const node of data.nodes) {
    const p = positions.get(node.group)!;
    const r = radius(node.degree_sum);
    const dot = svg("circle", {
      cx: p.x,
      cy: p.y,
      r,
      fill: color(node.group),
      stroke: "#333",
      "stroke-width": 1,
      class: "group-node",
      "data-group": node.group,
      "data-degree": node.degree_sum,
      "data-most-connected": node.most_connected,
    });
    dot.append(svg("title", {}, `${node.group}: degree ${node.degree_sum}`));
    const tag = svg(
      "text",
      { x: p.x, y: p.y - r - 6, "text-anchor": "middle", class: "group-label" },
      node.group,
    );
    root.append(dot, tag);
  }
  return root;
}

export class ExplorerPanel {
  private readonly ctx: AppContext;
  private readonly root: HTMLElement;
  private readonly graphHost: HTMLElement;
  private readonly detailHost: HTMLElement;
  private readonly detailGate = new RequestGate();

  constructor(ctx: AppContext) {
    this.ctx = ctx;
    this.graphHost = el("div", { class: "graph-host" });
    this.detailHost = el("div", { class: "detail-host", "data-testid": "group-detail" });
    this.root = el(
      "section",
      { class: "panel explorer" },
      el("h2", {}, "Graph explorer"),
      this.graphHost,
      this.detailHost,
    );
  }

  mount(container: Element): void {
    container.append(this.root);
  }

  async load(): Promise<void> {
    clear(this.graphHost);
    this.graphHost.append(el("p", { class: "muted" }, "Loading group graph..."));
    try {
      const data = await this.ctx.client.graphGroups();
      clear(this.graphHost);
      const picture = renderGraphSvg(data);
      picture.querySelectorAll("circle.group-node").forEach((dot) => {
        dot.addEventListener("click", () => {
          void this.openGroup(dot.getAttribute("data-group")!);
        });
      });
      this.graphHost.append(picture);
      const selected = this.ctx.getState().selectedGroup;
      if (selected && data.nodes.some((n) => n.group === selected)) {
        void this.openGroup(selected);
      }
    } catch (error) {
      clear(this.graphHost);
      this.graphHost.append(
        errorBanner(`Could not load the group graph: ${String(error)}`, () => void this.load()),
      );
    }
  }

  /** Group click: re-read the group graph for fresh stats, then pull the
   * group's most connected product and its neighborhood.
   */
  async openGroup(group: string): Promise<void> {
    this.ctx.setState(selectGroup(this.ctx.getState(), group));
    const stamp = this.detailGate.stamp();
    clear(this.detailHost);
    this.detailHost.append(el("p", { class: "muted" }, `Loading ${group}...`));
    try {
      const graph = await this.ctx.client.graphGroups();
      const node = graph.nodes.find((n) => n.group === group);
      if (!node) {
        throw new Error(`group ${group} is not in the graph`);
      }
      const hood = await this.ctx.client.neighbors(node.most_connected);
      if (!this.detailGate.isCurrent(stamp)) {
        return;
      }
      this.ctx.setState(selectSku(this.ctx.getState(), node.most_connected));
      clear(this.detailHost);
      this.detailHost.append(
        el(
          "div",
          { "data-testid": "group-detail-card", "data-group": group },
          el("h3", {}, group),
          el(
            "p",
            {},
            "products: ",
            el("span", { "data-value": String(node.product_count) }, String(node.product_count)),
            " | weighted degree: ",
            num(node.degree_sum, 2, "detail-degree"),
            " | within-group weight: ",
            num(node.self_weight, 2),
          ),
          el(
            "p",
            {},
            "most connected product: ",
            el("strong", { "data-testid": "most-connected" }, node.most_connected),
          ),
          el(
            "table",
            { class: "neighbors" },
            el(
              "thead",
              {},
              el("tr", {}, el("th", {}, "neighbor"), el("th", {}, "group"), el("th", {}, "distance")),
            ),
            el(
              "tbody",
              {},
              ...hood.neighbors.map((n) =>
                el(
                  "tr",
                  { "data-sku": n.sku },
                  el("td", {}, n.sku),
                  el("td", {}, n.group),
                  el("td", {}, num(n.distance, 4)),
                ),
              ),
            ),
          ),
        ),
      );
    } catch (error) {
      if (!this.detailGate.isCurrent(stamp)) {
        return;
      }
      clear(this.detailHost);
      this.detailHost.append(
        errorBanner(`Could not load ${group}: ${String(error)}`, () => void this.openGroup(group)),
      );
    }
  }
}
