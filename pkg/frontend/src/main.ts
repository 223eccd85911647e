import { ApiClient } from "./api.js";
import { BenchPanel } from "./bench.js";
import { createContext, type AppContext } from "./context.js";
import { clear, el } from "./dom.js";
import { ExplorerPanel } from "./explorer.js";
import { GapsPanel } from "./gaps.js";
import { selectGroup } from "./state.js";

/** The only configuration the studio takes is where the API lives:
 * ?api=<url> in the query string, else a window override, else localhost.
 */
export function apiBaseUrl(win: Pick<Window, "location"> & { STYLESIM_API?: string }): string {
  const fromQuery = new URLSearchParams(win.location.search).get("api");
  return fromQuery ?? win.STYLESIM_API ?? "http://127.0.0.1:8000";
}

export type Route =
  | { view: "explorer"; group: string | null }
  | { view: "bench" }
  | { view: "gaps" };

export function parseRoute(hash: string): Route {
  const parts = hash.replace(/^#/, "").split("/");
  switch (parts[0]) {
    case "bench":
      return { view: "bench" };
    case "gaps":
      return { view: "gaps" };
    case "explorer":
      return { view: "explorer", group: parts[1] ? decodeURIComponent(parts[1]) : null };
    default:
      return { view: "explorer", group: null };
  }
}

export interface App {
  ctx: AppContext;
  explorer: ExplorerPanel;
  bench: BenchPanel;
  gaps: GapsPanel;
  show(route: Route): Promise<void>;
}

export function createApp(root: Element, baseUrl: string): App {
  const ctx = createContext(new ApiClient(baseUrl));
  const explorer = new ExplorerPanel(ctx);
  const bench = new BenchPanel(ctx);
  const gaps = new GapsPanel(ctx);

  const nav = el(
    "nav",
    { class: "tabs" },
    el("a", { href: "#explorer" }, "Explorer"),
    el("a", { href: "#bench" }, "Design bench"),
    el("a", { href: "#gaps" }, "Gaps"),
  );
  const host = el("main", { class: "view-host" });
  root.append(el("header", {}, el("h1", {}, "Style studio"), nav), host);

  const show = async (route: Route): Promise<void> => {
    clear(host);
    if (route.view === "bench") {
      bench.mount(host);
      return;
    }
    if (route.view === "gaps") {
      gaps.mount(host);
      await gaps.load();
      return;
    }
    if (route.group) {
      ctx.setState(selectGroup(ctx.getState(), route.group));
    }
    explorer.mount(host);
    await explorer.load();
  };

  return { ctx, explorer, bench, gaps, show };
}

function boot(): void {
  const root = document.getElementById("studio-app");
  if (!root) {
    return;
  }
  const app = createApp(root, apiBaseUrl(window as Window & { STYLESIM_API?: string }));
  const render = () => void app.show(parseRoute(window.location.hash));
  window.addEventListener("hashchange", render);
  render();
}

boot();
