/** Small DOM builders; no framework, no templates. */

type Attrs = Record<string, string | number | boolean | ((event: Event) => void)>;

function applyAttrs(node: Element, attrs: Attrs): void {
  for (const [key, value] of Object.entries(attrs)) {
    if (typeof value === "function") {
      node.addEventListener(key.replace(/^on/, ""), value);
    } else if (typeof value === "boolean") {
      if (value) {
        node.setAttribute(key, "");
      }
    } else {
      node.setAttribute(key, String(value));
    }
  }
}

export function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Attrs = {},
  ...children: (Node | string)[]
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  applyAttrs(node, attrs);
  node.append(...children);
  return node;
}

const SVG_NS = "http://www.w3.org/2000/svg";

export function svg<K extends keyof SVGElementTagNameMap>(
  tag: K,
  attrs: Attrs = {},
  ...children: (Node | string)[]
): SVGElementTagNameMap[K] {
  const node = document.createElementNS(SVG_NS, tag);
  applyAttrs(node, attrs);
  node.append(...children);
  return node;
}

export function clear(node: Element): void {
  while (node.firstChild) {
    node.removeChild(node.firstChild);
  }
}

/** A numeric display span: visible text is formatted, but the exact API
 * value rides along in data-value so nothing is lost to rounding.
 */
export function num(value: number, digits = 3, testId?: string): HTMLSpanElement {
  const span = el("span", { class: "num", "data-value": String(value) }, value.toFixed(digits));
  if (testId) {
    span.setAttribute("data-testid", testId);
  }
  return span;
}

/** Failure banner with a retry hook; every panel funnels API errors here. */
export function errorBanner(message: string, onRetry: () => void): HTMLElement {
  return el(
    "div",
    { class: "banner error", "data-testid": "error-banner", role: "alert" },
    el("span", {}, message),
    el("button", { type: "button", onclick: () => onRetry() }, "Retry"),
  );
}
