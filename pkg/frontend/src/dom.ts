/** Tiny DOM construction helpers; no framework, no virtual DOM. */

type Attrs = Record<string, string | boolean | EventListener | undefined>;
type Child = Node | string | null | undefined;

export function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Attrs = {},
  ...children: Child[]
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) {
    if (value === undefined || value === false) continue;
    if (typeof value === "function") {
      node.addEventListener(key.replace(/^on/, "").toLowerCase(), value);
    } else if (value === true) {
      node.setAttribute(key, "");
    } else {
      node.setAttribute(key, value);
    }
  }
  for (const child of children) {
    if (child === null || child === undefined) continue;
    node.append(child instanceof Node ? child : document.createTextNode(child));
  }
  return node;
}

export function clear(node: HTMLElement): HTMLElement {
  node.replaceChildren();
  return node;
}

/**
 * A number sourced from an API field, rendered with optional display
 * formatting. The raw payload value always rides along in data-value so the
 * shown figure stays traceable (and testable) against the API.
 */
export function apiNumber(
  value: number,
  options: { suffix?: string; formatted?: string; label?: string } = {},
): HTMLSpanElement {
  const span = el("span", { class: "api-number" },
    options.formatted ?? String(value), options.suffix ? ` ${options.suffix}` : "");
  span.dataset.value = String(value);
  if (options.label) span.dataset.label = options.label;
  return span;
}

export function errorBox(message: string): HTMLElement {
  return el("div", { class: "error-box", role: "alert" }, message);
}

export function statusBadge(status: string): HTMLElement {
  return el("span", { class: `badge badge-${status}` }, status);
}
