/** Small DOM construction helpers; no templating, just createElement. */

const SVG_NS = "http://www.w3.org/2000/svg";

export function el(
  tag: string,
  attrs: Record<string, string> = {},
  ...children: (Node | string | null)[]
): HTMLElement {
  const node = document.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) node.setAttribute(key, value);
  for (const child of children) if (child !== null) node.append(child);
  return node;
}

export function svg(
  tag: string,
  attrs: Record<string, string | number> = {},
  ...children: (Node | string)[]
): SVGElement {
  const node = document.createElementNS(SVG_NS, tag);
  for (const [key, value] of Object.entries(attrs)) node.setAttribute(key, String(value));
  for (const child of children) node.append(child);
  return node;
}

export function clear(node: Element): void {
  while (node.firstChild) node.removeChild(node.firstChild);
}

/** A labeled, right-to-left Arabic text block; the label stays LTR chrome. */
export function arabicField(label: string, text: string, cls: string): HTMLElement {
  return el(
    "div",
    { class: "field" },
    el("h3", {}, label),
    el("p", { class: `ar ${cls}`, dir: "rtl", lang: "ar" }, text),
  );
}
