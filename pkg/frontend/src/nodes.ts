// A minimal serializable view tree. Views build these nodes; the browser
// shell materializes them into real DOM. Tests walk the tree directly, so
// they need no DOM implementation at all.

export interface ViewNode {
  tag: string;
  attrs: Record<string, string>;
  children: Array<ViewNode | string>;
}

export function el(
  tag: string,
  attrs: Record<string, string> = {},
  ...children: Array<ViewNode | string>
): ViewNode {
  return { tag, attrs, children };
}

export function* walk(node: ViewNode): Generator<ViewNode> {
  yield node;
  for (const child of node.children) {
    if (typeof child !== "string") {
      yield* walk(child);
    }
  }
}

export function textOf(node: ViewNode): string {
  let out = "";
  for (const child of node.children) {
    out += typeof child === "string" ? child : textOf(child);
  }
  return out;
}

export function find(node: ViewNode, predicate: (n: ViewNode) => boolean): ViewNode[] {
  const hits: ViewNode[] = [];
  for (const n of walk(node)) {
    if (predicate(n)) hits.push(n);
  }
  return hits;
}

/** Materialize in a browser; never called from tests. */
export function toDom(node: ViewNode, doc: Document): HTMLElement {
  const element = doc.createElement(node.tag);
  for (const [key, value] of Object.entries(node.attrs)) {
    element.setAttribute(key, value);
  }
  for (const child of node.children) {
    if (typeof child === "string") {
      element.appendChild(doc.createTextNode(child));
    } else {
      element.appendChild(toDom(child, doc));
    }
  }
  return element;
}
