// Children summaries arrive as exported HTML. Only list and anchor markup
// survives sanitization; anchors keep href alone and open in a new context.

const ALLOWED = new Set(["UL", "OL", "LI", "A"]);

export function sanitizeChildrenHtml(html: string, doc: Document = document): HTMLElement {
  const container = doc.createElement("div");
  container.className = "children-summary";
  const parsed = doc.createElement("template");
  parsed.innerHTML = html;
  for (const child of Array.from(parsed.content.childNodes)) {
    const cleaned = cleanNode(child, doc);
    if (cleaned) container.appendChild(cleaned);
  }
  return container;
}

function cleanNode(node: Node, doc: Document): Node | null {
  if (node.nodeType === 3 /* TEXT_NODE */) {
    return doc.createTextNode(node.textContent ?? "");
  }
  if (node.nodeType !== 1 /* ELEMENT_NODE */) {
    return null;
  }
  const el = node as Element;
  if (!ALLOWED.has(el.tagName)) {
    // unwrap unknown elements, keeping their (cleaned) children as text flow
    const frag = doc.createDocumentFragment();
    for (const child of Array.from(el.childNodes)) {
      const cleaned = cleanNode(child, doc);
      if (cleaned) frag.appendChild(cleaned);
    }
    return frag;
  }
  const out = doc.createElement(el.tagName.toLowerCase());
  if (el.tagName === "A") {
    const href = el.getAttribute("href") ?? "";
    if (/^https?:/i.test(href)) {
      out.setAttribute("href", href);
      out.setAttribute("target", "_blank");
      out.setAttribute("rel", "noopener noreferrer");
    }
  }
  for (const child of Array.from(el.childNodes)) {
    const cleaned = cleanNode(child, doc);
    if (cleaned) out.appendChild(cleaned);
  }
  return out;
}
