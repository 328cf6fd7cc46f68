// Info panel: label, terms, counts, publication links and children summary.

import { sanitizeChildrenHtml } from "./sanitize.js";
import type { MapNode } from "./types.js";

export function buildPanelContent(node: MapNode, doc: Document = document): HTMLElement {
  const root = doc.createElement("div");
  root.className = "panel-content";

  const title = doc.createElement("h2");
  title.textContent = node.label;
  root.appendChild(title);

  const meta = doc.createElement("p");
  meta.className = "panel-meta";
  meta.textContent = `${node.attributes.level} · # Publ.: ${node.attributes.publ_count}`;
  root.appendChild(meta);

  if (node.attributes.overlay_value !== null && node.attributes.overlay_value !== undefined) {
    const overlay = doc.createElement("p");
    overlay.className = "panel-overlay-value";
    overlay.textContent = `Overlay value: ${node.attributes.overlay_value}`;
    root.appendChild(overlay);
  }

  if (node.attributes.additional_terms.length > 0) {
    const heading = doc.createElement("h3");
    heading.textContent = "Additional terms";
    root.appendChild(heading);
    const list = doc.createElement("ul");
    list.className = "panel-terms";
    for (const term of node.attributes.additional_terms) {
      const item = doc.createElement("li");
      item.textContent = term;
      list.appendChild(item);
    }
    root.appendChild(list);
  }

  const linksHeading = doc.createElement("h3");
  linksHeading.textContent = "Get list in PubMed";
  root.appendChild(linksHeading);
  const links = node.attributes.pubmed_links;
  if (typeof links === "string") {
    // sentinel shown verbatim, e.g. "Too many publ. (31763)"
    const sentinel = doc.createElement("p");
    sentinel.className = "panel-sentinel";
    sentinel.textContent = links;
    root.appendChild(sentinel);
  } else if (links.length === 0) {
    const none = doc.createElement("p");
    none.textContent = "No publications";
    root.appendChild(none);
  } else {
    const list = doc.createElement("p");
    list.className = "panel-links";
    for (const link of links) {
      const a = doc.createElement("a");
      a.href = link.url;
      a.textContent = link.label;
      a.target = "_blank";
      a.rel = "noopener noreferrer";
      list.appendChild(a);
      list.appendChild(doc.createTextNode(" "));
    }
    root.appendChild(list);
  }

  if (node.attributes.children) {
    const heading = doc.createElement("h3");
    heading.textContent = "Children";
    root.appendChild(heading);
    root.appendChild(sanitizeChildrenHtml(node.attributes.children, doc));
  }

  return root;
}
