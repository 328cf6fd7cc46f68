// Case-insensitive substring search over labels and additional terms.

import type { Bundle } from "./types.js";

export function findMatches(bundle: Bundle, query: string): string[] {
  const needle = query.trim().toLowerCase();
  if (!needle) return [];
  const out: string[] = [];
  for (const node of bundle.data.nodes) {
    if (node.attributes.hidden) continue;
    const haystacks = [node.label, ...node.attributes.additional_terms];
    if (haystacks.some((text) => text.toLowerCase().includes(needle))) {
      out.push(node.id);
    }
  }
  return out;
}

export function nextMatch(matches: readonly string[], currentIndex: number): number {
  if (matches.length === 0) return -1;
  return (currentIndex + 1) % matches.length;
}
