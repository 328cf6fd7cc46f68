// Canvas drawing. The context is typed as the minimal 2D surface the
// renderer needs, so tests can pass a recording stub instead of a real
// CanvasRenderingContext2D.

import { nodeRadius, worldToScreen, type Viewport } from "./camera.js";
import type { Bundle, MapNode, ViewState } from "./types.js";

export interface Ctx2D {
  fillStyle: string | CanvasGradient | CanvasPattern;
  strokeStyle: string | CanvasGradient | CanvasPattern;
  globalAlpha: number;
  lineWidth: number;
  font: string;
  textAlign: CanvasTextAlign;
  textBaseline: CanvasTextBaseline;
  clearRect(x: number, y: number, w: number, h: number): void;
  beginPath(): void;
  arc(x: number, y: number, r: number, a0: number, a1: number): void;
  moveTo(x: number, y: number): void;
  lineTo(x: number, y: number): void;
  fill(): void;
  stroke(): void;
  fillText(text: string, x: number, y: number): void;
}

export interface Placement {
  node: MapNode;
  sx: number;
  sy: number;
  radius: number;
}

export interface RenderStats {
  nodesDrawn: number;
  edgesDrawn: number;
  labelsDrawn: number;
  placements: Placement[];
}

const DIM_ALPHA = 0.12;
const LABEL_MIN_RADIUS = 8;

export function visibleNodes(bundle: Bundle, state: ViewState): MapNode[] {
  const visibility = bundle.config.nodeLevelVisibility;
  return bundle.data.nodes.filter(
    (node) => !node.attributes.hidden && visibility[node.attributes.level] !== false,
  );
}

export function projectNodes(
  bundle: Bundle, state: ViewState, view: Viewport,
): Placement[] {
  const { camera } = state;
  return visibleNodes(bundle, state).map((node) => {
    const [sx, sy] = worldToScreen(camera, view, node.x, node.y);
    return { node, sx, sy, radius: nodeRadius(node.size, camera.zoom) };
  });
}

/** Topmost hit: later-drawn (specialty, smaller) nodes win. */
export function hitTest(placements: readonly Placement[], sx: number, sy: number):
    MapNode | null {
  for (let i = placements.length - 1; i >= 0; i--) {
    const p = placements[i];
    const dx = sx - p.sx;
    const dy = sy - p.sy;
    if (dx * dx + dy * dy <= p.radius * p.radius) return p.node;
  }
  return null;
}

function drawOrder(a: Placement, b: Placement): number {
  // disciplines first (underneath), then by descending radius
  const levelA = a.node.attributes.level === "Discipline" ? 0 : 1;
  const levelB = b.node.attributes.level === "Discipline" ? 0 : 1;
  if (levelA !== levelB) return levelA - levelB;
  return b.radius - a.radius;
}

export function render(
  ctx: Ctx2D, bundle: Bundle, state: ViewState, view: Viewport,
): RenderStats {
  ctx.clearRect(0, 0, view.width, view.height);
  const placements = projectNodes(bundle, state, view).sort(drawOrder);
  const byId = new Map(placements.map((p) => [p.node.id, p]));
  const matchSet = new Set(state.matches);
  const dimming = state.query.trim().length > 0;

  let edgesDrawn = 0;
  ctx.globalAlpha = 0.25;
  ctx.lineWidth = 1;
  ctx.strokeStyle = "#999999";
  for (const edge of bundle.data.edges) {
    const a = byId.get(edge.source);
    const b = byId.get(edge.target);
    if (!a || !b) continue;
    ctx.beginPath();
    ctx.moveTo(a.sx, a.sy);
    ctx.lineTo(b.sx, b.sy);
    ctx.stroke();
    edgesDrawn++;
  }

  let nodesDrawn = 0;
  for (const p of placements) {
    const matched = matchSet.has(p.node.id);
    ctx.globalAlpha = dimming && !matched ? DIM_ALPHA : 1.0;
    ctx.fillStyle = p.node.color;
    ctx.beginPath();
    ctx.arc(p.sx, p.sy, p.radius, 0, Math.PI * 2);
    ctx.fill();
    if (matched || state.selected === p.node.id || state.hover === p.node.id) {
      ctx.strokeStyle = matched ? "#d97706" : "#111111";
      ctx.lineWidth = 2;
      ctx.beginPath();
      ctx.arc(p.sx, p.sy, p.radius + 2, 0, Math.PI * 2);
      ctx.stroke();
    }
    nodesDrawn++;
  }

  // labels: disciplines always (when big enough on screen), specialties only
  // past the configured zoom threshold relative to the framing zoom
  const relativeZoom = state.fitZoom > 0 ? state.camera.zoom / state.fitZoom : 1;
  const showSpecialtyLabels = relativeZoom >= bundle.config.specialtyLabelZoom;
  let labelsDrawn = 0;
  ctx.textAlign = "center";
  ctx.textBaseline = "middle";
  ctx.fillStyle = "#1c1c1c";
  for (const p of placements) {
    const isSpecialty = p.node.attributes.level === "Specialty";
    if (isSpecialty && !showSpecialtyLabels) continue;
    if (p.radius < LABEL_MIN_RADIUS) continue;
    ctx.globalAlpha = dimming && !matchSet.has(p.node.id) ? DIM_ALPHA : 0.9;
    ctx.font = isSpecialty ? "11px sans-serif" : "13px sans-serif";
    ctx.fillText(p.node.label, p.sx, p.sy - p.radius - 4);
    labelsDrawn++;
  }
  ctx.globalAlpha = 1.0;

  return { nodesDrawn, edgesDrawn, labelsDrawn, placements };
}
