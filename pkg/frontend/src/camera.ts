// World <-> screen transforms and the pan/zoom math. Pure functions so the
// interaction layer and the tests share one source of truth.

import type { Camera, MapNode } from "./types.js";

export interface Viewport {
  width: number;
  height: number;
}

export function worldToScreen(camera: Camera, view: Viewport, x: number, y: number):
    [number, number] {
  return [
    (x - camera.cx) * camera.zoom + view.width / 2,
    (y - camera.cy) * camera.zoom + view.height / 2,
  ];
}

export function screenToWorld(camera: Camera, view: Viewport, sx: number, sy: number):
    [number, number] {
  return [
    (sx - view.width / 2) / camera.zoom + camera.cx,
    (sy - view.height / 2) / camera.zoom + camera.cy,
  ];
}

/** Camera that frames every node with a margin; depends on coordinates only,
 * so a base map and its overlays share the exact same default view. */
export function fitCamera(nodes: readonly MapNode[], view: Viewport, margin = 0.06): Camera {
  if (nodes.length === 0) {
    return { cx: 0, cy: 0, zoom: 1 };
  }
  let minX = Infinity, maxX = -Infinity, minY = Infinity, maxY = -Infinity;
  for (const node of nodes) {
    if (node.x < minX) minX = node.x;
    if (node.x > maxX) maxX = node.x;
    if (node.y < minY) minY = node.y;
    if (node.y > maxY) maxY = node.y;
  }
  const spanX = Math.max(maxX - minX, 1e-9);
  const spanY = Math.max(maxY - minY, 1e-9);
  const zoom = Math.min(
    (view.width * (1 - 2 * margin)) / spanX,
    (view.height * (1 - 2 * margin)) / spanY,
  );
  return { cx: (minX + maxX) / 2, cy: (minY + maxY) / 2, zoom };
}

export function pan(camera: Camera, dxScreen: number, dyScreen: number): Camera {
  return {
    cx: camera.cx - dxScreen / camera.zoom,
    cy: camera.cy - dyScreen / camera.zoom,
    zoom: camera.zoom,
  };
}

/** Zoom by `factor` keeping the world point under (sx, sy) fixed on screen. */
export function zoomAt(
  camera: Camera, view: Viewport, sx: number, sy: number, factor: number,
  minZoom: number, maxZoom: number,
): Camera {
  const clamped = Math.min(Math.max(camera.zoom * factor, minZoom), maxZoom);
  if (clamped === camera.zoom) return camera;
  const [wx, wy] = screenToWorld(camera, view, sx, sy);
  const ratio = camera.zoom / clamped;
  return {
    cx: wx - (wx - camera.cx) * ratio,
    cy: wy - (wy - camera.cy) * ratio,
    zoom: clamped,
  };
}

export function centerOn(camera: Camera, x: number, y: number): Camera {
  return { cx: x, cy: y, zoom: camera.zoom };
}

export function nodeRadius(size: number, zoom: number): number {
  return Math.max(1.5, size * zoom * 0.5);
}
