// Viewer entry point: boot(container, dataUrl, configUrl) builds the DOM,
// loads the bundle and runs the interaction loop. Rendering happens on
// animation frames, decoupled from input handlers that only mutate state.

import { centerOn, fitCamera, pan, zoomAt, type Viewport } from "./camera.js";
import { BundleError, loadBundle } from "./loader.js";
import { buildPanelContent } from "./panel.js";
import { hitTest, render, type Placement } from "./renderer.js";
import { findMatches, nextMatch } from "./search.js";
import type { Bundle, ViewState } from "./types.js";

export async function boot(container: HTMLElement, dataUrl: string, configUrl: string):
    Promise<void> {
  container.textContent = "";
  let bundle: Bundle;
  try {
    bundle = await loadBundle(dataUrl, configUrl);
  } catch (err) {
    showErrorBanner(container, err instanceof BundleError
      ? ["Invalid map bundle:", ...err.problems.slice(0, 8)]
      : [`Failed to load the map: ${String(err)}`]);
    return;
  }
  startViewer(container, bundle);
}

function showErrorBanner(container: HTMLElement, lines: string[]): void {
  const banner = document.createElement("div");
  banner.className = "error-banner";
  banner.setAttribute("role", "alert");
  for (const line of lines) {
    const p = document.createElement("p");
    p.textContent = line;
    banner.appendChild(p);
  }
  container.appendChild(banner);
}

export function startViewer(container: HTMLElement, bundle: Bundle): void {
  document.title = bundle.config.title || document.title;

  const canvas = document.createElement("canvas");
  canvas.className = "map-canvas";
  container.appendChild(canvas);

  const hud = document.createElement("div");
  hud.className = "hud";
  container.appendChild(hud);

  const titleEl = document.createElement("h1");
  titleEl.textContent = bundle.config.title;
  hud.appendChild(titleEl);

  const searchWrap = document.createElement("div");
  searchWrap.className = "search";
  const searchInput = document.createElement("input");
  searchInput.type = "search";
  searchInput.placeholder = "Search labels and terms…";
  searchWrap.appendChild(searchInput);
  const searchStatus = document.createElement("span");
  searchStatus.className = "search-status";
  searchWrap.appendChild(searchStatus);
  hud.appendChild(searchWrap);

  if (bundle.config.legend.length > 0) {
    const legend = document.createElement("ul");
    legend.className = "legend";
    for (const entry of bundle.config.legend) {
      const item = document.createElement("li");
      const swatch = document.createElement("span");
      swatch.className = "swatch";
      swatch.style.backgroundColor = entry.color;
      item.appendChild(swatch);
      item.appendChild(document.createTextNode(entry.label));
      legend.appendChild(item);
    }
    hud.appendChild(legend);
  }

  const panel = document.createElement("aside");
  panel.className = "panel";
  panel.hidden = true;
  container.appendChild(panel);

  const view: Viewport = { width: 800, height: 600 };
  const state: ViewState = {
    camera: { cx: 0, cy: 0, zoom: 1 },
    fitZoom: 1,
    selected: null,
    hover: null,
    query: "",
    matches: [],
    matchIndex: -1,
  };

  const resize = (): void => {
    view.width = container.clientWidth || 800;
    view.height = container.clientHeight || 600;
    canvas.width = view.width;
    canvas.height = view.height;
    requestRender();
  };

  const resetCamera = (): void => {
    const fitted = fitCamera(bundle.data.nodes, view);
    state.camera = fitted;
    state.fitZoom = fitted.zoom;
  };

  let placements: Placement[] = [];
  let renderQueued = false;
  const ctx = canvas.getContext("2d");
  const requestRender = (): void => {
    if (renderQueued || ctx === null) return;
    renderQueued = true;
    requestAnimationFrame(() => {
      renderQueued = false;
      placements = render(ctx, bundle, state, view).placements;
    });
  };

  // panning
  let dragging = false;
  let lastX = 0;
  let lastY = 0;
  canvas.addEventListener("mousedown", (ev) => {
    dragging = true;
    lastX = ev.offsetX;
    lastY = ev.offsetY;
  });
  window.addEventListener("mouseup", () => {
    dragging = false;
  });
  canvas.addEventListener("mousemove", (ev) => {
    if (dragging) {
      state.camera = pan(state.camera, ev.offsetX - lastX, ev.offsetY - lastY);
      lastX = ev.offsetX;
      lastY = ev.offsetY;
      requestRender();
      return;
    }
    const hit = hitTest(placements, ev.offsetX, ev.offsetY);
    const hover = hit ? hit.id : null;
    if (hover !== state.hover) {
      state.hover = hover;
      canvas.style.cursor = hover ? "pointer" : "grab";
      requestRender();
    }
  });

  canvas.addEventListener("wheel", (ev) => {
    ev.preventDefault();
    const factor = ev.deltaY < 0 ? 1.15 : 1 / 1.15;
    state.camera = zoomAt(state.camera, view, ev.offsetX, ev.offsetY, factor,
                          state.fitZoom * bundle.config.minZoom,
                          state.fitZoom * bundle.config.maxZoom);
    requestRender();
  }, { passive: false });

  canvas.addEventListener("click", (ev) => {
    const hit = hitTest(placements, ev.offsetX, ev.offsetY);
    if (hit === null) {
      state.selected = null;
      panel.hidden = true;
    } else {
      state.selected = hit.id;
      panel.textContent = "";
      panel.appendChild(buildPanelContent(hit));
      panel.hidden = false;
    }
    requestRender();
  });

  searchInput.addEventListener("input", () => {
    state.query = searchInput.value;
    state.matches = findMatches(bundle, state.query);
    state.matchIndex = -1;
    searchStatus.textContent = state.query.trim()
      ? `${state.matches.length} result${state.matches.length === 1 ? "" : "s"}`
      : "";
    requestRender();
  });

  searchInput.addEventListener("keydown", (ev) => {
    if (ev.key !== "Enter") return;
    state.matchIndex = nextMatch(state.matches, state.matchIndex);
    if (state.matchIndex >= 0) {
      const node = bundle.nodeById.get(state.matches[state.matchIndex]);
      if (node) {
        state.camera = centerOn(state.camera, node.x, node.y);
        requestRender();
      }
    }
  });

  window.addEventListener("resize", resize);
  resize();
  resetCamera();
  requestRender();
}
