// Integration-level checks of the boot wiring: DOM assembly, the search
// status indicator, the error banner, and panel open/close on clicks.
// happy-dom has no canvas 2D context, so rendering itself is a no-op here;
// the drawing path is covered through the recording context elsewhere.

import { afterEach, describe, expect, it, vi } from "vitest";

import { boot, startViewer } from "../src/main.js";
import { loadFixtureBundle, readFixture } from "./helpers.js";

function container(): HTMLElement {
  const el = document.createElement("div");
  document.body.appendChild(el);
  return el;
}

function jsonResponse(body: unknown): Response {
  return new Response(JSON.stringify(body), {
    status: 200,
    headers: { "Content-Type": "application/json" },
  });
}

afterEach(() => {
  vi.unstubAllGlobals();
  document.body.textContent = "";
});

describe("startViewer", () => {
  it("builds canvas, search box, legend and a hidden panel", () => {
    const el = container();
    startViewer(el, loadFixtureBundle());
    expect(el.querySelector("canvas.map-canvas")).not.toBeNull();
    expect(el.querySelector(".search input")).not.toBeNull();
    const legendItems = el.querySelectorAll(".legend li");
    expect(legendItems.length).toBe(2);
    const panel = el.querySelector<HTMLElement>(".panel")!;
    expect(panel.hidden).toBe(true);
  });

  it("shows the result count, including the zero case", () => {
    const el = container();
    startViewer(el, loadFixtureBundle());
    const input = el.querySelector<HTMLInputElement>(".search input")!;
    const status = el.querySelector<HTMLElement>(".search-status")!;

    input.value = "melanoma";
    input.dispatchEvent(new Event("input", { bubbles: true }));
    expect(status.textContent).toBe("2 results");

    input.value = "no such term anywhere";
    input.dispatchEvent(new Event("input", { bubbles: true }));
    expect(status.textContent).toBe("0 results");

    input.value = "";
    input.dispatchEvent(new Event("input", { bubbles: true }));
    expect(status.textContent).toBe("");
  });

  it("clicking empty canvas closes the panel", () => {
    const el = container();
    startViewer(el, loadFixtureBundle());
    const panel = el.querySelector<HTMLElement>(".panel")!;
    panel.hidden = false; // as if a node were selected
    const canvas = el.querySelector<HTMLCanvasElement>("canvas")!;
    canvas.dispatchEvent(new MouseEvent("click", { bubbles: true }));
    expect(panel.hidden).toBe(true);
  });

  it("sets the document title from the config", () => {
    startViewer(container(), loadFixtureBundle());
    expect(document.title).toBe("Viewer fixture map");
  });
});

describe("boot", () => {
  it("renders the viewer for a valid bundle", async () => {
    vi.stubGlobal("fetch", vi.fn(async (url: string) =>
      jsonResponse(readFixture("base",
        url.includes("config") ? "config.json" : "data.json"))));
    const el = container();
    await boot(el, "./data.json", "./config.json");
    expect(el.querySelector("canvas")).not.toBeNull();
    expect(el.querySelector(".error-banner")).toBeNull();
  });

  it("shows an error banner and no canvas for a schema violation", async () => {
    const broken = structuredClone(readFixture("base", "data.json")) as any;
    broken.nodes[0].color = "not-a-color";
    vi.stubGlobal("fetch", vi.fn(async (url: string) =>
      jsonResponse(url.includes("config")
        ? readFixture("base", "config.json") : broken)));
    const el = container();
    await boot(el, "./data.json", "./config.json");
    const banner = el.querySelector(".error-banner");
    expect(banner).not.toBeNull();
    expect(banner!.textContent).toContain("bad color");
    expect(el.querySelector("canvas")).toBeNull(); // no partial render
  });

  it("reports fetch failures", async () => {
    vi.stubGlobal("fetch", vi.fn(async () => new Response("nope", { status: 500 })));
    const el = container();
    await boot(el, "./data.json", "./config.json");
    expect(el.querySelector(".error-banner")).not.toBeNull();
  });
});
