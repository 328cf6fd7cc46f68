// Shared test utilities: fixture loading and a recording 2D context stub.

import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

import { assembleBundle } from "../src/loader.js";
import type { Ctx2D } from "../src/renderer.js";
import type { Bundle } from "../src/types.js";

const here = dirname(fileURLToPath(import.meta.url));

export function readFixture(kind: "base" | "overlay", file: "data.json" | "config.json"):
    unknown {
  return JSON.parse(readFileSync(join(here, "fixtures", kind, file), "utf-8"));
}

export function loadFixtureBundle(kind: "base" | "overlay" = "base"): Bundle {
  return assembleBundle(readFixture(kind, "data.json"), readFixture(kind, "config.json"));
}

export interface ArcCall {
  x: number;
  y: number;
  r: number;
  fillStyle: string;
  filled: boolean;
}

/** Records draw calls; enough surface for the renderer. */
export class RecordingContext implements Ctx2D {
  fillStyle: string | CanvasGradient | CanvasPattern = "";
  strokeStyle: string | CanvasGradient | CanvasPattern = "";
  globalAlpha = 1;
  lineWidth = 1;
  font = "";
  textAlign: CanvasTextAlign = "left";
  textBaseline: CanvasTextBaseline = "alphabetic";

  arcs: ArcCall[] = [];
  filledArcs: ArcCall[] = [];
  strokedArcs: ArcCall[] = [];
  lines: Array<[number, number, number, number]> = [];
  texts: Array<{ text: string; x: number; y: number; alpha: number }> = [];
  cleared = 0;

  private pendingArc: ArcCall | null = null;
  private pendingLine: [number, number] | null = null;
  private lineStart: [number, number] | null = null;

  clearRect(): void {
    this.cleared++;
  }
  beginPath(): void {
    this.pendingArc = null;
    this.pendingLine = null;
    this.lineStart = null;
  }
  arc(x: number, y: number, r: number): void {
    this.pendingArc = { x, y, r, fillStyle: String(this.fillStyle), filled: false };
    this.arcs.push(this.pendingArc);
  }
  moveTo(x: number, y: number): void {
    this.lineStart = [x, y];
  }
  lineTo(x: number, y: number): void {
    this.pendingLine = [x, y];
  }
  fill(): void {
    if (this.pendingArc) {
      this.pendingArc.filled = true;
      this.pendingArc.fillStyle = String(this.fillStyle);
      this.filledArcs.push(this.pendingArc);
    }
  }
  stroke(): void {
    if (this.pendingArc) {
      this.strokedArcs.push(this.pendingArc);
    } else if (this.lineStart && this.pendingLine) {
      this.lines.push([...this.lineStart, ...this.pendingLine] as
        [number, number, number, number]);
    }
  }
  fillText(text: string, x: number, y: number): void {
    this.texts.push({ text, x, y, alpha: this.globalAlpha });
  }
}
