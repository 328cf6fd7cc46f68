// Structural validation of bundle files. The viewer refuses to render
// anything when the data is malformed, so errors here surface as a banner.

import type { MapConfig, MapData } from "./types.js";

const LEVELS = new Set(["Discipline", "Specialty"]);
const RGBA = /^rgba\(\d{1,3},\d{1,3},\d{1,3},(0(\.\d+)?|1(\.0+)?)\)$/;

export function validateData(raw: unknown): string[] {
  const errors: string[] = [];
  if (typeof raw !== "object" || raw === null) {
    return ["data.json: not an object"];
  }
  const doc = raw as Record<string, unknown>;
  const meta = doc.metadata as Record<string, unknown> | undefined;
  if (!meta || (meta.kind !== "base" && meta.kind !== "overlay")) {
    errors.push("metadata.kind must be 'base' or 'overlay'");
  }
  if (!Array.isArray(doc.nodes)) {
    errors.push("nodes must be an array");
    return errors;
  }
  if (!Array.isArray(doc.edges)) {
    errors.push("edges must be an array");
    return errors;
  }
  const ids = new Set<string>();
  doc.nodes.forEach((node: any, i: number) => {
    const where = `node[${i}]`;
    if (typeof node !== "object" || node === null) {
      errors.push(`${where}: not an object`);
      return;
    }
    if (typeof node.id !== "string" || !node.id) errors.push(`${where}: bad id`);
    else if (ids.has(node.id)) errors.push(`${where}: duplicate id ${node.id}`);
    else ids.add(node.id);
    if (typeof node.label !== "string") errors.push(`${where}: bad label`);
    for (const key of ["x", "y", "size"]) {
      if (!Number.isFinite(node[key])) errors.push(`${where}: non-finite ${key}`);
    }
    if (typeof node.color !== "string" || !RGBA.test(node.color)) {
      errors.push(`${where}: bad color`);
    }
    const attrs = node.attributes;
    if (typeof attrs !== "object" || attrs === null) {
      errors.push(`${where}: missing attributes`);
      return;
    }
    if (!LEVELS.has(attrs.level)) errors.push(`${where}: bad level`);
    if (!Number.isInteger(attrs.publ_count) || attrs.publ_count < 0) {
      errors.push(`${where}: bad publ_count`);
    }
    if (!Array.isArray(attrs.additional_terms) || attrs.additional_terms.length > 7) {
      errors.push(`${where}: bad additional_terms`);
    }
    const links = attrs.pubmed_links;
    const linksOk =
      typeof links === "string" ||
      (Array.isArray(links) &&
        links.every((l: any) => typeof l?.label === "string" && typeof l?.url === "string"));
    if (!linksOk) errors.push(`${where}: bad pubmed_links`);
    if (typeof attrs.children !== "string") errors.push(`${where}: bad children`);
    if (typeof attrs.hidden !== "boolean") errors.push(`${where}: bad hidden flag`);
  });
  doc.edges.forEach((edge: any, i: number) => {
    const where = `edge[${i}]`;
    if (typeof edge !== "object" || edge === null) {
      errors.push(`${where}: not an object`);
      return;
    }
    if (!ids.has(edge.source)) errors.push(`${where}: unknown source ${edge.source}`);
    if (!ids.has(edge.target)) errors.push(`${where}: unknown target ${edge.target}`);
    if (!Number.isFinite(edge.weight) || edge.weight < 0) {
      errors.push(`${where}: bad weight`);
    }
  });
  return errors;
}

export function validateConfig(raw: unknown): string[] {
  const errors: string[] = [];
  if (typeof raw !== "object" || raw === null) {
    return ["config.json: not an object"];
  }
  const cfg = raw as Record<string, unknown>;
  if (typeof cfg.title !== "string") errors.push("config: title must be a string");
  if (!Array.isArray(cfg.legend)) errors.push("config: legend must be an array");
  for (const key of ["maxZoom", "minZoom", "specialtyLabelZoom"]) {
    if (cfg[key] !== undefined && !Number.isFinite(cfg[key])) {
      errors.push(`config: ${key} must be a number`);
    }
  }
  return errors;
}

export function normalizeConfig(raw: Record<string, unknown>): MapConfig {
  return {
    title: (raw.title as string) ?? "Map",
    description: (raw.description as string) ?? "",
    legend: (raw.legend as MapConfig["legend"]) ?? [],
    gradientStops: (raw.gradientStops as MapConfig["gradientStops"]) ?? [],
    nodeLevelVisibility:
      (raw.nodeLevelVisibility as Record<string, boolean>) ??
      { Discipline: true, Specialty: true },
    specialtyLabelZoom: (raw.specialtyLabelZoom as number) ?? 2.0,
    maxZoom: (raw.maxZoom as number) ?? 32.0,
    minZoom: (raw.minZoom as number) ?? 0.125,
  };
}

export function indexNodes(data: MapData): Map<string, MapData["nodes"][number]> {
  const map = new Map<string, MapData["nodes"][number]>();
  for (const node of data.nodes) map.set(node.id, node);
  return map;
}
