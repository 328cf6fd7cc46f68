// Fetch and validate the bundle pair. The loaded data is frozen: the viewer
// never mutates it, so a reload restores the initial state exactly.

import { indexNodes, normalizeConfig, validateConfig, validateData } from "./validate.js";
import type { Bundle, MapConfig, MapData } from "./types.js";

export class BundleError extends Error {
  constructor(public readonly problems: string[]) {
    super(problems.join("; "));
    this.name = "BundleError";
  }
}

export function assembleBundle(rawData: unknown, rawConfig: unknown): Bundle {
  const problems = [...validateData(rawData), ...validateConfig(rawConfig)];
  if (problems.length > 0) {
    throw new BundleError(problems);
  }
  const data = deepFreeze(rawData as MapData);
  const config = deepFreeze(normalizeConfig(rawConfig as Record<string, unknown>)) as MapConfig;
  return { data, config, nodeById: indexNodes(data) };
}

export async function loadBundle(dataUrl: string, configUrl: string): Promise<Bundle> {
  const [dataResp, configResp] = await Promise.all([fetch(dataUrl), fetch(configUrl)]);
  if (!dataResp.ok) throw new BundleError([`cannot load ${dataUrl}: ${dataResp.status}`]);
  if (!configResp.ok) throw new BundleError([`cannot load ${configUrl}: ${configResp.status}`]);
  let rawData: unknown;
  let rawConfig: unknown;
  try {
    rawData = await dataResp.json();
  } catch {
    throw new BundleError([`${dataUrl}: invalid JSON`]);
  }
  try {
    rawConfig = await configResp.json();
  } catch {
    throw new BundleError([`${configUrl}: invalid JSON`]);
  }
  return assembleBundle(rawData, rawConfig);
}

function deepFreeze<T>(value: T): T {
  if (value && typeof value === "object" && !Object.isFrozen(value)) {
    Object.freeze(value);
    for (const key of Object.getOwnPropertyNames(value)) {
      deepFreeze((value as Record<string, unknown>)[key]);
    }
  }
  return value;
}
