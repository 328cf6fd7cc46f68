// Shapes of the exported bundle files and the viewer's runtime state.

export interface PubmedLink {
  label: string;
  url: string;
}

export interface NodeAttributes {
  level: "Discipline" | "Specialty";
  publ_count: number;
  additional_terms: string[];
  pubmed_links: PubmedLink[] | string; // string = "Too many publ. (N)" sentinel
  children: string; // sanitized before display
  hidden: boolean;
  overlay_value: number | null;
  overlay_count: number | null;
}

export interface MapNode {
  id: string;
  label: string;
  x: number;
  y: number;
  size: number;
  color: string;
  attributes: NodeAttributes;
}

export interface MapEdge {
  id: string;
  source: string;
  target: string;
  weight: number;
}

export interface MapData {
  metadata: { kind: "base" | "overlay"; [key: string]: unknown };
  nodes: MapNode[];
  edges: MapEdge[];
}

export interface LegendEntry {
  label: string;
  color: string;
}

export interface GradientStop {
  at: number;
  color: string;
}

export interface MapConfig {
  title: string;
  description: string;
  legend: LegendEntry[];
  gradientStops: GradientStop[];
  nodeLevelVisibility: Record<string, boolean>;
  specialtyLabelZoom: number;
  maxZoom: number;
  minZoom: number;
}

export interface Bundle {
  data: MapData;
  config: MapConfig;
  nodeById: Map<string, MapNode>;
}

export interface Camera {
  cx: number; // world coordinates at the viewport center
  cy: number;
  zoom: number; // screen pixels per world unit
}

export interface ViewState {
  camera: Camera;
  fitZoom: number; // zoom that frames the whole map; LOD is relative to it
  selected: string | null;
  hover: string | null;
  query: string;
  matches: string[];
  matchIndex: number;
}
