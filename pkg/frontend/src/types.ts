// DTOs mirroring the /v1 JSON contract of the session service.

export interface FrameNode {
  id: string;
  label: string;
  year: number;
  layer: number;
  x: number;
  marked: boolean;
  selected: boolean;
  group: number | null;
  internal_score: number;
}

export interface FrameEdge {
  citing: string;
  cited: string;
  essential: boolean;
}

export interface Frame {
  version: number;
  grid_points: number;
  min_separation: number;
  transitive_reduction: boolean;
  layer_years: number[];
  nodes: FrameNode[];
  edges: FrameEdge[];
}

export interface StateCounts {
  publications: number;
  citation_relations: number;
  selected_publications: number;
  selected_citation_relations: number;
}

export interface SessionState {
  counts: StateCounts;
  full_network: { publications: number; citation_relations: number };
  marked: string[];
  history: { position: number; length: number; can_back: boolean; can_forward: boolean };
}

export interface PublicationDetails {
  id: string;
  authors: string[];
  title: string;
  source: string;
  year: number;
  doi: string | null;
  internal_score: number;
  external_score: number | null;
  complete_record: boolean;
  member: boolean;
  marked: boolean;
  selected: boolean;
  group: number | null;
}

export interface PublicationList {
  total: number;
  offset: number;
  items: PublicationDetails[];
}

export interface SelectionRequest {
  mode: "by_period" | "by_group" | "by_marked";
  year_min?: number;
  year_max?: number;
  group_id?: number;
  include_predecessors?: boolean;
  include_successors?: boolean;
  include_intermediates?: boolean;
  min_relations?: number;
}

export interface ExpansionRequest {
  add_predecessors?: boolean;
  add_successors?: boolean;
  add_intermediates?: boolean;
  min_relations?: number;
}

export interface FrameParams {
  display_count?: number;
  transitive_reduction?: boolean;
  seed?: number;
}
