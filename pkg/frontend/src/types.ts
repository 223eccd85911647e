/** Response shapes of the scoring API, mirrored field for field.
 *
 * Every number the UI displays comes out of one of these; the client never
 * recomputes distances, probabilities, or degrees on its own.
 */

export interface HealthInfo {
  status: string;
  checkpoint_sha256: string;
  model_fingerprint: string;
  input_dim: number;
  graph: { nodes: number; edges: number };
}

export interface StyleInfo {
  id: number;
  name: string;
  attributes: string[];
}

export interface StylesResponse {
  styles: StyleInfo[];
}

export interface GroupSummary {
  group: string;
  product_count: number;
  graph_product_count: number;
}

export interface GroupsResponse {
  groups: GroupSummary[];
}

export interface ProductDetail {
  sku: string;
  group: string;
  name: string;
  in_graph: boolean;
  weighted_degree: number | null;
  embedding: number[] | null;
}

export interface NeighborInfo {
  sku: string;
  group: string;
  distance: number;
}

export interface NeighborsResponse {
  sku: string;
  k: number;
  truncated: boolean;
  neighbors: NeighborInfo[];
}

export interface ScoreRequest {
  features: number[];
  k?: number;
}

export interface DesignReport {
  style_probs: number[];
  top_neighbors: NeighborInfo[];
  group_connections: Record<string, number>;
  similarity_score: number;
  flags: string[];
}

export interface GroupNode {
  group: string;
  product_count: number;
  degree_sum: number;
  self_weight: number;
  most_connected: string;
}

export interface GroupEdge {
  source: string;
  target: string;
  weight: number;
}

export interface GraphGroupsResponse {
  nodes: GroupNode[];
  edges: GroupEdge[];
}

export interface GapGroup {
  group: string;
  node_count: number;
  isolated_count: number;
  isolated_skus: string[];
  degree_min: number;
  degree_median: number;
  degree_max: number;
}

export interface GapsResponse {
  groups: GapGroup[];
  zero_weight_pairs: [string, string][];
}

export interface ApiErrorBody {
  error: string;
  detail: string;
}
