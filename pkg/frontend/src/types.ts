/**
 * Document types mirrored from the engine's JSON formats.
 * The client renders these verbatim; it never computes game quantities.
 */

export interface NodeDoc {
  id: string;
  loss: number;
  p0: number;
  kappa: number;
  investable: boolean;
}

export interface GraphDoc {
  nodes: NodeDoc[];
  edges: [string, string][];
  sources: string[];
  target: string;
  meta?: Record<string, unknown>;
}

export interface GameDoc {
  graph: GraphDoc;
  budget: number;
  options?: { tolerance?: number; path_cap?: number; resolution?: number };
  meta?: Record<string, unknown>;
}

export interface Certificate {
  spread: number;
  budget_slack: number;
  first_order_residual: number;
  gap_rel: number;
  iterations: number;
  method: string;
}

export interface SolveResult {
  loss: number;
  x: Record<string, number>;
  critical_paths: string[][];
  certificate: Certificate;
  attack_probabilities: Record<string, number>;
}

export interface InterventionSpecDoc {
  kind: 'series' | 'parallel' | 'hybrid' | 'input';
  anchor: string | [string, string];
  node: NodeDoc;
}

export interface InterventionReportDoc {
  spec: InterventionSpecDoc;
  base_loss: number;
  modified_loss: number;
  delta: number;
  verdict: 'Improves' | 'Worsens' | 'Neutral';
  base_x: Record<string, number>;
  modified_x: Record<string, number>;
  base_probabilities: Record<string, number>;
  modified_probabilities: Record<string, number>;
  warnings: string[];
}

export interface ServiceEnvelope<T> {
  engine: string;
  request: unknown;
  result: T;
}

export interface ServiceError {
  code: string;
  message: string;
  locations: { code?: string; message?: string; where?: string }[];
}
