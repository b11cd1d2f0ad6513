/**
 * Session state for the what-if explorer.
 *
 * The working game document is the single source of truth the defender
 * edits; candidate interventions live beside it as variants.  Every
 * equilibrium figure stored here was copied verbatim from a service
 * response (the client computes no game math), and each result remembers
 * the graph revision it answered so stale numbers are visibly stale.
 */

import type {
  GameDoc,
  GraphDoc,
  InterventionReportDoc,
  InterventionSpecDoc,
  NodeDoc,
  SolveResult,
} from './types.js';

export interface Variant {
  id: string;
  spec: InterventionSpecDoc;
  report?: InterventionReportDoc;
  reportRevision?: number;
}

export interface StructuralIssue {
  where: string;
  message: string;
}

export class SessionState {
  game: GameDoc = {
    graph: { nodes: [], edges: [], sources: [], target: '' },
    budget: 1,
  };
  revision = 0;
  lastResult?: SolveResult;
  lastResultRevision?: number;
  variants: Variant[] = [];
  selectedVariant?: string;
  private variantCounter = 0;

  loadGame(doc: GameDoc): void {
    this.game = structuredClone(doc);
    this.revision += 1;
    this.lastResult = undefined;
    this.lastResultRevision = undefined;
    this.variants = [];
    this.selectedVariant = undefined;
  }

  /** Structural checks only; attribute semantics are the service's call. */
  structuralIssues(): StructuralIssue[] {
    const g = this.game.graph;
    const issues: StructuralIssue[] = [];
    const ids = new Set<string>();
    for (const n of g.nodes) {
      if (ids.has(n.id)) issues.push({ where: n.id, message: 'duplicate node id' });
      ids.add(n.id);
    }
    for (const [a, b] of g.edges) {
      if (!ids.has(a) || !ids.has(b)) {
        issues.push({ where: `${a}->${b}`, message: 'edge references a missing node' });
      }
    }
    if (!ids.has(g.target)) issues.push({ where: g.target, message: 'target missing' });
    for (const s of g.sources) {
      if (!ids.has(s)) issues.push({ where: s, message: 'source missing' });
    }
    if (this.game.budget < 0) issues.push({ where: 'budget', message: 'budget must be >= 0' });
    return issues;
  }

  // -- graph editing ------------------------------------------------------

  private touch(): void {
    this.revision += 1;
  }

  upsertNode(node: NodeDoc): void {
    const g = this.game.graph;
    const i = g.nodes.findIndex((n) => n.id === node.id);
    if (i >= 0) g.nodes[i] = { ...node };
    else g.nodes.push({ ...node });
    this.touch();
  }

  removeNode(id: string): void {
    const g = this.game.graph;
    g.nodes = g.nodes.filter((n) => n.id !== id);
    g.edges = g.edges.filter(([a, b]) => a !== id && b !== id);
    g.sources = g.sources.filter((s) => s !== id);
    this.touch();
  }

  addEdge(a: string, b: string): void {
    const g = this.game.graph;
    if (!g.edges.some(([x, y]) => x === a && y === b)) g.edges.push([a, b]);
    this.touch();
  }

  removeEdge(a: string, b: string): void {
    const g = this.game.graph;
    g.edges = g.edges.filter(([x, y]) => !(x === a && y === b));
    this.touch();
  }

  setBudget(budget: number): void {
    this.game.budget = budget;
    this.touch();
  }

  setSources(sources: string[]): void {
    this.game.graph.sources = [...sources];
    this.touch();
  }

  // -- solve results ------------------------------------------------------

  recordSolve(result: SolveResult): void {
    this.lastResult = result;
    this.lastResultRevision = this.revision;
  }

  get resultIsStale(): boolean {
    return this.lastResult !== undefined && this.lastResultRevision !== this.revision;
  }

  // -- what-if variants ---------------------------------------------------

  addVariant(spec: InterventionSpecDoc): Variant {
    const v: Variant = { id: `variant-${++this.variantCounter}`, spec };
    this.variants.push(v);
    this.selectedVariant = v.id;
    return v;
  }

  recordReport(variantId: string, report: InterventionReportDoc): void {
    const v = this.variants.find((w) => w.id === variantId);
    if (!v) throw new Error(`unknown variant ${variantId}`);
    v.report = report;
    v.reportRevision = this.revision;
  }

  /** Promote a variant: its transformed graph becomes the working graph. */
  promote(variantId: string, transformed: GraphDoc): void {
    const v = this.variants.find((w) => w.id === variantId);
    if (!v) throw new Error(`unknown variant ${variantId}`);
    this.game.graph = structuredClone(transformed);
    this.variants = this.variants.filter((w) => w.id !== variantId);
    this.selectedVariant = undefined;
    this.lastResult = undefined;
    this.lastResultRevision = undefined;
    this.touch();
  }

  // -- persistence --------------------------------------------------------

  exportGame(): string {
    return JSON.stringify(this.game, null, 2);
  }

  importGame(text: string): void {
    const doc = JSON.parse(text) as GameDoc;
    if (!doc.graph || !Array.isArray(doc.graph.nodes)) {
      throw new Error('not a game document');
    }
    this.loadGame(doc);
  }
}
