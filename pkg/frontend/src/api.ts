/**
 * Typed client for the engine's HTTP API.
 *
 * Every call is appended to a request log so tests (and the curious) can
 * verify that each displayed number originated in a service response.  One
 * in-flight solve per variant key: a newer request aborts the older one.
 */

import type {
  GameDoc,
  GraphDoc,
  InterventionReportDoc,
  InterventionSpecDoc,
  ServiceEnvelope,
  ServiceError,
  SolveResult,
} from './types.js';

export interface RequestLogEntry {
  method: string;
  path: string;
  body?: unknown;
  status: number;
  response: unknown;
}

export class ApiError extends Error {
  constructor(
    public status: number,
    public payload: ServiceError,
  ) {
    super(payload.message ?? `service error ${status}`);
  }
}

export class ApiClient {
  readonly log: RequestLogEntry[] = [];
  private inflight = new Map<string, AbortController>();

  constructor(
    private baseUrl: string = '',
    private fetchFn: typeof fetch = fetch,
  ) {}

  private async call<T>(
    method: string,
    path: string,
    body?: unknown,
    abortKey?: string,
  ): Promise<T> {
    let signal: AbortSignal | undefined;
    if (abortKey) {
      this.inflight.get(abortKey)?.abort();
      const controller = new AbortController();
      this.inflight.set(abortKey, controller);
      signal = controller.signal;
    }
    const resp = await this.fetchFn(this.baseUrl + path, {
      method,
      headers: body === undefined ? undefined : { 'content-type': 'application/json' },
      body: body === undefined ? undefined : JSON.stringify(body),
      signal,
    });
    const payload = await resp.json();
    this.log.push({ method, path, body, status: resp.status, response: payload });
    if (!resp.ok) {
      throw new ApiError(resp.status, payload as ServiceError);
    }
    return payload as T;
  }

  listExamples(): Promise<string[]> {
    return this.call('GET', '/api/examples');
  }

  loadExample(name: string): Promise<GameDoc> {
    return this.call('GET', `/api/examples/${name}`);
  }

  async solve(game: GameDoc, variantKey = 'working'): Promise<SolveResult> {
    const env = await this.call<ServiceEnvelope<SolveResult>>(
      'POST',
      '/api/solve',
      game,
      `solve:${variantKey}`,
    );
    return env.result;
  }

  async intervene(
    game: GameDoc,
    spec: InterventionSpecDoc,
    variantKey: string,
  ): Promise<InterventionReportDoc> {
    const env = await this.call<ServiceEnvelope<InterventionReportDoc>>(
      'POST',
      '/api/intervene',
      { game, spec },
      `intervene:${variantKey}`,
    );
    return env.result;
  }

  async reduce(game: GameDoc): Promise<Record<string, unknown>> {
    const env = await this.call<ServiceEnvelope<Record<string, unknown>>>(
      'POST',
      '/api/reduce',
      game,
    );
    return env.result;
  }
}

/** Graph-editing helpers shared by the editor and the what-if preview. */
export function applySpecLocally(graph: GraphDoc, spec: InterventionSpecDoc): GraphDoc {
  // Pure structural preview of the transformation (no equilibrium math);
  // the service re-applies and validates it authoritatively on evaluate.
  const nodes = graph.nodes.map((n) => ({ ...n }));
  const edges = graph.edges.map((e) => [...e] as [string, string]);
  const sources = [...graph.sources];
  const byId = new Map(nodes.map((n) => [n.id, n]));
  const preds = (v: string) => edges.filter((e) => e[1] === v).map((e) => e[0]);
  const succs = (v: string) => edges.filter((e) => e[0] === v).map((e) => e[1]);
  const node = { ...spec.node };
  if (spec.kind === 'series') {
    let u: string, v: string;
    if (Array.isArray(spec.anchor)) {
      [u, v] = spec.anchor;
    } else {
      u = spec.anchor;
      const out = succs(u);
      if (out.length !== 1) throw new Error(`series anchor ${u} needs a unique edge`);
      v = out[0];
    }
    const idx = edges.findIndex((e) => e[0] === u && e[1] === v);
    if (idx < 0) throw new Error(`edge ${u} -> ${v} not in graph`);
    edges.splice(idx, 1);
    nodes.push(node);
    edges.push([u, node.id], [node.id, v]);
  } else if (spec.kind === 'parallel') {
    const a = spec.anchor as string;
    nodes.push(node);
    for (const p of preds(a)) edges.push([p, node.id]);
    for (const s of succs(a)) edges.push([node.id, s]);
  } else if (spec.kind === 'hybrid') {
    const a = spec.anchor as string;
    const attr = byId.get(a);
    if (!attr) throw new Error(`anchor ${a} not in graph`);
    const auxOfAnchor = { id: `${a}'`, loss: 0, p0: attr.p0, kappa: attr.kappa, investable: true };
    const auxOfNew = { id: `${node.id}'`, loss: 0, p0: node.p0, kappa: node.kappa, investable: true };
    const out = succs(a);
    for (const p of preds(a)) edges.push([p, node.id]);
    for (let i = edges.length - 1; i >= 0; i--) {
      if (edges[i][0] === a) edges.splice(i, 1);
    }
    nodes.push(node, auxOfAnchor, auxOfNew);
    edges.push([a, auxOfNew.id], [node.id, auxOfAnchor.id]);
    for (const s of out) edges.push([auxOfNew.id, s], [auxOfAnchor.id, s]);
  } else if (spec.kind === 'input') {
    nodes.push(node);
    edges.push([node.id, spec.anchor as string]);
    sources.push(node.id);
  }
  return { ...graph, nodes, edges, sources };
}
