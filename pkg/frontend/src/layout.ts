/**
 * Layered left-to-right DAG layout: sources in the first column, the target
 * in the last, each node on its longest-path layer, crossings reduced by a
 * few barycenter sweeps.  Pure geometry; no game semantics.
 */

import type { GraphDoc } from './types.js';

export interface Placed {
  id: string;
  x: number;
  y: number;
  layer: number;
}

export interface LayoutResult {
  nodes: Placed[];
  width: number;
  height: number;
}

export const COLUMN_GAP = 150;
export const ROW_GAP = 70;
export const MARGIN = 60;

export function layeredLayout(graph: GraphDoc): LayoutResult {
  const ids = graph.nodes.map((n) => n.id);
  const preds = new Map<string, string[]>(ids.map((v) => [v, []]));
  const succs = new Map<string, string[]>(ids.map((v) => [v, []]));
  for (const [a, b] of graph.edges) {
    succs.get(a)?.push(b);
    preds.get(b)?.push(a);
  }
  // longest-path layering via one topological sweep
  const layer = new Map<string, number>();
  const indeg = new Map(ids.map((v) => [v, preds.get(v)!.length]));
  const queue = ids.filter((v) => indeg.get(v) === 0);
  for (const v of queue) layer.set(v, 0);
  while (queue.length) {
    const v = queue.shift()!;
    for (const w of succs.get(v) ?? []) {
      layer.set(w, Math.max(layer.get(w) ?? 0, (layer.get(v) ?? 0) + 1));
      indeg.set(w, indeg.get(w)! - 1);
      if (indeg.get(w) === 0) queue.push(w);
    }
  }
  const maxLayer = Math.max(0, ...layer.values());
  if (layer.has(graph.target)) layer.set(graph.target, maxLayer);

  const columns: string[][] = Array.from({ length: maxLayer + 1 }, () => []);
  for (const v of ids) columns[Math.min(layer.get(v) ?? 0, maxLayer)].push(v);

  // barycenter ordering sweeps
  const order = new Map<string, number>();
  columns.forEach((col) => col.forEach((v, i) => order.set(v, i)));
  for (let sweep = 0; sweep < 4; sweep++) {
    const forward = sweep % 2 === 0;
    const cols = forward ? columns : [...columns].reverse();
    for (const col of cols) {
      col.sort((a, b) => {
        const around = (v: string) =>
          (forward ? preds.get(v) : succs.get(v)) ?? [];
        const bary = (v: string) => {
          const ns = around(v);
          if (!ns.length) return order.get(v) ?? 0;
          return ns.reduce((s, w) => s + (order.get(w) ?? 0), 0) / ns.length;
        };
        return bary(a) - bary(b) || a.localeCompare(b);
      });
      col.forEach((v, i) => order.set(v, i));
    }
  }

  const tallest = Math.max(1, ...columns.map((c) => c.length));
  const nodes: Placed[] = [];
  columns.forEach((col, li) => {
    const offset = ((tallest - col.length) * ROW_GAP) / 2;
    col.forEach((v, i) => {
      nodes.push({
        id: v,
        layer: li,
        x: MARGIN + li * COLUMN_GAP,
        y: MARGIN + offset + i * ROW_GAP,
      });
    });
  });
  return {
    nodes,
    width: MARGIN * 2 + maxLayer * COLUMN_GAP,
    height: MARGIN * 2 + (tallest - 1) * ROW_GAP,
  };
}
