/**
 * SVG diagram and investment bars.  All rendered figures are verbatim from
 * service responses passed in; this module only draws.
 */

import { layeredLayout } from './layout.js';
import type { GraphDoc, SolveResult } from './types.js';

const NODE_R = 22;

function svgEl<K extends keyof SVGElementTagNameMap>(
  tag: K,
  attrs: Record<string, string | number> = {},
): SVGElementTagNameMap[K] {
  const el = document.createElementNS('http://www.w3.org/2000/svg', tag);
  for (const [k, v] of Object.entries(attrs)) el.setAttribute(k, String(v));
  return el;
}

export function renderDiagram(
  host: HTMLElement,
  graph: GraphDoc,
  result?: SolveResult,
): void {
  host.innerHTML = '';
  const { nodes, width, height } = layeredLayout(graph);
  const pos = new Map(nodes.map((n) => [n.id, n]));
  const svg = svgEl('svg', {
    viewBox: `0 0 ${Math.max(width, 300)} ${Math.max(height, 200)}`,
    width: '100%',
  });
  svg.classList.add('diagram');

  const critical = new Set<string>();
  for (const path of result?.critical_paths ?? []) {
    for (let i = 0; i + 1 < path.length; i++) critical.add(`${path[i]}->${path[i + 1]}`);
  }
  const maxX = Math.max(1e-12, ...Object.values(result?.x ?? { _: 0 }));

  for (const [a, b] of graph.edges) {
    const pa = pos.get(a);
    const pb = pos.get(b);
    if (!pa || !pb) continue;
    const line = svgEl('line', {
      x1: pa.x + NODE_R,
      y1: pa.y,
      x2: pb.x - NODE_R,
      y2: pb.y,
      'marker-end': 'url(#arrow)',
    });
    line.classList.add('edge');
    if (critical.has(`${a}->${b}`)) line.classList.add('critical');
    svg.appendChild(line);
  }
  const defs = svgEl('defs');
  defs.innerHTML =
    '<marker id="arrow" viewBox="0 0 10 10" refX="9" refY="5" ' +
    'markerWidth="7" markerHeight="7" orient="auto-start-reverse">' +
    '<path d="M 0 0 L 10 5 L 0 10 z"/></marker>';
  svg.appendChild(defs);

  for (const n of graph.nodes) {
    const p = pos.get(n.id);
    if (!p) continue;
    const group = svgEl('g');
    group.setAttribute('data-node', n.id);
    const invested = result ? (result.x[n.id] ?? 0) : 0;
    const circle = svgEl('circle', { cx: p.x, cy: p.y, r: NODE_R });
    circle.classList.add('node');
    if (n.id === graph.target) circle.classList.add('target');
    if (graph.sources.includes(n.id)) circle.classList.add('source');
    if (!n.investable) circle.classList.add('frozen');
    if (invested > 0) {
      circle.style.fill = `rgba(46, 125, 50, ${0.25 + (0.65 * invested) / maxX})`;
    }
    group.appendChild(circle);
    const label = svgEl('text', { x: p.x, y: p.y + 4, 'text-anchor': 'middle' });
    label.textContent = n.id;
    group.appendChild(label);
    const attrs = svgEl('text', {
      x: p.x,
      y: p.y + NODE_R + 14,
      'text-anchor': 'middle',
      class: 'attrs',
    });
    attrs.textContent = `L=${n.loss} p0=${n.p0} k=${n.kappa}`;
    group.appendChild(attrs);
    svg.appendChild(group);
  }
  host.appendChild(svg);
}

export function renderInvestmentBars(
  host: HTMLElement,
  result: SolveResult | undefined,
  stale: boolean,
): void {
  host.innerHTML = '';
  if (!result) {
    host.textContent = 'no solve yet';
    return;
  }
  const header = document.createElement('div');
  header.className = 'loss-line';
  header.textContent = `L* = ${result.loss.toPrecision(6)}${stale ? ' (stale: graph edited since)' : ''}`;
  host.appendChild(header);
  const entries = Object.entries(result.x).sort((a, b) => b[1] - a[1]);
  const maxX = Math.max(1e-12, ...entries.map(([, v]) => v));
  for (const [id, v] of entries) {
    const row = document.createElement('div');
    row.className = 'bar-row';
    row.dataset.node = id;
    const label = document.createElement('span');
    label.className = 'bar-label';
    label.textContent = id;
    const bar = document.createElement('span');
    bar.className = 'bar';
    bar.style.width = `${(100 * v) / maxX}%`;
    const val = document.createElement('span');
    val.className = 'bar-value';
    val.textContent = v.toFixed(4);
    row.append(label, bar, val);
    host.appendChild(row);
  }
  if (!entries.length) {
    const empty = document.createElement('div');
    empty.textContent = 'all investments are zero';
    host.appendChild(empty);
  }
}
