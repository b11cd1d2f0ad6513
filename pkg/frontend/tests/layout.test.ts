import { describe, expect, it } from 'vitest';

import { layeredLayout } from '../src/layout.js';
import type { GraphDoc } from '../src/types.js';

const diamond: GraphDoc = {
  nodes: [
    { id: 's', loss: 1, p0: 1, kappa: 1, investable: true },
    { id: 'a', loss: 1, p0: 1, kappa: 1, investable: true },
    { id: 'b', loss: 1, p0: 1, kappa: 1, investable: true },
    { id: 'g', loss: 1, p0: 1, kappa: 1, investable: false },
  ],
  edges: [
    ['s', 'a'],
    ['s', 'b'],
    ['a', 'g'],
    ['b', 'g'],
  ],
  sources: ['s'],
  target: 'g',
};

describe('layered layout', () => {
  it('places sources left and the target right, edges pointing forward', () => {
    const { nodes } = layeredLayout(diamond);
    const pos = new Map(nodes.map((n) => [n.id, n]));
    expect(pos.get('s')!.layer).toBe(0);
    expect(pos.get('g')!.layer).toBe(2);
    for (const [a, b] of diamond.edges) {
      expect(pos.get(a)!.x).toBeLessThan(pos.get(b)!.x);
    }
  });

  it('gives parallel branches distinct rows', () => {
    const { nodes } = layeredLayout(diamond);
    const pos = new Map(nodes.map((n) => [n.id, n]));
    expect(pos.get('a')!.y).not.toBe(pos.get('b')!.y);
  });

  it('handles a skip edge without overlap', () => {
    const g: GraphDoc = {
      ...diamond,
      edges: [...diamond.edges, ['s', 'g']],
    };
    const { nodes } = layeredLayout(g);
    const seen = new Set(nodes.map((n) => `${n.x},${n.y}`));
    expect(seen.size).toBe(nodes.length);
  });
});
