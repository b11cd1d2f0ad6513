/**
 * What-if explorer wiring: graph editor, explicit solve button, what-if
 * panel with side-by-side comparison, promote-to-working-graph loop.
 */

import { ApiClient, ApiError, applySpecLocally } from './api.js';
import { renderDiagram, renderInvestmentBars } from './render.js';
import { SessionState } from './state.js';
import type { InterventionSpecDoc, NodeDoc } from './types.js';

export class App {
  readonly state = new SessionState();

  constructor(
    readonly api: ApiClient,
    private root: Document = document,
  ) {}

  private el<T extends HTMLElement>(id: string): T {
    const found = this.root.getElementById(id);
    if (!found) throw new Error(`missing element #${id}`);
    return found as T;
  }

  async init(): Promise<void> {
    const picker = this.el<HTMLSelectElement>('example-picker');
    for (const name of await this.api.listExamples()) {
      const opt = this.root.createElement('option');
      opt.value = name;
      opt.textContent = name;
      picker.appendChild(opt);
    }
    picker.addEventListener('change', () => void this.loadExample(picker.value));
    this.el('solve-button').addEventListener('click', () => void this.solveWorking());
    this.el('add-variant').addEventListener('click', () => this.composeVariant());
    this.el('evaluate-variant').addEventListener('click', () => void this.evaluateSelected());
    this.el('promote-variant').addEventListener('click', () => this.promoteSelected());
    this.el('export-button').addEventListener('click', () => this.exportWorking());
    this.el<HTMLInputElement>('import-input').addEventListener('change', (ev) =>
      void this.importWorking(ev),
    );
    this.el<HTMLInputElement>('budget-input').addEventListener('change', () => {
      this.state.setBudget(Number(this.el<HTMLInputElement>('budget-input').value));
      this.refresh();
    });
    this.refresh();
  }

  async loadExample(name: string): Promise<void> {
    const doc = await this.api.loadExample(name);
    this.state.loadGame(doc);
    this.el<HTMLInputElement>('budget-input').value = String(doc.budget);
    this.refresh();
  }

  async solveWorking(): Promise<void> {
    const issues = this.state.structuralIssues();
    if (issues.length) {
      this.showErrors(issues.map((i) => `${i.where}: ${i.message}`));
      return;
    }
    try {
      const result = await this.api.solve(this.state.game, 'working');
      this.state.recordSolve(result);
      this.showErrors([]);
    } catch (err) {
      this.surface(err);
    }
    this.refresh();
  }

  composeVariant(): void {
    const kind = this.el<HTMLSelectElement>('spec-kind').value as InterventionSpecDoc['kind'];
    const anchorRaw = this.el<HTMLInputElement>('spec-anchor').value.trim();
    const anchor = anchorRaw.includes(',')
      ? (anchorRaw.split(',').map((s) => s.trim()) as [string, string])
      : anchorRaw;
    const node: NodeDoc = {
      id: this.el<HTMLInputElement>('spec-id').value.trim(),
      loss: Number(this.el<HTMLInputElement>('spec-loss').value),
      p0: Number(this.el<HTMLInputElement>('spec-p0').value),
      kappa: Number(this.el<HTMLInputElement>('spec-kappa').value),
      investable: true,
    };
    this.state.addVariant({ kind, anchor, node });
    this.refresh();
  }

  async evaluateSelected(): Promise<void> {
    const id = this.state.selectedVariant;
    const variant = this.state.variants.find((v) => v.id === id);
    if (!variant) return;
    try {
      const report = await this.api.intervene(this.state.game, variant.spec, variant.id);
      this.state.recordReport(variant.id, report);
      this.showErrors([]);
    } catch (err) {
      this.surface(err);
    }
    this.refresh();
  }

  promoteSelected(): void {
    const id = this.state.selectedVariant;
    const variant = this.state.variants.find((v) => v.id === id);
    if (!variant?.report) return;
    const transformed = applySpecLocally(this.state.game.graph, variant.spec);
    this.state.promote(variant.id, transformed);
    this.refresh();
  }

  exportWorking(): void {
    const blob = new Blob([this.state.exportGame()], { type: 'application/json' });
    const a = this.root.createElement('a');
    a.href = URL.createObjectURL(blob);
    a.download = 'attack-graph.json';
    a.click();
  }

  async importWorking(ev: Event): Promise<void> {
    const input = ev.target as HTMLInputElement;
    const file = input.files?.[0];
    if (!file) return;
    this.state.importGame(await file.text());
    this.refresh();
  }

  private surface(err: unknown): void {
    if (err instanceof ApiError) {
      const msgs = err.payload.locations?.length
        ? err.payload.locations.map((l) => `${l.where ?? l.code ?? ''}: ${l.message ?? ''}`)
        : [err.payload.message];
      this.showErrors(msgs);
    } else if ((err as Error)?.name !== 'AbortError') {
      this.showErrors([(err as Error).message]);
    }
  }

  private showErrors(messages: string[]): void {
    const box = this.el('error-box');
    box.innerHTML = '';
    for (const m of messages) {
      const div = this.root.createElement('div');
      div.className = 'error';
      div.textContent = m;
      box.appendChild(div);
    }
  }

  refresh(): void {
    renderDiagram(this.el('diagram'), this.state.game.graph, this.state.lastResult);
    renderInvestmentBars(this.el('investments'), this.state.lastResult, this.state.resultIsStale);
    const list = this.el('variant-list');
    list.innerHTML = '';
    for (const v of this.state.variants) {
      const row = this.root.createElement('div');
      row.className = 'variant' + (v.id === this.state.selectedVariant ? ' selected' : '');
      row.dataset.variant = v.id;
      const title = `${v.spec.kind} ${JSON.stringify(v.spec.anchor)} + ${v.spec.node.id}`;
      const verdict = v.report
        ? ` ${v.report.verdict}: ${v.report.base_loss.toPrecision(5)} -> ${v.report.modified_loss.toPrecision(5)}`
        : ' (not evaluated)';
      row.textContent = title + verdict;
      row.addEventListener('click', () => {
        this.state.selectedVariant = v.id;
        this.refresh();
      });
      list.appendChild(row);
    }
    const promote = this.el<HTMLButtonElement>('promote-variant');
    const evaluate = this.el<HTMLButtonElement>('evaluate-variant');
    const selected = this.state.variants.find((v) => v.id === this.state.selectedVariant);
    evaluate.disabled = !selected;
    promote.disabled = !selected?.report;
  }
}

export async function boot(baseUrl = ''): Promise<App> {
  const app = new App(new ApiClient(baseUrl));
  await app.init();
  return app;
}
