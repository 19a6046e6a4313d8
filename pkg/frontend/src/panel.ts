import { createScenario, getSurface, pollScenario, type PollOptions } from './api';
import { fmtMetric, METRIC_CARDS } from './format';
import { dynamicScale } from './legend';
import { MapView } from './map';
import { layoutScatter, paintScatter } from './scatter';
import type { Catalog, CityEntry, ScenarioConfig, ScenarioDoc, SurfaceCollection } from './types';

export type PanelSide = 'left' | 'right';

/** Test seams; production panels use the real API module. */
export interface PanelDeps {
  create?: typeof createScenario;
  poll?: typeof pollScenario;
  surface?: typeof getSurface;
  pollOpts?: PollOptions;
}

function option(value: string, label: string): HTMLOptionElement {
  const el = document.createElement('option');
  el.value = value;
  el.textContent = label;
  return el;
}

function labeled(text: string, control: HTMLElement): HTMLLabelElement {
  const el = document.createElement('label');
  el.className = 'field';
  const span = document.createElement('span');
  span.textContent = text;
  el.append(span, control);
  return el;
}

/**
 * One side of the comparison: a scenario form, a progress line, and —
 * once the run lands — metric cards, an actual-vs-predicted scatter,
 * and the surface map. Panels know nothing about each other; the app
 * links them only through the shared color scale.
 */
export class Panel {
  readonly el: HTMLElement;
  readonly side: PanelSide;
  readonly map: MapView;
  doc: ScenarioDoc | null = null;
  surfaceValues: number[] | null = null;
  cached = false;
  /** called after a surface loads so the app can refresh legend scales */
  onSurface: (() => void) | null = null;

  private readonly catalog: Catalog;
  private readonly deps: PanelDeps;
  private busy = false;
  private citySel!: HTMLSelectElement;
  private yearSel!: HTMLSelectElement;
  private pollutantSel!: HTMLSelectElement;
  private modelSel!: HTMLSelectElement;
  private factorBoxes: HTMLInputElement[] = [];
  private submitBtn!: HTMLButtonElement;
  private hintEl!: HTMLElement;
  private statusEl!: HTMLElement;
  private resultsEl!: HTMLElement;
  private cardsEl!: HTMLElement;
  private metaEl!: HTMLElement;
  private scatterCanvas!: HTMLCanvasElement;

  constructor(side: PanelSide, catalog: Catalog, deps: PanelDeps = {}) {
    this.side = side;
    this.catalog = catalog;
    this.deps = deps;
    this.map = new MapView();
    this.el = document.createElement('section');
    this.el.className = 'panel';
    this.el.dataset.side = side;
    this.buildForm();
    this.buildResults();
    this.updateGate();
  }

  private buildForm(): void {
    const title = document.createElement('h2');
    title.textContent = this.side === 'left' ? 'Panel A' : 'Panel B';
    this.el.append(title);

    const form = document.createElement('form');
    form.className = 'config-form';
    form.addEventListener('submit', (ev) => {
      ev.preventDefault();
      void this.submit();
    });

    this.citySel = document.createElement('select');
    this.citySel.className = 'city';
    for (const c of this.catalog.cities) {
      this.citySel.append(option(c.id, c.name));
    }
    this.citySel.addEventListener('change', () => this.populateCityFields());

    this.yearSel = document.createElement('select');
    this.yearSel.className = 'year';
    this.pollutantSel = document.createElement('select');
    this.pollutantSel.className = 'pollutant';

    this.modelSel = document.createElement('select');
    this.modelSel.className = 'model';
    for (const kind of this.catalog.model_kinds) {
      this.modelSel.append(option(kind, kind.replace('_', ' ')));
    }

    const row = document.createElement('div');
    row.className = 'field-row';
    row.append(
      labeled('City', this.citySel),
      labeled('Year', this.yearSel),
      labeled('Pollutant', this.pollutantSel),
      labeled('Model', this.modelSel),
    );

    const factors = document.createElement('fieldset');
    factors.className = 'factors';
    const legend = document.createElement('legend');
    legend.textContent = 'Driving factors';
    factors.append(legend);
    for (const name of this.catalog.variables) {
      const box = document.createElement('input');
      box.type = 'checkbox';
      box.value = name;
      box.checked = true; // all inputs participate unless opted out
      box.addEventListener('change', () => this.updateGate());
      const item = document.createElement('label');
      item.className = 'factor-item';
      item.append(box, document.createTextNode(` ${name}`));
      factors.append(item);
      this.factorBoxes.push(box);
    }

    this.submitBtn = document.createElement('button');
    this.submitBtn.type = 'submit';
    this.submitBtn.className = 'submit';
    this.submitBtn.textContent = 'Train scenario';
    this.hintEl = document.createElement('span');
    this.hintEl.className = 'form-hint';
    const actions = document.createElement('div');
    actions.className = 'form-actions';
    actions.append(this.submitBtn, this.hintEl);

    form.append(row, factors, actions);
    this.el.append(form);

    this.statusEl = document.createElement('div');
    this.statusEl.className = 'status-line';
    this.statusEl.dataset.phase = 'idle';
    this.el.append(this.statusEl);

    this.populateCityFields();
  }

  private buildResults(): void {
    this.resultsEl = document.createElement('div');
    this.resultsEl.className = 'results';
    this.resultsEl.hidden = true;

    this.cardsEl = document.createElement('div');
    this.cardsEl.className = 'metric-cards';
    this.metaEl = document.createElement('div');
    this.metaEl.className = 'meta-line';

    const plots = document.createElement('div');
    plots.className = 'plots';
    this.scatterCanvas = document.createElement('canvas');
    this.scatterCanvas.className = 'scatter';
    plots.append(this.scatterCanvas, this.map.el);

    this.resultsEl.append(this.cardsEl, this.metaEl, plots);
    this.el.append(this.resultsEl);
  }

  private city(): CityEntry | undefined {
    return this.catalog.cities.find((c) => c.id === this.citySel.value);
  }

  private populateCityFields(): void {
    const city = this.city();
    this.yearSel.textContent = '';
    this.pollutantSel.textContent = '';
    if (city) {
      for (const y of city.years) this.yearSel.append(option(String(y), String(y)));
      for (const p of city.pollutants) this.pollutantSel.append(option(p, p.toUpperCase()));
    }
    this.updateGate();
  }

  factors(): string[] {
    return this.factorBoxes.filter((b) => b.checked).map((b) => b.value);
  }

  selectedConfig(): ScenarioConfig {
    return {
      city: this.citySel.value,
      year: Number(this.yearSel.value),
      pollutant: this.pollutantSel.value,
      model: this.modelSel.value,
      factors: this.factors(),
    };
  }

  canSubmit(): boolean {
    return (
      !this.busy &&
      this.citySel.value !== '' &&
      this.yearSel.value !== '' &&
      this.pollutantSel.value !== '' &&
      this.modelSel.value !== '' &&
      this.factors().length > 0
    );
  }

  private updateGate(): void {
    this.submitBtn.disabled = !this.canSubmit();
    this.hintEl.textContent =
      !this.busy && this.factors().length === 0 ? 'check at least one driving factor' : '';
  }

  private setPhase(phase: string, text: string): void {
    this.statusEl.dataset.phase = phase;
    this.statusEl.textContent = text;
  }

  private renderStatus(doc: ScenarioDoc): void {
    switch (doc.status) {
      case 'pending':
        this.setPhase('pending', 'queued…');
        break;
      case 'running':
        this.setPhase('running', 'training…');
        break;
      case 'done':
        this.setPhase('done', this.cached ? 'done (cached)' : 'done');
        break;
      case 'failed':
        // surfaced verbatim — the service's reason is the diagnosis
        this.setPhase('failed', `failed: ${doc.reason ?? 'unknown reason'}`);
        break;
    }
  }

  async submit(): Promise<void> {
    if (!this.canSubmit()) return;
    this.busy = true;
    this.updateGate();
    this.setPhase('submitting', 'submitting…');
    try {
      const create = this.deps.create ?? createScenario;
      const poll = this.deps.poll ?? pollScenario;
      const fetchSurface = this.deps.surface ?? getSurface;

      const created = await create(this.selectedConfig());
      this.cached = created.cached;
      const doc = await poll(created.id, {
        ...this.deps.pollOpts,
        onUpdate: (d) => this.renderStatus(d),
      });
      this.doc = doc;
      this.renderStatus(doc);
      if (doc.status !== 'done') return;

      const surface = await fetchSurface(doc.id);
      this.showResult(doc, surface);
    } catch (err) {
      this.setPhase('failed', `failed: ${err instanceof Error ? err.message : String(err)}`);
    } finally {
      this.busy = false;
      this.updateGate();
    }
  }

  private showResult(doc: ScenarioDoc, surface: SurfaceCollection): void {
    this.cardsEl.textContent = '';
    const metrics = (doc.metrics ?? {}) as unknown as Record<string, number | null>;
    for (const [key, label] of METRIC_CARDS) {
      const card = document.createElement('div');
      card.className = 'metric-card';
      const labelEl = document.createElement('div');
      labelEl.className = 'metric-label';
      labelEl.textContent = label;
      const valueEl = document.createElement('div');
      valueEl.className = 'metric-value';
      valueEl.textContent = fmtMetric(metrics[key]);
      card.append(labelEl, valueEl);
      this.cardsEl.append(card);
    }

    const parts = [`train ${doc.train_rows ?? '?'} / test ${doc.test_rows ?? '?'} rows`,
                   `scenario ${doc.id}`];
    if (this.cached) parts.push('cached');
    this.metaEl.textContent = parts.join(' · ');

    paintScatter(this.scatterCanvas, layoutScatter(doc.metrics?.pairs ?? []));

    this.surfaceValues = surface.features.map((f) => f.properties.value);
    this.map.setSurface(surface, dynamicScale(this.surfaceValues));
    this.resultsEl.hidden = false;
    this.onSurface?.();
  }
}
