import { getCatalog } from './api';
import { dynamicScale, sharedScale } from './legend';
import { Panel, type PanelDeps } from './panel';
import type { Catalog } from './types';

export interface AppOptions {
  /** pre-fetched catalog (test seam; production loads it from the API) */
  catalog?: Catalog;
  deps?: PanelDeps;
}

/**
 * Two independent panels plus the one piece of shared state: the legend
 * mode. "Shared color scale" recolors both maps from one min/max spanning
 * both surfaces; switching back restores each map's own dynamic scale.
 * Either way it's a pure client-side recolor — nothing is refetched.
 */
export class App {
  readonly panels: [Panel, Panel];
  readonly toggle: HTMLInputElement;

  constructor(root: HTMLElement, catalog: Catalog, opts: AppOptions = {}) {
    root.textContent = '';

    const header = document.createElement('header');
    header.className = 'app-header';
    const title = document.createElement('h1');
    title.textContent = 'Pollution scenario comparison';
    const version = document.createElement('span');
    version.className = 'catalog-version';
    version.textContent = `data ${catalog.version}`;

    this.toggle = document.createElement('input');
    this.toggle.type = 'checkbox';
    this.toggle.className = 'scale-toggle';
    this.toggle.addEventListener('change', () => this.refreshScales());
    const toggleLabel = document.createElement('label');
    toggleLabel.className = 'scale-toggle-label';
    toggleLabel.append(this.toggle, document.createTextNode(' Shared color scale'));

    header.append(title, version, toggleLabel);
    root.append(header);

    const main = document.createElement('main');
    main.className = 'panels';
    this.panels = [
      new Panel('left', catalog, opts.deps),
      new Panel('right', catalog, opts.deps),
    ];
    for (const panel of this.panels) {
      panel.onSurface = () => this.refreshScales();
      main.append(panel.el);
    }
    root.append(main);
  }

  refreshScales(): void {
    const loaded = this.panels.filter((p) => p.surfaceValues !== null);
    if (loaded.length === 0) return;
    if (this.toggle.checked) {
      const scale = sharedScale(loaded.map((p) => p.surfaceValues as number[]));
      for (const p of loaded) p.map.setScale(scale);
    } else {
      for (const p of loaded) p.map.setScale(dynamicScale(p.surfaceValues as number[]));
    }
  }
}

export async function mountApp(root: HTMLElement, opts: AppOptions = {}): Promise<App> {
  const catalog = opts.catalog ?? (await getCatalog());
  return new App(root, catalog, opts);
}
