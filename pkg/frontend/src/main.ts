import { mountApp } from './app';

const root = document.getElementById('app');
if (root) {
  mountApp(root).catch((err: unknown) => {
    root.textContent = `failed to load the data catalog: ${
      err instanceof Error ? err.message : String(err)
    }`;
  });
}
