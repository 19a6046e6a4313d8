/** Payload shapes of the scenario-service JSON API. */

export interface CityEntry {
  id: string;
  name: string;
  years: number[];
  pollutants: string[];
}

export interface Catalog {
  version: string;
  cities: CityEntry[];
  variables: string[];
  model_kinds: string[];
}

export interface ScenarioConfig {
  city: string;
  year: number;
  pollutant: string;
  model: string;
  factors: string[];
  seed?: number;
}

export interface Metrics {
  r2: number;
  mae: number;
  mse: number;
  rmse: number;
  mape: number | null;
  mape_excluded: number;
  pairs: [number, number][];
}

export type ScenarioPhase = 'pending' | 'running' | 'done' | 'failed';

export interface ScenarioDoc {
  id: string;
  status: ScenarioPhase;
  config: ScenarioConfig;
  /** failed scenarios only; shown to the user verbatim */
  reason?: string;
  metrics?: Metrics;
  train_rows?: number;
  test_rows?: number;
  dataset_version?: string;
  surface_url?: string;
}

export interface CreateResponse {
  id: string;
  status: string;
  cached: boolean;
}

export interface SurfaceFeature {
  type: 'Feature';
  geometry: { type: 'Point'; coordinates: [number, number] };
  properties: { value: number; bin: number };
}

export interface SurfaceCollection {
  type: 'FeatureCollection';
  features: SurfaceFeature[];
  properties: {
    scenario_id: string;
    pollutant: string;
    unit: string;
    spacing_m: number;
    legend: { mode: string; min: number; max: number; bins: number };
  };
}
