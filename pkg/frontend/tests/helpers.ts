import type { Catalog, ScenarioDoc, SurfaceCollection } from '../src/types';

export function makeCatalog(): Catalog {
  return {
    version: 'fixture-1',
    cities: [
      { id: 'fixtureville', name: 'Fixtureville', years: [2019], pollutants: ['no2'] },
      { id: 'grovetown', name: 'Grovetown', years: [2018, 2019], pollutants: ['no2', 'pm25'] },
    ],
    variables: [
      'no2_column', 'precipitation', 'temperature', 'wind_speed',
      'population', 'elevation', 'night_lights',
    ],
    model_kinds: ['linear', 'random_forest', 'svr', 'gradient_boosting'],
  };
}

export function doneDoc(id: string, over: Partial<ScenarioDoc> = {}): ScenarioDoc {
  return {
    id,
    status: 'done',
    config: {
      city: 'fixtureville',
      year: 2019,
      pollutant: 'no2',
      model: 'linear',
      factors: ['no2_column', 'temperature'],
      seed: 0,
    },
    metrics: {
      r2: 0.96,
      mae: 1.2,
      mse: 2.3,
      rmse: 1.52,
      mape: 8.15,
      mape_excluded: 0,
      pairs: [[10, 11], [12, 11.5], [14, 13.8]],
    },
    train_rows: 84,
    test_rows: 36,
    surface_url: `/api/scenarios/${id}/surface`,
    ...over,
  };
}

/**
 * Lattice GeoJSON shaped like the service's surface payload: row-major
 * from the north-west corner, square metric cells.
 */
export function makeSurface(
  values: number[],
  opts: { nx?: number; spacing?: number } = {},
): SurfaceCollection {
  const nx = opts.nx ?? Math.max(1, Math.round(Math.sqrt(values.length)));
  const spacing = opts.spacing ?? 3000;
  const dLat = spacing / 111320;
  const dLon = spacing / (111320 * Math.cos((12.9 * Math.PI) / 180));
  let lo = Infinity;
  let hi = -Infinity;
  for (const v of values) {
    if (v < lo) lo = v;
    if (v > hi) hi = v;
  }
  return {
    type: 'FeatureCollection',
    features: values.map((v, i) => ({
      type: 'Feature',
      geometry: {
        type: 'Point',
        coordinates: [77.4 + (i % nx) * dLon, 13.0 - Math.floor(i / nx) * dLat],
      },
      properties: { value: v, bin: 0 },
    })),
    properties: {
      scenario_id: 'scn0000deadbeef0',
      pollutant: 'no2',
      unit: 'ug/m3',
      spacing_m: spacing,
      legend: { mode: 'dynamic', min: lo, max: hi, bins: 9 },
    },
  };
}
