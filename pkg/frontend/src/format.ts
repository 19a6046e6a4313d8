/** Metric cards show two decimals; an absent value (null MAPE) shows "n/a". */
export function fmtMetric(v: number | null | undefined): string {
  if (v === null || v === undefined || Number.isNaN(v)) {
    return 'n/a';
  }
  return v.toFixed(2);
}

// Card order and labels; keys index into the metrics payload.
export const METRIC_CARDS: ReadonlyArray<readonly [string, string]> = [
  ['r2', 'R²'],
  ['mae', 'MAE'],
  ['mse', 'MSE'],
  ['rmse', 'RMSE'],
  ['mape', 'MAPE %'],
] as const;
