"""Grid-to-grid aggregation and temporal compositing."""

from __future__ import annotations

import numpy as np

from aqgrid.errors import ValidationError
from aqgrid.raster.grid import GridSpec, edge_tied_indices
from aqgrid.raster.layer import RasterLayer, Temporal


def resample_to_grid(layer: RasterLayer, target: GridSpec) -> RasterLayer:
    """Aggregate a layer onto another grid.

    Each target cell takes the mean of the source cells whose centers
    fall inside it, ignoring nodata. Target cells that receive no source
    center stay nodata. Source centers landing exactly on a target cell
    edge count toward the smaller row-major index.
    """
    src = layer.grid
    if not src.bounds.overlaps(target.bounds):
        raise ValidationError(
            f"source bounds {src.bounds} disjoint from target {target.bounds}"
        )

    src_lats = src.lat_centers()
    src_lons = src.lon_centers()
    tb = target.bounds
    row_in = (src_lats >= tb.min_lat) & (src_lats <= tb.max_lat)
    col_in = (src_lons >= tb.min_lon) & (src_lons <= tb.max_lon)

    tr = edge_tied_indices(
        (tb.max_lat - src_lats[row_in]) / target.cell_height_deg, target.rows
    )
    tc = edge_tied_indices(
        (src_lons[col_in] - tb.min_lon) / target.cell_width_deg, target.cols
    )

    vals = layer.values[np.ix_(row_in, col_in)]
    flat_idx = (tr[:, None] * target.cols + tc[None, :]).ravel()
    flat_vals = vals.ravel()
    ok = ~np.isnan(flat_vals)

    sums = np.zeros(target.rows * target.cols)
    counts = np.zeros(target.rows * target.cols)
    np.add.at(sums, flat_idx[ok], flat_vals[ok])
    np.add.at(counts, flat_idx[ok], 1.0)

    out = np.full(target.rows * target.cols, np.nan)
    hit = counts > 0
    out[hit] = sums[hit] / counts[hit]
    return RasterLayer(
        grid=target,
        values=out.reshape(target.shape),
        variable=layer.variable,
        temporal=layer.temporal,
    )


def temporal_composite(layers) -> RasterLayer:
    """Per-cell nodata-ignoring mean across layers of one variable.

    Twelve (or fewer) monthly layers of one year collapse to that year's
    composite; identically tagged layers keep their tag.
    """
    layers = list(layers)
    if not layers:
        raise ValidationError("temporal_composite needs at least one layer")
    first = layers[0]
    for ly in layers[1:]:
        if ly.variable != first.variable:
            raise ValidationError(
                f"mixed variables in composite: {first.variable!r} vs {ly.variable!r}"
            )
        if ly.grid.shape != first.grid.shape or not ly.grid.approx_equals(first.grid):
            raise ValidationError("composite layers must share one grid")

    # float addition is not associative: canonicalize the summation order
    # so equal input sets give bit-equal composites regardless of listing
    layers.sort(key=lambda ly: (ly.temporal.key(), ly.values.tobytes()))
    stack = np.stack([ly.values for ly in layers])
    counts = np.sum(~np.isnan(stack), axis=0)
    sums = np.nansum(stack, axis=0)
    out = np.full(first.grid.shape, np.nan)
    hit = counts > 0
    out[hit] = sums[hit] / counts[hit]

    tags = {ly.temporal for ly in layers}
    years = {t.year for t in tags}
    if len(tags) == 1:
        temporal = first.temporal
    elif len(years) == 1 and all(t.month > 0 for t in tags):
        temporal = Temporal.of_year(next(iter(years)))
    else:
        raise ValidationError(f"composite inputs span mixed periods: {sorted(tags)}")

    return RasterLayer(
        grid=first.grid, values=out, variable=first.variable, temporal=temporal
    )
