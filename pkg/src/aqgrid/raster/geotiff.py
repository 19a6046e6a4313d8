"""Minimal single-band GeoTIFF codec.

Reads uncompressed baseline TIFFs — strip or tile organized, either byte
order, integer or IEEE-float samples — and georeferences them from the
ModelPixelScale (33550) + ModelTiepoint (33922) tags, honoring a
GDAL_NODATA (42113) sentinel. Writes little-endian float64 strips with
NaN as nodata and a minimal WGS84 GeoKey directory. Anything fancier
(compression, palettes, multiple samples per pixel) is out of scope and
rejected with a descriptive error.
"""

from __future__ import annotations

import math
import struct
from pathlib import Path

import numpy as np

from aqgrid.errors import (
    BandCountError,
    GeoreferencingError,
    UnreadableFileError,
)
from aqgrid.raster.grid import GeoBounds, GridSpec
from aqgrid.raster.layer import RasterLayer, Temporal

# TIFF tag ids
_IMAGE_WIDTH = 256
_IMAGE_LENGTH = 257
_BITS_PER_SAMPLE = 258
_COMPRESSION = 259
_PHOTOMETRIC = 262
_STRIP_OFFSETS = 273
_SAMPLES_PER_PIXEL = 277
_ROWS_PER_STRIP = 278
_STRIP_BYTE_COUNTS = 279
_PLANAR_CONFIG = 284
_TILE_WIDTH = 322
_TILE_LENGTH = 323
_TILE_OFFSETS = 324
_TILE_BYTE_COUNTS = 325
_SAMPLE_FORMAT = 339
_MODEL_PIXEL_SCALE = 33550
_MODEL_TIEPOINT = 33922
_GEO_KEY_DIRECTORY = 34735
_GDAL_NODATA = 42113

# field type -> (struct code, byte size)
_FIELD_TYPES = {
    1: ("B", 1),   # BYTE
    2: ("c", 1),   # ASCII
    3: ("H", 2),   # SHORT
    4: ("I", 4),   # LONG
    6: ("b", 1),   # SBYTE
    8: ("h", 2),   # SSHORT
    9: ("i", 4),   # SLONG
    11: ("f", 4),  # FLOAT
    12: ("d", 8),  # DOUBLE
}

# (sample_format, bits) -> numpy dtype char
_DTYPES = {
    (1, 8): "u1", (1, 16): "u2", (1, 32): "u4",
    (2, 8): "i1", (2, 16): "i2", (2, 32): "i4",
    (3, 32): "f4", (3, 64): "f8",
}


def _read_entries(data: bytes, path: str, bo: str):
    """Parse the first IFD into {tag: list-of-values}."""
    (ifd_off,) = struct.unpack(bo + "I", data[4:8])
    if ifd_off + 2 > len(data):
        raise UnreadableFileError(path, "IFD offset past end of file")
    (n_entries,) = struct.unpack(bo + "H", data[ifd_off:ifd_off + 2])
    entries = {}
    for i in range(n_entries):
        off = ifd_off + 2 + 12 * i
        if off + 12 > len(data):
            raise UnreadableFileError(path, "truncated IFD entry")
        tag, ftype, count = struct.unpack(bo + "HHI", data[off:off + 8])
        if ftype not in _FIELD_TYPES:
            continue  # skip exotic field types we never need
        code, size = _FIELD_TYPES[ftype]
        total = size * count
        if total <= 4:
            raw = data[off + 8:off + 8 + total]
        else:
            (val_off,) = struct.unpack(bo + "I", data[off + 8:off + 12])
            if val_off + total > len(data):
                raise UnreadableFileError(path, f"tag {tag} data past end of file")
            raw = data[val_off:val_off + total]
        if ftype == 2:
            entries[tag] = raw.split(b"\x00")[0].decode("ascii", "replace")
        else:
            entries[tag] = list(struct.unpack(bo + code * count, raw))
    return entries


def _single(entries, tag, default=None):
    v = entries.get(tag, default)
    if isinstance(v, list):
        return v[0] if v else default
    return v


def read_geotiff(path, variable: str = "", temporal: Temporal = Temporal.static()) -> RasterLayer:
    p = Path(path)
    try:
        data = p.read_bytes()
    except OSError as exc:
        raise UnreadableFileError(str(p), f"cannot read file ({exc})") from exc
    if len(data) < 8:
        raise UnreadableFileError(str(p), "too short to be a TIFF")
    if data[:2] == b"II":
        bo = "<"
    elif data[:2] == b"MM":
        bo = ">"
    else:
        raise UnreadableFileError(str(p), "not a TIFF (bad byte-order mark)")
    (magic,) = struct.unpack(bo + "H", data[2:4])
    if magic != 42:
        raise UnreadableFileError(str(p), f"not a TIFF (magic {magic}, expected 42)")

    entries = _read_entries(data, str(p), bo)

    cols = _single(entries, _IMAGE_WIDTH)
    rows = _single(entries, _IMAGE_LENGTH)
    if not cols or not rows:
        raise UnreadableFileError(str(p), "missing image dimensions")

    spp = int(_single(entries, _SAMPLES_PER_PIXEL, 1))
    if spp != 1:
        raise BandCountError(str(p), f"expected a single band, file has {spp}")
    if int(_single(entries, _PLANAR_CONFIG, 1)) != 1:
        raise UnreadableFileError(str(p), "unsupported planar configuration")
    comp = int(_single(entries, _COMPRESSION, 1))
    if comp != 1:
        raise UnreadableFileError(str(p), f"unsupported compression {comp}")

    bits = int(_single(entries, _BITS_PER_SAMPLE, 1))
    fmt = int(_single(entries, _SAMPLE_FORMAT, 1))
    dtype = _DTYPES.get((fmt, bits))
    if dtype is None:
        raise UnreadableFileError(
            str(p), f"unsupported sample type (format={fmt}, bits={bits})"
        )
    np_dtype = np.dtype(bo + dtype)

    if _TILE_OFFSETS in entries:
        values = _read_tiled(data, entries, rows, cols, np_dtype, str(p))
    elif _STRIP_OFFSETS in entries:
        values = _read_strips(data, entries, rows, cols, np_dtype, str(p))
    else:
        raise UnreadableFileError(str(p), "no strip or tile offsets present")
    values = values.astype(np.float64)

    scale = entries.get(_MODEL_PIXEL_SCALE)
    tiepoint = entries.get(_MODEL_TIEPOINT)
    if scale is None or len(scale) < 2:
        raise GeoreferencingError(str(p), "missing ModelPixelScale tag")
    if tiepoint is None or len(tiepoint) < 6:
        raise GeoreferencingError(str(p), "missing ModelTiepoint tag")
    sx, sy = float(scale[0]), float(scale[1])
    if sx <= 0 or sy <= 0:
        raise GeoreferencingError(str(p), f"non-positive pixel scale ({sx}, {sy})")
    ti, tj, _tk, tx, ty = (float(v) for v in tiepoint[:5])
    min_lon = tx - ti * sx
    max_lat = ty + tj * sy
    max_lon = min_lon + cols * sx
    min_lat = max_lat - rows * sy
    try:
        bounds = GeoBounds(min_lon, max_lon, min_lat, max_lat)
        grid = GridSpec(
            bounds=bounds, rows=rows, cols=cols,
            cell_size_m=bounds.lat_extent_m / rows,
        )
    except Exception as exc:
        raise GeoreferencingError(str(p), f"invalid georeferencing: {exc}") from exc

    nodata = entries.get(_GDAL_NODATA)
    if nodata is not None:
        try:
            sentinel = float(str(nodata).strip())
        except ValueError:
            sentinel = math.nan
        if not math.isnan(sentinel):
            values[values == sentinel] = np.nan

    return RasterLayer(grid=grid, values=values, variable=variable, temporal=temporal)


def _read_strips(data, entries, rows, cols, np_dtype, path):
    offsets = entries[_STRIP_OFFSETS]
    counts = entries.get(_STRIP_BYTE_COUNTS)
    if counts is None or len(counts) != len(offsets):
        raise UnreadableFileError(path, "strip byte counts missing or mismatched")
    buf = bytearray()
    for off, cnt in zip(offsets, counts):
        if off + cnt > len(data):
            raise UnreadableFileError(path, "strip data past end of file")
        buf += data[off:off + cnt]
    need = rows * cols * np_dtype.itemsize
    if len(buf) < need:
        raise UnreadableFileError(path, f"pixel data truncated ({len(buf)} < {need} bytes)")
    return np.frombuffer(bytes(buf[:need]), dtype=np_dtype).reshape(rows, cols)


def _read_tiled(data, entries, rows, cols, np_dtype, path):
    tw = int(_single(entries, _TILE_WIDTH, 0))
    tl = int(_single(entries, _TILE_LENGTH, 0))
    if tw <= 0 or tl <= 0:
        raise UnreadableFileError(path, "tiled file missing tile dimensions")
    offsets = entries[_TILE_OFFSETS]
    counts = entries.get(_TILE_BYTE_COUNTS)
    if counts is None or len(counts) != len(offsets):
        raise UnreadableFileError(path, "tile byte counts missing or mismatched")
    tiles_across = -(-cols // tw)
    tiles_down = -(-rows // tl)
    if len(offsets) != tiles_across * tiles_down:
        raise UnreadableFileError(
            path, f"expected {tiles_across * tiles_down} tiles, file lists {len(offsets)}"
        )
    out = np.empty((rows, cols), dtype=np_dtype.newbyteorder("="))
    tile_bytes = tw * tl * np_dtype.itemsize
    for ty in range(tiles_down):
        for tx in range(tiles_across):
            off = offsets[ty * tiles_across + tx]
            cnt = counts[ty * tiles_across + tx]
            if cnt < tile_bytes or off + cnt > len(data):
                raise UnreadableFileError(path, "tile data truncated")
            tile = np.frombuffer(data[off:off + tile_bytes], dtype=np_dtype).reshape(tl, tw)
            r0, c0 = ty * tl, tx * tw
            r1, c1 = min(r0 + tl, rows), min(c0 + tw, cols)
            out[r0:r1, c0:c1] = tile[: r1 - r0, : c1 - c0]
    return out


def write_geotiff(layer: RasterLayer, path) -> None:
    """Write a little-endian single-band float64 strip TIFF with geo tags."""
    grid = layer.grid
    rows, cols = grid.rows, grid.cols
    pixel_data = np.ascontiguousarray(layer.values, dtype="<f8").tobytes()

    geo_keys = [
        1, 1, 0, 3,        # version 1, revision 1.0, three keys follow
        1024, 0, 1, 2,     # GTModelType = geographic
        1025, 0, 1, 1,     # GTRasterType = pixel-is-area
        2048, 0, 1, 4326,  # geographic CRS = WGS84
    ]
    scale = [grid.cell_width_deg, grid.cell_height_deg, 0.0]
    tiepoint = [0.0, 0.0, 0.0, grid.bounds.min_lon, grid.bounds.max_lat, 0.0]
    nodata_ascii = b"nan\x00"

    # Layout: header(8) | IFD | out-of-line tag data | pixel data
    tags = []  # (tag, type, count, packed-or-offset-resolver)
    extra = bytearray()
    extra_base_holder = {}

    def _defer(payload: bytes):
        pos = len(extra)
        extra.extend(payload)
        if len(extra) % 2:
            extra.extend(b"\x00")
        return lambda: extra_base_holder["base"] + pos

    def add(tag, ftype, values, raw=None):
        code, _size = _FIELD_TYPES[ftype]
        if raw is None:
            raw = struct.pack("<" + code * len(values), *values)
            count = len(values)
        else:
            count = len(raw)  # ASCII count includes the terminating NUL
        if len(raw) <= 4:
            tags.append((tag, ftype, count, raw.ljust(4, b"\x00")))
        else:
            tags.append((tag, ftype, count, _defer(raw)))

    add(_IMAGE_WIDTH, 4, [cols])
    add(_IMAGE_LENGTH, 4, [rows])
    add(_BITS_PER_SAMPLE, 3, [64])
    add(_COMPRESSION, 3, [1])
    add(_PHOTOMETRIC, 3, [1])
    add(_STRIP_OFFSETS, 4, [0])  # patched below
    add(_SAMPLES_PER_PIXEL, 3, [1])
    add(_ROWS_PER_STRIP, 4, [rows])
    add(_STRIP_BYTE_COUNTS, 4, [len(pixel_data)])
    add(_SAMPLE_FORMAT, 3, [3])
    add(_MODEL_PIXEL_SCALE, 12, scale)
    add(_MODEL_TIEPOINT, 12, tiepoint)
    add(_GEO_KEY_DIRECTORY, 3, geo_keys)
    add(_GDAL_NODATA, 2, None, raw=nodata_ascii)

    tags.sort(key=lambda t: t[0])
    ifd_size = 2 + 12 * len(tags) + 4
    extra_base_holder["base"] = 8 + ifd_size
    pixel_offset = 8 + ifd_size + len(extra)
    if pixel_offset % 2:
        extra += b"\x00"
        pixel_offset += 1

    out = bytearray()
    out += struct.pack("<2sHI", b"II", 42, 8)
    out += struct.pack("<H", len(tags))
    for tag, ftype, count, val in tags:
        if callable(val):
            val = struct.pack("<I", val())
        if tag == _STRIP_OFFSETS:
            val = struct.pack("<I", pixel_offset)
        out += struct.pack("<HHI", tag, ftype, count) + val
    out += struct.pack("<I", 0)  # no next IFD
    out += extra
    out += pixel_data
    Path(path).write_bytes(bytes(out))
