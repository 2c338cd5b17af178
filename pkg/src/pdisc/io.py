"""Mask rasterization and file formats.

Formats
-------
points CSV (v1)
    ``# pdisc v1, n=2, seed=7, gamma=150, nu=(1,3)`` then one point per line,
    coordinates written with ``%.17g`` so a read gives back the same doubles.
plain PBM (``P1``)
    width ``M_x``, height ``M_y``, ``1`` = sampled.  Rows run from the highest
    ``k_y`` index at the top down to ``k_y = 0`` at the bottom.
JSON
    points plus metadata; the sidecar (``*.meta.json``) carries everything
    needed to regenerate a pattern.  Wall-clock numbers go to a separate
    ``*.timing.json`` so repeated runs produce byte-identical sidecars.

k-space index convention: coordinate ``x`` in ``[-0.5, 0.5)`` maps to cell
``floor((x + 0.5) * M)``, so the center ``x = 0`` lands on ``floor(M/2)``.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np

FORMAT_VERSION = 1
_HEADER_RE = re.compile(r"^#\s*pdisc v(\d+)\s*,(.*)$")
_FIELD_RE = re.compile(r"\s*(\w+)=(\([^)]*\)|[^,]*)\s*(?:,|$)")


class FormatError(ValueError):
    """Malformed input file; ``lineno`` is 1-based when known."""

    def __init__(self, msg: str, lineno: int | None = None):
        self.lineno = lineno
        super().__init__(f"line {lineno}: {msg}" if lineno else msg)


@dataclass
class MaskRaster:
    occupancy: np.ndarray          # bool, indexed [i_0, i_1, ...]
    n_points: int
    n_duplicates: int              # points that fell on an already-occupied cell
    calib_cells: int = 0           # cells inside the calibration region
    calib_added: int = 0           # of those, cells not already hit by a point

    @property
    def sizes(self) -> tuple[int, ...]:
        return tuple(int(s) for s in self.occupancy.shape)

    @property
    def occupied(self) -> int:
        return int(self.occupancy.sum())

    @property
    def center(self) -> tuple[int, ...]:
        return tuple(s // 2 for s in self.sizes)


def parse_sizes(text: str, ndim: int | None = None) -> tuple[int, ...]:
    """``"256x256"`` -> ``(256, 256)``; a single number is repeated ``ndim`` times."""
    try:
        sizes = tuple(int(v) for v in str(text).lower().split("x"))
    except ValueError:
        raise ValueError(f"bad size {text!r}; expected e.g. 256x256") from None
    if len(sizes) == 1 and ndim:
        sizes = sizes * ndim
    if ndim and len(sizes) != ndim:
        raise ValueError(f"size {text!r} has {len(sizes)} axes, need {ndim}")
    if any(s < 1 for s in sizes):
        raise ValueError(f"sizes must be >= 1, got {text!r}")
    return sizes


def mask_indices(points, matrix) -> np.ndarray:
    """Per-point cell indices, ``clamp(floor((x + 0.5) * M), 0, M - 1)``."""
    pts = np.atleast_2d(np.asarray(points, dtype=np.float64))
    M = np.asarray(matrix, dtype=np.int64)
    if pts.size and pts.shape[1] != M.size:
        raise ValueError(f"points are {pts.shape[1]}-D, matrix has {M.size} axes")
    if pts.size and (np.any(pts < -0.5) or np.any(pts > 0.5) or not np.all(np.isfinite(pts))):
        raise ValueError("pattern must lie in the unit-centered cube [-0.5, 0.5]^n")
    idx = np.floor((pts + 0.5) * M).astype(np.int64)
    return np.clip(idx, 0, M - 1).reshape(-1, M.size)


def calibration_region(matrix, size, shape: str = "rect") -> np.ndarray:
    """Boolean block of full widths ``size`` (cells) centered on ``floor(M/2)``."""
    M = tuple(int(m) for m in matrix)
    size = tuple(int(s) for s in size)
    if len(size) != len(M) or any(s < 0 for s in size):
        raise ValueError(f"calibration size {size} does not match matrix {M}")
    out = np.zeros(M, dtype=bool)
    if shape == "rect":
        sl = tuple(slice(max(m // 2 - s // 2, 0), min(m // 2 - s // 2 + s, m)) for m, s in zip(M, size))
        out[sl] = True
    elif shape == "ellipse":
        if min(size) == 0:
            return out
        grids = np.meshgrid(*[(np.arange(m) - m // 2) / (s / 2.0) for m, s in zip(M, size)], indexing="ij")
        out = sum(g * g for g in grids) <= 1.0
    else:
        raise ValueError(f"unknown calibration shape {shape!r}")
    return out


def rasterize_mask(pattern_or_points, matrix, calib=None, calib_shape: str = "rect") -> MaskRaster:
    """Collapse points onto an ``M_0 x ... x M_{n-1}`` sampling mask.

    ``calib`` gives the full widths (in cells) of a fully sampled center
    region that is OR-ed in afterwards.
    """
    pts = getattr(pattern_or_points, "points", pattern_or_points)
    pts = np.asarray(pts, dtype=np.float64)
    M = tuple(int(m) for m in matrix)
    if any(m < 1 for m in M):
        raise ValueError(f"matrix sizes must be >= 1, got {M}")
    if pts.size == 0:
        pts = np.empty((0, len(M)))
    idx = mask_indices(pts, M)
    occ = np.zeros(M, dtype=bool)
    occ[tuple(idx.T)] = True
    n_pts = idx.shape[0]
    raster = MaskRaster(occ, n_pts, n_pts - int(occ.sum()))
    if calib is not None:
        region = calibration_region(M, calib, calib_shape)
        raster.calib_cells = int(region.sum())
        raster.calib_added = int((region & ~occ).sum())
        raster.occupancy = occ | region
    return raster


# -- points CSV ---------------------------------------------------------------

def _fmt_nu(nu) -> str:
    return "(" + ",".join(f"{float(v):g}" for v in nu) + ")"


def write_points_csv(pattern, path) -> Path:
    path = Path(path)
    meta = pattern.meta
    gamma = meta.field.get("gamma")
    lines = [f"# pdisc v{FORMAT_VERSION}, n={pattern.ndim}, seed={meta.seed}, "
             f"gamma={gamma!r}, nu={_fmt_nu(meta.nu)}"]
    lines += [",".join("%.17g" % v for v in row) for row in pattern.points]
    path.write_text("\n".join(lines) + "\n")
    return path


def parse_header(line: str, lineno: int = 1) -> dict:
    m = _HEADER_RE.match(line.strip())
    if not m:
        raise FormatError("missing '# pdisc v1' header", lineno)
    if int(m.group(1)) != FORMAT_VERSION:
        raise FormatError(f"unsupported format version {m.group(1)}", lineno)
    fields = {k: v.strip() for k, v in _FIELD_RE.findall(m.group(2)) if k}
    try:
        out = {"version": int(m.group(1)), "n": int(fields["n"])}
        out["seed"] = None if fields.get("seed") in (None, "None") else int(fields["seed"])
        out["gamma"] = None if fields.get("gamma") in (None, "None") else float(fields["gamma"])
        nu = fields.get("nu", "").strip("()")
        out["nu"] = tuple(float(v) for v in nu.split(",")) if nu else (1.0,) * out["n"]
    except (KeyError, ValueError) as exc:
        raise FormatError(f"bad header field ({exc})", lineno) from None
    if out["n"] < 1 or len(out["nu"]) != out["n"]:
        raise FormatError("header dimension and nu disagree", lineno)
    return out


def read_points_csv(path) -> tuple[np.ndarray, dict]:
    """Return ``(points, header)``; rows are checked against ``n``."""
    with open(path) as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise FormatError("empty file", 1)
    header = parse_header(lines[0], 1)
    n = header["n"]
    rows = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        parts = line.split(",")
        if len(parts) != n:
            raise FormatError(f"expected {n} columns, found {len(parts)}", lineno)
        try:
            row = [float(v) for v in parts]
        except ValueError:
            raise FormatError(f"non-numeric value in {line!r}", lineno) from None
        if not all(math.isfinite(v) for v in row):
            raise FormatError("non-finite coordinate", lineno)
        rows.append(row)
    pts = np.array(rows, dtype=np.float64).reshape(-1, n)
    return pts, header


# -- PBM ----------------------------------------------------------------------

def write_mask_pbm(mask, path, comment: str | None = None) -> Path:
    """Plain ``P1`` bitmap; axis 0 is x (columns), axis 1 is y (rows, flipped)."""
    occ = getattr(mask, "occupancy", mask)
    occ = np.asarray(occ, dtype=bool)
    if occ.ndim != 2:
        raise ValueError(f"PBM needs a 2-D mask, got {occ.ndim}-D; use write_mask_csv")
    width, height = occ.shape
    image = occ.T[::-1]                       # image row 0 = highest k_y
    out = ["P1"]
    if comment:
        out += [f"# {c}" for c in comment.splitlines()]
    out.append(f"{width} {height}")
    for row in image:
        bits = "".join("1" if b else "0" for b in row)
        out += [bits[i:i + 70] for i in range(0, len(bits), 70)]
    Path(path).write_text("\n".join(out) + "\n")
    return Path(path)


def read_mask_pbm(path) -> np.ndarray:
    """Inverse of :func:`write_mask_pbm`: returns occupancy indexed ``[i_x, i_y]``."""
    text = Path(path).read_text()
    tokens = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0]
        tokens += [(tok, lineno) for tok in line.split()]
    if not tokens or tokens[0][0] != "P1":
        raise FormatError("not a plain PBM (missing P1 magic)", 1)
    try:
        width, height = int(tokens[1][0]), int(tokens[2][0])
    except (IndexError, ValueError):
        raise FormatError("bad PBM size line", tokens[-1][1]) from None
    bits = []
    for tok, lineno in tokens[3:]:
        if set(tok) - {"0", "1"}:
            raise FormatError(f"bad PBM pixel {tok!r}", lineno)
        bits.extend(tok)
    if len(bits) != width * height:
        raise FormatError(f"expected {width * height} pixels, found {len(bits)}")
    image = np.array([b == "1" for b in bits], dtype=bool).reshape(height, width)
    return image[::-1].T.copy()


def write_mask_csv(mask, path) -> Path:
    """Any-dimensional mask as a list of occupied index tuples."""
    occ = np.asarray(getattr(mask, "occupancy", mask), dtype=bool)
    idx = np.argwhere(occ)
    head = "# pdisc mask v1, sizes=" + "x".join(str(s) for s in occ.shape)
    cols = ",".join(f"i{d}" for d in range(occ.ndim))
    body = "\n".join(",".join(str(v) for v in row) for row in idx)
    Path(path).write_text(head + "\n" + cols + "\n" + (body + "\n" if body else ""))
    return Path(path)


# -- JSON ---------------------------------------------------------------------

def _dump(obj, path) -> Path:
    Path(path).write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")
    return Path(path)


def sidecar_dict(pattern, mask: MaskRaster | None = None, extra: dict | None = None) -> dict:
    """Deterministic metadata: no wall-clock values."""
    from . import __version__

    meta = pattern.meta
    out = {
        "library_version": __version__,
        "format_version": FORMAT_VERSION,
        "algorithm": meta.algorithm,
        "seed": meta.seed,
        "k": meta.k,
        "gamma": meta.field.get("gamma"),
        "field": meta.field,
        "rule": meta.rule,
        "dims": pattern.ndim,
        "domain": {"lo": list(pattern.domain.lo), "hi": list(pattern.domain.hi)},
        "nu": list(meta.nu),
        "points": len(pattern),
        "stats": meta.stats,
        "occupied_cells": None,
        "acceleration_rate": None,
    }
    if mask is not None:
        out["matrix"] = list(mask.sizes)
        out["center_index"] = list(mask.center)
        out["occupied_cells"] = mask.occupied
        out["acceleration_rate"] = math.prod(mask.sizes) / mask.occupied if mask.occupied else None
        out["duplicates"] = mask.n_duplicates
        out["calibration_cells"] = mask.calib_cells
    if extra:
        out.update(extra)
    return out


def write_sidecar(pattern, path, mask: MaskRaster | None = None, extra: dict | None = None) -> Path:
    return _dump(sidecar_dict(pattern, mask, extra), path)


def write_timing(pattern, path) -> Path:
    m = pattern.meta
    return _dump({"wall_time": m.wall_time, "grid_build_time": m.grid_build_time}, path)


def write_points_json(pattern, path) -> Path:
    out = sidecar_dict(pattern)
    out["coordinates"] = [[float(v) for v in row] for row in pattern.points]
    return _dump(out, path)


def read_points_json(path) -> tuple[np.ndarray, dict]:
    data = json.loads(Path(path).read_text())
    if "coordinates" not in data:
        raise FormatError("JSON file has no 'coordinates' array")
    pts = np.array(data.pop("coordinates"), dtype=np.float64).reshape(-1, int(data["dims"]))
    return pts, data
